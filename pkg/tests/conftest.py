from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hdtalang.modelio import bundled_path, load_model  # noqa: E402

ACCEPTANCE: dict[int, tuple[str, bool, float]] = {}


def bundled(name: str):
    return load_model(bundled_path(name))


@pytest.fixture(scope="session")
def models():
    names = ["fig2.hda", "fig3.hdta", "fig4.hdta", "fig8left.hdta", "fig8right.hdta"]
    return {n.split(".")[0]: bundled(n) for n in names}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, secs = ACCEPTANCE[n]
        terminalreporter.line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {title} ({secs:.2f}s)")
