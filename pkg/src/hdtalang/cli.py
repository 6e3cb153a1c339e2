"""Command-line interface.

Exit codes: 0 success or positive answer, 1 negative answer, 2 error.
Errors go to stderr as ``error[<kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .inclusion import (
    build_region_automaton,
    enumerate_language,
    format_region_automaton,
    untimed_inclusion,
    untimed_member,
)
from .ipomsets import START, TERM
from .modelio import Model, bundled_path, dump_model, load_model
from .models import ModelError, TimedAutomaton, translate_ta
from .render import render_svg, render_text
from .semantics import (
    Fuel,
    Path as RunPath,
    action_move,
    delay_move,
    enabled_action_moves,
    ev_path,
    ev_path_idword,
    explore,
    initial_configurations,
    random_walk,
    ta_explore,
)
from .syntax import SyntaxErr, format_compact, parse_idword, parse_ipomset, parse_tipomset
from .timed import Tipomset, as_rational, idword_to_tipomset, tipomset_to_idword

RECORDS_HEADER = "# hdtalang-records v1"

log = logging.getLogger("hdtalang")


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    q = bundled_path(path)
    if q is not None:
        return q
    raise CliError("io", f"{path}: no such file (and no bundled model of that name)")


def _load(path: str) -> Model:
    try:
        return load_model(_resolve(path))
    except ModelError as exc:
        raise CliError("parse", str(exc)) from None


def _load_valid(path: str) -> Model:
    model = _load(path)
    problems = model.validate()
    if problems:
        raise CliError("validation", f"{path}: " + "; ".join(problems))
    for w in getattr(model, "warnings", lambda: [])():
        print(f"warning: {w}", file=sys.stderr)
    return model


def _read_text(path: str) -> str:
    try:
        return _resolve(path).read_text()
    except OSError as exc:
        raise CliError("io", f"{path}: {exc.strerror}") from None


def _read_tipomset(path: str) -> Tipomset:
    text = " ".join(line for line in _read_text(path).splitlines() if not line.lstrip().startswith("#")).strip()
    try:
        if text.startswith("{"):
            return parse_tipomset(text)
        return idword_to_tipomset(parse_idword(text))
    except (SyntaxErr, ValueError) as exc:
        raise CliError("parse", f"{path}: {exc}") from None


def _fuel(args) -> Fuel:
    try:
        grid = as_rational(args.delay_grid) if args.delay_grid else None
        horizon = as_rational(args.max_duration) if args.max_duration else None
    except ValueError as exc:
        raise CliError("usage", str(exc)) from None
    if args.fuel_actions < 1:
        raise CliError("usage", "--fuel-actions must be positive")
    if grid is not None and grid <= 0:
        raise CliError("usage", "--delay-grid must be positive")
    if horizon is not None and horizon <= 0:
        raise CliError("usage", "--max-duration must be positive")
    if args.workers < 1:
        raise CliError("usage", "--workers must be positive")
    return Fuel(
        max_actions=args.fuel_actions,
        delay_grid=grid,
        max_duration=horizon,
        region_delays=not args.no_region_delays,
        dedupe=args.dedupe,
        workers=args.workers,
    )


def _emit_records(kind: str, items: Sequence[str]) -> None:
    print(RECORDS_HEADER)
    for item in items:
        print(f"{kind}\t{item}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    model = _load(args.model)
    problems = model.validate()
    for w in getattr(model, "warnings", lambda: [])():
        print(f"warning: {w}", file=sys.stderr)
    if problems:
        for p in problems:
            print(f"error[validation]: {p}", file=sys.stderr)
        return 2
    print("OK")
    return 0


def _parse_script(model, text: str) -> RunPath:
    starts = initial_configurations(model)
    if not starts:
        raise CliError("semantics", "no initial configuration satisfies its invariant")
    path = RunPath(starts[0])
    for tok in text.split():
        conf = path.end
        if tok[0] in "+-":
            kind = START if tok[0] == "+" else TERM
            mv = action_move(model, conf, kind, [n for n in tok[1:].split(",") if n])
            if mv is None:
                raise CliError("semantics", f"step {tok!r} is not enabled at {conf}")
        else:
            try:
                mv = delay_move(model, conf, as_rational(tok))
            except ValueError as exc:
                raise CliError("parse", f"bad script token {tok!r}: {exc}") from None
            if mv is None:
                raise CliError("semantics", f"delay {tok} violates the invariant of {conf.cell}")
        path = path.then(mv)
    return path


def cmd_simulate(args) -> int:
    model = _load_valid(args.model)
    if isinstance(model, TimedAutomaton):
        model = translate_ta(model)
    model = model.as_hdta()
    if args.script is not None:
        path = _parse_script(model, args.script)
    else:
        path = random_walk(model, random.Random(args.seed), steps=args.steps)
        if path is None:
            raise CliError("semantics", "no initial configuration satisfies its invariant")
    print(f"start {path.start}")
    for mv in path.moves:
        print(f"{mv.label()} -> {mv.target}")
    accepting = path.is_accepting(model)
    print(f"accepting: {'yes' if accepting else 'no'}")
    print(f"tipomset: {ev_path(model, path)}")
    print(f"idword: {ev_path_idword(model, path)}")
    if args.show_enabled:
        for mv in enabled_action_moves(model, path.end):
            print(f"enabled: {mv.label()}")
    return 0


def cmd_lang(args) -> int:
    model = _load_valid(args.model)
    fuel = _fuel(args)
    if isinstance(model, TimedAutomaton):
        res = ta_explore(model, fuel)
        items = [str(w) for w in sorted(res.language, key=lambda w: w.sort_key())]
        kind = "delayword"
    else:
        res = explore(model, fuel)
        if args.words:
            items = [str(tipomset_to_idword(t)) for t in res.sorted()]
            kind = "idword"
        else:
            items = [str(t.canonical()) for t in res.sorted()]
            kind = "tipomset"
    if args.format == "records":
        _emit_records(kind, items)
    else:
        for item in items:
            print(item)
    if res.truncated:
        print("note: fuel exhausted; longer paths were not explored", file=sys.stderr)
    return 0


def cmd_untime(args) -> int:
    text = _read_text(args.target)
    first = next((ln.split()[0] for ln in text.splitlines() if ln.split() and not ln.startswith("#")), "")
    if first in ("hdta", "hda", "ta"):
        model = _load_valid(args.target)
        if isinstance(model, TimedAutomaton):
            model = translate_ta(model)
        lang = sorted(enumerate_language(model, args.max_letters), key=lambda p: p.sort_key())
        items = [format_compact(p) if not args.full else str(p.canonical()) for p in lang]
    else:
        items = [str(_read_tipomset(args.target).ipomset.canonical())]
    if args.format == "records":
        _emit_records("ipomset", items)
    else:
        for item in items:
            print(item)
    return 0


def cmd_regions(args) -> int:
    model = _load_valid(args.model)
    if isinstance(model, TimedAutomaton):
        model = translate_ta(model)
    fsa = build_region_automaton(model, full=args.full)
    sys.stdout.write(format_region_automaton(fsa))
    return 0


def cmd_member(args) -> int:
    model = _load_valid(args.model)
    if isinstance(model, TimedAutomaton):
        model = translate_ta(model)
    text = _read_text(args.ipomset) if Path(args.ipomset).exists() else args.ipomset
    text = " ".join(line for line in text.splitlines() if not line.lstrip().startswith("#")).strip()
    try:
        p = parse_ipomset(text)
    except SyntaxErr as exc:
        raise CliError("parse", str(exc)) from None
    if untimed_member(model, p):
        print("MEMBER")
        return 0
    print("NOT-MEMBER")
    return 1


def cmd_include(args) -> int:
    m1 = _load_valid(args.model1)
    m2 = _load_valid(args.model2)
    m1 = translate_ta(m1) if isinstance(m1, TimedAutomaton) else m1
    m2 = translate_ta(m2) if isinstance(m2, TimedAutomaton) else m2
    res = untimed_inclusion(m1, m2, down_closed=args.down_closed, max_letters=args.max_letters)
    if res.included:
        print("INCLUDED")
        return 0
    print("NOT-INCLUDED")
    print(f"counterexample: {format_compact(res.counterexample)}")
    print(f"ipomset: {res.counterexample.canonical()}")
    return 1


def cmd_translate(args) -> int:
    model = _load_valid(args.model)
    if not isinstance(model, TimedAutomaton):
        raise CliError("usage", f"{args.model} is not a timed automaton")
    text = dump_model(translate_ta(model))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_render(args) -> int:
    t = _read_tipomset(args.file)
    if args.format == "svg":
        sys.stdout.write(render_svg(t))
    elif args.format == "records":
        _emit_records("tipomset", [str(t)])
    else:
        sys.stdout.write(render_text(t))
    return 0


# ---------------------------------------------------------------------------


def _add_fuel(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fuel-actions", type=int, default=6, metavar="N", help="maximum number of action moves")
    p.add_argument("--delay-grid", metavar="P/Q", help="also try delays on this grid")
    p.add_argument("--max-duration", metavar="P/Q", help="bound on the total duration")
    p.add_argument("--no-region-delays", action="store_true", help="do not try one delay per region")
    p.add_argument("--dedupe", choices=("exact", "region"), default="exact")
    p.add_argument("--workers", type=int, default=1, metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdtalang", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run one path and print its moves and content")
    p.add_argument("model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--script", help='moves such as "5 +a 2 +b 1 -b 1.5 -a 2.5"')
    p.add_argument("--show-enabled", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lang", help="bounded language exploration")
    p.add_argument("model")
    _add_fuel(p)
    p.add_argument("--words", action="store_true", help="print idwords instead of tipomsets")
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lang)

    p = sub.add_parser("untime", help="untimed language of a model, or untiming of a tipomset file")
    p.add_argument("target")
    p.add_argument("--max-letters", type=int, default=10)
    p.add_argument("--full", action="store_true", help="always use the full ipomset syntax")
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.set_defaults(func=cmd_untime)

    p = sub.add_parser("regions", help="dump the region automaton")
    p.add_argument("model")
    p.add_argument("--full", action="store_true", help="all states, not only reachable ones")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("member", help="untimed membership of an ipomset")
    p.add_argument("model")
    p.add_argument("ipomset", help="file holding an ipomset, or the ipomset itself")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("include", help="untimed language inclusion")
    p.add_argument("model1")
    p.add_argument("model2")
    p.add_argument("--down-closed", action="store_true", help="compare against the subsumption closure (bounded)")
    p.add_argument("--max-letters", type=int, default=8)
    p.set_defaults(func=cmd_include)

    p = sub.add_parser("translate-ta", help="translate a timed automaton into an HDTA")
    p.add_argument("model")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("render-intervals", help="Gantt diagram of a tipomset or idword file")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "svg", "records"), default="text")
    p.set_defaults(func=cmd_render)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error[{exc.kind}]: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # output cut short by a pager or head; not an error of ours
        sys.stderr.close()
        return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
