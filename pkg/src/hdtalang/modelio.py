"""Line-oriented model files.

Each line is split with :mod:`shlex`; ``#`` starts a comment.  The first
directive names the kind of model::

    hdta <name> | hda <name> | ta <name>
    alphabet a b
    clocks x y                               # hdta and ta only
    cell <name> events "a<b" [inv "<phi>"] [exit "x y"]    # hda / hdta
    face <cell> lower|upper "<events>" <target>            # hda / hdta
    location <name> [inv "<phi>"]                          # ta
    edge <src> "<guard>" <label> "<resets>" <dst>          # ta
    init <cell> ...
    accept <cell> ...

``<events>`` lists event names of the cell's conclist separated by spaces
or commas; a repeated label is addressed as ``label#k``.  Constraints use
``x<=4 & y>=1`` and ``true``.  Faces not listed are obtained by composing
the listed ones.
"""

from __future__ import annotations

import shlex
from importlib import resources
from pathlib import Path

from .clocks import ClockConstraint, ConstraintError
from .ipomsets import Conclist, IpomsetError
from .models import HDA, HDTA, LOWER, UPPER, Edge, ModelError, TimedAutomaton

Model = HDA | HDTA | TimedAutomaton


def _names(text: str) -> list[str]:
    return [n for n in text.replace(",", " ").split() if n]


def _options(args: list[str], allowed: set[str], lineno: int) -> dict[str, str]:
    if len(args) % 2:
        raise ModelError(f"line {lineno}: options come in 'key value' pairs")
    opts = dict(zip(args[::2], args[1::2]))
    unknown = set(opts) - allowed
    if unknown:
        raise ModelError(f"line {lineno}: unknown options {sorted(unknown)}")
    return opts


def parse_model(text: str) -> Model:
    kind = name = None
    alphabet: list[str] = []
    clocks: list[str] = []
    cells: dict[str, Conclist] = {}
    inv: dict[str, ClockConstraint] = {}
    exits: dict[str, frozenset[str]] = {}
    raw_faces: list[tuple[int, str, int, str, str]] = []
    locations: list[str] = []
    edges: list[Edge] = []
    init: list[str] = []
    accept: list[str] = []

    for lineno, line in enumerate(text.splitlines(), 1):
        try:
            words = shlex.split(line, comments=True)
        except ValueError as exc:
            raise ModelError(f"line {lineno}: {exc}") from None
        if not words:
            continue
        head, args = words[0], words[1:]
        try:
            if kind is None:
                if head not in ("hdta", "hda", "ta") or len(args) != 1:
                    raise ModelError(f"line {lineno}: expected 'hdta|hda|ta <name>' first")
                kind, name = head, args[0]
            elif head == "alphabet":
                alphabet += args
            elif head == "clocks":
                if kind == "hda":
                    raise ModelError(f"line {lineno}: an hda has no clocks")
                clocks += args
            elif head == "cell":
                if kind == "ta" or len(args) < 3 or args[1] != "events":
                    raise ModelError(f"line {lineno}: expected 'cell <name> events \"...\" ...'")
                cname = args[0]
                if cname in cells:
                    raise ModelError(f"line {lineno}: duplicate cell {cname}")
                cells[cname] = Conclist.of(args[2])
                opts = _options(args[3:], {"inv", "exit"} if kind == "hdta" else set(), lineno)
                inv[cname] = ClockConstraint.parse(opts.get("inv", "true"))
                exits[cname] = frozenset(_names(opts.get("exit", "")))
            elif head == "face":
                if kind == "ta" or len(args) != 4 or args[1] not in ("lower", "upper"):
                    raise ModelError(f"line {lineno}: expected 'face <cell> lower|upper \"<events>\" <target>'")
                side = LOWER if args[1] == "lower" else UPPER
                raw_faces.append((lineno, args[0], side, args[2], args[3]))
            elif head == "location":
                if kind != "ta" or len(args) < 1:
                    raise ModelError(f"line {lineno}: 'location' belongs to ta files")
                locations.append(args[0])
                opts = _options(args[1:], {"inv"}, lineno)
                inv[args[0]] = ClockConstraint.parse(opts.get("inv", "true"))
            elif head == "edge":
                if kind != "ta" or len(args) != 5:
                    raise ModelError(f"line {lineno}: expected 'edge <src> \"<guard>\" <label> \"<resets>\" <dst>'")
                src, guard, label, resets, dst = args
                edges.append(Edge(src, ClockConstraint.parse(guard), label, frozenset(_names(resets)), dst))
            elif head == "init":
                init += args
            elif head == "accept":
                accept += args
            else:
                raise ModelError(f"line {lineno}: unknown directive {head!r}")
        except (ConstraintError, IpomsetError) as exc:
            raise ModelError(f"line {lineno}: {exc}") from None

    if kind is None:
        raise ModelError("empty model file")
    if kind == "ta":
        return TimedAutomaton(
            name, tuple(alphabet), tuple(clocks), tuple(locations), tuple(init), tuple(accept), inv, tuple(edges)
        )
    faces = {}
    for lineno, cell, side, events, target in raw_faces:
        if cell not in cells:
            raise ModelError(f"line {lineno}: unknown cell {cell}")
        try:
            pos = cells[cell].resolve(_names(events))
        except IpomsetError as exc:
            raise ModelError(f"line {lineno}: {exc}") from None
        if not pos:
            raise ModelError(f"line {lineno}: a face needs at least one event")
        key = (cell, side, pos)
        if key in faces and faces[key] != target:
            raise ModelError(f"line {lineno}: conflicting face for {cell}")
        faces[key] = target
    if kind == "hda":
        model: HDA = HDA(name, tuple(alphabet), cells, faces, tuple(init), tuple(accept))
    else:
        model = HDTA(name, tuple(alphabet), cells, faces, tuple(init), tuple(accept), tuple(clocks), inv, exits)
    model.complete_faces()
    return model


def bundled_path(name: str) -> Path | None:
    """Path of a bundled example file; the extension may be omitted."""
    data = resources.files("hdtalang") / "data"
    for candidate in (name, f"{name}.hdta", f"{name}.hda", f"{name}.ta"):
        q = data / candidate
        if q.is_file():
            return Path(str(q))
    return None


def load_model(path: str | Path) -> Model:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ModelError(f"{path}: {exc.strerror}") from None
    try:
        return parse_model(text)
    except ModelError as exc:
        raise ModelError(f"{p.name}: {exc}") from None


def dump_model(model: Model) -> str:
    """Serialize; only generating (singleton) faces are written out."""
    lines: list[str] = []
    if isinstance(model, TimedAutomaton):
        lines.append(f"ta {model.name}")
        lines.append("alphabet " + " ".join(model.alphabet))
        if model.clocks:
            lines.append("clocks " + " ".join(model.clocks))
        for q in model.locations:
            lines.append(f'location {q} inv "{model.invariant(q)}"')
        for e in model.edges:
            lines.append(f'edge {e.src} "{e.guard}" {e.label} "{" ".join(sorted(e.resets))}" {e.dst}')
    else:
        timed = isinstance(model, HDTA)
        lines.append(f"{'hdta' if timed else 'hda'} {model.name}")
        lines.append("alphabet " + " ".join(model.alphabet))
        if timed and model.clocks:
            lines.append("clocks " + " ".join(model.clocks))
        for c, conc in model.cells.items():
            line = f'cell {c} events "{conc}"'
            if timed:
                line += f' inv "{model.invariant(c)}" exit "{" ".join(sorted(model.exits(c)))}"'
            lines.append(line)
        for (c, side, pos), target in sorted(model.faces.items(), key=lambda kv: _face_order(model, kv[0])):
            if len(pos) != 1:
                continue
            conc = model.cells[c]
            names = " ".join(conc.position_name(i) for i in sorted(pos))
            lines.append(f'face {c} {"lower" if side == LOWER else "upper"} "{names}" {target}')
    if model.init:
        lines.append("init " + " ".join(model.init))
    if model.accept:
        lines.append("accept " + " ".join(model.accept))
    return "\n".join(lines) + "\n"


def _face_order(model: HDA, key) -> tuple:
    c, side, pos = key
    return (list(model.cells).index(c), side, sorted(pos))
