"""Precubical sets, HDAs, HDTAs and timed automata.

Face maps are keyed by ``(cell, side, positions)``, where ``side`` is 0 for
lower and 1 for upper faces and ``positions`` is a non-empty frozenset of
positions in the cell's conclist.  After :meth:`HDA.complete_faces` every
subset of every cell has both faces, obtained by composing the faces given.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable

from .clocks import TRUE, ClockConstraint, Valuation
from .ipomsets import Conclist

log = logging.getLogger(__name__)

LOWER, UPPER = 0, 1
FaceKey = tuple[str, int, frozenset]


class ModelError(ValueError):
    pass


def _subsets(n: int, min_size: int = 1) -> Iterable[frozenset[int]]:
    for k in range(min_size, n + 1):
        for c in combinations(range(n), k):
            yield frozenset(c)


def _reindex(positions: Iterable[int], removed: frozenset[int]) -> frozenset[int]:
    """Positions of ``ev(x)`` seen inside the face ``ev(x) minus removed``."""
    return frozenset(p - sum(1 for r in removed if r < p) for p in positions)


@dataclass
class HDA:
    name: str
    alphabet: tuple[str, ...]
    cells: dict[str, Conclist]
    faces: dict[FaceKey, str]
    init: tuple[str, ...]
    accept: tuple[str, ...]

    # -- structure ------------------------------------------------------------

    def ev(self, cell: str) -> Conclist:
        return self.cells[cell]

    def dim(self, cell: str | None = None) -> int:
        if cell is not None:
            return len(self.cells[cell])
        return max((len(c) for c in self.cells.values()), default=0)

    def face(self, cell: str, side: int, positions: Iterable[int]) -> str | None:
        pos = frozenset(positions)
        if not pos:
            return cell
        return self.faces.get((cell, side, pos))

    def lower_cofaces(self, cell: str) -> list[tuple[str, frozenset[int]]]:
        """Cells ``x`` and sets ``A`` with ``lower face A of x == cell``."""
        index = self.__dict__.get("_cofaces")
        if index is None:
            index = {}
            for (x, side, pos), y in sorted(self.faces.items(), key=lambda kv: (kv[0][0], kv[0][1], sorted(kv[0][2]))):
                if side == LOWER:
                    index.setdefault(y, []).append((x, pos))
            self.__dict__["_cofaces"] = index
        return index.get(cell, [])

    def _forget_index(self) -> None:
        self.__dict__.pop("_cofaces", None)

    def complete_faces(self) -> list[str]:
        """Fill in composite faces from the given ones; return missing faces."""
        missing: list[str] = []
        memo: dict[FaceKey, str | None] = {}

        def compute(x: str, side: int, pos: frozenset[int], depth: int = 0) -> str | None:
            key = (x, side, pos)
            if key in self.faces:
                return self.faces[key]
            if key in memo:
                return memo[key]
            memo[key] = None
            found = None
            # peel off a known face B of x, then take the rest inside that face
            for b in sorted(_subsets(len(pos)), key=len):
                bset = frozenset(sorted(pos)[i] for i in b)
                if bset == pos or (x, side, bset) not in self.faces:
                    continue
                y = self.faces[(x, side, bset)]
                rest = _reindex(pos - bset, bset)
                if y not in self.cells or any(p >= len(self.cells[y]) for p in rest):
                    continue
                found = compute(y, side, rest, depth + 1)
                if found is not None:
                    break
            memo[key] = found
            return found

        for x, conc in self.cells.items():
            for side in (LOWER, UPPER):
                for pos in _subsets(len(conc)):
                    y = compute(x, side, pos)
                    if y is None:
                        names = ",".join(conc.position_name(i) for i in sorted(pos))
                        missing.append(f"cell {x}: missing {'lower' if side == LOWER else 'upper'} face {{{names}}}")
        for (x, side, pos), y in memo.items():
            if y is not None:
                self.faces.setdefault((x, side, pos), y)
        self._forget_index()
        return missing

    def validate(self) -> list[str]:
        """Structural violations; empty when the model is well formed."""
        out: list[str] = []
        alphabet = set(self.alphabet)
        for x, conc in self.cells.items():
            bad = [a for a in conc if a not in alphabet]
            if bad:
                out.append(f"cell {x}: labels {bad} not in the alphabet")
        for (x, side, pos), y in self.faces.items():
            if x not in self.cells:
                out.append(f"face of unknown cell {x}")
                continue
            if y not in self.cells:
                out.append(f"cell {x}: face target {y} is not a cell")
                continue
            conc = self.cells[x]
            if any(p >= len(conc) for p in pos):
                out.append(f"cell {x}: face positions {sorted(pos)} outside {conc}")
                continue
            if self.cells[y] != conc.without(pos):
                out.append(
                    f"cell {x}: {_side(side)} face {_names(conc, pos)} is {y} with events "
                    f"{self.cells[y]}, expected {conc.without(pos)}"
                )
        for x, conc in self.cells.items():
            n = len(conc)
            for side in (LOWER, UPPER):
                for pos in _subsets(n):
                    if (x, side, pos) not in self.faces:
                        out.append(f"cell {x}: missing {_side(side)} face {_names(conc, pos)}")
        if out:
            return out
        for x, conc in self.cells.items():
            n = len(conc)
            for a in _subsets(n):
                for b in _subsets(n):
                    if a & b:
                        continue
                    for s1 in (LOWER, UPPER):
                        for s2 in (LOWER, UPPER):
                            # face b of (face a of x) against face a of (face b of x)
                            ya = self.faces[(x, s1, a)]
                            yb = self.faces[(x, s2, b)]
                            lhs = self.face(ya, s2, _reindex(b, a))
                            rhs = self.face(yb, s1, _reindex(a, b))
                            if lhs != rhs:
                                out.append(
                                    f"cell {x}: faces do not commute for {_side(s1)} {_names(conc, a)} "
                                    f"and {_side(s2)} {_names(conc, b)} ({lhs} vs {rhs})"
                                )
                            if s1 == s2:
                                whole = self.faces[(x, s1, a | b)]
                                if lhs != whole:
                                    out.append(
                                        f"cell {x}: {_side(s1)} face {_names(conc, a | b)} is {whole}, "
                                        f"but composing {_names(conc, a)} then {_names(conc, b)} gives {lhs}"
                                    )
        for role, cells in (("initial", self.init), ("accepting", self.accept)):
            for c in cells:
                if c not in self.cells:
                    out.append(f"{role} cell {c} is not a cell")
        return out

    def as_hdta(self) -> "HDTA":
        return HDTA(
            self.name,
            self.alphabet,
            dict(self.cells),
            dict(self.faces),
            self.init,
            self.accept,
            clocks=(),
            inv={c: TRUE for c in self.cells},
            exit={c: frozenset() for c in self.cells},
        )


def _side(side: int) -> str:
    return "lower" if side == LOWER else "upper"


def _names(conc: Conclist, pos: Iterable[int]) -> str:
    return "{" + ",".join(conc.position_name(i) for i in sorted(pos)) + "}"


@dataclass
class HDTA(HDA):
    clocks: tuple[str, ...] = ()
    inv: dict[str, ClockConstraint] = field(default_factory=dict)
    exit: dict[str, frozenset[str]] = field(default_factory=dict)

    def invariant(self, cell: str) -> ClockConstraint:
        return self.inv.get(cell, TRUE)

    def exits(self, cell: str) -> frozenset[str]:
        return self.exit.get(cell, frozenset())

    @property
    def max_constant(self) -> int:
        return max((phi.max_constant() for phi in self.inv.values()), default=0)

    def zero(self) -> Valuation:
        return Valuation.zero(self.clocks)

    def as_hdta(self) -> "HDTA":
        return self

    def validate(self) -> list[str]:
        out = super().validate()
        known = set(self.clocks)
        for c in self.cells:
            for clk in self.invariant(c).clocks() | self.exits(c):
                if clk not in known:
                    out.append(f"cell {c}: clock {clk} is not declared")
        return out

    def warnings(self) -> list[str]:
        v0 = self.zero()
        return [
            f"initial cell {c} rejects the zero valuation; starts there are dead"
            for c in self.init
            if c in self.cells and not self.invariant(c).holds(v0)
        ]


@dataclass(frozen=True)
class Edge:
    src: str
    guard: ClockConstraint
    label: str
    resets: frozenset[str]
    dst: str


@dataclass
class TimedAutomaton:
    name: str
    alphabet: tuple[str, ...]
    clocks: tuple[str, ...]
    locations: tuple[str, ...]
    init: tuple[str, ...]
    accept: tuple[str, ...]
    inv: dict[str, ClockConstraint]
    edges: tuple[Edge, ...]

    def invariant(self, q: str) -> ClockConstraint:
        return self.inv.get(q, TRUE)

    @property
    def max_constant(self) -> int:
        phis = list(self.inv.values()) + [e.guard for e in self.edges]
        return max((phi.max_constant() for phi in phis), default=0)

    def zero(self) -> Valuation:
        return Valuation.zero(self.clocks)

    def validate(self) -> list[str]:
        out = []
        locs = set(self.locations)
        known = set(self.clocks)
        for role, qs in (("initial", self.init), ("accepting", self.accept)):
            out += [f"{role} location {q} is not a location" for q in qs if q not in locs]
        for i, e in enumerate(self.edges):
            if e.src not in locs or e.dst not in locs:
                out.append(f"edge {i}: unknown endpoint")
            if e.label not in self.alphabet:
                out.append(f"edge {i}: label {e.label} not in the alphabet")
            for clk in e.guard.clocks() | e.resets:
                if clk not in known:
                    out.append(f"edge {i}: clock {clk} is not declared")
        for q, phi in self.inv.items():
            out += [f"location {q}: clock {c} is not declared" for c in phi.clocks() if c not in known]
        return out


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    k = 1
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def translate_ta(ta: TimedAutomaton) -> HDTA:
    """The one-dimensional HDTA simulating ``ta``.

    Locations become 0-cells, edges become 1-cells labelled by their action.
    A fresh clock, reset on leaving every location and bounded by 0 on
    every edge cell, makes each action instantaneous.
    """
    fresh = _fresh("cT", set(ta.clocks))
    cells: dict[str, Conclist] = {q: Conclist() for q in ta.locations}
    faces: dict[FaceKey, str] = {}
    inv: dict[str, ClockConstraint] = {q: ta.invariant(q) for q in ta.locations}
    exits: dict[str, frozenset[str]] = {q: frozenset({fresh}) for q in ta.locations}
    taken = set(cells)
    for i, e in enumerate(ta.edges):
        name = _fresh(f"edge{i}", taken)
        taken.add(name)
        cells[name] = Conclist((e.label,))
        faces[(name, LOWER, frozenset({0}))] = e.src
        faces[(name, UPPER, frozenset({0}))] = e.dst
        inv[name] = e.guard.conj(ClockConstraint.parse(f"{fresh}<=0"))
        exits[name] = frozenset(e.resets)
    return HDTA(
        ta.name,
        ta.alphabet,
        cells,
        faces,
        ta.init,
        ta.accept,
        clocks=ta.clocks + (fresh,),
        inv=inv,
        exit=exits,
    )


def with_init(model: HDTA, init: Iterable[str]) -> HDTA:
    return replace(model, init=tuple(init))
