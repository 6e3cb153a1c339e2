"""Clock constraints, valuations and the region abstraction."""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping

from .timed import as_rational, format_rational

OPS = ("<", "<=", ">=", ">")


class ConstraintError(ValueError):
    pass


@dataclass(frozen=True)
class Atom:
    clock: str
    op: str
    bound: int

    def __post_init__(self):
        if self.op not in OPS:
            raise ConstraintError(f"unknown comparison {self.op!r}")
        if not isinstance(self.bound, int) or self.bound < 0:
            raise ConstraintError(f"bounds are natural numbers, got {self.bound!r}")

    def holds(self, value: Fraction) -> bool:
        k = self.bound
        if self.op == "<":
            return value < k
        if self.op == "<=":
            return value <= k
        if self.op == ">=":
            return value >= k
        return value > k

    @property
    def is_upper(self) -> bool:
        return self.op in ("<", "<=")

    def __str__(self) -> str:
        return f"{self.clock}{self.op}{self.bound}"


@dataclass(frozen=True)
class ClockConstraint:
    """A conjunction of atomic comparisons; the empty conjunction is ``true``."""

    atoms: tuple[Atom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @classmethod
    def parse(cls, text: str) -> "ClockConstraint":
        """Parse ``x<=4 & y>=1`` (also ``&&``, ``and``, ``∧``, ``≤``, ``≥``, ``=``)."""
        text = text.strip().replace("≤", "<=").replace("≥", ">=").replace("∧", "&")
        if text in ("", "true", "tt"):
            return cls()
        atoms: list[Atom] = []
        for part in re.split(r"&&|&|\band\b", text):
            part = part.strip()
            if part in ("true", "tt"):
                continue
            m = re.fullmatch(r"([A-Za-z_][\w']*)\s*(<=|>=|==|=|<|>)\s*(\d+)", part)
            if not m:
                m2 = re.fullmatch(r"(\d+)\s*(<=|<)\s*([A-Za-z_][\w']*)\s*(<=|<)\s*(\d+)", part)
                if not m2:
                    raise ConstraintError(f"cannot parse clock comparison {part!r}")
                lo, op1, c, op2, hi = m2.groups()
                atoms.append(Atom(c, ">=" if op1 == "<=" else ">", int(lo)))
                atoms.append(Atom(c, op2, int(hi)))
                continue
            c, op, k = m.groups()
            if op in ("=", "=="):
                atoms += [Atom(c, ">=", int(k)), Atom(c, "<=", int(k))]
            else:
                atoms.append(Atom(c, op, int(k)))
        return cls(tuple(atoms))

    def holds(self, v: Mapping[str, Fraction]) -> bool:
        try:
            return all(a.holds(v[a.clock]) for a in self.atoms)
        except KeyError as exc:
            raise ConstraintError(f"valuation has no clock {exc.args[0]!r}") from None

    def clocks(self) -> frozenset[str]:
        return frozenset(a.clock for a in self.atoms)

    def max_constant(self) -> int:
        return max((a.bound for a in self.atoms), default=0)

    def conj(self, other: "ClockConstraint") -> "ClockConstraint":
        return ClockConstraint(self.atoms + other.atoms)

    @property
    def is_true(self) -> bool:
        return not self.atoms

    def __str__(self) -> str:
        return " & ".join(str(a) for a in self.atoms) if self.atoms else "true"


TRUE = ClockConstraint()


class Valuation(Mapping[str, Fraction]):
    """An immutable assignment of non-negative rationals to clocks."""

    __slots__ = ("_items", "_map")

    def __init__(self, values: Mapping[str, object] | Iterable[tuple[str, object]] = ()):
        items = dict(values).items() if not isinstance(values, dict) else values.items()
        pairs = tuple(sorted((c, as_rational(x)) for c, x in items))
        if any(x < 0 for _, x in pairs):
            raise ConstraintError("clock values must be non-negative")
        self._items = pairs
        self._map = dict(pairs)

    @classmethod
    def zero(cls, clocks: Iterable[str]) -> "Valuation":
        return cls({c: 0 for c in clocks})

    def __getitem__(self, c: str) -> Fraction:
        return self._map[c]

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._items)

    def __hash__(self) -> int:
        return hash(self._items)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Valuation):
            return self._items == other._items
        return NotImplemented

    def delay(self, d) -> "Valuation":
        d = as_rational(d)
        return Valuation({c: x + d for c, x in self._items})

    def reset(self, clocks: Iterable[str]) -> "Valuation":
        r = set(clocks)
        return Valuation({c: (Fraction(0) if c in r else x) for c, x in self._items})

    def __str__(self) -> str:
        return "(" + ", ".join(f"{c}={format_rational(x)}" for c, x in self._items) + ")"

    def __repr__(self) -> str:
        return f"Valuation{self}"


def satisfies(v: Mapping[str, Fraction], phi: ClockConstraint) -> bool:
    return phi.holds(v)


def delay_valuation(v: Valuation, d) -> Valuation:
    return v.delay(d)


def reset_valuation(v: Valuation, clocks: Iterable[str]) -> Valuation:
    return v.reset(clocks)


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Region:
    """An equivalence class of valuations for clocks ``clocks`` and cap ``cap``.

    ``ints[i]`` is the integral part of clock ``i``, or ``cap + 1`` when the
    clock exceeds the cap.  ``ranks[i]`` is 0 when the fractional part is zero
    (and for clocks above the cap), otherwise the 1-based position of its
    fractional part among the distinct non-zero fractional parts.
    """

    clocks: tuple[str, ...]
    cap: int
    ints: tuple[int, ...]
    ranks: tuple[int, ...]

    def above(self, i: int) -> bool:
        return self.ints[i] > self.cap

    @property
    def blocks(self) -> int:
        return max(self.ranks, default=0)

    def representative(self) -> Valuation:
        """Fractional block ``k`` of ``n`` sits at ``k/(n+1)``."""
        n = self.blocks
        vals = {}
        for i, c in enumerate(self.clocks):
            if self.above(i):
                vals[c] = Fraction(self.cap + 1)
            else:
                vals[c] = self.ints[i] + Fraction(self.ranks[i], n + 1)
        return Valuation(vals)

    @property
    def is_time_open(self) -> bool:
        """A positive delay can stay inside this region."""
        return all(self.above(i) or self.ranks[i] > 0 for i in range(len(self.clocks)))

    @property
    def is_unbounded(self) -> bool:
        return all(self.above(i) for i in range(len(self.clocks)))

    def contains(self, v: Mapping[str, Fraction]) -> bool:
        return region_of(v, self.cap, self.clocks) == self

    def time_successor(self) -> "Region | None":
        if self.is_unbounded:
            return None
        n = len(self.clocks)
        ints = list(self.ints)
        ranks = list(self.ranks)
        integral = [i for i in range(n) if not self.above(i) and ranks[i] == 0]
        if integral:
            for i in range(n):
                if ranks[i] > 0:
                    ranks[i] += 1
            for i in integral:
                if ints[i] == self.cap:
                    ints[i] = self.cap + 1
                else:
                    ranks[i] = 1
        else:
            top = self.blocks
            for i in range(n):
                if ranks[i] == top and not self.above(i):
                    ints[i] += 1
                    ranks[i] = 0
        return Region(self.clocks, self.cap, tuple(ints), _compress(ranks))

    def reset(self, clocks: Iterable[str]) -> "Region":
        r = set(clocks)
        ints = list(self.ints)
        ranks = list(self.ranks)
        for i, c in enumerate(self.clocks):
            if c in r:
                ints[i] = 0
                ranks[i] = 0
        return Region(self.clocks, self.cap, tuple(ints), _compress(ranks))

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.clocks):
            if self.above(i):
                parts.append(f"{c}>{self.cap}")
            elif self.ranks[i] == 0:
                parts.append(f"{c}={self.ints[i]}")
            else:
                parts.append(f"{self.ints[i]}<{c}<{self.ints[i] + 1}")
        blocks = [
            "=".join(f"frac({c})" for i, c in enumerate(self.clocks) if self.ranks[i] == k)
            for k in range(1, self.blocks + 1)
        ]
        if len(blocks) > 1:
            parts.append("<".join(blocks))
        return "{" + ", ".join(parts) + "}" if parts else "{}"


def _compress(ranks: list[int]) -> tuple[int, ...]:
    used = sorted({r for r in ranks if r > 0})
    index = {r: k + 1 for k, r in enumerate(used)}
    return tuple(index.get(r, 0) for r in ranks)


def region_of(v: Mapping[str, Fraction], cap: int, clocks: Iterable[str] | None = None) -> Region:
    names = tuple(sorted(v if clocks is None else clocks))
    ints = []
    fracs = []
    for c in names:
        x = as_rational(v[c])
        if x > cap:
            ints.append(cap + 1)
            fracs.append(Fraction(0))
        else:
            k = math.floor(x)
            ints.append(k)
            fracs.append(x - k)
    distinct = sorted({f for f in fracs if f > 0})
    rank = {f: i + 1 for i, f in enumerate(distinct)}
    return Region(names, cap, tuple(ints), tuple(rank.get(f, 0) for f in fracs))


def region_equivalent(v: Mapping[str, Fraction], w: Mapping[str, Fraction], cap: int) -> bool:
    return region_of(v, cap) == region_of(w, cap)


def time_successors(r: Region) -> list[Region]:
    """``r`` followed by every region reached by letting time elapse."""
    chain = [r]
    while (nxt := chain[-1].time_successor()) is not None:
        chain.append(nxt)
    return chain


def _ordered_partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _ordered_partitions(rest):
        # join an existing block or form a new block in any gap
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        for i in range(len(part) + 1):
            yield part[:i] + [[first]] + part[i:]


def all_regions(clocks: Iterable[str], cap: int) -> list[Region]:
    names = tuple(sorted(clocks))
    # per clock: ('int', k) exact, ('frac', k) strictly inside (k, k+1), ('above',)
    options = [("int", k) for k in range(cap + 1)] + [("frac", k) for k in range(cap)] + [("above", 0)]
    out = []
    for choice in product(options, repeat=len(names)):
        fractional = [i for i, (kind, _) in enumerate(choice) if kind == "frac"]
        ints = tuple(cap + 1 if kind == "above" else k for kind, k in choice)
        for part in _ordered_partitions(fractional):
            ranks = [0] * len(names)
            for b, block in enumerate(part):
                for i in block:
                    ranks[i] = b + 1
            out.append(Region(names, cap, ints, tuple(ranks)))
    return out


def regions_of_constraint(phi: ClockConstraint, clocks: Iterable[str], cap: int) -> set[Region]:
    """Regions inside ``phi``; one representative decides when bounds are <= cap."""
    return {r for r in all_regions(clocks, cap) if phi.holds(r.representative())}


def region_satisfies(r: Region, phi: ClockConstraint) -> bool:
    return phi.holds(r.representative())


def sample_valuation(r: Region, rng: random.Random, denominator: int = 1000) -> Valuation:
    """A random member of ``r`` (differs from the fixed representative)."""
    n = r.blocks
    points = sorted(rng.sample(range(1, denominator), n)) if n else []
    vals = {}
    for i, c in enumerate(r.clocks):
        if r.above(i):
            vals[c] = r.cap + Fraction(rng.randint(1, 4 * denominator), denominator)
        elif r.ranks[i] == 0:
            vals[c] = Fraction(r.ints[i])
        else:
            vals[c] = r.ints[i] + Fraction(points[r.ranks[i] - 1], denominator)
    return Valuation(vals)


def ray_delays(v: Mapping[str, Fraction], cap: int) -> list[Fraction]:
    """Delays hitting every region on the ray ``v + t``, in increasing order.

    Breakpoints are the times at which some clock reaches an integer no larger
    than the cap; between consecutive breakpoints the region is constant, so
    one midpoint per gap suffices.
    """
    points = {Fraction(0)}
    for x in v.values():
        for k in range(math.floor(x) + 1, cap + 1):
            points.add(k - x)
    marks = sorted(points)
    out = list(marks)
    out += [(a + b) / 2 for a, b in zip(marks, marks[1:])]
    out.append(marks[-1] + 1)
    return sorted(set(out))
