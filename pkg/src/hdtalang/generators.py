"""Random instances for property tests and benchmarks.

All generators take an explicit :class:`random.Random` so runs are
reproducible from a seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .clocks import Atom, ClockConstraint
from .ipomsets import Conclist, Ipomset, transitive_closure
from .models import Edge, TimedAutomaton
from .timed import IdWord, Tipomset, idword_to_tipomset, normalize_idword, tipomset_to_idword

Interval = tuple[int, int]


def random_intervals(rng: random.Random, n: int, span: int) -> list[Interval]:
    out = []
    for _ in range(n):
        s = rng.randint(0, span)
        out.append((s, rng.randint(s, span)))
    return out


def _shape(rng: random.Random, labels: Sequence[str], intervals: list[Interval], span: int, iface: float):
    """Precedence from the intervals, random event order and interfaces.

    Interface events are stretched to the ends of the window; this keeps
    precedence unchanged because minimal (maximal) events have no
    predecessor (successor) anyway.
    """
    n = len(intervals)
    ivs = list(intervals)
    prec = {(x, y) for x in range(n) for y in range(n) if ivs[x][1] < ivs[y][0]}
    minimal = [x for x in range(n) if not any((y, x) in prec for y in range(n))]
    maximal = [x for x in range(n) if not any((x, y) in prec for y in range(n))]
    sources = {x for x in minimal if rng.random() < iface}
    targets = {x for x in maximal if rng.random() < iface}
    for x in sources:
        ivs[x] = (0, ivs[x][1])
    for x in targets:
        ivs[x] = (ivs[x][0], span)
    rank = list(range(n))
    rng.shuffle(rank)
    evord = {
        (x, y)
        for x in range(n)
        for y in range(n)
        if x != y and rank[x] < rank[y] and (x, y) not in prec and (y, x) not in prec
    }
    p = Ipomset(tuple(labels), frozenset(prec), transitive_closure(evord), frozenset(sources), frozenset(targets))
    return p, ivs


def random_ipomset(
    rng: random.Random,
    max_events: int = 6,
    alphabet: Sequence[str] = "abc",
    span: int = 6,
    iface: float = 0.3,
) -> Ipomset:
    """A random interval ipomset; repeated labels (autoconcurrency) allowed."""
    n = rng.randint(0, max_events)
    labels = [rng.choice(alphabet) for _ in range(n)]
    p, _ = _shape(rng, labels, random_intervals(rng, n, span), span, iface)
    return p


def _monotone_map(rng: random.Random, span: int, max_den: int = 4) -> list[Fraction]:
    """Strictly increasing rationals f(0)=0 < f(1) < ... < f(span)."""
    f = [Fraction(0)]
    for _ in range(span):
        f.append(f[-1] + Fraction(rng.randint(1, 3 * max_den), rng.randint(1, max_den)))
    return f


def random_tipomset(
    rng: random.Random,
    max_events: int = 6,
    alphabet: Sequence[str] = "abc",
    span: int = 6,
    iface: float = 0.3,
) -> Tipomset:
    """A random tipomset with exact rational timestamps.

    Integer intervals on ``0..span`` are mapped through a strictly
    increasing function, which preserves the strict ``end < start`` tests
    that define precedence.  ``span == 0`` gives duration-zero instances.
    """
    span = rng.randint(0, span)
    n = rng.randint(0, max_events)
    labels = [rng.choice(alphabet) for _ in range(n)]
    p, ivs = _shape(rng, labels, random_intervals(rng, n, span), span, iface)
    f = _monotone_map(rng, span)
    return Tipomset(p, tuple(f[s] for s, _ in ivs), tuple(f[e] for _, e in ivs), f[span])


def random_idword(rng: random.Random, **kwargs) -> IdWord:
    return tipomset_to_idword(random_tipomset(rng, **kwargs))


def split_idword(w: IdWord, k: int, part: Fraction) -> tuple[IdWord, IdWord]:
    """Cut ``w`` inside its ``k``-th delay, leaving ``part`` of it on the left."""
    if not 0 <= k < len(w.delays) or not 0 <= part <= 1:
        raise ValueError("cut point outside the word")
    d = w.delays[k]
    mid = w.letters[k - 1].target if k > 0 else w.left
    left_tokens: list = [w.delays[0]]
    for letter, delay in zip(w.letters[: k], w.delays[1 : k + 1]):
        left_tokens += [letter, delay]
    left_tokens[-1] = d * part
    right_tokens: list = [d * (1 - part)]
    for letter, delay in zip(w.letters[k:], w.delays[k + 1 :]):
        right_tokens += [letter, delay]
    return (
        normalize_idword(left_tokens, w.left, mid),
        normalize_idword(right_tokens, mid, w.right),
    )


def random_coherent_pair(rng: random.Random, **kwargs) -> tuple[Tipomset, Tipomset]:
    """Two tipomsets that glue, obtained by cutting one random idword."""
    w = random_idword(rng, **kwargs)
    k = rng.randrange(len(w.delays))
    part = rng.choice([Fraction(0), Fraction(1), Fraction(rng.randint(1, 4), 5)])
    u, v = split_idword(w, k, part)
    return idword_to_tipomset(u), idword_to_tipomset(v)


def _random_constraint(rng: random.Random, clocks: Sequence[str], cap: int, upper_only: bool) -> ClockConstraint:
    atoms = []
    for x in clocks:
        if rng.random() < 0.5:
            continue
        ops = ("<", "<=") if upper_only else ("<", "<=", ">", ">=", "=")
        op, k = rng.choice(ops), rng.randint(0, cap)
        atoms += [Atom(x, ">=", k), Atom(x, "<=", k)] if op == "=" else [Atom(x, op, k)]
    return ClockConstraint(tuple(atoms))


def random_ta(
    rng: random.Random,
    max_locations: int = 3,
    max_clocks: int = 2,
    max_constant: int = 3,
    alphabet: Sequence[str] = "ab",
    max_edges: int = 5,
) -> TimedAutomaton:
    """A small random timed automaton; location ``q0`` is initial."""
    locs = tuple(f"q{i}" for i in range(rng.randint(1, max_locations)))
    clocks = tuple("xy"[: rng.randint(1, max_clocks)])
    inv = {}
    for q in locs:
        if rng.random() < 0.4:
            inv[q] = _random_constraint(rng, clocks, max_constant, upper_only=True)
    # the initial location must admit the zero valuation
    if "q0" in inv and not inv["q0"].holds(dict.fromkeys(clocks, Fraction(0))):
        del inv["q0"]
    edges = []
    for _ in range(rng.randint(1, max_edges)):
        edges.append(
            Edge(
                rng.choice(locs),
                _random_constraint(rng, clocks, max_constant, upper_only=False),
                rng.choice(alphabet),
                frozenset(x for x in clocks if rng.random() < 0.4),
                rng.choice(locs),
            )
        )
    accept = tuple(q for q in locs if rng.random() < 0.5) or (locs[-1],)
    return TimedAutomaton("random", tuple(alphabet), clocks, locs, ("q0",), accept, inv, tuple(edges))


def random_conclist(rng: random.Random, max_size: int = 3, alphabet: Sequence[str] = "abc") -> Conclist:
    return Conclist(tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_size))))
