"""Untimed algebra: conclists, interval ipomsets, gluing and step sequences.

Events of an :class:`Ipomset` are the integers ``0 .. n-1``; they carry no
identity beyond their index.  Equality and hashing of ipomsets are
*isomorphism*: two ipomsets compare equal iff an (necessarily unique)
isomorphism exists between them.  The canonical form used for this is read
off the sparse step decomposition.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

Pair = tuple[int, int]

START = "start"
TERM = "term"
IDENT = "id"

_KIND_RANK = {IDENT: 0, START: 1, TERM: 2}


class IpomsetError(ValueError):
    """Raised when a structure violates the ipomset / step-sequence axioms."""


def transitive_closure(pairs: Iterable[Pair]) -> frozenset[Pair]:
    succ: dict[int, set[int]] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    closed: set[Pair] = set()
    for a in list(succ):
        seen: set[int] = set()
        stack = list(succ[a])
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            stack.extend(succ.get(b, ()))
        closed.update((a, b) for b in seen)
    return frozenset(closed)


# ---------------------------------------------------------------------------
# conclists and step letters


@dataclass(frozen=True)
class Conclist:
    """A totally event-ordered list of labels; position is the event order."""

    labels: tuple[str, ...] = ()

    def __post_init__(self):
        labels = tuple(self.labels)
        if any(not isinstance(a, str) or not a for a in labels):
            raise IpomsetError(f"conclist labels must be non-empty strings: {labels!r}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, text: str | Sequence[str]) -> "Conclist":
        """``Conclist.of("a<b")`` or ``Conclist.of(["a", "b"])``."""
        if isinstance(text, str):
            text = text.strip()
            return cls(tuple(t.strip() for t in text.split("<")) if text else ())
        return cls(tuple(text))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __getitem__(self, i: int) -> str:
        return self.labels[i]

    def without(self, positions: Iterable[int]) -> "Conclist":
        drop = set(positions)
        return Conclist(tuple(a for i, a in enumerate(self.labels) if i not in drop))

    def remaining_positions(self, positions: Iterable[int]) -> list[int]:
        drop = set(positions)
        return [i for i in range(len(self.labels)) if i not in drop]

    def position_name(self, i: int) -> str:
        """Label of position ``i``, suffixed ``#k`` when the label repeats."""
        a = self.labels[i]
        if self.labels.count(a) == 1:
            return a
        return f"{a}#{self.labels[: i + 1].count(a)}"

    def resolve(self, names: Iterable[str]) -> frozenset[int]:
        """Inverse of :meth:`position_name`; accepts bare labels when unique."""
        out: set[int] = set()
        for name in names:
            label, _, occ = name.partition("#")
            hits = [i for i, a in enumerate(self.labels) if a == label]
            if not hits:
                raise IpomsetError(f"no event {name!r} in conclist {self}")
            if occ:
                k = int(occ)
                if not 1 <= k <= len(hits):
                    raise IpomsetError(f"no event {name!r} in conclist {self}")
                out.add(hits[k - 1])
            elif len(hits) == 1:
                out.add(hits[0])
            else:
                raise IpomsetError(f"ambiguous event {name!r} in conclist {self}; use {label}#k")
        return frozenset(out)

    def __str__(self) -> str:
        return "<".join(self.labels)


@dataclass(frozen=True)
class StepLetter:
    """A starter, terminator or identity over a conclist.

    ``moved`` holds the positions of ``carrier`` that are started (starter)
    or terminated (terminator).  A letter with nothing moved is the identity.
    """

    carrier: Conclist
    kind: str
    moved: frozenset[int] = frozenset()

    def __post_init__(self):
        moved = frozenset(self.moved)
        if self.kind not in _KIND_RANK:
            raise IpomsetError(f"unknown letter kind {self.kind!r}")
        if any(not 0 <= i < len(self.carrier) for i in moved):
            raise IpomsetError(f"moved positions {sorted(moved)} outside carrier {self.carrier}")
        if self.kind == IDENT and moved:
            raise IpomsetError("identity letters move no events")
        object.__setattr__(self, "moved", moved)
        if not moved:
            object.__setattr__(self, "kind", IDENT)

    @classmethod
    def starter(cls, carrier: Conclist | str, moved: Iterable[int] | None = None) -> "StepLetter":
        carrier = carrier if isinstance(carrier, Conclist) else Conclist.of(carrier)
        return cls(carrier, START, frozenset(range(len(carrier)) if moved is None else moved))

    @classmethod
    def terminator(cls, carrier: Conclist | str, moved: Iterable[int] | None = None) -> "StepLetter":
        carrier = carrier if isinstance(carrier, Conclist) else Conclist.of(carrier)
        return cls(carrier, TERM, frozenset(range(len(carrier)) if moved is None else moved))

    @classmethod
    def identity(cls, carrier: Conclist | str = Conclist()) -> "StepLetter":
        carrier = carrier if isinstance(carrier, Conclist) else Conclist.of(carrier)
        return cls(carrier, IDENT)

    @property
    def is_identity(self) -> bool:
        return self.kind == IDENT

    @property
    def is_starter(self) -> bool:
        return self.kind in (START, IDENT)

    @property
    def is_terminator(self) -> bool:
        return self.kind in (TERM, IDENT)

    @property
    def source(self) -> Conclist:
        return self.carrier.without(self.moved) if self.kind == START else self.carrier

    @property
    def target(self) -> Conclist:
        return self.carrier.without(self.moved) if self.kind == TERM else self.carrier

    def glues_before(self, other: "StepLetter") -> bool:
        return self.target == other.source

    def fuse(self, other: "StepLetter") -> "StepLetter":
        """Gluing of two starters (or two terminators), computed on positions."""
        if not self.glues_before(other):
            raise IpomsetError(f"letters {self} and {other} do not glue")
        if self.is_identity:
            return other
        if other.is_identity:
            return self
        if self.kind == START and other.kind == START:
            # positions of self.carrier sit at the unmoved positions of other
            slots = other.carrier.remaining_positions(other.moved)
            return StepLetter(other.carrier, START, other.moved | {slots[i] for i in self.moved})
        if self.kind == TERM and other.kind == TERM:
            slots = self.carrier.remaining_positions(self.moved)
            return StepLetter(self.carrier, TERM, self.moved | {slots[i] for i in other.moved})
        raise IpomsetError("only starters with starters or terminators with terminators fuse")

    def to_ipomset(self) -> "Ipomset":
        n = len(self.carrier)
        everything = frozenset(range(n))
        sources = everything - self.moved if self.kind == START else everything
        targets = everything - self.moved if self.kind == TERM else everything
        return Ipomset(
            self.carrier.labels,
            frozenset(),
            frozenset((i, j) for i in range(n) for j in range(i + 1, n)),
            sources,
            targets,
        )

    def sort_key(self) -> tuple:
        return (_KIND_RANK[self.kind], self.carrier.labels, tuple(sorted(self.moved)))

    def __str__(self) -> str:
        from .syntax import format_letter

        return format_letter(self)

    def __repr__(self) -> str:
        return f"StepLetter({self})"


# ---------------------------------------------------------------------------
# ipomsets


@dataclass(frozen=True, eq=False)
class Ipomset:
    """An interval pomset with interfaces over events ``0 .. n-1``."""

    labels: tuple[str, ...]
    prec: frozenset[Pair] = frozenset()
    evord: frozenset[Pair] = frozenset()
    sources: frozenset[int] = frozenset()
    targets: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        for name in ("prec", "evord", "sources", "targets"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        self._check()

    def _check(self) -> None:
        n = len(self.labels)
        events = range(n)
        for name, rel in (("precedence", self.prec), ("event order", self.evord)):
            for a, b in rel:
                if not (0 <= a < n and 0 <= b < n):
                    raise IpomsetError(f"{name} pair {(a, b)} outside events")
                if a == b:
                    raise IpomsetError(f"{name} is not irreflexive at {a}")
            succ: dict[int, set[int]] = {}
            for a, b in rel:
                succ.setdefault(a, set()).add(b)
            for a, b in rel:
                for c in succ.get(b, ()):
                    if (a, c) not in rel:
                        raise IpomsetError(f"{name} is not transitive: {(a, b)}, {(b, c)}")
        if not (self.sources <= set(events) and self.targets <= set(events)):
            raise IpomsetError("interfaces must be subsets of the events")
        for x, y in combinations(events, 2):
            if not ((x, y) in self.prec or (y, x) in self.prec or (x, y) in self.evord or (y, x) in self.evord):
                raise IpomsetError(f"events {x} and {y} are ordered neither by precedence nor event order")
        for a, b in self.prec:
            if b in self.sources:
                raise IpomsetError(f"source event {b} is not <-minimal")
            if a in self.targets:
                raise IpomsetError(f"target event {a} is not <-maximal")
        if not is_interval_order(n, self.prec):
            raise IpomsetError("precedence is not an interval order (contains 2+2)")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def word(cls, labels: Sequence[str]) -> "Ipomset":
        """The totally ordered ipomset ``a1 a2 ... an`` without interfaces."""
        n = len(labels)
        return cls(tuple(labels), frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def discrete(cls, conclist: Conclist | str | Sequence[str], sources=(), targets=()) -> "Ipomset":
        """Concurrent events in event order; interfaces given as positions."""
        if not isinstance(conclist, Conclist):
            conclist = Conclist.of(conclist)
        n = len(conclist)
        return cls(
            conclist.labels,
            frozenset(),
            frozenset((i, j) for i in range(n) for j in range(i + 1, n)),
            frozenset(sources),
            frozenset(targets),
        )

    @classmethod
    def identity(cls, conclist: Conclist | str | Sequence[str] = ()) -> "Ipomset":
        if not isinstance(conclist, Conclist):
            conclist = Conclist.of(conclist)
        everything = range(len(conclist))
        return cls.discrete(conclist, everything, everything)

    # -- basic queries --------------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def events(self) -> range:
        return range(len(self.labels))

    def precedes(self, x: int, y: int) -> bool:
        return (x, y) in self.prec

    def concurrent(self, x: int, y: int) -> bool:
        return x != y and (x, y) not in self.prec and (y, x) not in self.prec

    def evsort(self, events: Iterable[int]) -> list[int]:
        """Sort pairwise concurrent events by event order."""
        evs = list(events)
        return sorted(evs, key=lambda e: sum((z, e) in self.evord for z in evs))

    def conclist_of(self, events: Iterable[int]) -> Conclist:
        return Conclist(tuple(self.labels[e] for e in self.evsort(events)))

    @property
    def source_conclist(self) -> Conclist:
        return self.conclist_of(self.sources)

    @property
    def target_conclist(self) -> Conclist:
        return self.conclist_of(self.targets)

    @property
    def is_word(self) -> bool:
        return all(not self.concurrent(x, y) for x, y in combinations(self.events, 2))

    @property
    def is_discrete(self) -> bool:
        return not self.prec

    def essential_evord(self) -> frozenset[Pair]:
        return frozenset((x, y) for x, y in self.evord if self.concurrent(x, y))

    # -- canonical form -------------------------------------------------------

    @cached_property
    def canonical_order(self) -> tuple[int, ...]:
        """Events sorted by (letter of the sparse decomposition starting them,
        position in that letter); invariant under isomorphism."""
        steps = _schedule(self)
        order = self.evsort(self.sources)
        for _, kind, _, moved in steps:
            if kind == START:
                order.extend(self.evsort(moved))
        return tuple(order)

    @cached_property
    def canonical_key(self) -> tuple:
        order = self.canonical_order
        rank = {e: i for i, e in enumerate(order)}
        prec = sorted((rank[a], rank[b]) for a, b in self.prec)
        ess = sorted(transitive_closure((rank[a], rank[b]) for a, b in self.essential_evord()))
        return (
            tuple(self.labels[e] for e in order),
            tuple(prec),
            tuple(ess),
            tuple(sorted(rank[e] for e in self.sources)),
            tuple(sorted(rank[e] for e in self.targets)),
        )

    def canonical(self) -> "Ipomset":
        labels, prec, ess, sources, targets = self.canonical_key
        return Ipomset(labels, frozenset(prec), frozenset(ess), frozenset(sources), frozenset(targets))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ipomset):
            return NotImplemented
        return self.canonical_key == other.canonical_key

    def __hash__(self) -> int:
        return hash(self.canonical_key)

    def sort_key(self) -> tuple:
        labels, prec, ess, sources, targets = self.canonical_key
        return (len(labels), labels, prec, ess, sources, targets)

    def __str__(self) -> str:
        from .syntax import format_ipomset

        return format_ipomset(self)

    def __repr__(self) -> str:
        return f"Ipomset({self})"


def is_interval_order(n: int, prec: Iterable[Pair]) -> bool:
    """Interval orders are exactly those whose predecessor sets form a chain."""
    preds: list[set[int]] = [set() for _ in range(n)]
    for a, b in prec:
        preds[b].add(a)
    chain = sorted(preds, key=len)
    return all(chain[i] <= chain[i + 1] for i in range(len(chain) - 1))


def has_two_plus_two(n: int, prec: frozenset[Pair] | set[Pair]) -> bool:
    """Brute-force search for an induced 2+2 (a<b, c<d, a||d, c||b)."""
    pairs = list(prec)
    for a, b in pairs:
        for c, d in pairs:
            if len({a, b, c, d}) < 4:
                continue
            if (a, d) not in prec and (c, b) not in prec:
                return True
    return False


# ---------------------------------------------------------------------------
# sparse schedule


def _schedule(p: Ipomset, start=None, end=None) -> list[tuple[object, str, tuple[int, ...], frozenset[int]]]:
    """Greedy alternating start/terminate schedule of ``p``.

    Returns ``(instant, kind, carrier events, moved events)`` tuples.  In the
    untimed case (``start is None``) everything happens at a single instant
    and the result is the unique sparse step decomposition.  With timestamps,
    events start at ``start[e]`` and end at ``end[e]``; the grouping at each
    instant is the unique sparse interval delay word.
    """
    n = len(p)
    preds: list[set[int]] = [set() for _ in range(n)]
    for a, b in p.prec:
        preds[b].add(a)
    active = set(p.sources)
    done: set[int] = set()
    pending = set(range(n)) - active
    if start is None:
        instants: list[object] = [None]
    else:
        instants = sorted({start[y] for y in pending} | {end[x] for x in range(n) if x not in p.targets})
    steps = []
    for t in instants:
        while True:
            started = frozenset(
                y for y in pending if (t is None or start[y] == t) and preds[y] <= done
            )
            if started:
                active |= started
                pending -= started
                steps.append((t, START, tuple(p.evsort(active)), started))
            ended = frozenset(
                x
                for x in active
                if x not in p.targets
                and (t is None or end[x] == t)
                and not any(p.concurrent(x, z) for z in pending)
            )
            if ended:
                steps.append((t, TERM, tuple(p.evsort(active)), ended))
                active -= ended
                done |= ended
            if not started and not ended:
                break
        if t is not None:
            if any(start[y] == t for y in pending) or any(
                end[x] == t for x in active if x not in p.targets
            ):
                raise IpomsetError(f"timestamps inconsistent with precedence at instant {t}")
    if pending or any(x not in p.targets for x in active):
        raise IpomsetError("ipomset admits no step decomposition")
    return steps


def _steps_to_letters(p: Ipomset, steps) -> list[StepLetter]:
    letters = []
    for _, kind, carrier, moved in steps:
        conc = Conclist(tuple(p.labels[e] for e in carrier))
        letters.append(StepLetter(conc, kind, frozenset(i for i, e in enumerate(carrier) if e in moved)))
    return letters


# ---------------------------------------------------------------------------
# gluing


def _glue(p: Ipomset, q: Ipomset) -> tuple[Ipomset, dict[int, int]] | None:
    tp = p.evsort(p.targets)
    sq = q.evsort(q.sources)
    if [p.labels[e] for e in tp] != [q.labels[e] for e in sq]:
        return None
    qmap = dict(zip(sq, tp))
    labels = list(p.labels)
    for e in q.events:
        if e not in qmap:
            qmap[e] = len(labels)
            labels.append(q.labels[e])
    prec = set(p.prec)
    prec.update((qmap[a], qmap[b]) for a, b in q.prec)
    p_only = [x for x in p.events if x not in p.targets]
    q_only = [qmap[y] for y in q.events if y not in q.sources]
    prec.update((x, y) for x in p_only for y in q_only)
    evord = transitive_closure(set(p.evord) | {(qmap[a], qmap[b]) for a, b in q.evord})
    glued = Ipomset(tuple(labels), frozenset(prec), evord, p.sources, frozenset(qmap[e] for e in q.targets))
    return glued, qmap


def glue(p: Ipomset, q: Ipomset) -> Ipomset | None:
    """Gluing composition ``p * q``; ``None`` when the interfaces do not match."""
    res = _glue(p, q)
    return None if res is None else res[0]


def glue_all(parts: Iterable[Ipomset]) -> Ipomset | None:
    acc = None
    for part in parts:
        acc = part if acc is None else glue(acc, part)
        if acc is None:
            return None
    return acc


# ---------------------------------------------------------------------------
# subsumption and isomorphism


def _search_bijection(p: Ipomset, q: Ipomset, pair_ok) -> dict[int, int] | None:
    n = len(p)
    if n != len(q) or sorted(p.labels) != sorted(q.labels):
        return None
    cands = []
    for x in p.events:
        cands.append(
            [
                y
                for y in q.events
                if q.labels[y] == p.labels[x]
                and (x in p.sources) == (y in q.sources)
                and (x in p.targets) == (y in q.targets)
            ]
        )
    order = sorted(p.events, key=lambda x: len(cands[x]))
    f: dict[int, int] = {}
    used: set[int] = set()

    def extend(k: int) -> bool:
        if k == n:
            return True
        x = order[k]
        for y in cands[x]:
            if y in used:
                continue
            if all(pair_ok(x, x2, y, f[x2]) and pair_ok(x2, x, f[x2], y) for x2 in f):
                f[x] = y
                used.add(y)
                if extend(k + 1):
                    return True
                del f[x]
                used.discard(y)
        return False

    return dict(f) if extend(0) else None


def subsumption(p: Ipomset, q: Ipomset) -> dict[int, int] | None:
    """A bijection witnessing ``p ⊑ q`` (``q`` is more concurrent), or ``None``."""

    def ok(x, x2, y, y2):
        if (y, y2) in q.prec and (x, x2) not in p.prec:
            return False
        if p.concurrent(x, x2) and (x, x2) in p.evord and (y, y2) not in q.evord:
            return False
        return True

    return _search_bijection(p, q, ok)


def subsumes(p: Ipomset, q: Ipomset) -> bool:
    """Whether ``p ⊑ q``."""
    return subsumption(p, q) is not None


def isomorphism(p: Ipomset, q: Ipomset) -> dict[int, int] | None:
    def ok(x, x2, y, y2):
        if ((x, x2) in p.prec) != ((y, y2) in q.prec):
            return False
        if p.concurrent(x, x2) and ((x, x2) in p.evord) != ((y, y2) in q.evord):
            return False
        return True

    return _search_bijection(p, q, ok)


def isomorphic(p: Ipomset, q: Ipomset) -> bool:
    """Brute-force isomorphism test, independent of the canonical form."""
    return isomorphism(p, q) is not None


# ---------------------------------------------------------------------------
# step sequences


@dataclass(frozen=True)
class StepSequence:
    """``id_left . letters . id_right`` with coherent letters."""

    left: Conclist
    letters: tuple[StepLetter, ...]
    right: Conclist

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        cur = self.left
        for i, letter in enumerate(self.letters):
            if letter.source != cur:
                raise IpomsetError(f"incoherent step sequence at letter {i}: {letter} after {cur}")
            cur = letter.target
        if cur != self.right:
            raise IpomsetError(f"step sequence ends in {cur}, not right identity {self.right}")

    @property
    def is_sparse(self) -> bool:
        if any(letter.is_identity for letter in self.letters):
            return False
        return all(a.kind != b.kind for a, b in zip(self.letters, self.letters[1:]))

    def boundary_word(self) -> tuple[StepLetter, ...]:
        """Letters with the boundary identities made explicit."""
        return (StepLetter.identity(self.left), *self.letters, StepLetter.identity(self.right))

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.boundary_word())


def sparse_decompose(p: Ipomset) -> StepSequence:
    """The unique sparse step sequence gluing to ``p``."""
    letters = _steps_to_letters(p, _schedule(p))
    return StepSequence(p.source_conclist, tuple(letters), p.target_conclist)


def glue_sequence(s: StepSequence | Sequence[StepLetter]) -> Ipomset:
    """Glue the letters of a coherent step sequence into an ipomset."""
    if isinstance(s, StepSequence):
        left, letters = s.left, s.letters
    else:
        letters = tuple(s)
        if not letters:
            raise IpomsetError("cannot glue an empty word without boundary identities")
        left = letters[0].source
    acc = Ipomset.identity(left)
    for i, letter in enumerate(letters):
        nxt = glue(acc, letter.to_ipomset())
        if nxt is None:
            raise IpomsetError(f"incoherent word: letter {i} ({letter}) does not glue")
        acc = nxt
    return acc


def fuse_letters(letters: Iterable[StepLetter]) -> list[StepLetter]:
    """Drop identities and fuse adjacent letters of the same kind."""
    out: list[StepLetter] = []
    for letter in letters:
        if letter.is_identity:
            continue
        if out and out[-1].kind == letter.kind:
            out[-1] = out[-1].fuse(letter)
        else:
            out.append(letter)
    return out


def normalize_step_sequence(
    letters: Sequence[StepLetter] | StepSequence,
    left: Conclist | None = None,
    right: Conclist | None = None,
) -> StepSequence:
    """Sparse normal form under ``I ~ ε``, ``S1 S2 ~ S1*S2``, ``T1 T2 ~ T1*T2``.

    Boundary identities default to the source of the first letter and the
    target of the last one.
    """
    if isinstance(letters, StepSequence):
        left, right, letters = letters.left, letters.right, letters.letters
    letters = list(letters)
    if left is None:
        if not letters:
            raise IpomsetError("empty word needs an explicit boundary identity")
        left = letters[0].source
    if right is None:
        right = letters[-1].target if letters else left
    # checks coherence before any rewriting
    StepSequence(left, tuple(letters), right)
    return StepSequence(left, tuple(fuse_letters(letters)), right)


# ---------------------------------------------------------------------------
# subsumption closure


def _refinements(q: Ipomset) -> set[Ipomset]:
    q = q.canonical()
    n = len(q)
    found: set[Ipomset] = set()
    seen = {q.prec}
    queue = deque([q.prec])
    while queue:
        prec = queue.popleft()
        if is_interval_order(n, prec):
            found.add(Ipomset(q.labels, prec, q.evord, q.sources, q.targets))
        for x in range(n):
            if x in q.targets:
                continue
            for y in range(n):
                if y == x or y in q.sources or (x, y) in prec or (y, x) in prec:
                    continue
                new = transitive_closure(prec | {(x, y)})
                if new in seen:
                    continue
                if any(b in q.sources or a in q.targets for a, b in new):
                    continue
                seen.add(new)
                queue.append(new)
    return found


def down_closure(lang: Iterable[Ipomset]) -> frozenset[Ipomset]:
    """All ipomsets subsumed by some member of ``lang``."""
    out: set[Ipomset] = set()
    for q in lang:
        out |= _refinements(q)
    return frozenset(out)
