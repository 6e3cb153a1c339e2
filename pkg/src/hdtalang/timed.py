"""Timed ipomsets, interval delay words, delay words and timed words.

All times are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from .ipomsets import (
    START,
    Conclist,
    Ipomset,
    StepLetter,
    StepSequence,
    _glue,
    _schedule,
    _steps_to_letters,
    isomorphism,
    transitive_closure,
)

Number = Union[int, Fraction, str]


def as_rational(x: Number | float) -> Fraction:
    """Exact rational from an int, Fraction, ``"p/q"`` or decimal string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not times")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        # go through the shortest decimal repr, not the binary expansion
        return Fraction(repr(x))
    try:
        return Fraction(str(x).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {x!r}") from exc


def format_rational(q: Fraction) -> str:
    """Decimal when the expansion is finite, ``p/q`` otherwise."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    scaled = abs(q.numerator) * 10**digits // q.denominator
    sign = "-" if q < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{str(frac).rjust(digits, '0').rstrip('0')}"


class TimedError(ValueError):
    """Raised for ill-formed timed structures."""


# ---------------------------------------------------------------------------
# tipomsets


@dataclass(frozen=True, eq=False)
class Tipomset:
    """An ipomset with an activity interval per event and a total duration."""

    ipomset: Ipomset
    starts: tuple[Fraction, ...]
    ends: tuple[Fraction, ...]
    duration: Fraction

    def __post_init__(self):
        object.__setattr__(self, "starts", tuple(as_rational(t) for t in self.starts))
        object.__setattr__(self, "ends", tuple(as_rational(t) for t in self.ends))
        object.__setattr__(self, "duration", as_rational(self.duration))
        p = self.ipomset
        n = len(p)
        if len(self.starts) != n or len(self.ends) != n:
            raise TimedError("one start and one end time per event")
        d = self.duration
        if d < 0:
            raise TimedError("negative duration")
        for x in p.events:
            s, e = self.starts[x], self.ends[x]
            if not 0 <= s <= e <= d:
                raise TimedError(f"event {x}: need 0 <= {s} <= {e} <= {d}")
            if x in p.sources and s != 0:
                raise TimedError(f"source event {x} must start at 0")
            if x in p.targets and e != d:
                raise TimedError(f"target event {x} must end at the duration {d}")
        for x in p.events:
            for y in p.events:
                if x == y:
                    continue
                before = (x, y) in p.prec
                if self.ends[x] < self.starts[y] and not before:
                    raise TimedError(f"event {x} ends before {y} starts but does not precede it")
                if before and self.ends[x] > self.starts[y]:
                    raise TimedError(f"event {x} precedes {y} but ends after {y} starts")

    @classmethod
    def identity(cls, conclist: Conclist | str = Conclist(), duration: Number = 0) -> "Tipomset":
        p = Ipomset.identity(conclist)
        d = as_rational(duration)
        return cls(p, (Fraction(0),) * len(p), (d,) * len(p), d)

    @classmethod
    def from_intervals(
        cls,
        labels: Sequence[str],
        intervals: Sequence[tuple[Number, Number]],
        duration: Number,
        prec: Iterable[tuple[int, int]] = (),
        evord: Iterable[tuple[int, int]] = (),
        sources: Iterable[int] = (),
        targets: Iterable[int] = (),
    ) -> "Tipomset":
        p = Ipomset(
            tuple(labels),
            transitive_closure(prec),
            transitive_closure(evord),
            frozenset(sources),
            frozenset(targets),
        )
        return cls(p, tuple(s for s, _ in intervals), tuple(e for _, e in intervals), duration)

    def __len__(self) -> int:
        return len(self.ipomset)

    def untime(self) -> Ipomset:
        return self.ipomset

    def interval(self, x: int) -> tuple[Fraction, Fraction]:
        return self.starts[x], self.ends[x]

    @cached_property
    def canonical_key(self) -> tuple:
        order = self.ipomset.canonical_order
        return (
            self.ipomset.canonical_key,
            tuple(self.starts[e] for e in order),
            tuple(self.ends[e] for e in order),
            self.duration,
        )

    def canonical(self) -> "Tipomset":
        order = self.ipomset.canonical_order
        return Tipomset(
            self.ipomset.canonical(),
            tuple(self.starts[e] for e in order),
            tuple(self.ends[e] for e in order),
            self.duration,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tipomset):
            return NotImplemented
        return self.canonical_key == other.canonical_key

    def __hash__(self) -> int:
        return hash(self.canonical_key)

    def sort_key(self) -> tuple:
        return (self.ipomset.sort_key(), self.canonical_key[1:])

    def __str__(self) -> str:
        from .syntax import format_tipomset

        return format_tipomset(self)

    def __repr__(self) -> str:
        return f"Tipomset({self})"


def untime(p: Tipomset) -> Ipomset:
    return p.ipomset


def tipomset_isomorphic(p: Tipomset, q: Tipomset) -> bool:
    """Untimed isomorphism (brute force) plus exact timestamp agreement."""
    if p.duration != q.duration:
        return False
    f = isomorphism(p.ipomset, q.ipomset)
    if f is None:
        return False
    return all(p.starts[x] == q.starts[y] and p.ends[x] == q.ends[y] for x, y in f.items())


def tglue(p: Tipomset, q: Tipomset) -> Tipomset | None:
    """Timed gluing; ``None`` when the untimed parts do not glue."""
    res = _glue(p.ipomset, q.ipomset)
    if res is None:
        return None
    glued, qmap = res
    n = len(glued)
    shift = p.duration
    starts: list[Fraction] = [Fraction(0)] * n
    ends: list[Fraction] = [Fraction(0)] * n
    for x in p.ipomset.events:
        starts[x], ends[x] = p.starts[x], p.ends[x]
    for y in q.ipomset.events:
        m = qmap[y]
        if y not in q.ipomset.sources:
            starts[m] = q.starts[y] + shift
        ends[m] = q.ends[y] + shift
    return Tipomset(glued, tuple(starts), tuple(ends), p.duration + q.duration)


# ---------------------------------------------------------------------------
# interval delay words


def _is_delay(tok) -> bool:
    return not isinstance(tok, StepLetter)


@dataclass(frozen=True)
class IdWord:
    """A sparse interval delay word ``I0 d0 P1 d1 ... Pn dn I(n+1)``."""

    left: Conclist
    delays: tuple[Fraction, ...]
    letters: tuple[StepLetter, ...]
    right: Conclist

    def __post_init__(self):
        object.__setattr__(self, "delays", tuple(as_rational(d) for d in self.delays))
        object.__setattr__(self, "letters", tuple(self.letters))
        if len(self.delays) != len(self.letters) + 1:
            raise TimedError("an idword has one more delay than letters")
        if any(d < 0 for d in self.delays):
            raise TimedError("negative delay")
        StepSequence(self.left, self.letters, self.right)
        for i, letter in enumerate(self.letters):
            if letter.is_identity:
                raise TimedError("sparse idwords have no interior identities")
            if i and self.delays[i] == 0 and self.letters[i - 1].kind == letter.kind:
                raise TimedError("zero delay between two letters of the same kind")

    @classmethod
    def empty(cls, conclist: Conclist = Conclist(), duration: Number = 0) -> "IdWord":
        return cls(conclist, (as_rational(duration),), (), conclist)

    @property
    def duration(self) -> Fraction:
        return sum(self.delays, Fraction(0))

    def tokens(self) -> list:
        out: list = [StepLetter.identity(self.left), self.delays[0]]
        for letter, d in zip(self.letters, self.delays[1:]):
            out += [letter, d]
        out.append(StepLetter.identity(self.right))
        return out

    def step_sequence(self) -> StepSequence:
        """Untimed step sequence (not necessarily sparse)."""
        return StepSequence(self.left, self.letters, self.right)

    def then(self, other: "IdWord") -> "IdWord":
        if self.right != other.left:
            raise TimedError(f"cannot concatenate: {self.right} vs {other.left}")
        return normalize_idword(self.tokens() + other.tokens())

    def append_delay(self, d: Number) -> "IdWord":
        d = as_rational(d)
        if d == 0:
            return self
        return IdWord(self.left, self.delays[:-1] + (self.delays[-1] + d,), self.letters, self.right)

    def append_letter(self, letter: StepLetter) -> "IdWord":
        if letter.source != self.right:
            raise TimedError(f"letter {letter} does not continue {self.right}")
        if letter.is_identity:
            return self
        if self.letters and self.delays[-1] == 0 and self.letters[-1].kind == letter.kind:
            return IdWord(self.left, self.delays, self.letters[:-1] + (self.letters[-1].fuse(letter),), letter.target)
        return IdWord(self.left, self.delays + (Fraction(0),), self.letters + (letter,), letter.target)

    def sort_key(self) -> tuple:
        return (
            len(self.letters),
            self.left.labels,
            tuple(x.sort_key() for x in self.letters),
            self.delays,
        )

    def __str__(self) -> str:
        from .syntax import format_idword

        return format_idword(self)


def normalize_idword(tokens: Sequence, left: Conclist | None = None, right: Conclist | None = None) -> IdWord:
    """Sparse normal form of a coherent token list of letters and delays.

    Sums adjacent delays, drops identities, and fuses same-kind letters that
    are not separated by a positive delay.  Boundary identities default to
    the source of the first letter and the target of the last one.
    """
    letters_in = [t for t in tokens if isinstance(t, StepLetter)]
    if left is None:
        left = letters_in[0].source if letters_in else Conclist()
    cur = left
    for i, letter in enumerate(letters_in):
        if letter.source != cur:
            raise TimedError(f"incoherent idword at letter {i}: {letter} after {cur}")
        cur = letter.target
    if right is not None and right != cur:
        raise TimedError(f"idword ends in {cur}, not {right}")

    delays: list[Fraction] = []
    letters: list[StepLetter] = []
    acc = Fraction(0)
    for tok in tokens:
        if _is_delay(tok):
            d = as_rational(tok)
            if d < 0:
                raise TimedError(f"negative delay {d}")
            acc += d
        elif tok.is_identity:
            continue
        elif letters and acc == 0 and letters[-1].kind == tok.kind:
            letters[-1] = letters[-1].fuse(tok)
        else:
            delays.append(acc)
            letters.append(tok)
            acc = Fraction(0)
    delays.append(acc)
    return IdWord(left, tuple(delays), tuple(letters), cur)


def idword_to_tipomset(w: IdWord | Sequence) -> Tipomset:
    """Replay the letters, stamping each event with its first and last time."""
    if not isinstance(w, IdWord):
        w = normalize_idword(w)
    labels = list(w.left.labels)
    active = list(range(len(labels)))  # events of the current conclist, in order
    sources = frozenset(active)
    starts: dict[int, Fraction] = {e: Fraction(0) for e in active}
    ends: dict[int, Fraction] = {}
    done: set[int] = set()
    prec: set[tuple[int, int]] = set()
    evord: set[tuple[int, int]] = set()

    def order_carrier(carrier: list[int]) -> None:
        evord.update((carrier[i], carrier[j]) for i in range(len(carrier)) for j in range(i + 1, len(carrier)))

    order_carrier(active)
    now = w.delays[0]
    for letter, d in zip(w.letters, w.delays[1:]):
        if letter.kind == START:
            carrier: list[int] = []
            stay = iter(active)
            for pos, label in enumerate(letter.carrier.labels):
                if pos in letter.moved:
                    e = len(labels)
                    labels.append(label)
                    starts[e] = now
                    prec.update((x, e) for x in done)
                    carrier.append(e)
                else:
                    carrier.append(next(stay))
            active = carrier
        else:
            carrier = list(active)
            for pos in letter.moved:
                e = carrier[pos]
                ends[e] = now
                done.add(e)
            active = [e for pos, e in enumerate(carrier) if pos not in letter.moved]
        order_carrier(carrier)
        now += d
    for e in active:
        ends[e] = now
    n = len(labels)
    p = Ipomset(tuple(labels), frozenset(prec), transitive_closure(evord), sources, frozenset(active))
    return Tipomset(p, tuple(starts[e] for e in range(n)), tuple(ends[e] for e in range(n)), now)


def tipomset_to_idword(p: Tipomset) -> IdWord:
    """The unique sparse idword whose replay is ``p``."""
    steps = _schedule(p.ipomset, p.starts, p.ends)
    letters = _steps_to_letters(p.ipomset, steps)
    times = [t for t, *_ in steps]
    delays: list[Fraction] = []
    prev = Fraction(0)
    for t in times:
        delays.append(t - prev)
        prev = t
    delays.append(p.duration - prev)
    return IdWord(p.ipomset.source_conclist, tuple(delays), tuple(letters), p.ipomset.target_conclist)


# ---------------------------------------------------------------------------
# delay words and timed words


@dataclass(frozen=True)
class DelayWord:
    """``d0 a1 d1 ... an dn``; a zero delay stands for adjacency of symbols."""

    delays: tuple[Fraction, ...]
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "delays", tuple(as_rational(d) for d in self.delays))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(self.delays) != len(self.symbols) + 1:
            raise TimedError("a delay word has one more delay than symbols")
        if any(d < 0 for d in self.delays):
            raise TimedError("negative delay")

    @classmethod
    def from_tokens(cls, tokens: Iterable) -> "DelayWord":
        """Normal form of an arbitrary sequence of delays and symbols."""
        delays: list[Fraction] = []
        symbols: list[str] = []
        acc = Fraction(0)
        for tok in tokens:
            if isinstance(tok, str) and not _looks_numeric(tok):
                delays.append(acc)
                symbols.append(tok)
                acc = Fraction(0)
            else:
                d = as_rational(tok)
                if d < 0:
                    raise TimedError(f"negative delay {d}")
                acc += d
        delays.append(acc)
        return cls(tuple(delays), tuple(symbols))

    @property
    def duration(self) -> Fraction:
        return sum(self.delays, Fraction(0))

    def tokens(self) -> list:
        out: list = [self.delays[0]]
        for a, d in zip(self.symbols, self.delays[1:]):
            out += [a, d]
        return out

    def then(self, other: "DelayWord") -> "DelayWord":
        return DelayWord.from_tokens(self.tokens() + other.tokens())

    def sort_key(self) -> tuple:
        return (len(self.symbols), self.symbols, self.delays)

    def __str__(self) -> str:
        return " ".join(t if isinstance(t, str) else format_rational(t) for t in self.tokens())


def _looks_numeric(tok: str) -> bool:
    try:
        Fraction(tok)
    except (ValueError, ZeroDivisionError):
        return False
    return True


@dataclass(frozen=True)
class TimedWord:
    """``(a0, t0) ... (an, tn) t(n+1)`` with non-decreasing timestamps."""

    events: tuple[tuple[str, Fraction], ...]
    duration: Fraction

    def __post_init__(self):
        evs = tuple((a, as_rational(t)) for a, t in self.events)
        object.__setattr__(self, "events", evs)
        object.__setattr__(self, "duration", as_rational(self.duration))
        prev = Fraction(0)
        for _, t in evs:
            if t < prev:
                raise TimedError("timestamps must be non-negative and non-decreasing")
            prev = t
        if self.duration < prev:
            raise TimedError("duration precedes the last timestamp")

    def __str__(self) -> str:
        body = " ".join(f"({a},{format_rational(t)})" for a, t in self.events)
        return f"{body} {format_rational(self.duration)}".strip()


def delay_to_timed(w: DelayWord) -> TimedWord:
    now = Fraction(0)
    events = []
    for a, d in zip(w.symbols, w.delays):
        now += d
        events.append((a, now))
    return TimedWord(tuple(events), w.duration)


def timed_to_delay(w: TimedWord) -> DelayWord:
    prev = Fraction(0)
    delays = []
    for _, t in w.events:
        delays.append(t - prev)
        prev = t
    delays.append(w.duration - prev)
    return DelayWord(tuple(delays), tuple(a for a, _ in w.events))


# ---------------------------------------------------------------------------
# embeddings


def embed_delay_word(w: DelayWord) -> IdWord:
    """Each symbol becomes an instantaneous start/terminate pair."""
    tokens: list = [w.delays[0]]
    for a, d in zip(w.symbols, w.delays[1:]):
        tokens += [StepLetter.starter(Conclist((a,))), Fraction(0), StepLetter.terminator(Conclist((a,))), d]
    return normalize_idword(tokens, Conclist(), Conclist())


def embed_step_sequence(s: StepSequence) -> IdWord:
    """Insert zero delays everywhere."""
    tokens: list = [Fraction(0)]
    for letter in s.letters:
        tokens += [letter, Fraction(0)]
    return normalize_idword(tokens, s.left, s.right)


def embed_timed_word(w: TimedWord) -> Tipomset:
    """Totally ordered instantaneous events without interfaces."""
    labels = tuple(a for a, _ in w.events)
    return Tipomset(
        Ipomset.word(labels),
        tuple(t for _, t in w.events),
        tuple(t for _, t in w.events),
        w.duration,
    )


def embed_ipomset(p: Ipomset) -> Tipomset:
    """Every event active exactly at time 0, duration 0."""
    zeros = (Fraction(0),) * len(p)
    return Tipomset(p, zeros, zeros, Fraction(0))
