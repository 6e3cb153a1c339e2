"""Region automata, sparse normalization and untimed decision procedures.

The region automaton reads raw step letters: identities for delays,
starters for upsteps and terminators for downsteps.  Its sparse
normalization reads *boundary words* ``id_U0 P1 ... Pn id_U(n+1)`` whose
interior is a sparse step sequence; these correspond one-to-one with
ipomsets, so the language of the normalized automaton is the untimed
language of the model.
"""

from __future__ import annotations

import logging
from collections import deque
from itertools import combinations
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .clocks import Region, all_regions, region_of, region_satisfies
from .ipomsets import START, TERM, Conclist, Ipomset, StepLetter, StepSequence, down_closure, glue_sequence, sparse_decompose
from .models import HDA, HDTA, UPPER

log = logging.getLogger(__name__)

State = Hashable


@dataclass
class FiniteStepAutomaton:
    """A finite automaton over step letters (identities included)."""

    states: list
    initial: set
    accepting: set
    transitions: dict = field(default_factory=dict)  # state -> list[(letter, state)]
    conclists: dict = field(default_factory=dict)  # state -> Conclist

    def conclist(self, s: State) -> Conclist:
        if s in self.conclists:
            return self.conclists[s]
        for letter, _ in self.edges(s):
            return letter.source
        for es in self.transitions.values():
            for letter, t in es:
                if t == s:
                    return letter.target
        raise ValueError(f"state {s} has no letters")

    def add(self, src: State, letter: StepLetter, dst: State) -> None:
        edges = self.transitions.setdefault(src, [])
        if (letter, dst) not in edges:
            edges.append((letter, dst))

    def edges(self, s: State) -> list:
        return self.transitions.get(s, [])

    @property
    def letters(self) -> set[StepLetter]:
        return {a for es in self.transitions.values() for a, _ in es}

    def transition_count(self) -> int:
        return sum(len(es) for es in self.transitions.values())


def _prime(cell: str) -> tuple:
    return ("start", cell)


def build_region_automaton(model: HDA | HDTA, full: bool = False) -> FiniteStepAutomaton:
    """Region automaton; only reachable states unless ``full`` is set."""
    m = model.as_hdta()
    cap = m.max_constant
    clocks = m.clocks
    v0 = m.zero()
    r0 = region_of(v0, cap, clocks)
    states: list = []
    initial: set = set()
    accepting: set = set()
    fsa = FiniteStepAutomaton(states, initial, accepting)
    inside: dict[str, set[Region]] = {}
    if full:
        regions = all_regions(clocks, cap)
        for c in m.cells:
            inside[c] = {r for r in regions if region_satisfies(r, m.invariant(c))}

    def ok(cell: str, r: Region) -> bool:
        if full:
            return r in inside[cell]
        return region_satisfies(r, m.invariant(cell))

    seen: set = set()
    queue: deque = deque()

    def visit(s) -> None:
        if s not in seen:
            seen.add(s)
            states.append(s)
            fsa.conclists[s] = m.ev(s[0])
            if s[0] in m.accept:
                accepting.add(s)
            queue.append(s)

    for c in m.init:
        if ok(c, r0):
            p = _prime(c)
            states.append(p)
            fsa.conclists[p] = m.ev(c)
            initial.add(p)
            fsa.add(p, StepLetter.identity(m.ev(c)), (c, r0))
            visit((c, r0))
    if full:
        for c in m.cells:
            for r in sorted(inside[c], key=lambda r: (r.ints, r.ranks)):
                visit((c, r))
    while queue:
        cell, r = s = queue.popleft()
        ident = StepLetter.identity(m.ev(cell))
        if r.is_time_open:
            fsa.add(s, ident, s)
        nxt = r.time_successor()
        if nxt is not None and ok(cell, nxt):
            fsa.add(s, ident, (cell, nxt))
            visit((cell, nxt))
        left = r.reset(m.exits(cell))
        for x, pos in m.lower_cofaces(cell):
            if ok(x, left):
                fsa.add(s, StepLetter(m.ev(x), START, pos), (x, left))
                visit((x, left))
        conc = m.ev(cell)
        for k in range(1, len(conc) + 1):
            for pos in combinations(range(len(conc)), k):
                y = m.face(cell, UPPER, pos)
                if y is not None and ok(y, left):
                    fsa.add(s, StepLetter(conc, TERM, frozenset(pos)), (y, left))
                    visit((y, left))
    return fsa


# ---------------------------------------------------------------------------
# sparse normalization

_INIT = ("init",)
_ACCEPT = ("accept",)


@dataclass
class SparseAutomaton:
    """Epsilon-free automaton over boundary words of sparse step sequences."""

    initial: State
    accepting: set
    transitions: dict  # state -> dict[letter, set[state]]

    def post(self, states: Iterable[State], letter: StepLetter) -> frozenset:
        out: set = set()
        for s in states:
            out |= self.transitions.get(s, {}).get(letter, set())
        return frozenset(out)

    def out_letters(self, s: State) -> list[StepLetter]:
        return sorted(self.transitions.get(s, {}), key=StepLetter.sort_key)

    def accepts(self, word: Iterable[StepLetter]) -> bool:
        cur = frozenset({self.initial})
        for a in word:
            cur = self.post(cur, a)
            if not cur:
                return False
        return bool(cur & self.accepting)

    @property
    def states(self) -> set:
        out = {self.initial} | set(self.accepting)
        for s, d in self.transitions.items():
            out.add(s)
            for ts in d.values():
                out |= ts
        return out


def sparse_normalize(fsa: FiniteStepAutomaton) -> SparseAutomaton:
    """States ``(q, pending)``: the pending letter is emitted on a change of kind."""
    eps: dict = {}
    lab: dict = {}

    def add_eps(a, b):
        eps.setdefault(a, set()).add(b)

    def add_lab(a, letter, b):
        lab.setdefault(a, {}).setdefault(letter, set()).add(b)

    seen: set = set()
    queue: deque = deque()

    def visit(s):
        if s not in seen:
            seen.add(s)
            queue.append(s)

    for p in fsa.initial:
        for letter, q in fsa.edges(p):
            add_lab(_INIT, StepLetter.identity(letter.source), (q, None))
            visit((q, None))
    while queue:
        q, pend = s = queue.popleft()
        for letter, q2 in fsa.edges(q):
            if letter.is_identity:
                t = (q2, pend)
                add_eps(s, t)
            elif pend is None:
                t = (q2, letter)
                add_eps(s, t)
            elif pend.kind == letter.kind:
                t = (q2, pend.fuse(letter))
                add_eps(s, t)
            else:
                t = (q2, letter)
                add_lab(s, pend, t)
            visit(t)
        if q in fsa.accepting:
            here = pend.target if pend is not None else fsa.conclist(q)
            if pend is None:
                add_lab(s, StepLetter.identity(here), _ACCEPT)
            else:
                mid = ("end", here)
                add_lab(s, pend, mid)
                add_lab(mid, StepLetter.identity(here), _ACCEPT)

    # epsilon closure removal
    closure: dict = {}

    def close(s):
        if s in closure:
            return closure[s]
        out = {s}
        stack = [s]
        while stack:
            a = stack.pop()
            for b in eps.get(a, ()):
                if b not in out:
                    out.add(b)
                    stack.append(b)
        closure[s] = out
        return out

    trans: dict = {}
    sources = set(lab) | set(eps) | seen | {_INIT}
    for s in sources:
        merged: dict = {}
        for a in close(s):
            for letter, targets in lab.get(a, {}).items():
                merged.setdefault(letter, set()).update(targets)
        if merged:
            trans[s] = merged
    return SparseAutomaton(_INIT, {_ACCEPT}, trans)


def normalized(model: HDA | HDTA) -> SparseAutomaton:
    return sparse_normalize(build_region_automaton(model))


# ---------------------------------------------------------------------------
# decision procedures


def boundary_word(p: Ipomset) -> tuple[StepLetter, ...]:
    return sparse_decompose(p).boundary_word()


def word_to_ipomset(word: Iterable[StepLetter]) -> Ipomset:
    word = list(word)
    return glue_sequence(StepSequence(word[0].carrier, tuple(word[1:-1]), word[-1].carrier))


def untimed_member(model: HDA | HDTA | SparseAutomaton, p: Ipomset) -> bool:
    n = model if isinstance(model, SparseAutomaton) else normalized(model)
    return n.accepts(boundary_word(p))


def untimed_empty(model: HDA | HDTA | SparseAutomaton) -> bool:
    n = model if isinstance(model, SparseAutomaton) else normalized(model)
    seen = {n.initial}
    stack = [n.initial]
    while stack:
        s = stack.pop()
        if s in n.accepting:
            return False
        for targets in n.transitions.get(s, {}).values():
            for t in targets:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return True


def enumerate_language(model: HDA | HDTA | SparseAutomaton, max_letters: int) -> frozenset[Ipomset]:
    """Ipomsets whose sparse step sequence has at most ``max_letters`` interior letters."""
    n = model if isinstance(model, SparseAutomaton) else normalized(model)
    out: set[Ipomset] = set()
    # boundary words have max_letters + 2 letters at most
    level = {(n.initial, ())}
    for _ in range(max_letters + 2):
        nxt = set()
        for s, word in level:
            for letter, targets in n.transitions.get(s, {}).items():
                w = word + (letter,)
                for t in targets:
                    if t in n.accepting:
                        out.add(word_to_ipomset(w))
                    else:
                        nxt.add((t, w))
        level = nxt
    return frozenset(out)


@dataclass
class InclusionResult:
    included: bool
    counterexample: Ipomset | None = None
    word: tuple[StepLetter, ...] | None = None
    explored: int = 0

    def __bool__(self) -> bool:
        return self.included


def untimed_inclusion(
    a1: HDA | HDTA | SparseAutomaton,
    a2: HDA | HDTA | SparseAutomaton,
    down_closed: bool = False,
    max_letters: int = 8,
) -> InclusionResult:
    """Whether the untimed language of ``a1`` is contained in that of ``a2``.

    Forward breadth-first search over pairs (state of ``a1``, set of states
    of ``a2``) with antichain pruning.  The first counterexample found is a
    shortest one, and the lexicographically least among those under
    :meth:`StepLetter.sort_key`.

    With ``down_closed`` the right-hand language is replaced by its
    subsumption closure; this variant is a bounded check over words of at
    most ``max_letters`` interior letters.
    """
    n1 = a1 if isinstance(a1, SparseAutomaton) else normalized(a1)
    n2 = a2 if isinstance(a2, SparseAutomaton) else normalized(a2)
    if down_closed:
        return _bounded_down_inclusion(n1, n2, max_letters)
    start = (n1.initial, frozenset({n2.initial}))
    antichain: dict = {n1.initial: [start[1]]}
    queue: deque = deque([(start, ())])
    explored = 0
    while queue:
        (p, big), word = queue.popleft()
        explored += 1
        if p in n1.accepting and not (big & n2.accepting):
            return InclusionResult(False, word_to_ipomset(word), word, explored)
        for letter in n1.out_letters(p):
            big2 = n2.post(big, letter)
            for p2 in sorted(n1.transitions[p][letter], key=repr):
                known = antichain.setdefault(p2, [])
                if any(other <= big2 for other in known):
                    continue
                known[:] = [other for other in known if not big2 <= other]
                known.append(big2)
                queue.append(((p2, big2), word + (letter,)))
    return InclusionResult(True, explored=explored)


def _bounded_down_inclusion(n1: SparseAutomaton, n2: SparseAutomaton, max_letters: int) -> InclusionResult:
    left = enumerate_language(n1, max_letters)
    right = down_closure(enumerate_language(n2, max_letters))
    missing = sorted(left - right, key=lambda p: p.sort_key())
    if missing:
        p = missing[0]
        return InclusionResult(False, p, boundary_word(p), len(left))
    return InclusionResult(True, explored=len(left))


def format_region_automaton(fsa: FiniteStepAutomaton) -> str:
    """Text dump: one ``state``, ``init``, ``accept`` or ``trans`` record per line."""
    names = {s: f"s{i}" for i, s in enumerate(fsa.states)}

    def describe(s) -> str:
        if s[0] == "start":
            return f"{s[1]}'"
        return f"{s[0]} {s[1]}"

    lines = [f"# region automaton: {len(fsa.states)} states, {fsa.transition_count()} transitions"]
    for s in fsa.states:
        lines.append(f"state {names[s]} {describe(s)}")
    for s in fsa.states:
        if s in fsa.initial:
            lines.append(f"init {names[s]}")
    for s in fsa.states:
        if s in fsa.accepting:
            lines.append(f"accept {names[s]}")
    for s in fsa.states:
        for letter, t in fsa.edges(s):
            lines.append(f"trans {names[s]} {letter} {names[t]}")
    return "\n".join(lines) + "\n"
