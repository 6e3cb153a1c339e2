"""Operational semantics of HDTAs and timed automata, and bounded exploration.

A path alternates delay moves and action moves.  Exploration enumerates
paths breadth-first by the number of action moves; the delays tried at each
configuration are the zero delay, one delay per region crossed by the
time ray (when ``region_delays`` is on), and the multiples of a user grid.
The timed output is therefore an under-approximation of the language while
the untimed output is complete by region bisimulation.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .clocks import Valuation, ray_delays, region_of
from .ipomsets import START, TERM, Ipomset, StepLetter, fuse_letters
from .models import HDA, HDTA, UPPER, TimedAutomaton
from .timed import DelayWord, IdWord, Tipomset, as_rational, idword_to_tipomset, tglue

log = logging.getLogger(__name__)

DELAY = "delay"


@dataclass(frozen=True)
class Configuration:
    cell: str
    valuation: Valuation

    def __str__(self) -> str:
        return f"({self.cell}, {self.valuation})"


@dataclass(frozen=True)
class Move:
    """A delay, an upstep (``kind == START``) or a downstep (``kind == TERM``).

    For action moves ``events`` are positions in ``letter.carrier``, which is
    the conclist of the higher cell of the step.
    """

    kind: str
    source: Configuration
    target: Configuration
    delay: Fraction = Fraction(0)
    letter: StepLetter | None = None

    @property
    def events(self) -> frozenset[int]:
        return self.letter.moved if self.letter else frozenset()

    def label(self) -> str:
        if self.kind == DELAY:
            from .timed import format_rational

            return f"delay {format_rational(self.delay)}"
        names = ",".join(self.letter.carrier.position_name(i) for i in sorted(self.letter.moved))
        return f"{'up' if self.kind == START else 'down'} {names}"

    def __str__(self) -> str:
        return f"{self.source} --{self.label()}--> {self.target}"


@dataclass(frozen=True)
class Path:
    start: Configuration
    moves: tuple[Move, ...] = ()

    @property
    def end(self) -> Configuration:
        return self.moves[-1].target if self.moves else self.start

    def then(self, move: Move) -> "Path":
        if move.source != self.end:
            raise ValueError("move does not continue the path")
        return Path(self.start, self.moves + (move,))

    def is_accepting(self, model: HDTA) -> bool:
        return self.start.cell in model.init and self.start.valuation == model.zero() and self.end.cell in model.accept


def _hdta(model: HDA | HDTA) -> HDTA:
    return model.as_hdta()


def initial_configurations(model: HDA | HDTA) -> list[Configuration]:
    m = _hdta(model)
    v0 = m.zero()
    return [Configuration(c, v0) for c in m.init if m.invariant(c).holds(v0)]


def enabled_action_moves(model: HDA | HDTA, c: Configuration) -> list[Move]:
    """Upsteps into cofaces and downsteps onto upper faces, in a fixed order."""
    m = _hdta(model)
    out: list[Move] = []
    v = c.valuation
    left = v.reset(m.exits(c.cell))
    for x, pos in m.lower_cofaces(c.cell):
        if m.invariant(x).holds(left):
            letter = StepLetter(m.ev(x), START, pos)
            out.append(Move(START, c, Configuration(x, left), letter=letter))
    conc = m.ev(c.cell)
    for k in range(1, len(conc) + 1):
        for pos in combinations(range(len(conc)), k):
            y = m.face(c.cell, UPPER, pos)
            if y is not None and m.invariant(y).holds(left):
                letter = StepLetter(conc, TERM, frozenset(pos))
                out.append(Move(TERM, c, Configuration(y, left), letter=letter))
    return out


def delay_move(model: HDA | HDTA, c: Configuration, d) -> Move | None:
    """Delay ``d`` inside the current cell, or ``None`` if the invariant breaks.

    Invariants are conjunctions of bounds, hence convex along the time ray;
    since the source satisfies the invariant, checking the endpoint suffices.
    """
    m = _hdta(model)
    d = as_rational(d)
    if d < 0:
        raise ValueError("negative delay")
    w = c.valuation.delay(d)
    if not m.invariant(c.cell).holds(w):
        return None
    return Move(DELAY, c, Configuration(c.cell, w), delay=d)


def action_move(model: HDA | HDTA, c: Configuration, kind: str, names: Iterable[str]) -> Move | None:
    """The upstep/downstep moving the named events, if enabled."""
    wanted = sorted(names)
    for mv in enabled_action_moves(model, c):
        if mv.kind != kind:
            continue
        got = sorted(mv.letter.carrier.position_name(i) for i in mv.letter.moved)
        if got == wanted:
            return mv
    return None


def move_tipomset(model: HDA | HDTA, move: Move) -> Tipomset:
    m = _hdta(model)
    if move.kind == DELAY:
        return Tipomset.identity(m.ev(move.source.cell), move.delay)
    p = move.letter.to_ipomset()
    zeros = (Fraction(0),) * len(p)
    return Tipomset(p, zeros, zeros, Fraction(0))


def ev_path(model: HDA | HDTA, path: Path) -> Tipomset:
    """Observable content as a tipomset: timed gluing along the path."""
    m = _hdta(model)
    acc = Tipomset.identity(m.ev(path.start.cell), 0)
    for mv in path.moves:
        nxt = tglue(acc, move_tipomset(m, mv))
        if nxt is None:
            raise ValueError(f"path does not glue at {mv}")
        acc = nxt
    return acc


def ev_path_idword(model: HDA | HDTA, path: Path) -> IdWord:
    """Observable content as an idword: delays and letters concatenated."""
    m = _hdta(model)
    w = IdWord.empty(m.ev(path.start.cell))
    for mv in path.moves:
        w = w.append_delay(mv.delay) if mv.kind == DELAY else w.append_letter(mv.letter)
    return w


# ---------------------------------------------------------------------------
# bounded exploration


@dataclass(frozen=True)
class Fuel:
    max_actions: int = 6
    delay_grid: Fraction | None = None
    max_duration: Fraction | None = None
    region_delays: bool = True
    dedupe: str = "exact"  # or "region"
    workers: int = 1

    def __post_init__(self):
        if self.max_actions < 0:
            raise ValueError("max_actions must be non-negative")
        if self.delay_grid is not None:
            object.__setattr__(self, "delay_grid", as_rational(self.delay_grid))
            if self.delay_grid <= 0:
                raise ValueError("delay grid must be positive")
        if self.max_duration is not None:
            object.__setattr__(self, "max_duration", as_rational(self.max_duration))
            if self.max_duration < 0:
                raise ValueError("max duration must be non-negative")
        if self.dedupe not in ("exact", "region"):
            raise ValueError("dedupe is 'exact' or 'region'")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass
class Exploration:
    """Result of a bounded exploration.

    ``truncated`` is set when action moves were still enabled once the fuel
    ran out, so longer paths (and possibly more language) exist.
    """

    language: frozenset
    truncated: bool
    paths: dict = field(default_factory=dict)

    def untimed(self) -> frozenset[Ipomset]:
        return frozenset(t.ipomset for t in self.language)

    def sorted(self) -> list:
        return sorted(self.language, key=lambda t: t.sort_key())


def _candidate_delays(v: Valuation, cap: int, elapsed: Fraction, fuel: Fuel) -> list[Fraction]:
    ds = {Fraction(0)}
    if fuel.region_delays:
        ds.update(ray_delays(v, cap))
    if fuel.delay_grid is not None:
        g = fuel.delay_grid
        horizon = fuel.max_duration - elapsed if fuel.max_duration is not None else Fraction(cap + 1)
        k = 1
        while k * g <= horizon:
            ds.add(k * g)
            k += 1
    if fuel.max_duration is not None:
        ds = {d for d in ds if elapsed + d <= fuel.max_duration}
    return sorted(ds)


# a node is (configuration, elapsed time, observable prefix, path)
_Node = tuple


def _node_key(node: _Node, cap: int, fuel: Fuel):
    conf, elapsed, word, _ = node
    if fuel.dedupe == "region":
        untimed = (word.left, tuple(fuse_letters(word.letters)))
        extra = elapsed if fuel.max_duration is not None else None
        return (conf.cell, region_of(conf.valuation, cap), untimed, extra)
    return (conf, elapsed, word)


def _delay_children(m, node: _Node, cap: int, fuel: Fuel) -> list[_Node]:
    conf, elapsed, word, path = node
    out = []
    for d in _candidate_delays(conf.valuation, cap, elapsed, fuel):
        mv = delay_move(m, conf, d)
        if mv is None:
            continue
        out.append((mv.target, elapsed + d, word.append_delay(d), path + (mv,) if d else path))
    return out


def _action_children(m, node: _Node) -> list[_Node]:
    conf, elapsed, word, path = node
    return [(mv.target, elapsed, word.append_letter(mv.letter), path + (mv,)) for mv in enabled_action_moves(m, conf)]


def _expand_chunk(args) -> list[tuple[list[_Node], list[_Node]]]:
    m, nodes, cap, fuel = args
    result = []
    for node in nodes:
        delayed = _delay_children(m, node, cap, fuel)
        acted = [child for dn in delayed for child in _action_children(m, dn)]
        result.append((delayed, acted))
    return result


def explore(model: HDA | HDTA, fuel: Fuel = Fuel(), keep_paths: bool = False) -> Exploration:
    """Tipomsets of accepting paths with at most ``fuel.max_actions`` action moves."""
    m = _hdta(model)
    cap = m.max_constant
    frontier: dict = {}
    for c in initial_configurations(m):
        node = (c, Fraction(0), IdWord.empty(m.ev(c.cell)), ())
        frontier.setdefault(_node_key(node, cap, fuel), node)
    seen = set(frontier)
    words: dict[IdWord, tuple] = {}
    truncated = False
    pool = ProcessPoolExecutor(fuel.workers) if fuel.workers > 1 else None
    try:
        for level in range(fuel.max_actions + 1):
            nodes = list(frontier.values())
            if not nodes:
                break
            expansions = _expand_all(pool, m, nodes, cap, fuel)
            nxt: dict = {}
            for delayed, acted in expansions:
                for conf, _, word, path in delayed:
                    if conf.cell in m.accept and word not in words:
                        words[word] = path
                if level == fuel.max_actions:
                    truncated = truncated or bool(acted)
                    continue
                for child in acted:
                    key = _node_key(child, cap, fuel)
                    if key in seen:
                        continue
                    seen.add(key)
                    nxt[key] = child
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    lang = {}
    for w, path in words.items():
        t = idword_to_tipomset(w)
        lang.setdefault(t, path)
    paths = {}
    if keep_paths:
        starts = {c for c in initial_configurations(m)}
        for t, moves in lang.items():
            start = moves[0].source if moves else next(iter(starts))
            paths[t] = Path(start, moves)
    return Exploration(frozenset(lang), truncated, paths)


def _expand_all(pool, m, nodes, cap, fuel):
    if pool is None:
        return _expand_chunk((m, nodes, cap, fuel))
    size = max(1, len(nodes) // (fuel.workers * 4))
    chunks = [nodes[i : i + size] for i in range(0, len(nodes), size)]
    out = []
    for part in pool.map(_expand_chunk, [(m, ch, cap, fuel) for ch in chunks]):
        out.extend(part)
    return out


def explore_untimed(model: HDA | HDTA, max_actions: int = 8) -> Exploration:
    """Untimed projection, complete up to the action bound."""
    fuel = Fuel(max_actions=max_actions, dedupe="region")
    res = explore(model, fuel)
    return Exploration(res.untimed(), res.truncated)


def random_walk(
    model: HDA | HDTA, rng: random.Random, steps: int = 6, grid: Fraction = Fraction(1, 2)
) -> Path | None:
    """A random path alternating delays (on ``grid`` or region ray points) and actions."""
    m = _hdta(model)
    starts = initial_configurations(m)
    if not starts:
        return None
    path = Path(rng.choice(starts))
    cap = m.max_constant
    for _ in range(steps):
        conf = path.end
        ds = sorted(set(ray_delays(conf.valuation, cap)) | {grid * k for k in range(0, 2 * (cap + 1))})
        moves = [mv for d in ds if (mv := delay_move(m, conf, d)) is not None and d > 0]
        if moves and rng.random() < 0.5:
            path = path.then(rng.choice(moves))
            conf = path.end
        acts = enabled_action_moves(m, conf)
        if not acts:
            break
        path = path.then(rng.choice(acts))
    return path


# ---------------------------------------------------------------------------
# timed automata


@dataclass(frozen=True)
class TAMove:
    kind: str  # "delay" or "action"
    source: Configuration
    target: Configuration
    delay: Fraction = Fraction(0)
    label: str | None = None


def ta_initial(ta: TimedAutomaton) -> list[Configuration]:
    v0 = ta.zero()
    return [Configuration(q, v0) for q in ta.init if ta.invariant(q).holds(v0)]


def ta_action_moves(ta: TimedAutomaton, c: Configuration) -> list[TAMove]:
    out = []
    for e in ta.edges:
        if e.src != c.cell or not e.guard.holds(c.valuation):
            continue
        w = c.valuation.reset(e.resets)
        if ta.invariant(e.dst).holds(w):
            out.append(TAMove("action", c, Configuration(e.dst, w), label=e.label))
    return out


def ta_delay_move(ta: TimedAutomaton, c: Configuration, d) -> TAMove | None:
    d = as_rational(d)
    w = c.valuation.delay(d)
    if not ta.invariant(c.cell).holds(w):
        return None
    return TAMove(DELAY, c, Configuration(c.cell, w), delay=d)


def ta_explore(ta: TimedAutomaton, fuel: Fuel = Fuel()) -> Exploration:
    """Delay words of accepting runs with at most ``fuel.max_actions`` actions."""
    cap = ta.max_constant
    frontier = {}
    for c in ta_initial(ta):
        frontier.setdefault((c, Fraction(0), DelayWord((Fraction(0),), ())), None)
    seen = set(frontier)
    words: set[DelayWord] = set()
    truncated = False
    for level in range(fuel.max_actions + 1):
        nxt = {}
        for conf, elapsed, word in frontier:
            for d in _candidate_delays(conf.valuation, cap, elapsed, fuel):
                mv = ta_delay_move(ta, conf, d)
                if mv is None:
                    continue
                here = mv.target
                w = word.then(DelayWord((d,), ()))
                if here.cell in ta.accept:
                    words.add(w)
                acts = ta_action_moves(ta, here)
                if level == fuel.max_actions:
                    truncated = truncated or bool(acts)
                    continue
                for am in acts:
                    key = (am.target, elapsed + d, w.then(DelayWord((0, 0), (am.label,))))
                    if key not in seen:
                        seen.add(key)
                        nxt[key] = None
        frontier = nxt
    return Exploration(frozenset(words), truncated)
