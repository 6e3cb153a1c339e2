"""Acceptance suite: one test per criterion, each reported as a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines
appear at the end of the pytest report.
"""

from __future__ import annotations

import functools
import random
import time
from fractions import Fraction as F

from conftest import ACCEPTANCE, bundled
from hdtalang.clocks import ray_delays, region_equivalent, region_of, sample_valuation
from hdtalang.generators import random_coherent_pair, random_ipomset, random_ta, random_tipomset
from hdtalang.inclusion import enumerate_language, untimed_inclusion, untimed_member
from hdtalang.ipomsets import START, TERM, glue, glue_sequence, isomorphic, sparse_decompose
from hdtalang.modelio import bundled_path
from hdtalang.models import translate_ta
from hdtalang.semantics import (
    DELAY,
    Configuration,
    Fuel,
    Path,
    action_move,
    delay_move,
    enabled_action_moves,
    ev_path,
    explore,
    initial_configurations,
    random_walk,
    ta_explore,
)
from hdtalang.syntax import parse_ipomset, parse_tipomset
from hdtalang.timed import (
    embed_delay_word,
    idword_to_tipomset,
    tglue,
    tipomset_to_idword,
    untime,
)


def criterion(n: int, title: str, budget: float | None = None):
    """Record the outcome (and optionally enforce a time budget in seconds)."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            ok = False
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - t0
                if budget is not None:
                    assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
                ok = True
            finally:
                elapsed = time.perf_counter() - t0
                ACCEPTANCE[n] = (title, ok, elapsed)
                print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({elapsed:.2f}s)")

        return run

    return wrap


CONCURRENT_LANGUAGE = {parse_ipomset("[a||b]"), parse_ipomset("ab"), parse_ipomset("ba")}


@criterion(1, "untimed language of the square HDA is {[a||b], ab, ba}", budget=1.0)
def test_square_hda_language():
    res = explore(bundled("fig2.hda"), Fuel(max_actions=6, region_delays=False))
    assert res.untimed() == CONCURRENT_LANGUAGE


@criterion(2, "sparse decomposition is unique and glues back", budget=10.0)
def test_sparse_uniqueness():
    rng = random.Random(2)
    for _ in range(500):
        p = random_ipomset(rng, max_events=6, alphabet="abc")
        seq = sparse_decompose(p)
        back = glue_sequence(seq)
        assert isomorphic(back, p)
        assert sparse_decompose(back).letters == seq.letters


@criterion(3, "idword <-> tipomset round trip is exact", budget=10.0)
def test_idword_bijection():
    rng = random.Random(3)
    for _ in range(500):
        t = random_tipomset(rng)
        w = tipomset_to_idword(t)
        back = idword_to_tipomset(w)
        assert back == t
        assert spans(back) == spans(t) and back.duration == t.duration
        assert tipomset_to_idword(back) == w


@criterion(4, "untiming commutes with gluing")
def test_untiming_morphism():
    rng = random.Random(4)
    for _ in range(200):
        p, q = random_coherent_pair(rng)
        glued = tglue(p, q)
        assert glued is not None
        assert untime(glued) == glue(untime(p), untime(q))


@criterion(5, "timed gluing of the two fixture tipomsets")
def test_fixture_gluing():
    t1 = parse_tipomset(bundled_text("t1.tipomset"))
    t2 = parse_tipomset(bundled_text("t2.tipomset"))
    u = tglue(t1, t2)
    assert u is not None and u.duration == 7
    assert spans(u) == [
        ("a", 0, 5),
        ("b", F(7, 2), F(13, 2)),
        ("c", 0, F(3, 2)),
        ("c", 4, 6),
        ("d", F(3, 2), 3),
    ]


@criterion(6, "fig4 delay constraints and the worked five-delay path")
def test_fig4_delays_and_path():
    m = bundled("fig4.hdta")
    move = {
        "5": lambda c: delay_move(m, c, 5),
        "+a": lambda c: action_move(m, c, START, ["a"]),
        "2": lambda c: delay_move(m, c, 2),
        "+b": lambda c: action_move(m, c, START, ["b"]),
        "1": lambda c: delay_move(m, c, 1),
        "-b": lambda c: action_move(m, c, TERM, ["b"]),
        "1.5": lambda c: delay_move(m, c, F(3, 2)),
        "-a": lambda c: action_move(m, c, TERM, ["a"]),
        "2.5": lambda c: delay_move(m, c, F(5, 2)),
    }
    (start,) = initial_configurations(m)
    path = Path(start)
    for step in ["5", "+a", "2", "+b", "1", "-b", "1.5", "-a", "2.5"]:
        mv = move[step](path.end)
        assert mv is not None, step
        path = path.then(mv)
    assert path.is_accepting(m)
    t = ev_path(m, path)
    assert spans(t) == [("a", 5, F(19, 2)), ("b", 7, 8)] and t.duration == 12

    res = explore(m, Fuel(max_actions=4, delay_grid=F(1, 2), max_duration=12))
    assert res.language
    for t in res.language:
        ia, ib = (t.ipomset.labels.index(c) for c in "ab")
        d2 = t.starts[ib] - t.starts[ia]
        d3 = t.ends[ib] - t.starts[ib]
        d4 = t.ends[ia] - t.ends[ib]
        assert 1 <= d2 <= 4 and 1 <= d2 + d3 <= 4 and 2 <= d2 + d3 + d4 <= 5
        assert 1 <= d3 <= 3 and 1 <= d3 + d4 and 1 <= d4


@criterion(7, "region automaton language equals the untimed explored language", budget=60.0)
def test_region_automaton_language():
    for name in ["fig3.hdta", "fig4.hdta", "fig8left.hdta", "fig8right.hdta"]:
        m = bundled(name)
        regional = enumerate_language(m, 10)
        explored = explore(m, Fuel(max_actions=10, dedupe="region")).untimed()
        assert regional == explored, name


@criterion(8, "TA translation preserves languages (25 random TAs)")
def test_ta_translation():
    rng = random.Random(8)
    for _ in range(25):
        ta = random_ta(rng, max_locations=3, max_clocks=2, max_constant=3)
        ta_fuel = Fuel(max_actions=4, delay_grid=F(1, 2), max_duration=2, region_delays=False)
        # each TA action is an upstep followed by a downstep
        h_fuel = Fuel(max_actions=8, delay_grid=F(1, 2), max_duration=2, region_delays=False)
        words = {embed_delay_word(w) for w in ta_explore(ta, ta_fuel).language}
        translated = {tipomset_to_idword(t) for t in explore(translate_ta(ta), h_fuel).language}
        assert words == translated


@criterion(9, "membership and inclusion are not closed under subsumption")
def test_subsumption_non_closure():
    fig3, fig4 = bundled("fig3.hdta"), bundled("fig4.hdta")
    assert untimed_member(fig4, parse_ipomset("[a||b]"))
    assert not untimed_member(fig4, parse_ipomset("ab"))
    assert untimed_inclusion(fig4, fig3).included
    res = untimed_inclusion(fig3, fig4)
    assert not res.included
    assert res.counterexample in {parse_ipomset("ab"), parse_ipomset("ba")}


@criterion(10, "timestamps do not determine precedence")
def test_fig8_discrimination():
    left, right = bundled("fig8left.hdta"), bundled("fig8right.hdta")
    fuel = Fuel(max_actions=6, dedupe="region")
    l_lang, r_lang = explore(left, fuel), explore(right, fuel)
    assert l_lang.untimed() == {parse_ipomset("ab")}
    assert r_lang.untimed() == CONCURRENT_LANGUAGE
    instant_l = parse_tipomset("{events: x1:a[0,0], x2:b[0,0]; prec: x1<x2} @0")
    instant_r = parse_tipomset("{events: x1:a[0,0], x2:b[0,0]; evord: x1<x2} @0")
    assert instant_l in l_lang.language and instant_r in r_lang.language
    assert (instant_l.starts, instant_l.ends, instant_l.duration) == (
        instant_r.starts,
        instant_r.ends,
        instant_r.duration,
    )


@criterion(11, "region equivalence is a bisimulation on sampled moves")
def test_region_bisimulation():
    rng = random.Random(11)
    ms = [bundled(n).as_hdta() for n in ["fig2.hda", "fig3.hdta", "fig4.hdta", "fig8left.hdta", "fig8right.hdta"]]
    checked = 0
    while checked < 1000:
        m = rng.choice(ms)
        cap = m.max_constant
        path = random_walk(m, rng, steps=rng.randint(0, 5))
        conf = rng.choice([path.start] + [mv.target for mv in path.moves])
        moves = enabled_action_moves(m, conf)
        dmove = delay_move(m, conf, F(rng.randint(0, 40), rng.randint(1, 8)))
        if dmove is not None:
            moves.append(dmove)
        if not moves:
            continue
        mv = rng.choice(moves)
        twin = Configuration(conf.cell, sample_valuation(region_of(conf.valuation, cap), rng))
        assert region_equivalent(twin.valuation, conf.valuation, cap)
        if mv.kind == DELAY:
            answers = [a for d in ray_delays(twin.valuation, cap) if (a := delay_move(m, twin, d)) is not None]
        else:
            answers = [a for a in enabled_action_moves(m, twin) if a.letter == mv.letter]
        assert any(
            a.target.cell == mv.target.cell and region_equivalent(a.target.valuation, mv.target.valuation, cap)
            for a in answers
        ), (conf, mv)
        checked += 1


def bundled_text(name: str) -> str:
    return bundled_path(name).read_text()


def spans(t) -> list:
    return sorted((t.ipomset.labels[x], t.starts[x], t.ends[x]) for x in t.ipomset.events)
