from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdtalang.ipomsets import (
    Conclist,
    Ipomset,
    IpomsetError,
    StepLetter,
    StepSequence,
    down_closure,
    fuse_letters,
    glue,
    glue_all,
    glue_sequence,
    has_two_plus_two,
    is_interval_order,
    isomorphic,
    normalize_step_sequence,
    sparse_decompose,
    subsumes,
    transitive_closure,
)
from hdtalang.syntax import parse_ipomset, parse_letter

from oracles import brute_isomorphic, brute_subsumes, brute_two_plus_two
from strategies import ipomsets, small_ipomsets

AB = parse_ipomset("ab")
BA = parse_ipomset("ba")
A_PAR_B = parse_ipomset("[a||b]")


def relabel(p: Ipomset, perm) -> Ipomset:
    """The same ipomset with event ``x`` renamed to ``perm[x]``."""
    inv = {perm[x]: x for x in p.events}
    return Ipomset(
        tuple(p.labels[inv[y]] for y in p.events),
        {(perm[a], perm[b]) for a, b in p.prec},
        {(perm[a], perm[b]) for a, b in p.evord},
        {perm[x] for x in p.sources},
        {perm[x] for x in p.targets},
    )


class TestConclist:
    def test_of_parses_chains(self):
        assert tuple(Conclist.of("a<b<a")) == ("a", "b", "a")
        assert len(Conclist.of("")) == 0

    def test_position_names_disambiguate_repeats(self):
        c = Conclist.of("a<b<a")
        assert [c.position_name(i) for i in range(3)] == ["a#1", "b", "a#2"]
        assert c.resolve(["a#2", "b"]) == {1, 2}

    def test_resolve_rejects_ambiguous_name(self):
        with pytest.raises(IpomsetError):
            Conclist.of("a<a").resolve(["a"])

    def test_without(self):
        assert Conclist.of("a<b<c").without({1}) == Conclist.of("a<c")


class TestLetters:
    def test_source_and_target(self):
        s = StepLetter.starter("a<b", {1})
        assert s.source == Conclist.of("a") and s.target == Conclist.of("a<b")
        t = StepLetter.terminator("a<b", {0})
        assert t.source == Conclist.of("a<b") and t.target == Conclist.of("b")

    def test_fuse_same_kind(self):
        first = StepLetter.starter("a")
        second = StepLetter.starter("a<b", {1})
        assert first.fuse(second) == StepLetter.starter("a<b")

    def test_identity_is_neutral_for_glue(self):
        p = parse_ipomset("[a||b]")
        assert glue(Ipomset.identity(""), p) == p
        assert glue(p, Ipomset.identity("")) == p

    def test_starter_then_terminator_is_interval(self):
        u = glue(StepLetter.starter("a").to_ipomset(), StepLetter.terminator("a").to_ipomset())
        assert u == parse_ipomset("a")


class TestIpomset:
    def test_rejects_2_plus_2(self):
        with pytest.raises(IpomsetError):
            Ipomset(tuple("abcd"), {(0, 1), (2, 3)}, {(0, 2), (0, 3), (1, 2), (1, 3)})

    def test_rejects_unordered_concurrent_pair(self):
        with pytest.raises(IpomsetError):
            Ipomset(("a", "b"))

    def test_rejects_non_minimal_source(self):
        with pytest.raises(IpomsetError):
            Ipomset(("a", "b"), {(0, 1)}, sources={1})

    def test_equality_ignores_inessential_event_order(self):
        plain = Ipomset(("a", "b"), {(0, 1)})
        extra = Ipomset(("a", "b"), {(0, 1)}, {(0, 1)})
        assert plain == extra

    def test_concurrent_word_orders_differ(self):
        assert AB != BA and AB != A_PAR_B

    @given(ipomsets, st.randoms(use_true_random=False))
    def test_equality_is_isomorphism_invariant(self, p, rng):
        perm = list(p.events)
        rng.shuffle(perm)
        q = relabel(p, perm)
        assert q == p and hash(q) == hash(p)
        assert isomorphic(p, q)

    @given(small_ipomsets, small_ipomsets)
    def test_canonical_equality_matches_brute_isomorphism(self, p, q):
        assert (p == q) == brute_isomorphic(p, q)

    @given(ipomsets)
    def test_canonical_is_equal(self, p):
        assert p.canonical() == p


class TestIntervalOrders:
    @given(st.integers(0, 6), st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5))))
    def test_chain_criterion_matches_brute_force(self, n, raw):
        rel = {(a, b) for a, b in raw if a < b < n}
        prec = transitive_closure(rel)
        assert is_interval_order(n, prec) == (not brute_two_plus_two(n, prec))
        assert has_two_plus_two(n, prec) == brute_two_plus_two(n, prec)

    def test_two_plus_two(self):
        assert not is_interval_order(4, {(0, 1), (2, 3)})
        assert is_interval_order(4, {(0, 1), (2, 3), (0, 3)})


class TestSparse:
    def test_concurrent_pair(self):
        seq = sparse_decompose(A_PAR_B)
        assert [str(x) for x in seq.letters] == ["start{a<b}", "term{a<b}"]

    def test_word(self):
        seq = sparse_decompose(AB)
        assert [str(x) for x in seq.letters] == ["start{a}", "term{a}", "start{b}", "term{b}"]

    def test_interfaces_become_boundary(self):
        p = parse_ipomset("{events: x1:a; S: x1; T: x1}")
        seq = sparse_decompose(p)
        assert seq.letters == () and seq.left == seq.right == Conclist.of("a")

    @settings(max_examples=300)
    @given(ipomsets)
    def test_decomposition_is_sparse_and_glues_back(self, p):
        seq = sparse_decompose(p)
        assert seq.is_sparse
        assert glue_sequence(seq) == p
        assert sparse_decompose(glue_sequence(seq)).letters == seq.letters

    @given(ipomsets, st.randoms(use_true_random=False))
    def test_normalization_undoes_splitting(self, p, rng):
        # split each letter into single-event steps; normalization must fuse them back
        seq = sparse_decompose(p)
        pieces = []
        for letter in seq.letters:
            c = letter.carrier
            moved = sorted(letter.moved)
            rng.shuffle(moved)
            for k, e in enumerate(moved):
                done = set(moved[:k])
                if letter.kind == "start":
                    carrier = c.without(set(moved[k + 1 :]))
                    pos = c.remaining_positions(set(moved[k + 1 :])).index(e)
                    pieces.append(StepLetter.starter(carrier, {pos}))
                else:
                    carrier = c.without(done)
                    pos = c.remaining_positions(done).index(e)
                    pieces.append(StepLetter.terminator(carrier, {pos}))
        assert glue_sequence(pieces or [StepLetter.identity(seq.left)]) == p
        assert normalize_step_sequence(pieces, seq.left, seq.right).letters == seq.letters

    def test_fuse_letters_merges_runs(self):
        run = [StepLetter.starter("a"), StepLetter.starter("a<b", {1})]
        assert fuse_letters(run) == [StepLetter.starter("a<b")]

    def test_incoherent_sequence_rejected(self):
        with pytest.raises(IpomsetError):
            StepSequence(Conclist(), (StepLetter.terminator("a"),), Conclist())


class TestGlue:
    def test_words_concatenate(self):
        assert glue(parse_ipomset("a"), parse_ipomset("b")) == AB

    def test_mismatched_interfaces_do_not_glue(self):
        p = parse_ipomset("{events: x1:a; T: x1}")
        assert glue(p, parse_ipomset("b")) is None

    def test_glue_through_interface(self):
        p = parse_ipomset("{events: x1:a; T: x1}")
        q = parse_ipomset("{events: x1:a, x2:b; evord: x1<x2; S: x1}")
        assert glue(p, q) == A_PAR_B

    @given(ipomsets)
    def test_glue_all_of_letters(self, p):
        letters = [x.to_ipomset() for x in sparse_decompose(p).letters]
        assert glue_all(letters or [Ipomset.identity(p.source_conclist)]) == p


class TestSubsumption:
    def test_word_is_subsumed_by_concurrency(self):
        assert subsumes(AB, A_PAR_B) and subsumes(BA, A_PAR_B)
        assert not subsumes(A_PAR_B, AB)

    @given(small_ipomsets, small_ipomsets)
    def test_matches_brute_force(self, p, q):
        assert subsumes(p, q) == brute_subsumes(p, q)

    @given(ipomsets)
    def test_reflexive(self, p):
        assert subsumes(p, p)

    def test_down_closure_of_pair(self):
        assert down_closure({A_PAR_B}) == {A_PAR_B, AB, BA}

    def test_down_closure_with_autoconcurrency(self):
        assert down_closure({parse_ipomset("[a||a]")}) == {parse_ipomset("[a||a]"), parse_ipomset("aa")}

    def test_down_closure_of_three_concurrent_events(self):
        # oracle: all 19 posets on three labelled elements are interval orders
        closure = down_closure({parse_ipomset("[a||b||c]")})
        assert len(closure) == 19
        alts = {p for p in closure if p.is_word}
        assert {"".join(w) for w in permutations("abc")} == {
            "".join(p.labels[e] for e in sorted(p.events, key=lambda e: sum((z, e) in p.prec for z in p.events)))
            for p in alts
        }

    @settings(max_examples=50)
    @given(small_ipomsets)
    def test_down_closure_members_are_subsumed(self, p):
        for q in down_closure({p}):
            assert subsumes(q, p)


def test_letter_parse_roundtrip():
    for text in ["start{a<b}", "term{carrier: a<b; end: b}", "id{a}", "start{carrier: a<a; start: a#2}"]:
        assert str(parse_letter(text)) == text
