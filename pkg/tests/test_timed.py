from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hdtalang.generators import split_idword
from hdtalang.ipomsets import Conclist, StepLetter, glue, glue_sequence, sparse_decompose
from hdtalang.modelio import bundled_path
from hdtalang.syntax import parse_idword, parse_ipomset, parse_tipomset
from hdtalang.timed import (
    DelayWord,
    IdWord,
    TimedError,
    Tipomset,
    TimedWord,
    as_rational,
    delay_to_timed,
    embed_delay_word,
    embed_ipomset,
    embed_step_sequence,
    embed_timed_word,
    format_rational,
    idword_to_tipomset,
    normalize_idword,
    tglue,
    timed_to_delay,
    tipomset_isomorphic,
    tipomset_to_idword,
    untime,
)

from strategies import coherent_pairs, idwords, ipomsets, rngs, tipomsets


def fixture(name: str) -> str:
    return bundled_path(name).read_text()


def spans(t: Tipomset) -> list:
    return sorted((t.ipomset.labels[x], t.starts[x], t.ends[x]) for x in t.ipomset.events)


class TestNumbers:
    def test_floats_are_read_by_their_decimal_form(self):
        assert as_rational(0.1) == F(1, 10)
        assert as_rational("3/4") == F(3, 4)

    def test_format(self):
        assert format_rational(F(3, 2)) == "1.5"
        assert format_rational(F(1, 3)) == "1/3"
        assert format_rational(F(4)) == "4"


class TestTipomset:
    def test_source_must_start_at_zero(self):
        with pytest.raises(TimedError):
            Tipomset.from_intervals("a", [(1, 2)], 2, sources={0})

    def test_timestamps_must_agree_with_precedence(self):
        with pytest.raises(TimedError):
            Tipomset.from_intervals("ab", [(0, 1), (2, 3)], 3, evord={(0, 1)})
        with pytest.raises(TimedError):
            Tipomset.from_intervals("ab", [(0, 2), (1, 3)], 3, prec={(0, 1)})

    def test_touching_intervals_may_precede(self):
        t = Tipomset.from_intervals("ab", [(0, 1), (1, 2)], 2, prec={(0, 1)})
        assert untime(t) == parse_ipomset("ab")

    def test_equality_needs_matching_timestamps(self):
        t = Tipomset.from_intervals("ab", [(0, 1), (2, 3)], 3, prec={(0, 1)})
        u = Tipomset.from_intervals("ab", [(0, 1), (2, 4)], 4, prec={(0, 1)})
        assert t != u and not tipomset_isomorphic(t, u)

    @given(tipomsets)
    def test_canonical_roundtrip(self, t):
        assert t.canonical() == t and tipomset_isomorphic(t, t.canonical())

    @given(tipomsets)
    def test_text_roundtrip(self, t):
        assert parse_tipomset(str(t)) == t


class TestGluing:
    def test_fixture_gluing(self):
        t1 = parse_tipomset(fixture("t1.tipomset"))
        t2 = parse_tipomset(fixture("t2.tipomset"))
        u = tglue(t1, t2)
        assert u.duration == 7
        assert spans(u) == [("a", 0, 5), ("b", F(7, 2), F(13, 2)), ("c", 0, F(3, 2)), ("c", 4, 6), ("d", F(3, 2), 3)]
        # the d and first c events are finished before b and the second c start
        assert untime(u) == glue(untime(t1), untime(t2))

    def test_fixture_idword_denotes_the_glued_tipomset(self):
        t1 = parse_tipomset(fixture("t1.tipomset"))
        t2 = parse_tipomset(fixture("t2.tipomset"))
        w = parse_idword(fixture("t.idword"))
        assert idword_to_tipomset(w) == tglue(t1, t2)
        assert tipomset_to_idword(tglue(t1, t2)) == w

    def test_mismatch_is_none(self):
        a = Tipomset.from_intervals("a", [(0, 1)], 1, targets={0})
        b = Tipomset.from_intervals("b", [(0, 1)], 1)
        assert tglue(a, b) is None

    @given(tipomsets)
    def test_identities_are_neutral(self, t):
        left = Tipomset.identity(t.ipomset.source_conclist, 0)
        right = Tipomset.identity(t.ipomset.target_conclist, 0)
        assert tglue(left, t) == t and tglue(t, right) == t

    @given(coherent_pairs)
    def test_durations_add_and_untiming_commutes(self, pair):
        p, q = pair
        u = tglue(p, q)
        assert u.duration == p.duration + q.duration
        assert untime(u) == glue(untime(p), untime(q))

    @given(idwords, rngs)
    def test_associative(self, w, rng):
        k = rng.randrange(len(w.delays))
        u, rest = split_idword(w, k, F(rng.randint(0, 2), 2))
        k2 = rng.randrange(len(rest.delays))
        v, x = split_idword(rest, k2, F(rng.randint(0, 2), 2))
        a, b, c = map(idword_to_tipomset, (u, v, x))
        assert tglue(tglue(a, b), c) == tglue(a, tglue(b, c)) == idword_to_tipomset(w)


class TestIdWords:
    def test_zero_delay_between_same_kind_is_not_sparse(self):
        with pytest.raises(TimedError):
            IdWord(
                Conclist(),
                (F(0), F(0), F(0)),
                (StepLetter.starter("a"), StepLetter.starter("a<b", {1})),
                Conclist.of("a<b"),
            )

    def test_normalization_fuses_and_sums(self):
        a, ab = StepLetter.starter("a"), StepLetter.starter("a<b", {1})
        w = normalize_idword([F(1), F(2), a, F(0), ab, F(1), StepLetter.terminator("a<b")])
        assert w.delays == (3, 1, 0) and w.letters == (StepLetter.starter("a<b"), StepLetter.terminator("a<b"))

    def test_positive_delay_keeps_same_kind_letters_apart(self):
        a, ab = StepLetter.starter("a"), StepLetter.starter("a<b", {1})
        w = normalize_idword([a, F(1), ab], Conclist(), Conclist.of("a<b"))
        assert len(w.letters) == 2

    def test_append_letter_fuses_on_zero_delay(self):
        w = IdWord.empty().append_letter(StepLetter.starter("a")).append_letter(StepLetter.starter("a<b", {1}))
        assert w.letters == (StepLetter.starter("a<b"),)

    @given(tipomsets)
    def test_bijection_from_tipomsets(self, t):
        w = tipomset_to_idword(t)
        back = idword_to_tipomset(w)
        assert back == t and spans(back) == spans(t) and back.duration == t.duration

    @given(idwords)
    def test_bijection_from_idwords(self, w):
        assert tipomset_to_idword(idword_to_tipomset(w)) == w
        assert parse_idword(str(w)) == w

    @given(idwords, rngs)
    def test_concatenation_is_gluing(self, w, rng):
        u, v = split_idword(w, rng.randrange(len(w.delays)), F(rng.randint(0, 3), 3))
        assert u.then(v) == w
        assert tglue(idword_to_tipomset(u), idword_to_tipomset(v)) == idword_to_tipomset(w)

    @given(idwords)
    def test_duration_is_sum_of_delays(self, w):
        assert idword_to_tipomset(w).duration == w.duration


class TestEmbeddings:
    def test_delay_word(self):
        w = DelayWord.from_tokens([1, "a", "0.5", "b", 2])
        assert w.delays == (1, F(1, 2), 2)
        t = idword_to_tipomset(embed_delay_word(w))
        assert spans(t) == [("a", 1, 1), ("b", F(3, 2), F(3, 2))] and t.duration == F(7, 2)
        assert untime(t) == parse_ipomset("ab")

    def test_simultaneous_symbols_stay_ordered(self):
        t = idword_to_tipomset(embed_delay_word(DelayWord.from_tokens(["a", 0, "b"])))
        assert untime(t) == parse_ipomset("ab") and t.duration == 0

    @given(st.lists(st.tuples(st.sampled_from("ab"), st.fractions(0, 5, max_denominator=4)), max_size=5))
    def test_timed_and_delay_words_agree(self, raw):
        now, events = F(0), []
        for a, d in raw:
            now += d
            events.append((a, now))
        tw = TimedWord(tuple(events), now + 1)
        assert delay_to_timed(timed_to_delay(tw)) == tw
        assert embed_timed_word(tw) == idword_to_tipomset(embed_delay_word(timed_to_delay(tw)))

    @given(ipomsets)
    def test_step_sequences_embed_with_zero_delays(self, p):
        seq = sparse_decompose(p)
        w = embed_step_sequence(seq)
        assert w.duration == 0 and untime(idword_to_tipomset(w)) == glue_sequence(seq)
        assert idword_to_tipomset(w) == embed_ipomset(p)
