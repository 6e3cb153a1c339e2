from fractions import Fraction as F

import pytest
from hypothesis import given

from hdtalang.ipomsets import Conclist, Ipomset, StepLetter
from hdtalang.syntax import (
    SyntaxErr,
    format_compact,
    format_ipomset,
    parse_delay_word,
    parse_idword,
    parse_ipomset,
    parse_letter,
    parse_letters,
    parse_tipomset,
)

from strategies import idwords, ipomsets, tipomsets


def test_word_shorthand():
    assert parse_ipomset("ab") == Ipomset.word("ab")
    assert parse_ipomset("send.recv") == Ipomset.word(["send", "recv"])


def test_discrete_shorthand():
    assert parse_ipomset("[a||b]") == Ipomset.discrete("a<b")


def test_full_form_closes_relations():
    p = parse_ipomset("{events: x1:a, x2:b, x3:c; prec: x1<x2<x3; evord: ; S: ; T: }")
    assert (0, 2) in p.prec and p == Ipomset.word("abc")


def test_missing_fields_default_to_empty():
    p = parse_ipomset("{events: x1:a; S: x1}")
    assert p.sources == {0} and not p.targets


def test_compact_forms():
    assert format_compact(parse_ipomset("ba")) == "ba"
    assert format_compact(parse_ipomset("[b||a]")) == "[b||a]"
    interface = parse_ipomset("{events: x1:a; T: x1}")
    assert format_compact(interface) == format_ipomset(interface)


def test_letter_aliases_and_fields():
    assert parse_letter("starter{a<b}") == StepLetter.starter("a<b")
    assert parse_letter("terminator{carrier: a<b; end: a}") == StepLetter.terminator("a<b", {0})
    assert parse_letter("id{}") == StepLetter.identity(Conclist())


@pytest.mark.parametrize(
    "text",
    [
        "{events: x1:a; prec: x1<x9}",
        "{events: x1:a, x1:b}",
        "{events: x1:a[0,1]}",
        "start{carrier: a; end: a}",
        "{events: x1:a, x2:b; prec: ; evord: }",
    ],
)
def test_malformed_input(text):
    with pytest.raises((SyntaxErr, ValueError)):
        if text.startswith("start"):
            parse_letter(text)
        else:
            parse_ipomset(text)


def test_tipomset_needs_duration():
    with pytest.raises(SyntaxErr):
        parse_tipomset("{events: x1:a[0,1]}")


def test_idword_text():
    w = parse_idword("1.5 start{a} 1/2 term{a} 2")
    assert w.delays == (F(3, 2), F(1, 2), 2) and w.duration == 4


def test_delay_word_text():
    w = parse_delay_word("1 a 0.5 b 2")
    assert w.symbols == ("a", "b") and str(w) == "1 a 0.5 b 2"


def test_letters_text():
    assert parse_letters("start{a} term{a}") == [StepLetter.starter("a"), StepLetter.terminator("a")]


@given(ipomsets)
def test_ipomset_roundtrip(p):
    assert parse_ipomset(format_ipomset(p)) == p
    assert parse_ipomset(format_compact(p)) == p


@given(tipomsets)
def test_tipomset_roundtrip(t):
    assert parse_tipomset(str(t)) == t


@given(idwords)
def test_idword_roundtrip(w):
    assert parse_idword(str(w)) == w
