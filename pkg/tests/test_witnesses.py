import pytest
from pydantic import ValidationError

from automata.core import cycle, identity, permute_letters, singular, subcycle, transposition
from automata.witnesses import (
    WitnessFamily,
    WitnessNameError,
    WitnessSpec,
    build,
    canonical_letters,
    display_name,
    monoid_size,
    parse_witness,
)


def test_u4_rows():
    d = build(WitnessSpec(family=WitnessFamily.U3, n=4))
    assert d.transition("a").image == (1, 2, 3, 0)
    assert d.transition("b").image == (1, 0, 2, 3)
    assert d.transition("c").image == (0, 1, 2, 0)
    assert d.finals == frozenset({3})
    assert d.initial == 0


def test_dialect_final_sets():
    assert build(WitnessSpec(family=WitnessFamily.U0_3, n=5)).finals == frozenset({0})
    assert build(WitnessSpec(family=WitnessFamily.W0_4, n=5)).finals == frozenset({0})
    assert build(WitnessSpec(family=WitnessFamily.S2, n=5)).finals == frozenset({0})


def test_four_letter_reversed_order():
    d = build(WitnessSpec(family=WitnessFamily.U4, n=5, letter_order=tuple("dcba")))
    assert d.transition("d") == cycle(5)
    assert d.transition("c") == transposition(5, 0, 1)
    assert d.transition("b") == singular(5, 4, 0)
    assert d.transition("a") == identity(5)


def test_w_reversed_order():
    d = build(WitnessSpec(family=WitnessFamily.W4, n=5, letter_order=tuple("dcba")))
    assert d.transition("d") == cycle(5)
    assert d.transition("c") == transposition(5, 3, 4)
    assert d.transition("a") == identity(5)


def test_five_letter_order():
    d = build(WitnessSpec(family=WitnessFamily.U5, n=5, letter_order=tuple("ecbad")))
    assert d.transition("a") == identity(5)
    assert d.transition("b") == singular(5, 4, 0)
    assert d.transition("c") == transposition(5, 0, 1)
    assert d.transition("d") == subcycle(5, 1, 4)
    assert d.transition("e") == cycle(5)


def test_six_letter_pair():
    k = build(WitnessSpec(family=WitnessFamily.JO6_K, n=4))
    l = build(WitnessSpec(family=WitnessFamily.JO6_L, n=4))
    assert k.alphabet == l.alphabet == tuple("abcdef")
    assert k.transition("c") == subcycle(4, 1, 3)
    assert k.transition("e") == singular(4, 1, 0)
    assert l.transition("b") == cycle(4)
    assert l.transition("f") == singular(4, 1, 0)


def test_order_is_a_letter_permutation():
    for family in (WitnessFamily.U3, WitnessFamily.W4, WitnessFamily.U5):
        canonical = canonical_letters(family)
        order = tuple(reversed(canonical))
        spec = WitnessSpec(family=family, n=4, letter_order=order)
        plain = build(WitnessSpec(family=family, n=4))
        assert build(spec) == permute_letters(plain, dict(zip(canonical, order)))


def test_restriction_drops_letter():
    d = build(WitnessSpec(family=WitnessFamily.U3, n=4, restrict_to=("a", "b")))
    assert d.alphabet == ("a", "b")


def test_invalid_specs():
    with pytest.raises(ValidationError):
        WitnessSpec(family=WitnessFamily.U3, n=2)
    with pytest.raises(ValidationError):
        WitnessSpec(family=WitnessFamily.U3, n=4, letter_order=tuple("abd"))
    with pytest.raises(ValidationError):
        WitnessSpec(family=WitnessFamily.U3, n=4, finals_override=frozenset({1}))
    with pytest.raises(ValidationError):
        WitnessSpec(family=WitnessFamily.S2, n=4, restrict_to=("c",))


def test_finals_override():
    d = build(WitnessSpec(family=WitnessFamily.U3, n=4, finals_override=frozenset({0})))
    assert d.finals == frozenset({0})


def test_monoid_sizes():
    assert monoid_size(build(WitnessSpec(family=WitnessFamily.U3, n=3)), "abc") == 27
    assert monoid_size(build(WitnessSpec(family=WitnessFamily.U3, n=4)), "abc") == 256
    assert monoid_size(build(WitnessSpec(family=WitnessFamily.U3, n=4)), "ab") == 24
    assert monoid_size(build(WitnessSpec(family=WitnessFamily.U4, n=4)), "d") == 1


def test_monoid_needs_letters():
    with pytest.raises(ValueError):
        monoid_size(build(WitnessSpec(family=WitnessFamily.U3, n=3)), "")


def test_parse_witness_names():
    spec = parse_witness("U:n=5:order=dcba")
    assert spec.family is WitnessFamily.U4
    assert spec.letter_order == tuple("dcba")
    assert parse_witness("U:n=4").family is WitnessFamily.U3
    assert parse_witness("W0:n=4:order=abcd").family is WitnessFamily.W0_4
    assert parse_witness("T:n=5:order=bac").letter_order == tuple("bac")
    assert parse_witness("S:n=6:order=ba").family is WitnessFamily.S2
    assert parse_witness("U5L:n=4:order=ecbad").family is WitnessFamily.U5
    assert parse_witness("JO6K:n=4").family is WitnessFamily.JO6_K
    assert parse_witness("JO6L:n=5").n == 5
    assert parse_witness("U:n=4:restrict=ab").restrict_to == ("a", "b")
    assert parse_witness("U:n=4:finals=0").finals_override == frozenset({0})


def test_parse_witness_errors():
    with pytest.raises(WitnessNameError):
        parse_witness("X:n=4")
    with pytest.raises(WitnessNameError):
        parse_witness("U:order=abc")
    with pytest.raises(WitnessNameError):
        parse_witness("U:n=four")
    with pytest.raises(WitnessNameError):
        parse_witness("U0:n=4:order=abcde")
    with pytest.raises(WitnessNameError):
        parse_witness("U:n=4:colour=red")


def test_display_names():
    assert display_name(parse_witness("U:n=4:restrict=ab")) == "U_4(a,b,∅)"
    assert display_name(parse_witness("U:n=5:order=bac")) == "U_5(b,a,c)"
    assert display_name(parse_witness("U0:n=4")) == "U_{0},4(a,b,c)"
    assert display_name(parse_witness("W:n=5:order=dcba")) == "W_5(d,c,b,a)"
