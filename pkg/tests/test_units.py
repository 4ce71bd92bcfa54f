from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unitlint.units import (
    ANY,
    BASES,
    DIMENSIONLESS,
    PINNED_LOG10,
    VOCABULARY,
    DimensionMismatch,
    EmptyComplement,
    Frame,
    FrameMismatch,
    UnitType,
    UnknownUnit,
    add,
    div,
    format_unit,
    frame_complement,
    frame_le,
    frame_meet,
    mul,
    parse_unit_string,
    subtype,
)

NAMES = ["GLOBAL", "LOCAL", "BODY_FRD", "TIME_BOOT"]

frames = st.one_of(
    st.just(ANY),
    st.frozensets(st.sampled_from(NAMES), min_size=1).map(Frame),
)
scalars = st.fractions(min_value=-12, max_value=12, max_denominator=8)
exponents = st.tuples(*[st.integers(-3, 3) for _ in BASES])
units = st.builds(UnitType, scalars, exponents, frames)
any_units = st.builds(UnitType, scalars, exponents, st.just(ANY))


def U(text, frame=None):
    return parse_unit_string(text).with_frame(Frame.parse(frame))


# -- documented examples ------------------------------------------------------


def test_parse_examples():
    assert U("m/s") == UnitType(0, (1, -1, 0, 0, 0, 0, 0))
    assert U("us") == UnitType(-6, (0, 1, 0, 0, 0, 0, 0))
    assert U("cm") == UnitType(-2, (1, 0, 0, 0, 0, 0, 0))
    assert U("kg").exponents[BASES.index("g")] == 1 and U("kg").scalar == 3


def test_scalars_are_exact():
    with pytest.raises(TypeError):
        UnitType(0.5, (0,) * 7)
    assert U("yd").scalar == PINNED_LOG10["0.9144"]
    assert U("yd") != U("m")


def test_unknown_unit_names_the_atom():
    with pytest.raises(UnknownUnit, match="furlong"):
        parse_unit_string("m/furlong")


def test_subtype_examples():
    assert subtype(U("m", "MAV_FRAME_BODY_FRD"), U("m"))
    assert not subtype(U("m", "GLOBAL"), U("m", "MAV_FRAME_BODY_FRD"))
    assert not subtype(U("cm"), U("m"))
    assert subtype(U("us", "TIME_BOOT"), U("us", "TIME_BOOT,TIME_UNIX"))


def test_mul_div_examples():
    assert div(U("m", "GLOBAL"), U("s", "GLOBAL")) == U("m/s", "GLOBAL")
    assert mul(U("cm"), U("cm")) == UnitType(-4, (2, 0, 0, 0, 0, 0, 0))
    assert div(U("m"), U("cm")) == UnitType(2, (0,) * 7)
    with pytest.raises(FrameMismatch):
        mul(U("m", "GLOBAL"), U("m", "LOCAL"))


def test_add_examples():
    with pytest.raises(DimensionMismatch) as info:
        add(U("cm"), U("m"))
    assert info.value.left == U("cm") and info.value.right == U("m")
    assert add(U("m", "GLOBAL"), U("m")) == U("m")
    with pytest.raises(FrameMismatch):
        add(U("m", "GLOBAL"), U("m", "LOCAL"))


def test_frame_meet_and_complement():
    assert frame_meet(ANY, Frame.concrete("LOCAL")) == Frame.concrete("LOCAL")
    boot = Frame.one_of(["TIME_BOOT", "TIME_UNIX"])
    assert frame_meet(boot, Frame.concrete("TIME_BOOT")) == Frame.concrete("TIME_BOOT")
    with pytest.raises(FrameMismatch):
        frame_meet(Frame.concrete("GLOBAL"), Frame.concrete("LOCAL"))
    universe = {"LOCAL", "GLOBAL", "BODY_FRD"}
    assert frame_complement(Frame.concrete("LOCAL"), universe) == Frame.one_of(["GLOBAL", "BODY_FRD"])
    assert frame_complement(Frame.one_of("AB"), "ABC") == Frame.concrete("C")
    with pytest.raises(EmptyComplement):
        frame_complement(Frame.one_of("AB"), "AB")
    with pytest.raises(EmptyComplement):
        frame_complement(ANY, universe)


def test_format_spellings():
    assert format_unit(U("m/s")) == "m/s"
    assert format_unit(U("cm")) == "cm"
    assert format_unit(UnitType(Fraction(-2), (0,) * 7)) == "10^{-2}"
    assert format_unit(DIMENSIONLESS) == "1"
    odd = UnitType(Fraction(1, 3), (2, -1, 0, 0, 0, 0, 0))
    assert parse_unit_string(format_unit(odd)) == odd


@pytest.mark.parametrize("atom", sorted(VOCABULARY))
def test_vocabulary_round_trip(atom):
    u = VOCABULARY[atom]
    assert parse_unit_string(format_unit(u)) == u


# -- algebraic laws -----------------------------------------------------------


@settings(max_examples=300)
@given(units, units)
def test_mul_commutes(a, b):
    try:
        ab = mul(a, b)
    except FrameMismatch:
        with pytest.raises(FrameMismatch):
            mul(b, a)
        return
    assert ab == mul(b, a)


@settings(max_examples=300)
@given(units, units, units)
def test_mul_associates(a, b, c):
    try:
        left = mul(mul(a, b), c)
        right = mul(a, mul(b, c))
    except FrameMismatch:
        return
    assert left == right


@settings(max_examples=300)
@given(units, any_units)
def test_div_inverts_mul(a, b):
    assert div(mul(a, b), b) == a
    assert mul(a, DIMENSIONLESS) == a


@settings(max_examples=300)
@given(units, units, units)
def test_subtype_is_a_partial_order(a, b, c):
    assert subtype(a, a)
    if subtype(a, b) and subtype(b, c):
        assert subtype(a, c)
    if subtype(a, b) and subtype(b, a):
        assert a == b


@settings(max_examples=300)
@given(units, frames)
def test_add_returns_the_larger_operand(a, f):
    b = a.with_frame(f)
    if subtype(a, b) or subtype(b, a):
        r = add(a, b)
        assert r in (a, b)
        assert subtype(a, r) and subtype(b, r)
    else:
        with pytest.raises(FrameMismatch):
            add(a, b)


@settings(max_examples=200)
@given(units)
def test_format_parse_round_trip(u):
    assert parse_unit_string(format_unit(u)).with_frame(u.frame) == u
    assert Frame.parse(str(u.frame)) == u.frame


@settings(max_examples=200)
@given(frames, frames)
def test_meet_is_the_greatest_lower_bound(f, g):
    try:
        m = frame_meet(f, g)
    except FrameMismatch:
        assert not f.is_any and not g.is_any and not (f.names & g.names)
        return
    assert frame_le(m, f) and frame_le(m, g)
