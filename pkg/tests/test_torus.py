from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from plcg.torus import (
    PAdicUnitApprox,
    PrecisionError,
    TorusElement,
    nu_minus_one,
    one_minus,
    power_map,
    solve_root,
    torus_points,
    valuation_gamma,
)

PRIMES = st.sampled_from([2, 3, 5])


@st.composite
def points(draw, p=None, rank=2, max_level=6):
    p = p or draw(PRIMES)
    level = draw(st.integers(0, max_level))
    nums = draw(st.lists(st.integers(-(10**6), 10**6), min_size=rank, max_size=rank))
    return TorusElement.make(p, level, nums)


def frac_mod1(t: TorusElement):
    return tuple(c % 1 for c in t.coords())


@st.composite
def pairs(draw):
    p = draw(PRIMES)
    return draw(points(p=p)), draw(points(p=p))


@given(pairs())
def test_addition_matches_fractions(ab):
    a, b = ab
    got = frac_mod1(a + b)
    want = tuple((x + y) % 1 for x, y in zip(a.coords(), b.coords()))
    assert got == want


@given(pairs())
def test_group_axioms(ab):
    a, b = ab
    z = TorusElement.zero(a.p, a.rank)
    assert a + z == a
    assert a + (-a) == z
    assert a + b == b + a
    assert (a - b) + b == a


@given(points())
def test_level_is_reduced(t):
    # the stored level is the exact order exponent
    assert t.order() == t.p**t.level
    assert t.scale(t.order()).is_zero()
    if t.level:
        assert not t.scale(t.order() // t.p).is_zero()


@given(points())
def test_json_round_trip(t):
    assert TorusElement.parse(t.p, t.to_json()) == t


def test_parse_forms():
    t = TorusElement.parse(2, ["1/2^3", "3/4", "0"])
    assert t.coords() == (Fraction(1, 8), Fraction(3, 4), Fraction(0))
    with pytest.raises(ValueError):
        TorusElement.parse(2, ["1/3^1"])


def test_torus_points_count():
    assert len(set(torus_points(3, 2, 2))) == 81
    assert len(set(torus_points(2, 1, 4))) == 16


@given(points(), st.integers(1, 10**6))
def test_power_map_is_scaling(t, a):
    if a % t.p == 0:
        a += 1
    z = PAdicUnitApprox(t.p, 8, a)
    assert power_map(t, z) == t.scale(a)


def test_power_map_needs_precision():
    t = TorusElement.parse(2, ["1/2^5"])
    with pytest.raises(PrecisionError):
        power_map(t, PAdicUnitApprox(2, 4, 5))


@given(points(max_level=4), st.integers(0, 3), st.integers(1, 500))
def test_solve_root(t, m, u):
    if u % t.p == 0:
        u += 1
    unit = PAdicUnitApprox(t.p, 10, u)
    s = solve_root(t, m, unit)
    assert s.scale(t.p**m * u) == t


@given(st.integers(1, 10**6), st.integers(0, 7))
def test_gamma_membership(a, m):
    p = 2
    if a % 2 == 0:
        a += 1
    z = PAdicUnitApprox(p, 8, a)
    g = valuation_gamma(z, m)
    assert g.member == ((a - 1) % p**m == 0)


def test_one_minus():
    v, u = one_minus(PAdicUnitApprox(2, 8, 5))
    assert v == 2 and (u.residue * 4 + 5 - 1) % 2**6 == 0
    assert nu_minus_one(PAdicUnitApprox(2, 8, 17)) == 4
    with pytest.raises(PrecisionError):
        one_minus(PAdicUnitApprox(2, 4, 17))


def test_units_form_a_group():
    a, b = PAdicUnitApprox(3, 5, 4), PAdicUnitApprox(3, 5, 7)
    assert (a * b).residue == 28
    assert (a * a.inverse()).is_one()
    with pytest.raises(ValueError):
        PAdicUnitApprox(3, 5, 6)
