import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hhfrac.means import (
    MeanKind,
    arithmetic,
    generalized_log,
    geometric,
    harmonic,
    logarithmic,
    mean,
    prop1_check,
    prop2_check,
    prop3_check,
    prop4_check,
)

pos = st.floats(1e-3, 10.0)


def test_examples():
    assert mean("arithmetic", 2, 4) == 3
    assert mean(MeanKind.LOGARITHMIC, 1, math.e) == pytest.approx(math.e - 1, rel=1e-15)
    assert mean("generalized_log", 2.5, 7.0, n=1) == arithmetic(2.5, 7.0)
    assert mean("inverse_arithmetic", 1, 3) == 1.5
    assert mean("geometric", 2, 8) == 4


def test_domain_errors():
    with pytest.raises(ValueError):
        logarithmic(2, 2)
    with pytest.raises(ValueError):
        geometric(-1, 2)
    with pytest.raises(ValueError):
        harmonic(0, 2)
    for n in (0, -1, 1.5):
        with pytest.raises(ValueError):
            generalized_log(1, 2, n)
    with pytest.raises(ValueError):
        mean("generalized_log", 1, 2)
    with pytest.raises(ValueError):
        mean("median", 1, 2)


def test_generalized_log_matches_definition():
    for n in (2, 3, -2, -4):
        u, v = 1.3, 4.1
        direct = ((v ** (n + 1) - u ** (n + 1)) / ((v - u) * (n + 1))) ** (1 / n)
        assert generalized_log(u, v, n) == pytest.approx(direct, rel=1e-14)
    assert generalized_log(3.0, 3.0, 4) == pytest.approx(3.0, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(pos, pos)
def test_identities_and_chain(u, v):
    assume(abs(u - v) > 1e-9 * max(u, v))
    u, v = min(u, v), max(u, v)
    h, g, l, a = harmonic(u, v), geometric(u, v), logarithmic(u, v), arithmetic(u, v)
    assert g * g == pytest.approx(h * a, rel=1e-12)
    assert h <= g * (1 + 1e-12) and g <= l * (1 + 1e-12) and l <= a * (1 + 1e-12)
    assert generalized_log(u, v, 1) == a


def test_prop1_example():
    r = prop1_check(3, 1.0, 2.0, 1.0)
    assert r.lhs == pytest.approx(0.375, rel=1e-15)
    assert r.bound == pytest.approx(6 / 192 * ((3 + 5 * 2) / 2 + (5 + 3 * 2) / 2), rel=1e-15)
    assert r.holds
    assert r.extra["constant_rel_diff"] < 1e-15
    assert prop1_check(-3, 1.0, 2.0, 2.0).holds


def test_prop1_preconditions():
    for n in (2, -2, 0, 1):
        with pytest.raises(ValueError):
            prop1_check(n, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        prop1_check(3, 2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        prop1_check(3, 1.0, 2.0, 0.5)


def test_prop2_values():
    r = prop2_check(1.0, 2.0, 1.0)
    assert r.lhs == pytest.approx(abs(2 / 3 - math.log(2)), rel=1e-14)
    assert r.lhs == pytest.approx(0.0264805138932787, rel=1e-12)
    assert r.bound == pytest.approx(4.5 / 192, rel=1e-15)
    assert r.extra["derived_bound"] == pytest.approx(2 * r.bound, rel=1e-15)
    assert prop2_check(1.0, 4.0, 3.0).holds


def test_prop3_substitution():
    r31, r32 = prop3_check(3, 1.0, 2.0, 1.0)
    assert r31.lhs == pytest.approx(prop1_check(3, 0.5, 1.0, 1.0).lhs, rel=1e-15)
    assert r31.holds
    assert r31.extra["lhs_routes_agree"] and r32.extra["lhs_routes_agree"]


def test_prop4_example():
    r = prop4_check(1.0, 2.0, 1.0)
    assert r.lhs == pytest.approx(1 / 18, rel=1e-14)
    assert r.bound == pytest.approx(1 / 32 * ((3 + 5 / 8) / 2 + (5 + 3 / 8) / 2), rel=1e-15)
    assert r.holds
    for u, v in ((2.0, 1.0), (0.0, 1.0), (1.0, 1.0)):
        with pytest.raises(ValueError):
            prop4_check(u, v, 1.0)


@pytest.mark.parametrize("check", [
    lambda u, v: prop1_check(3, u, v, 1.0),
    lambda u, v: prop2_check(u, v, 2.0),
    lambda u, v: prop3_check(4, u, v, 1.5)[0],
    lambda u, v: prop4_check(u, v, 1.0),
])
def test_coincidence_limit(check):
    big, small = check(1.0, 1.0 + 1e-2), check(1.0, 1.0 + 1e-3)
    assert small.lhs <= 0.02 * big.lhs and small.bound <= 0.02 * big.bound
    assert small.bound == pytest.approx(big.bound / 100, rel=0.05)
