import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hhfrac.fracint import (
    FAST,
    ORACLE,
    QuadSpec,
    integrate,
    jacobi_integral,
    psi_rl_left,
    psi_rl_right,
    rl_left,
    rl_right,
)
from hhfrac.funcs import IDENTITY, make_map

SPECS = [FAST, ORACLE]


def power_rule(beta, mu, span):
    return math.gamma(beta + 1) / math.gamma(beta + 1 + mu) * span ** (beta + mu)


@pytest.mark.parametrize("q", SPECS, ids=["fast", "oracle"])
def test_power_rule_example(q):
    got = rl_left(lambda t: (t - 1.0) ** 2, 0.7, 1.0, 3.0, q)
    assert got == pytest.approx(math.gamma(3) / math.gamma(3.7) * 2**2.7, rel=1e-12)


@pytest.mark.parametrize("q", SPECS, ids=["fast", "oracle"])
@pytest.mark.parametrize("beta", [0, 1, 2, 3])
@pytest.mark.parametrize("mu", [0.1, 0.5, 1.0, 1.7])
def test_power_rule_both_sides(q, beta, mu):
    left = rl_left(lambda t: (t - 0.5) ** beta, mu, 0.5, 2.0, q)
    right = rl_right(lambda t: (2.0 - t) ** beta, mu, 2.0, 0.5, q)
    ref = power_rule(beta, mu, 1.5)
    assert left == pytest.approx(ref, rel=1e-11)
    assert right == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("mu", [0.15, 0.6])
def test_against_mpmath_quadrature(mu):
    f = lambda t: math.exp(t) * math.cos(t)
    # s = (2 - t)**mu removes the endpoint singularity from the reference integrand
    with mpmath.workdps(30):
        m = mpmath.mpf(mu)
        t = lambda s: 2 - s ** (1 / m)
        ref = mpmath.quad(lambda s: mpmath.exp(t(s)) * mpmath.cos(t(s)), [0, 2**m])
        ref = float(ref / (m * mpmath.gamma(m)))
    assert rl_left(f, mu, 0.0, 2.0) == pytest.approx(ref, rel=1e-10)
    assert rl_left(f, mu, 0.0, 2.0, ORACLE) == pytest.approx(ref, rel=1e-10)


def test_psi_integral_against_definition():
    psi = make_map("exp:lam=0.8,c=0")
    g = lambda t: 1.0 + t * t
    mu, a, x = 0.4, 0.2, 1.5
    with mpmath.workdps(30):
        m = mpmath.mpf(mu)
        top = mpmath.exp(0.8 * x)
        t = lambda s: mpmath.log(top - s ** (1 / m)) / 0.8
        ref = mpmath.quad(lambda s: 1 + t(s) ** 2, [0, (top - mpmath.exp(0.8 * a)) ** m])
        ref = float(ref / (m * mpmath.gamma(m)))
    assert psi_rl_left(g, psi, mu, a, x) == pytest.approx(ref, rel=1e-9)
    assert psi_rl_left(g, psi, mu, a, x, ORACLE) == pytest.approx(ref, rel=1e-9)


def test_psi_right_against_definition():
    psi = make_map("combo:w=1,k=0.5,lam=1,c=0")
    g = np.cos
    mu, x, b = 0.7, 0.3, 1.4
    p = lambda t: t + 0.5 * mpmath.exp(t)
    with mpmath.workdps(30):
        ref = mpmath.quad(lambda t: (1 + 0.5 * mpmath.exp(t)) * (p(t) - p(x)) ** (mu - 1) * mpmath.cos(t), [x, b])
        ref = float(ref / mpmath.gamma(mu))
    assert psi_rl_right(g, psi, mu, b, x) == pytest.approx(ref, rel=1e-9)


def test_identity_map_reduces_to_plain():
    g = np.exp
    assert psi_rl_left(g, IDENTITY, 0.3, 0.0, 1.0) == pytest.approx(rl_left(g, 0.3, 0.0, 1.0), rel=1e-14)
    assert psi_rl_right(g, IDENTITY, 0.3, 1.0, 0.0) == pytest.approx(rl_right(g, 0.3, 1.0, 0.0), rel=1e-14)


def test_order_one_is_plain_integral():
    assert rl_left(np.exp, 1.0, 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-14)
    assert integrate(np.exp, 0.0, 1.0, ORACLE) == pytest.approx(math.e - 1, rel=1e-14)


def test_jacobi_weight():
    # int_0^1 (1-t)^0.5 t^2 dt = B(3, 1.5)
    ref = math.gamma(3) * math.gamma(1.5) / math.gamma(4.5)
    assert jacobi_integral(lambda t: 1.0 + 0 * t, 0.0, 1.0, 0.5, 2.0) == pytest.approx(ref, rel=1e-14)


def test_errors():
    with pytest.raises(ValueError):
        rl_left(np.exp, 0.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        rl_right(np.exp, 0.5, 1.0, 2.0)
    with pytest.raises(ValueError):
        rl_left(np.exp, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        psi_rl_left(np.exp, IDENTITY, 0.5, 1.0, 0.5)
    with pytest.raises(ValueError):
        QuadSpec(nodes=2)
    with pytest.raises(ValueError):
        QuadSpec(mode="slow")
    with pytest.raises(ValueError):
        QuadSpec(abs_tol=0.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.0, 2.0), st.floats(0.1, 2.0))
def test_fast_matches_oracle(mu, u, span):
    f = lambda t: np.exp(0.5 * t) + t**3
    fast = rl_left(f, mu, u, u + span)
    oracle = rl_left(f, mu, u, u + span, ORACLE)
    assert fast == pytest.approx(oracle, rel=1e-10, abs=1e-12)
