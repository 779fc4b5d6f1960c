import math

import numpy as np
import pytest

from hhfrac.fracint import ORACLE, integrate
from hhfrac.funcs import Interval, gen_convex_family, make_fn
from hhfrac.quadrature import (
    Partition,
    PartitionCapError,
    adaptive_partition,
    certificate_constant,
    check_hypotheses,
    error_certificate,
    midpoint_rule,
    quad_run,
    random_partition,
)

UNIT = Interval(0.0, 1.0)


def test_partition_validation():
    assert Partition((0, 0.5, 1)).cells == 2
    for bad in ((0,), (0, 0), (1, 0.5), (0, float("nan"))):
        with pytest.raises(ValueError):
            Partition(bad)
    d = Partition.uniform(Interval(0.5, 3.0), 7)
    assert d.points[0] == 0.5 and d.points[-1] == 3.0 and d.cells == 7


def test_midpoint_examples():
    sq = make_fn("sq")
    assert midpoint_rule(sq, Partition((0, 1))) == 0.25
    assert midpoint_rule(sq, Partition.uniform(UNIT, 4)) == 0.328125
    lin = make_fn("lin:a=3,b=-1")
    d = Partition((0.0, 0.1, 0.7, 1.0))
    assert midpoint_rule(lin, d) == pytest.approx(0.5, abs=1e-15)


def test_certificate_examples():
    assert error_certificate(make_fn("sq"), Partition((0, 1)), 1.0) == pytest.approx(1 / 6)
    assert error_certificate(make_fn("lin:a=2"), Partition.uniform(UNIT, 5), 2.0) == 0.0
    d = Partition.uniform(UNIT, 8)
    g = make_fn("exp")
    err = abs(math.e - 1 - midpoint_rule(g, d))
    assert err <= error_certificate(g, d, 2.0)


def test_certificate_constant():
    assert certificate_constant(1.0) == 1 / 24
    for q in (1.5, 2.0, 5.0, 50.0):
        assert certificate_constant(q) == 1 / 24
    with pytest.raises(ValueError):
        certificate_constant(0.9)


def test_hypotheses_reported():
    h = check_hypotheses(make_fn("exp"), UNIT, 2.0)
    assert h["abs_d2_q_convex"] and h["abs_d2_convex"]
    assert not check_hypotheses(make_fn("sin"), Interval(0, 3), 1.0)["abs_d2_convex"]


def test_adaptive_linear_single_cell():
    d = adaptive_partition(make_fn("lin:a=1,b=2"), Interval(0, 5), 1e-12, 1.0)
    assert d.points == (0.0, 5.0)


def test_adaptive_square():
    res = quad_run(make_fn("sq"), UNIT, 1e-4, 1.0, exact=1 / 3)
    assert res.certificate <= 1e-4 and res.true_error <= 1e-4 and res.sound


def test_adaptive_deterministic():
    g = make_fn("combo:a=0.5,n=4,c=0.3,b=1.1")
    a = adaptive_partition(g, Interval(0.5, 3.0), 1e-3, 2.0)
    b = adaptive_partition(g, Interval(0.5, 3.0), 1e-3, 2.0)
    assert a == b
    assert error_certificate(g, a, 2.0) <= 1e-3


def test_certificate_is_first_order():
    # per-cell width**2 terms sum to O(1/m) while the true error is O(1/m**2)
    g = make_fn("exp")
    c1 = error_certificate(g, Partition.uniform(UNIT, 100), 1.0)
    c2 = error_certificate(g, Partition.uniform(UNIT, 200), 1.0)
    assert c1 / c2 == pytest.approx(2.0, rel=1e-3)


def test_adaptive_errors():
    with pytest.raises(ValueError):
        adaptive_partition(make_fn("sq"), UNIT, 0.0, 1.0)
    with pytest.raises(PartitionCapError):
        adaptive_partition(make_fn("exp"), UNIT, 1e-9, 1.0, max_cells=100)


def test_convergence_order():
    g = make_fn("exp")
    ms = np.array([4, 8, 16, 32, 64])
    errs = [abs(math.e - 1 - midpoint_rule(g, Partition.uniform(UNIT, m))) for m in ms]
    slope = -np.polyfit(np.log(ms), np.log(errs), 1)[0]
    assert 1.9 <= slope <= 2.1


@pytest.mark.parametrize("iv", [Interval(0, 1), Interval(1, 2), Interval(0.5, 3)])
def test_bisection_never_raises_certificate(iv):
    rng = np.random.default_rng(1)
    for g in gen_convex_family(0, 20, iv):
        d = random_partition(rng, iv)
        before = error_certificate(g, d, 1.0)
        pts = list(d.points)
        j = int(rng.integers(0, d.cells))
        pts.insert(j + 1, 0.5 * (pts[j] + pts[j + 1]))
        assert error_certificate(g, Partition(tuple(pts)), 1.0) <= before + 1e-12


def test_random_partition():
    rng = np.random.default_rng(0)
    for _ in range(100):
        d = random_partition(rng, Interval(0.5, 3.0))
        assert 1 <= d.cells <= 64 and d.points[0] == 0.5 and d.points[-1] == 3.0


def test_certificate_sound_on_narrow_cells():
    # cells no wider than 1 keep width**3 <= width**2
    rng = np.random.default_rng(3)
    for iv in (Interval(0, 1), Interval(1, 2)):
        for g in gen_convex_family(0, 20, iv):
            exact = integrate(g, iv.u, iv.v, ORACLE)
            for _ in range(20):
                d = random_partition(rng, iv)
                assert abs(exact - midpoint_rule(g, d)) <= error_certificate(g, d, 1.0) * (1 + 1e-9)
