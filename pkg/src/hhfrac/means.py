"""Special means of two positive numbers and the mean inequalities derived from
the mu = 1 power-mean bound."""

from __future__ import annotations

import enum
import math

from .bounds import BoundReport, cor32_part2_bound

__all__ = [
    "MeanKind",
    "arithmetic",
    "harmonic",
    "geometric",
    "logarithmic",
    "generalized_log",
    "mean",
    "prop1_check",
    "prop2_check",
    "prop3_check",
    "prop4_check",
]


class MeanKind(enum.Enum):
    ARITHMETIC = "arithmetic"
    INVERSE_ARITHMETIC = "inverse_arithmetic"
    GEOMETRIC = "geometric"
    LOGARITHMIC = "logarithmic"
    GENERALIZED_LOG = "generalized_log"


def _positive(u, v):
    if not (u > 0 and v > 0):
        raise ValueError(f"means need u, v > 0, got {u}, {v}")


def arithmetic(u: float, v: float) -> float:
    return 0.5 * (u + v)


def harmonic(u: float, v: float) -> float:
    if u == 0 or v == 0:
        raise ValueError("inverse arithmetic mean needs u, v != 0")
    return 2.0 / (1.0 / u + 1.0 / v)


def geometric(u: float, v: float) -> float:
    _positive(u, v)
    return math.sqrt(u * v)


def logarithmic(u: float, v: float) -> float:
    _positive(u, v)
    if u == v:
        raise ValueError("logarithmic mean needs u != v")
    lo, hi = min(u, v), max(u, v)
    return (hi - lo) / math.log1p((hi - lo) / lo)


def generalized_log(u: float, v: float, n: int) -> float:
    """L_n(u, v) = [(v^(n+1) - u^(n+1)) / ((v-u)(n+1))]^(1/n), n an integer other than 0, -1.

    The divided difference is expanded as a finite geometric sum, so there is
    no cancellation as u -> v and L_1 reproduces the arithmetic mean exactly.
    """
    _positive(u, v)
    if n != int(n) or n in (0, -1):
        raise ValueError(f"n must be an integer outside {{-1, 0}}, got {n}")
    return _gen_log_power(u, v, int(n)) ** (1.0 / n)


def _gen_log_power(u, v, n):
    # L_n(u, v)**n
    if n > 0:
        return math.fsum(u**k * v ** (n - k) for k in range(n + 1)) / (n + 1)
    m = -(n + 1)
    return math.fsum(u**k * v ** (m - 1 - k) for k in range(m)) / (m * (u * v) ** m)


_DISPATCH = {
    MeanKind.ARITHMETIC: arithmetic,
    MeanKind.INVERSE_ARITHMETIC: harmonic,
    MeanKind.GEOMETRIC: geometric,
    MeanKind.LOGARITHMIC: logarithmic,
}


def mean(kind, u: float, v: float, n: int | None = None) -> float:
    kind = MeanKind(kind)
    if kind is MeanKind.GENERALIZED_LOG:
        if n is None:
            raise ValueError("generalized_log needs n")
        return generalized_log(u, v, n)
    if kind is not MeanKind.INVERSE_ARITHMETIC:
        _positive(u, v)
    return _DISPATCH[kind](u, v)


def _order(u, v):
    if not (0 < u < v):
        raise ValueError(f"need 0 < u < v, got u={u}, v={v}")


def _check_q(q):
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q}")


def _a_root(x, y, q):
    # A^(1/q)(x, y)
    return arithmetic(x, y) ** (1.0 / q)


def _h_root(x, y, q):
    # H^(-1/q)(x, y)
    return harmonic(x, y) ** (-1.0 / q)


def _report(check, lhs, bound, u, v, q, derived, **extra):
    diff = abs(bound - derived) / max(abs(bound), abs(derived), 1e-300)
    extra = {"derived_bound": derived, "constant_rel_diff": diff, **extra}
    return BoundReport(check, lhs, bound, True, g=extra.pop("g", ""), psi="id",
                       mu=1.0, q=q, u=u, v=v, extra=extra)


def _prop1_bound(n, u, v, q):
    k = (n - 2) * q
    return ((v - u) ** 2 * abs(n * (n - 1)) / (3 * 4 ** (1 / q + 2))
            * (_a_root(3 * u**k, 5 * v**k, q) + _a_root(5 * u**k, 3 * v**k, q)))


def _prop2_bound(u, v, q):
    k = -3 * q
    return ((v - u) ** 2 / (3 * 4 ** (1 / q + 2))
            * (_a_root(3 * u**k, 5 * v**k, q) + _a_root(5 * u**k, 3 * v**k, q)))


def prop1_check(n: int, u: float, v: float, q: float) -> BoundReport:
    """|A^n - L_n^n| against its bound; the bound is also re-derived from g(x) = x^n."""
    if abs(n) < 3 or n != int(n):
        raise ValueError(f"need an integer |n| >= 3, got {n}")
    _order(u, v)
    _check_q(q)
    lhs = abs(arithmetic(u, v) ** n - _gen_log_power(u, v, n))
    d2 = lambda x: n * (n - 1) * x ** (n - 2)
    derived = cor32_part2_bound(d2(u), d2(v), v - u, q)
    return _report("prop1", lhs, _prop1_bound(n, u, v, q), u, v, q, derived,
                   g=f"pow:n={float(n)!r}", n=n)


def prop2_check(u: float, v: float, q: float) -> BoundReport:
    """|1/A - 1/L| against its bound; the bound is also re-derived from g(x) = 1/x."""
    _order(u, v)
    _check_q(q)
    lhs = abs(1.0 / arithmetic(u, v) - 1.0 / logarithmic(u, v))
    derived = cor32_part2_bound(2 / u**3, 2 / v**3, v - u, q)
    return _report("prop2", lhs, _prop2_bound(u, v, q), u, v, q, derived, g="recip")


def _prop31_direct(n, u, v, q):
    k = (n - 2) * q
    a, b = harmonic(v, u) ** (-n), _gen_log_power(1 / v, 1 / u, n)
    lhs = abs(a - b)
    bound = ((1 / v - 1 / u) ** 2 * abs(n * (n - 1)) / (3 * 4 ** (1 / q + 2))
             * (_h_root(3 * u**k, 5 * v**k, q) + _h_root(5 * u**k, 3 * v**k, q)))
    return lhs, bound, max(abs(a), abs(b))


def _prop32_direct(u, v, q):
    k = -3 * q
    a, b = harmonic(v, u), 1.0 / logarithmic(1 / v, 1 / u)
    lhs = abs(a - b)
    bound = ((1 / v - 1 / u) ** 2 / (3 * 4 ** (1 / q + 2))
             * (_h_root(3 * u**k, 5 * v**k, q) + _h_root(5 * u**k, 3 * v**k, q)))
    return lhs, bound, max(abs(a), abs(b))


def prop3_check(n: int, u: float, v: float, q: float) -> tuple[BoundReport, BoundReport]:
    """Reciprocal forms, obtained by substituting u -> 1/v, v -> 1/u into the first two checks.

    The substituted reports are canonical; the stated harmonic-mean forms are
    evaluated directly and their agreement is recorded in ``extra``.  Left
    sides are compared relative to the size of the terms being subtracted.
    """
    _order(u, v)
    r1 = prop1_check(n, 1 / v, 1 / u, q)
    r2 = prop2_check(1 / v, 1 / u, q)
    out = []
    for name, sub, (lhs_d, bound_d, terms) in (("prop3.1", r1, _prop31_direct(n, u, v, q)),
                                         ("prop3.2", r2, _prop32_direct(u, v, q))):
        agree_lhs = abs(sub.lhs - lhs_d) <= 1e-12 * max(1.0, terms)
        agree_bound = abs(sub.bound - bound_d) <= 1e-12 * max(1.0, abs(bound_d))
        out.append(BoundReport(
            name, sub.lhs, sub.bound, True, g=sub.g, psi="id", mu=1.0, q=q, u=u, v=v,
            extra={"direct_lhs": lhs_d, "direct_bound": bound_d, "lhs_routes_agree": agree_lhs,
                   "bound_routes_agree": agree_bound, "direct_holds": lhs_d <= bound_d * (1 + 1e-9),
                   "n": n}))
    return out[0], out[1]


def prop4_check(u: float, v: float, q: float) -> BoundReport:
    """|G^-2 - A^-2| against its bound, with the stated (b-a)^2 read as (v-u)^2.

    The mean difference is the midpoint deviation of g(x) = x^-2; that derivation
    (g'' = 6 x^-4) is recorded alongside the g(x) = x^2 reading.
    """
    _order(u, v)
    _check_q(q)
    lhs = abs(1.0 / (u * v) - 1.0 / arithmetic(u, v) ** 2)
    k = -3 * q
    bound = ((v - u) ** 2 / (2 * 4 ** (1 / q + 1))
             * (_a_root(3 * u**k, 5 * v**k, q) + _a_root(5 * u**k, 3 * v**k, q)))
    derived = cor32_part2_bound(6 / u**4, 6 / v**4, v - u, q)
    via_square = cor32_part2_bound(2.0, 2.0, v - u, q)
    return _report("prop4", lhs, bound, u, v, q, derived, g="pow:n=-2.0",
                   derived_with_square=via_square)
