"""Gamma, Pochhammer, 2F3 and the normalized modified Bessel function.

The normalized Bessel function used throughout is

    N_p(x) = 2**p * Gamma(p + 1) * x**(-p) * I_p(x) = 0F1(; p + 1; x**2 / 4),

which is regular at the origin with N_p(0) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PoleError",
    "SeriesError",
    "SeriesPolicy",
    "DEFAULT_POLICY",
    "gamma",
    "pochhammer",
    "hyp2f3",
    "bessel_i",
    "norm_bessel",
    "norm_bessel_d1",
    "norm_bessel_dn",
    "closed_form_dn",
    "finite_difference",
    "DerivativeCheck",
    "check_dn",
]


class PoleError(ValueError):
    """Evaluation hit a pole (Gamma at a non-positive integer, zero Pochhammer denominator)."""


class SeriesError(ArithmeticError):
    """A power series failed to converge within its term budget."""


@dataclass(frozen=True)
class SeriesPolicy:
    max_terms: int = 500
    rel_tail_tol: float = 1e-16

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")
        if not 0.0 < self.rel_tail_tol < 1.0:
            raise ValueError(f"rel_tail_tol must lie in (0, 1), got {self.rel_tail_tol}")


DEFAULT_POLICY = SeriesPolicy()


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma(x: float) -> float:
    """Gamma function; raises :class:`PoleError` at 0, -1, -2, ..."""
    if _is_nonpositive_int(x):
        raise PoleError(f"gamma has a pole at {x}")
    try:
        return math.gamma(x)
    except OverflowError:
        return math.inf


def pochhammer(nu: float, k: int) -> float:
    """Rising factorial (nu)_k = nu (nu+1) ... (nu+k-1), with (nu)_0 = 1."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1.0
    for j in range(k):
        out *= nu + j
    return out


def _sum_series(first, ratio, policy, k_min=0):
    """Sum t_0 + t_1 + ... where t_{k+1} = t_k * ratio(k).

    Returns ``(total, tail)`` where ``tail`` estimates the discarded remainder.
    The relative-tail stop is only armed once ``k >= k_min`` (past any negative
    denominator parameters, where terms may still grow).
    """
    total = first
    term = first
    if term == 0.0:
        return total, 0.0
    for k in range(policy.max_terms):
        r = ratio(k)
        term = term * r
        total += term
        if term == 0.0:
            return total, 0.0
        if k + 1 >= k_min and abs(term) <= policy.rel_tail_tol * abs(total):
            # the next ratio bounds the geometric tail once terms decay
            r_next = abs(ratio(k + 1))
            tail = abs(term) * r_next / (1.0 - r_next) if r_next < 1.0 else abs(term)
            return total, tail
    raise SeriesError(f"series did not converge within {policy.max_terms} terms")


def hyp2f3(a1, a2, b1, b2, b3, z, policy=DEFAULT_POLICY, full_output=False):
    """Generalized hypergeometric series 2F3(a1, a2; b1, b2, b3; z).

    With ``full_output=True`` returns ``(value, tail_estimate)``.
    """
    if z == 0:
        return (1.0, 0.0) if full_output else 1.0
    bs = (b1, b2, b3)

    def ratio(k):
        den = (b1 + k) * (b2 + k) * (b3 + k) * (k + 1)
        if den == 0.0:
            raise PoleError(
                f"denominator Pochhammer vanishes at k={k + 1} (b={bs})"
            )
        return (a1 + k) * (a2 + k) * z / den

    # The series terminates if a numerator parameter reaches zero first.
    k_min = max([0] + [math.ceil(-b) + 1 for b in bs if b < 0])
    value, tail = _sum_series(1.0, ratio, policy, k_min=k_min)
    return (value, tail) if full_output else value


def bessel_i(p: float, x: float, policy=DEFAULT_POLICY) -> float:
    """Modified Bessel function of the first kind by its power series."""
    if p <= -1:
        raise ValueError(f"order must exceed -1, got {p}")
    if x < 0 and not float(p).is_integer():
        raise ValueError("negative argument needs an integer order")
    half = 0.5 * x
    if half == 0.0:
        if p == 0:
            return 1.0
        return 0.0 if p > 0 else math.inf
    first = half**p / gamma(p + 1.0)
    q = half * half
    value, _ = _sum_series(first, lambda n: q / ((n + 1) * (p + n + 1)), policy)
    return value


def norm_bessel(p: float, x: float, policy=DEFAULT_POLICY) -> float:
    """Normalized Bessel function 2**p Gamma(p+1) x**-p I_p(x); equals 1 at x = 0."""
    if p <= -1:
        raise ValueError(f"order must exceed -1, got {p}")
    q = 0.25 * x * x
    value, _ = _sum_series(1.0, lambda n: q / ((n + 1) * (p + n + 1)), policy)
    return value


def norm_bessel_d1(p: float, x: float, policy=DEFAULT_POLICY) -> float:
    """First derivative through the order-raising identity N_p' = x/(2(p+1)) N_{p+1}."""
    if p <= -1:
        raise ValueError(f"order must exceed -1, got {p}")
    return x / (2.0 * (p + 1.0)) * norm_bessel(p + 1.0, x, policy)


def _series_dn(p, n, x, policy):
    # d^n/dx^n of sum_k c_k x^(2k), c_k = 1 / (4^k k! (p+1)_k)
    k0 = (n + 1) // 2
    c = 1.0
    for k in range(k0):
        c /= 4.0 * (k + 1) * (p + 1 + k)
    ff = math.prod(2 * k0 - j for j in range(n))
    first = c * ff * x ** (2 * k0 - n)
    if first == 0.0 and x == 0.0:
        return first

    def ratio(i):
        k = k0 + i
        # c_{k+1}/c_k * falling-factorial ratio * x^2
        fall = math.prod(2 * k + 2 - j for j in range(n)) / math.prod(2 * k - j for j in range(n))
        return fall * x * x / (4.0 * (k + 1) * (p + 1 + k))

    value, _ = _sum_series(first, ratio, policy)
    return value


def closed_form_dn(p: float, n: int, x: float, params: str = "derivative",
                   policy=DEFAULT_POLICY) -> float:
    """Closed-form n-th derivative candidate built on a 2F3 series.

    ``params="derivative"`` uses the denominators ((p+1-n)/2, (p+2-n)/2, p+1);
    ``params="expansion"`` uses ((p-2)/2, (p-1)/2, p+1).  Both share the
    prefactor 2**(n-2p) sqrt(pi) x**(p-n) Gamma(p+1).
    """
    if x <= 0:
        raise ValueError("closed form needs x > 0")
    if params == "derivative":
        b1, b2 = (p + 1 - n) / 2, (p + 2 - n) / 2
    elif params == "expansion":
        b1, b2 = (p - 2) / 2, (p - 1) / 2
    else:
        raise ValueError(f"unknown parameterization {params!r}")
    pref = 2.0 ** (n - 2 * p) * math.sqrt(math.pi) * x ** (p - n) * gamma(p + 1)
    return pref * hyp2f3((p + 1) / 2, (p + 2) / 2, b1, b2, p + 1, x * x / 4, policy)


def norm_bessel_dn(p: float, n: int, x: float, form: str = "series",
                   policy=DEFAULT_POLICY) -> float:
    """n-th derivative of the normalized Bessel function.

    ``form="series"`` differentiates the power series term by term (validated
    route). ``form="derivative"``/``"expansion"`` evaluate :func:`closed_form_dn`
    verbatim; see :func:`check_dn` for how those compare.
    """
    if p <= -1:
        raise ValueError(f"order must exceed -1, got {p}")
    if n < 1:
        raise ValueError("n must be a positive integer")
    if form == "series":
        return _series_dn(p, n, x, policy)
    return closed_form_dn(p, n, x, params=form, policy=policy)


def finite_difference(f, x: float, n: int, h: float | None = None) -> float:
    """Central n-th difference quotient (second-order accurate)."""
    if h is None:
        h = 2.220446049250313e-16 ** (1.0 / (n + 2)) * max(1.0, abs(x))
    acc = 0.0
    for j in range(n + 1):
        acc += (-1) ** j * math.comb(n, j) * f(x + (n / 2 - j) * h)
    return acc / h**n


@dataclass(frozen=True)
class DerivativeCheck:
    p: float
    n: int
    x: float
    finite_diff: float
    series: float
    closed: dict  # params name -> value, or None when the 2F3 hit a pole
    rtol: float

    def agrees(self, value) -> bool:
        if value is None or not math.isfinite(value):
            return False
        scale = max(abs(self.finite_diff), 1e-300)
        return abs(value - self.finite_diff) <= self.rtol * max(1.0, scale)

    @property
    def series_ok(self) -> bool:
        return self.agrees(self.series)

    def closed_ok(self, params: str) -> bool:
        return self.agrees(self.closed.get(params))


def check_dn(p: float, n: int, x: float, rtol: float = 1e-4) -> DerivativeCheck:
    """Compare every n-th derivative route against finite differences of N_p."""
    fd = finite_difference(lambda t: norm_bessel(p, t), x, n)
    closed = {}
    for params in ("derivative", "expansion"):
        try:
            closed[params] = closed_form_dn(p, n, x, params)
        except (PoleError, SeriesError):
            closed[params] = None
    return DerivativeCheck(p, n, x, fd, _series_dn(p, n, x, DEFAULT_POLICY), closed, rtol)
