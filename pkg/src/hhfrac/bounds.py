"""Fractional midpoint deviation and the power-mean / Hoelder bounds on it.

The deviation of g on [u, v] with respect to an increasing map psi and order mu is

    sigma = 2**(mu-1) Gamma(mu+2) / (v-u)**mu
            * [I_{psi^-1(m)+}(g o psi)(psi^-1(v)) + I_{psi^-1(m)-}(g o psi)(psi^-1(u))]
            - (mu+1) g(m),             m = (u+v)/2.

Three independent routes evaluate it: from the fractional integrals of g, from
an identity in g'' over psi-preimage space, and from the t-substituted form in
which psi has cancelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .fracint import FAST, QuadSpec, integrate, jacobi_integral, psi_rl_left, psi_rl_right, rl_left, rl_right
from .funcs import IDENTITY, Interval, MonotoneMap, RealFn, abs_d2_power, check_convex, d2_of, invert_map
from .special import gamma

__all__ = [
    "HolderPair",
    "SigmaValue",
    "BoundReport",
    "slack_tolerance",
    "sigma_fractional",
    "sigma_identity",
    "sigma_substituted",
    "sigma_routes",
    "powermean_bound",
    "holder_tiers",
    "bound_powermean",
    "bound_holder",
    "hh_classical",
    "hh_fractional",
    "cor32_part2_bound",
    "corollary_reductions",
    "delta1",
    "delta2",
    "DELTA2_Q1_LIMIT",
    "bound_min_delta",
]

SLACK_REL = 1e-9
ROUTE_TOL = 1e-10


@dataclass(frozen=True)
class HolderPair:
    q: float
    p: float = math.nan

    def __post_init__(self):
        if not self.q >= 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.q == 1:
            object.__setattr__(self, "p", math.inf)
        elif math.isnan(self.p):
            object.__setattr__(self, "p", self.q / (self.q - 1.0))
        elif abs(1 / self.p + 1 / self.q - 1) > 1e-14:
            raise ValueError(f"1/p + 1/q must equal 1, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class SigmaValue:
    via_fractional: float
    via_identity: float
    via_substituted: float

    @property
    def disagreement(self) -> float:
        return max(abs(self.via_fractional - self.via_identity),
                   abs(self.via_identity - self.via_substituted))


def slack_tolerance(lhs: float, bound: float, rel: float = SLACK_REL) -> float:
    return rel * max(1.0, abs(lhs), abs(bound))


@dataclass(frozen=True)
class BoundReport:
    """One verification record: an inequality lhs <= bound plus context.

    ``conditions`` are extra named claims that must also be true for the row to
    hold (e.g. the right half of a two-sided chain); ``extra`` carries numbers
    reported alongside but not gated.
    """

    check: str
    lhs: float
    bound: float
    hypothesis_met: bool = True
    g: str = ""
    psi: str = ""
    mu: Optional[float] = None
    q: Optional[float] = None
    u: Optional[float] = None
    v: Optional[float] = None
    notes: str = ""
    conditions: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    slack_rel: float = SLACK_REL

    @property
    def slack(self) -> float:
        return self.bound - self.lhs

    @property
    def holds(self) -> bool:
        ok = self.slack >= -slack_tolerance(self.lhs, self.bound, self.slack_rel)
        return bool(ok and all(self.conditions.values()))


# --- sigma routes -------------------------------------------------------------

def _preimages(psi, iv):
    a, b = psi.preimage(iv.u, iv.v)
    return a, float(invert_map(psi, iv.mid, bracket=(a, b))), b


def sigma_fractional(g: RealFn, psi: MonotoneMap, mu: float, iv: Interval,
                     q: QuadSpec = FAST) -> float:
    """sigma from its definition through psi-fractional integrals of g o psi."""
    u, v = iv.u, iv.v
    a, m, b = _preimages(psi, iv)
    g_psi = lambda t: g(psi(t))
    left = psi_rl_left(g_psi, psi, mu, m, b, q)
    right = psi_rl_right(g_psi, psi, mu, m, a, q)
    scale = 2.0 ** (mu - 1) * gamma(mu + 2) / (v - u) ** mu
    return scale * (left + right) - (mu + 1) * g(iv.mid)


def sigma_identity(g: RealFn, psi: MonotoneMap, mu: float, iv: Interval,
                   q: QuadSpec = FAST, subtract_second: bool = False) -> float:
    """sigma from the second-derivative identity, integrated over psi-preimage space.

    The two pieces are added. ``subtract_second=True`` subtracts the second piece
    instead; that variant does not agree with the definition and is kept only
    for the findings report.
    """
    u, v = iv.u, iv.v
    a, m, b = _preimages(psi, iv)
    k = mu + 1.0

    def upper(t):
        # (v - psi(t))**k = (b - t)**k * ratio**k; the Jacobi weight carries (b - t)**k
        ratio = (v - psi(t)) / (b - t)
        return psi.deriv(t) * ratio**k * d2_of(g, psi(t))

    def lower(t):
        ratio = (psi(t) - u) / (t - a)
        return psi.deriv(t) * ratio**k * d2_of(g, psi(t))

    p1 = jacobi_integral(upper, m, b, k, 0.0, q.nodes)
    p2 = jacobi_integral(lower, a, m, 0.0, k, q.nodes)
    sign = -1.0 if subtract_second else 1.0
    return 2.0 ** (mu - 1) / (v - u) ** mu * (p1 + sign * p2)


def sigma_substituted(g: RealFn, mu: float, iv: Interval, q: QuadSpec = FAST) -> float:
    """sigma after the change of variables that eliminates psi."""
    u, v = iv.u, iv.v
    k = mu + 1.0
    first = jacobi_integral(lambda t: d2_of(g, 0.5 * t * u + 0.5 * (2 - t) * v), 0.0, 1.0, 0.0, k, q.nodes)
    second = jacobi_integral(lambda t: d2_of(g, 0.5 * (2 - t) * u + 0.5 * t * v), 0.0, 1.0, 0.0, k, q.nodes)
    return (v - u) ** 2 / 8.0 * (first + second)


def sigma_routes(g: RealFn, psi: MonotoneMap, mu: float, iv: Interval,
                 q: QuadSpec = FAST) -> SigmaValue:
    return SigmaValue(sigma_fractional(g, psi, mu, iv, q),
                      sigma_identity(g, psi, mu, iv, q),
                      sigma_substituted(g, mu, iv, q))


# --- closed-form bounds ----------------------------------------------------------

def powermean_bound(d2u: float, d2v: float, mu: float, q: float, width: float) -> float:
    """Power-mean bound on |sigma| from the endpoint values of g''."""
    a, b = abs(d2u) ** q, abs(d2v) ** q
    c1 = 1.0 / (2.0 * (mu + 3.0))
    c2 = 1.0 / (mu + 2.0) - c1
    brace = (c1 * a + c2 * b) ** (1 / q) + (c2 * a + c1 * b) ** (1 / q)
    return width**2 / 8.0 * (1.0 / (mu + 2.0)) ** (1 - 1 / q) * brace


def holder_tiers(d2u: float, d2v: float, mu: float, hp: HolderPair, width: float,
                 numerator: float = 2.0) -> tuple[float, float]:
    """Both tiers of the Hoelder bound with constant (numerator/((mu+1)p+1))**(1/p)."""
    q, p = hp.q, hp.p
    a, b = abs(d2u) ** q, abs(d2v) ** q
    const = width**2 / 8.0 * (numerator / ((mu + 1.0) * p + 1.0)) ** (1 / p)
    tier1 = const * (((a + 3 * b) / 4) ** (1 / q) + ((3 * a + b) / 4) ** (1 / q))
    tier2 = const * (abs(d2u) + abs(d2v))
    return tier1, tier2


def cor32_part2_bound(d2u: float, d2v: float, width: float, q: float) -> float:
    """Power-mean bound on |mean - g(m)| at mu = 1 in its (3,5)/8 closed form."""
    a, b = abs(d2u) ** q, abs(d2v) ** q
    return width**2 / 48.0 * (((3 * a + 5 * b) / 8) ** (1 / q) + ((5 * a + 3 * b) / 8) ** (1 / q))


def delta1() -> float:
    return 1.0 / 24.0


def delta2(q: float) -> float:
    if not q > 1:
        raise ValueError("delta2 needs q > 1")
    p = q / (q - 1.0)
    return 1.0 / (2.0 ** (2 + 2 / q) * (2 * p + 1) ** (1 / p))


DELTA2_Q1_LIMIT = 1.0 / 16.0  # (2p+1)**(1/p) -> 1 as p -> inf


# --- reports -------------------------------------------------------------------

def _hyp(g, iv, q):
    return check_convex(abs_d2_power(g, q), iv).is_convex


def _meta(iv, **kw):
    return dict(u=iv.u, v=iv.v, **kw)


def bound_powermean(g: RealFn, mu: float, hp: HolderPair, iv: Interval,
                    psi: MonotoneMap = IDENTITY, q: QuadSpec = FAST,
                    sigma: float | None = None) -> BoundReport:
    if sigma is None:
        sigma = sigma_fractional(g, psi, mu, iv, q)
    bound = powermean_bound(d2_of(g, iv.u), d2_of(g, iv.v), mu, hp.q, iv.width)
    return BoundReport("thm31", abs(sigma), bound, _hyp(g, iv, hp.q),
                       **_meta(iv, g=g.label, psi=psi.label, mu=mu, q=hp.q))


def bound_holder(g: RealFn, mu: float, hp: HolderPair, iv: Interval,
                 psi: MonotoneMap = IDENTITY, q: QuadSpec = FAST,
                 sigma: float | None = None) -> BoundReport:
    """Hoelder bound; the stated constant gates, the smaller proof constant is reported."""
    if hp.q <= 1:
        raise ValueError("the Hoelder bound needs q > 1")
    if sigma is None:
        sigma = sigma_fractional(g, psi, mu, iv, q)
    d2u, d2v = d2_of(g, iv.u), d2_of(g, iv.v)
    tier1, tier2 = holder_tiers(d2u, d2v, mu, hp, iv.width)
    proof1, proof2 = holder_tiers(d2u, d2v, mu, hp, iv.width, numerator=1.0)
    lhs = abs(sigma)
    extra = {
        "tier2": tier2,
        "tier1_le_tier2": tier1 <= tier2 + slack_tolerance(tier1, tier2),
        "proof_tier1": proof1,
        "proof_holds": lhs <= proof1 + slack_tolerance(lhs, proof1),
    }
    return BoundReport("thm32", lhs, tier1, _hyp(g, iv, hp.q),
                       **_meta(iv, g=g.label, psi=psi.label, mu=mu, q=hp.q), extra=extra)


def hh_classical(g: RealFn, iv: Interval, q: QuadSpec = FAST) -> BoundReport:
    """g(m) <= mean of g <= (g(u) + g(v)) / 2 for convex g."""
    mean = integrate(g, iv.u, iv.v, q) / iv.width
    left, right = g(iv.mid), 0.5 * (g(iv.u) + g(iv.v))
    cond = {"mean_le_endpoint_avg": mean <= right + slack_tolerance(mean, right)}
    return BoundReport("hh12", left, mean, check_convex(g, iv).is_convex,
                       **_meta(iv, g=g.label, psi="id"), conditions=cond,
                       extra={"endpoint_avg": right})


def hh_fractional(g: RealFn, mu: float, iv: Interval, q: QuadSpec = FAST) -> BoundReport:
    """Fractional Hermite-Hadamard chain under both Gamma(mu+1) and Gamma(mu+2) scalings.

    The Gamma(mu+1) scaling is canonical: it is the one that reduces to the
    classical chain at mu = 1.
    """
    u, v = iv.u, iv.v
    total = rl_left(g, mu, u, v, q) + rl_right(g, mu, v, u, q)
    mid1 = gamma(mu + 1) / (2 * iv.width**mu) * total
    mid2 = gamma(mu + 2) / (2 * iv.width**mu) * total
    left, right = g(iv.mid), 0.5 * (g(u) + g(v))
    tol = slack_tolerance
    extra = {
        "endpoint_avg": right,
        "middle_gamma_mu2": mid2,
        "gamma_mu2_chain_holds": (left <= mid2 + tol(left, mid2)) and (mid2 <= right + tol(mid2, right)),
        "gamma_mu1_chain_holds": (left <= mid1 + tol(left, mid1)) and (mid1 <= right + tol(mid1, right)),
    }
    cond = {"middle_le_endpoint_avg": mid1 <= right + tol(mid1, right)}
    return BoundReport("hh13", left, mid1, check_convex(g, iv).is_convex,
                       **_meta(iv, g=g.label, psi="id", mu=mu), conditions=cond, extra=extra)


def bound_min_delta(g: RealFn, hp: HolderPair, iv: Interval, q: QuadSpec = FAST) -> BoundReport:
    """|mean - g(m)| <= (v-u)**2 min(delta1, delta2) (|g''(u)| + |g''(v)|)."""
    if hp.q <= 1:
        raise ValueError("the min-delta bound needs q > 1")
    d1, d2 = delta1(), delta2(hp.q)
    lhs = abs(integrate(g, iv.u, iv.v, q) / iv.width - g(iv.mid))
    bound = iv.width**2 * min(d1, d2) * (abs(d2_of(g, iv.u)) + abs(d2_of(g, iv.v)))
    return BoundReport("cor34", lhs, bound, _hyp(g, iv, hp.q),
                       **_meta(iv, g=g.label, psi="id", mu=1.0, q=hp.q),
                       extra={"delta1": d1, "delta2": d2, "winner": "delta1" if d1 <= d2 else "delta2"})


def _agree(a, b, tol=ROUTE_TOL):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _route_diff(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def corollary_reductions(g: RealFn, mu: float, hp: HolderPair, iv: Interval,
                         q: QuadSpec = FAST) -> list[BoundReport]:
    """Every identity-map specialization, each cross-checked against the general-psi path.

    ``extra["route_diff"]`` is the scaled difference between the closed form
    written for psi(x) = x and the general code path evaluated at the identity map.
    """
    u, v, m, w = iv.u, iv.v, iv.mid, iv.width
    d2u, d2v = d2_of(g, u), d2_of(g, v)
    gm = g(m)
    meta = _meta(iv, g=g.label, psi="id")
    reports = []

    # identity of the deviation, general order
    plain_lhs = (2.0 ** (mu - 1) * gamma(mu + 2) / w**mu
                 * (rl_left(g, mu, m, v, q) + rl_right(g, mu, m, u, q)) - (mu + 1) * gm)
    plain_rhs = sigma_substituted(g, mu, iv, q)
    gen_lhs = sigma_fractional(g, IDENTITY, mu, iv, q)
    gen_rhs = sigma_identity(g, IDENTITY, mu, iv, q)
    reports.append(BoundReport(
        "cor31.1", abs(plain_lhs - plain_rhs), 1e-8, True, mu=mu, q=hp.q, **meta,
        extra={"route_diff": max(_route_diff(plain_lhs, gen_lhs), _route_diff(plain_rhs, gen_rhs)),
               "lhs": plain_lhs, "rhs": plain_rhs}))

    # identity at mu = 1: mean - g(m)
    mean_dev = integrate(g, u, v, q) / w - gm
    rhs1 = w**2 / 16.0 * (
        jacobi_integral(lambda t: d2_of(g, 0.5 * t * u + 0.5 * (2 - t) * v), 0.0, 1.0, 0.0, 2.0, q.nodes)
        + jacobi_integral(lambda t: d2_of(g, 0.5 * (2 - t) * u + 0.5 * t * v), 0.0, 1.0, 0.0, 2.0, q.nodes))
    sig1_frac = sigma_fractional(g, IDENTITY, 1.0, iv, q)
    sig1_id = sigma_identity(g, IDENTITY, 1.0, iv, q)
    reports.append(BoundReport(
        "cor31.2", abs(mean_dev - rhs1), 1e-8, True, mu=1.0, q=hp.q, **meta,
        extra={"route_diff": max(_route_diff(mean_dev, sig1_frac / 2), _route_diff(rhs1, sig1_id / 2)),
               "lhs": mean_dev, "rhs": rhs1}))

    hyp_q = _hyp(g, iv, hp.q)
    hyp_1 = _hyp(g, iv, 1.0)

    # power-mean specializations
    closed = powermean_bound(d2u, d2v, mu, hp.q, w)
    general = bound_powermean(g, mu, hp, iv, IDENTITY, q, sigma=gen_lhs)
    reports.append(BoundReport(
        "cor32.1", abs(plain_lhs), closed, hyp_q, mu=mu, q=hp.q, **meta,
        extra={"route_diff": max(_route_diff(closed, general.bound), _route_diff(abs(plain_lhs), general.lhs))}))

    closed = cor32_part2_bound(d2u, d2v, w, hp.q)
    general = bound_powermean(g, 1.0, hp, iv, IDENTITY, q, sigma=sig1_frac)
    reports.append(BoundReport(
        "cor32.2", abs(mean_dev), closed, hyp_q, mu=1.0, q=hp.q, **meta,
        extra={"route_diff": max(_route_diff(closed, general.bound / 2),
                                 _route_diff(abs(mean_dev), general.lhs / 2))}))

    closed = w**2 / (8.0 * (mu + 2.0)) * (abs(d2u) + abs(d2v))
    general = bound_powermean(g, mu, HolderPair(1.0), iv, IDENTITY, q, sigma=gen_lhs)
    reports.append(BoundReport(
        "cor32.3", abs(plain_lhs), closed, hyp_1, mu=mu, q=1.0, **meta,
        extra={"route_diff": _route_diff(closed, general.bound)}))

    closed = w**2 / 24.0 * (abs(d2u) + abs(d2v)) / 2.0
    general = bound_powermean(g, 1.0, HolderPair(1.0), iv, IDENTITY, q, sigma=sig1_frac)
    reports.append(BoundReport(
        "cor32.4", abs(mean_dev), closed, hyp_1, mu=1.0, q=1.0, **meta,
        extra={"route_diff": _route_diff(closed, general.bound / 2)}))

    if hp.q > 1:
        p = hp.p
        t1, t2 = holder_tiers(d2u, d2v, mu, hp, w)
        general = bound_holder(g, mu, hp, iv, IDENTITY, q, sigma=gen_lhs)
        reports.append(BoundReport(
            "cor33.1", abs(plain_lhs), t1, hyp_q, mu=mu, q=hp.q, **meta,
            extra={"route_diff": max(_route_diff(t1, general.bound), _route_diff(t2, general.extra["tier2"])),
                   "tier2": t2}))

        a, b = abs(d2u) ** hp.q, abs(d2v) ** hp.q
        bracket = ((a + 3 * b) / 4) ** (1 / hp.q) + ((3 * a + b) / 4) ** (1 / hp.q)
        first = w**2 / (16.0 * (2 * p + 1) ** (1 / p)) * bracket
        second = w**2 / (2.0 ** (2 + 2 / hp.q) * (2 * p + 1) ** (1 / p)) * (abs(d2u) + abs(d2v))
        general = bound_holder(g, 1.0, hp, iv, IDENTITY, q, sigma=sig1_frac)
        reports.append(BoundReport(
            "cor33.2", abs(mean_dev), first, hyp_q, mu=1.0, q=hp.q, **meta,
            conditions={"first_le_second": first <= second + slack_tolerance(first, second)},
            extra={"route_diff": _route_diff(first, general.extra["proof_tier1"] / 2),
                   "statement_constant_ratio": (general.bound / 2) / first if first else math.nan,
                   "second": second}))
    return reports
