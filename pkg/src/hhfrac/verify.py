"""Verification sweeps: run every check over the corpus and parameter grids, summarize, serialize."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import (
    BoundReport,
    HolderPair,
    bound_holder,
    bound_min_delta,
    bound_powermean,
    corollary_reductions,
    hh_classical,
    hh_fractional,
    sigma_identity,
    sigma_routes,
    slack_tolerance,
)
from .fracint import ORACLE, QuadSpec, integrate
from .funcs import Interval, abs_d2_power, check_convex, gen_convex_family, gen_monotone_family
from .means import prop1_check, prop2_check, prop3_check, prop4_check
from .quadrature import certificate_constant, error_certificate, midpoint_rule, random_partition
from .special import (
    PoleError,
    SeriesError,
    check_dn,
    closed_form_dn,
    finite_difference,
    norm_bessel,
    norm_bessel_d1,
    norm_bessel_dn,
)

__all__ = [
    "ALL_CHECKS",
    "REPORTED_CHECKS",
    "ConfigError",
    "SweepConfig",
    "SweepSummary",
    "parse_config",
    "load_config",
    "run_sweep",
    "run_bessel_check",
    "summarize",
    "findings",
    "is_gated",
    "emit_report",
    "render_report",
    "REPORT_KEYS",
]

ALL_CHECKS = ("lemma31", "thm31", "thm32", "cor31", "cor32", "cor33", "cor34", "hh12", "hh13",
              "prop1", "prop2", "prop3", "prop4", "prop5", "prop6")
# families logged as findings rather than pass/fail gates
REPORTED_CHECKS = ("hh13", "prop6", "prop62.derivative", "prop62.expansion")

REPORT_KEYS = ("check", "g", "psi", "mu", "q", "u", "v", "lhs", "bound", "slack", "holds",
               "hypothesis_met", "notes")

LEMMA_TOL = 1e-8
ROUTE_TOL = 1e-10
BESSEL_RTOL = 1e-4


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def _iv_tuple(ivs):
    return tuple(iv if isinstance(iv, Interval) else Interval(*iv) for iv in ivs)


@dataclass(frozen=True)
class SweepConfig:
    seed: int = 0
    g_count: int = 20
    psi_count: int = 6
    mu_grid: tuple = (0.1, 0.25, 0.5, 0.75, 0.9, 1.0)
    q_grid: tuple = (1.0, 1.5, 2.0, 3.0, 5.0)
    intervals: tuple = ((0.0, 1.0), (1.0, 2.0), (0.5, 3.0))
    checks: tuple = ALL_CHECKS
    quad_abs: float = 1e-11
    slack_rel: float = 1e-9
    means_draws: int = 1000
    means_q: tuple = (1.0, 1.5, 2.0, 4.0)
    means_n: tuple = (3, -3, 4, -4, 5)
    partitions: int = 50
    bessel_p: tuple = (-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0)
    bessel_intervals: tuple = ((0.5, 1.5), (1.0, 2.0), (0.5, 3.0))

    def problems(self) -> list[str]:
        out = []
        if not self.mu_grid:
            out.append("mu_grid is empty")
        out += [f"mu={m} outside (0, 1]" for m in self.mu_grid if not 0 < m <= 1]
        if not self.q_grid:
            out.append("q_grid is empty")
        out += [f"q={q} below 1" for q in self.q_grid if not q >= 1]
        if not self.intervals:
            out.append("intervals is empty")
        for name in ("g_count", "psi_count", "means_draws", "partitions"):
            if getattr(self, name) < 1:
                out.append(f"{name} must be positive")
        out += [f"unknown check {c!r}" for c in self.checks if c not in ALL_CHECKS]
        if not self.checks:
            out.append("checks is empty")
        if not self.quad_abs > 0:
            out.append("quad_abs must be positive")
        if not self.slack_rel > 0:
            out.append("slack_rel must be positive")
        out += [f"bessel p={p} must exceed -1" for p in self.bessel_p if not p > -1]
        out += [f"means q={q} below 1" for q in self.means_q if not q >= 1]
        out += [f"means n={n} needs |n| >= 3" for n in self.means_n if abs(n) < 3]
        for label, ivs, need_pos in (("interval", self.intervals, False),
                                     ("bessel interval", self.bessel_intervals, True)):
            for iv in ivs:
                try:
                    iv = iv if isinstance(iv, Interval) else Interval(*iv)
                except (TypeError, ValueError) as exc:
                    out.append(f"{label} {iv}: {exc}")
                    continue
                if need_pos and iv.u <= 0:
                    out.append(f"{label} {iv} needs u > 0")
        return out

    def validate(self) -> "SweepConfig":
        probs = self.problems()
        if probs:
            raise ConfigError(probs)
        return self


# --- config text ------------------------------------------------------------

def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def _intervals(text):
    out = []
    for item in text.split(","):
        if item.strip():
            lo, _, hi = item.partition(":")
            out.append((float(lo), float(hi)))
    return tuple(out)


_FIELDS = {
    "seed": int, "g_count": int, "psi_count": int, "means_draws": int, "partitions": int,
    "quad_abs": float, "slack_rel": float,
    "mu_grid": _floats, "q_grid": _floats, "means_q": _floats, "bessel_p": _floats,
    "means_n": _ints,
    "intervals": _intervals, "bessel_intervals": _intervals,
    "checks": lambda s: tuple(c.strip() for c in s.split(",") if c.strip()),
}


def parse_config(text: str) -> SweepConfig:
    """Flat ``key = value`` lines; lists are comma separated, intervals are ``u:v``; ``#`` comments."""
    values, problems = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = (s.strip() for s in line.partition("="))
        if not sep:
            problems.append(f"line {lineno}: expected key = value")
        elif key not in _FIELDS:
            problems.append(f"line {lineno}: unknown key {key!r}")
        else:
            try:
                values[key] = _FIELDS[key](val)
            except ValueError as exc:
                problems.append(f"line {lineno}: bad value for {key}: {exc}")
    if problems:
        raise ConfigError(problems)
    return SweepConfig(**values).validate()


def load_config(path) -> SweepConfig:
    return parse_config(Path(path).read_text())


# --- summary ----------------------------------------------------------------

@dataclass(frozen=True)
class SweepSummary:
    total: int
    hypothesis_met: int
    passed: int
    worst_slack: float
    worst_case: str
    anomalies: list = field(default_factory=list)
    observations: list = field(default_factory=list)
    by_check: dict = field(default_factory=dict)
    reported: int = 0

    @property
    def ok(self) -> bool:
        return self.passed == self.hypothesis_met

    def to_dict(self) -> dict:
        return dataclasses.asdict(self) | {"ok": self.ok}


def is_gated(check: str) -> bool:
    return check not in REPORTED_CHECKS


def _family(check):
    return check.split(".", 1)[0]


def _describe(r: BoundReport) -> str:
    parts = [r.check, f"g={r.g}", f"psi={r.psi}"]
    if r.mu is not None:
        parts.append(f"mu={r.mu!r}")
    if r.q is not None:
        parts.append(f"q={r.q!r}")
    parts.append(f"[{r.u!r}, {r.v!r}]")
    return " ".join(parts)


def _scaled_slack(r):
    return r.slack / max(1.0, abs(r.lhs), abs(r.bound))


def summarize(rows: list[BoundReport], anomalies=(), observations=()) -> SweepSummary:
    gated = [r for r in rows if is_gated(r.check)]
    met = [r for r in gated if r.hypothesis_met]
    passed = sum(r.holds for r in met)
    by_check = {}
    for r in rows:
        stats = by_check.setdefault(r.check, {"total": 0, "hypothesis_met": 0, "passed": 0,
                                               "gated": is_gated(r.check)})
        stats["total"] += 1
        if r.hypothesis_met:
            stats["hypothesis_met"] += 1
            stats["passed"] += int(r.holds)
    worst, case = math.inf, ""
    for r in met:
        s = _scaled_slack(r)
        if not s >= worst:  # also catches nan
            worst, case = s, _describe(r)
    return SweepSummary(len(rows), len(met), passed, worst, case,
                        list(anomalies), list(observations), by_check, len(rows) - len(gated))


# --- sweep ------------------------------------------------------------------

def _with(r: BoundReport, **conditions) -> BoundReport:
    return dataclasses.replace(r, conditions={**r.conditions, **conditions})


def _row_key(r: BoundReport):
    num = lambda x: -math.inf if x is None else x
    return (r.check, r.g, r.psi, num(r.mu), num(r.q), num(r.u), num(r.v))


class _Sweep:
    def __init__(self, cfg: SweepConfig):
        self.cfg = cfg
        self.q = QuadSpec(abs_tol=cfg.quad_abs)
        self.oracle = QuadSpec(mode="oracle", abs_tol=cfg.quad_abs)
        self.ivs = _iv_tuple(cfg.intervals)
        self.corpus = {iv: gen_convex_family(cfg.seed, cfg.g_count, iv) for iv in self.ivs}
        self.maps = {iv: gen_monotone_family(cfg.seed, cfg.psi_count, iv) for iv in self.ivs}
        self._sigma = {}
        self._hyp = {}

    def sigma(self, g, psi, mu, iv):
        key = (g.label, psi.label, mu, iv.u, iv.v)
        if key not in self._sigma:
            self._sigma[key] = sigma_routes(g, psi, mu, iv, self.q)
        return self._sigma[key]

    def convex_d2(self, g, iv, q):
        key = (g.label, iv.u, iv.v, q)
        if key not in self._hyp:
            self._hyp[key] = check_convex(abs_d2_power(g, q), iv).is_convex
        return self._hyp[key]

    def fix(self, r: BoundReport) -> BoundReport:
        return dataclasses.replace(r, slack_rel=self.cfg.slack_rel)

    # one generator per check family

    def lemma31(self):
        for iv in self.ivs:
            for g in self.corpus[iv]:
                for psi in self.maps[iv]:
                    for mu in self.cfg.mu_grid:
                        sv = self.sigma(g, psi, mu, iv)
                        stated = sigma_identity(g, psi, mu, iv, self.q, subtract_second=True)
                        yield BoundReport(
                            "lemma31", sv.disagreement, LEMMA_TOL, True, g=g.label, psi=psi.label,
                            mu=mu, u=iv.u, v=iv.v,
                            extra={"fractional": sv.via_fractional, "identity": sv.via_identity,
                                   "substituted": sv.via_substituted,
                                   "subtract_second_diff": abs(stated - sv.via_fractional)})

    def thm31(self):
        for iv in self.ivs:
            for g in self.corpus[iv]:
                for psi in self.maps[iv]:
                    for mu in self.cfg.mu_grid:
                        sig = self.sigma(g, psi, mu, iv).via_fractional
                        for q in self.cfg.q_grid:
                            yield bound_powermean(g, mu, HolderPair(q), iv, psi, self.q, sigma=sig)

    def thm32(self):
        for iv in self.ivs:
            for g in self.corpus[iv]:
                for psi in self.maps[iv]:
                    for mu in self.cfg.mu_grid:
                        sig = self.sigma(g, psi, mu, iv).via_fractional
                        for q in self.cfg.q_grid:
                            if q > 1:
                                yield bound_holder(g, mu, HolderPair(q), iv, psi, self.q, sigma=sig)

    def corollaries(self, families):
        q_first, mu_first = self.cfg.q_grid[0], self.cfg.mu_grid[0]
        # rows that do not depend on q (or on mu) are emitted once
        q_free = {"cor31.1", "cor31.2", "cor32.3", "cor32.4"}
        mu_free = {"cor31.2", "cor32.2", "cor32.4", "cor33.2"}
        for iv in self.ivs:
            for g in self.corpus[iv]:
                for mu in self.cfg.mu_grid:
                    for q in self.cfg.q_grid:
                        for r in corollary_reductions(g, mu, HolderPair(q), iv, self.q):
                            if _family(r.check) not in families:
                                continue
                            if r.check in q_free and q != q_first:
                                continue
                            if r.check in mu_free and mu != mu_first:
                                continue
                            if r.check in q_free:
                                r = dataclasses.replace(r, q=None)
                            yield _with(r, route_agree=r.extra["route_diff"] <= ROUTE_TOL)

    def cor34(self):
        for iv in self.ivs:
            for g in self.corpus[iv]:
                for q in self.cfg.q_grid:
                    if q > 1:
                        yield bound_min_delta(g, HolderPair(q), iv, self.q)

    def hh12(self):
        for iv in self.ivs:
            for g in self.corpus[iv]:
                yield hh_classical(g, iv, self.q)

    def hh13(self):
        for iv in self.ivs:
            for g in self.corpus[iv]:
                for mu in self.cfg.mu_grid:
                    yield hh_fractional(g, mu, iv, self.q)

    def means(self, families):
        rng = np.random.default_rng(self.cfg.seed)
        for i in range(self.cfg.means_draws):
            u, v = sorted(float(x) for x in 10.0 - rng.uniform(0.0, 10.0, 2))
            q = float(rng.choice(self.cfg.means_q))
            n = int(rng.choice(self.cfg.means_n))
            if not u < v:
                continue
            note = f"draw={i}"
            if "prop1" in families:
                yield dataclasses.replace(prop1_check(n, u, v, q), notes=note)
            if "prop2" in families:
                yield dataclasses.replace(prop2_check(u, v, q), notes=note)
            if "prop3" in families:
                for r in prop3_check(n, u, v, q):
                    yield dataclasses.replace(
                        _with(r, lhs_routes_agree=r.extra["lhs_routes_agree"],
                              bound_routes_agree=r.extra["bound_routes_agree"]), notes=note)
            if "prop4" in families:
                yield dataclasses.replace(prop4_check(u, v, q), notes=note)

    def prop5(self):
        rng = np.random.default_rng(self.cfg.seed)
        for iv in self.ivs:
            for g in self.corpus[iv]:
                exact = integrate(g, iv.u, iv.v, self.oracle)
                for k in range(self.cfg.partitions):
                    d = random_partition(rng, iv)
                    err = abs(exact - midpoint_rule(g, d))
                    widest = float(np.diff(d.array()).max())
                    for q in self.cfg.q_grid:
                        cert = error_certificate(g, d, q)
                        yield BoundReport(
                            "prop5", err, cert, self.convex_d2(g, iv, q), g=g.label, psi="id",
                            q=q, u=iv.u, v=iv.v, notes=f"partition={k}",
                            extra={"cells": d.cells, "max_width": widest,
                                   "abs_d2_convex": self.convex_d2(g, iv, 1.0)})

    def run(self) -> list[BoundReport]:
        checks = set(self.cfg.checks)
        rows = []
        for name in ("lemma31", "thm31", "thm32", "cor34", "hh12", "hh13", "prop5"):
            if name in checks:
                rows.extend(getattr(self, name)())
        cors = checks & {"cor31", "cor32", "cor33"}
        if cors:
            rows.extend(self.corollaries(cors))
        means = checks & {"prop1", "prop2", "prop3", "prop4"}
        if means:
            rows.extend(self.means(means))
        if "prop6" in checks:
            rows.extend(_bessel_rows(self.cfg.bessel_p, _iv_tuple(self.cfg.bessel_intervals),
                                     BESSEL_RTOL))
        rows = [self.fix(r) for r in rows]
        rows.sort(key=_row_key)
        return rows


def run_sweep(cfg: SweepConfig) -> tuple[SweepSummary, list[BoundReport]]:
    """Run every configured check; returns the summary and the sorted row stream."""
    cfg.validate()
    rows = _Sweep(cfg).run()
    anomalies, observations = findings(rows)
    return summarize(rows, anomalies, observations), rows


# --- Bessel ------------------------------------------------------------------

def _third(p, x):
    return norm_bessel_dn(p, 3, x)


def _bessel_rows(p_grid, intervals, tol):
    rows = []
    c = certificate_constant(1.0)
    for p in p_grid:
        points = sorted({x for iv in intervals for x in (iv.u, iv.mid, iv.v)})
        for x in points:
            fd = finite_difference(lambda t: norm_bessel(p, t), x, 1)
            d1 = norm_bessel_d1(p, x)
            val = norm_bessel(p, x)
            rows.append(BoundReport(
                "prop61", abs(d1 - fd) / max(abs(fd), 1e-300), 1e-7, True, g=f"bessel:p={p!r}",
                psi="id", u=x, v=x, conditions={"value_ge_1": val >= 1.0},
                extra={"d1": d1, "finite_diff": fd, "value": val}))
            for n in (1, 2, 3, 4):
                chk = check_dn(p, n, x, rtol=BESSEL_RTOL)
                scale = max(1.0, abs(chk.finite_diff))
                for form, value in (("series", chk.series), *chk.closed.items()):
                    err = math.nan if value is None else abs(value - chk.finite_diff) / scale
                    rows.append(BoundReport(
                        f"prop62.{form}", err, BESSEL_RTOL, True, g=f"bessel:p={p!r}", psi="id",
                        q=float(n), u=x, v=x,
                        notes="pole" if value is None else "",
                        extra={"n": n, "value": value, "finite_diff": chk.finite_diff}))
        for iv in intervals:
            u, v, m = iv.u, iv.v, iv.mid
            quotient = (norm_bessel(p, v) - norm_bessel(p, u)) / (v - u)
            midterm = (u + v) / (4.0 * (p + 1.0)) * norm_bessel(p + 1.0, m)
            lhs = abs(quotient - midterm)
            lhs_series = abs(quotient - norm_bessel_dn(p, 1, m))
            try:
                stated = iv.width**2 * c * (abs(closed_form_dn(p, 3, u)) + abs(closed_form_dn(p, 3, v)))
                note = ""
            except (PoleError, SeriesError) as exc:
                stated, note = math.nan, f"pole: {exc}"
            series_bound = iv.width**2 * c * (abs(_third(p, u)) + abs(_third(p, v)))
            convex = check_convex(lambda x: np.vectorize(lambda t: _third(p, t))(x), iv, grid=9)
            rows.append(BoundReport(
                "prop6", lhs, stated, convex.is_convex, g=f"bessel:p={p!r}", psi="id",
                u=u, v=v, notes=note,
                extra={"lhs_series_route": lhs_series,
                       "lhs_routes_agree": abs(lhs - lhs_series) <= 1e-12 * max(1.0, lhs),
                       "series_bound": series_bound,
                       "series_bound_holds": lhs <= series_bound + slack_tolerance(lhs, series_bound)}))
    return rows


def run_bessel_check(p_grid, intervals, tol: float = BESSEL_RTOL):
    """Derivative identities and the midpoint bound for the normalized Bessel function."""
    bad = [p for p in p_grid if not p > -1]
    ivs = _iv_tuple(intervals)
    bad_iv = [iv for iv in ivs if iv.u <= 0]
    if bad or bad_iv:
        raise ConfigError([f"p={p} must exceed -1" for p in bad]
                          + [f"interval {iv} needs u > 0" for iv in bad_iv])
    rows = sorted(_bessel_rows(p_grid, ivs, tol), key=_row_key)
    anomalies, observations = findings(rows)
    return summarize(rows, anomalies, observations), rows


# --- findings ----------------------------------------------------------------

def _count(rows, pred):
    return sum(1 for r in rows if pred(r))


def findings(rows: list[BoundReport]) -> tuple[list[str], list[str]]:
    """Anomalies for the normalization items under suspicion, plus other observations.

    Each anomaly names the check id it concerns and states what the numbers show.
    """
    by = {}
    for r in rows:
        by.setdefault(r.check, []).append(r)
    anomalies, observations = [], []

    hh = by.get("hh13", [])
    if hh:
        met = [r for r in hh if r.hypothesis_met]
        at1 = [r for r in met if r.mu == 1.0]
        g1 = _count(met, lambda r: r.extra["gamma_mu1_chain_holds"])
        g2 = _count(met, lambda r: r.extra["gamma_mu2_chain_holds"])
        g1_at1 = _count(at1, lambda r: r.extra["gamma_mu1_chain_holds"])
        g2_at1 = _count(at1, lambda r: r.extra["gamma_mu2_chain_holds"])
        anomalies.append(
            f"hh13 normalization: with Gamma(mu+1) the fractional chain holds on {g1}/{len(met)} rows"
            f" ({g1_at1}/{len(at1)} at mu=1, where it reduces to the classical chain);"
            f" with Gamma(mu+2) it holds on {g2}/{len(met)} rows ({g2_at1}/{len(at1)} at mu=1)")

    t32 = [r for r in by.get("thm32", []) if r.hypothesis_met]
    if t32:
        proof = _count(t32, lambda r: r.extra["proof_holds"])
        stmt = _count(t32, lambda r: r.holds)
        tiers = _count(t32, lambda r: r.extra["tier1_le_tier2"])
        anomalies.append(
            f"thm32 proof constant: the proof chain yields (1/((mu+1)p+1))^(1/p) where the statement"
            f" has (2/((mu+1)p+1))^(1/p); statement bound holds on {stmt}/{len(t32)} rows,"
            f" proof-constant bound on {proof}/{len(t32)}; tier1 <= tier2 on {tiers}/{len(t32)}")

    p1, p2 = by.get("prop1", []), by.get("prop2", [])
    if p1 or p2:
        parts = []
        if p1:
            worst = max(r.extra["constant_rel_diff"] for r in p1)
            parts.append(f"stated 3*4^(1/q+2) agrees with the constant derived from the mu=1"
                         f" power-mean bound with g=x^n (max relative difference {worst:.1e})")
        if p2:
            ratio = min(r.bound / r.extra["derived_bound"] for r in p2)
            held = _count(p2, lambda r: r.holds)
            parts.append(f"reused for g=1/x it omits |g''| factor 2 (stated/derived = {ratio:.3g});"
                         f" that bound holds on {held}/{len(p2)} draws")
        anomalies.append("prop1 constant: " + "; ".join(parts))

    cf = by.get("prop62.derivative", []) + by.get("prop62.expansion", [])
    if cf:
        def tally(name):
            rs = by.get(name, [])
            ok = _count(rs, lambda r: r.holds)
            poles = _count(rs, lambda r: r.notes == "pole")
            return f"{name.split('.')[1]} params match finite differences on {ok}/{len(rs)} ({poles} poles)"
        series = by.get("prop62.series", [])
        anomalies.append(
            "prop62 parameters: the closed-form derivative lists denominators ((p+1-n)/2, (p+2-n)/2)"
            " while its series expansion uses ((p-2)/2, (p-1)/2), equal only at n=3; "
            + ", ".join(tally(n) for n in ("prop62.derivative", "prop62.expansion"))
            + f"; termwise series derivative matches on {_count(series, lambda r: r.holds)}/{len(series)}")

    p4 = by.get("prop4", [])
    if p4:
        held = _count(p4, lambda r: r.holds)
        derived = _count(p4, lambda r: r.lhs <= r.extra["derived_bound"] * (1 + 1e-9))
        anomalies.append(
            f"prop4 variables: (b-a)^2 read as (v-u)^2; stated bound holds on {held}/{len(p4)} draws;"
            f" the mean difference is the midpoint deviation of g=x^-2, whose derived bound holds on"
            f" {derived}/{len(p4)}; the proof's g=x^2 yields (v-u)^2/12 instead of this left side")

    p6 = by.get("prop6", [])
    if p6:
        met = [r for r in p6 if r.hypothesis_met]
        held = _count(met, lambda r: r.holds)
        poles = _count(p6, lambda r: r.notes.startswith("pole"))
        series_ok = _count(met, lambda r: r.extra["series_bound_holds"])
        anomalies.append(
            f"prop64 variables: a, b read as u, v in the midpoint term (a+b)/(4(p+1)) and the"
            f" |.|^(p-3) prefactors; stated bound holds on {held}/{len(met)} rows ({poles} undefined"
            f" at 2F3 poles); bound from series third derivatives holds on {series_ok}/{len(met)}")

    lem = by.get("lemma31", [])
    if lem:
        diff = min(r.extra["subtract_second_diff"] for r in lem)
        observations.append(
            f"lemma31: the identity needs the two g'' integrals added; subtracting the second"
            f" (the stated sign) misses sigma by at least {diff:.3g} over {len(lem)} rows")
    p3 = by.get("prop3.1", []) + by.get("prop3.2", [])
    if p3:
        lhs_ok = _count(p3, lambda r: r.extra["lhs_routes_agree"])
        bnd_ok = _count(p3, lambda r: r.extra["bound_routes_agree"])
        direct = _count(p3, lambda r: r.extra["direct_holds"])
        observations.append(
            f"prop3 routes: substitution and the stated reciprocal forms agree on the left side in"
            f" {lhs_ok}/{len(p3)} rows and on the bound in {bnd_ok}/{len(p3)}; the stated bound"
            f" holds on {direct}/{len(p3)}")
    p5 = [r for r in by.get("prop5", []) if r.hypothesis_met]
    if p5:
        bad = [r for r in p5 if not r.holds]
        msg = f"prop5 certificate: holds on {len(p5) - len(bad)}/{len(p5)} rows"
        if bad:
            msg += (f"; every failure has a cell wider than"
                    f" {min(r.extra['max_width'] for r in bad):.3g} (per-cell error scales as width^3,"
                    f" the certificate as width^2)")
        observations.append(msg)
    c33 = by.get("cor33.2", [])
    if c33:
        ratios = [r.extra["statement_constant_ratio"] for r in c33 if math.isfinite(r.extra["statement_constant_ratio"])]
        if ratios:
            observations.append(f"cor33.2: general statement bound / stated corollary bound ranges"
                                f" {min(ratios):.4g}..{max(ratios):.4g}")
    return anomalies, observations


# --- serialization -------------------------------------------------------------

def _num(x) -> str | None:
    if x is None:
        return None
    x = float(x)
    return format(x, ".17g") if math.isfinite(x) else None


def _notes(r: BoundReport) -> str:
    parts = [r.notes] if r.notes else []
    for k, val in list(r.conditions.items()) + list(r.extra.items()):
        if isinstance(val, bool):
            parts.append(f"{k}={str(val).lower()}")
        elif isinstance(val, (int, float)):
            parts.append(f"{k}={_num(val) if isinstance(val, float) else val}")
        elif val is None:
            parts.append(f"{k}=null")
        else:
            parts.append(f"{k}={val}")
    return "; ".join(parts)


def _fields(r: BoundReport) -> dict:
    return {"check": r.check, "g": r.g, "psi": r.psi, "mu": r.mu, "q": r.q, "u": r.u, "v": r.v,
            "lhs": r.lhs, "bound": r.bound, "slack": r.slack, "holds": r.holds,
            "hypothesis_met": bool(r.hypothesis_met), "notes": _notes(r)}


def _json_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    s = _num(x)
    return "null" if s is None else s


def render_report(rows, fmt: str = "json") -> str:
    if fmt == "json":
        if not rows:
            return "[]\n"
        lines = []
        for r in rows:
            f = _fields(r)
            lines.append("  {" + ", ".join(f"{json.dumps(k)}: {_json_value(f[k])}" for k in REPORT_KEYS) + "}")
        return "[\n" + ",\n".join(lines) + "\n]\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(REPORT_KEYS)
        for r in rows:
            f = _fields(r)
            w.writerow([("true" if f[k] else "false") if isinstance(f[k], bool)
                        else f[k] if isinstance(f[k], str)
                        else (_num(f[k]) or "") for k in REPORT_KEYS])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(rows, fmt: str, path) -> None:
    """Write rows as JSON (array of objects) or CSV (RFC 4180) to ``path``."""
    text = render_report(rows, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
