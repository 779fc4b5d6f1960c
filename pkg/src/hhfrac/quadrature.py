"""Composite midpoint rule, its a-priori error certificate, and a greedy adaptive partitioner."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import DELTA2_Q1_LIMIT, delta1, delta2
from .fracint import ORACLE, QuadratureError, QuadSpec, integrate
from .funcs import Interval, RealFn, abs_d2_power, check_convex, d2_of

__all__ = [
    "Partition",
    "QuadResult",
    "PartitionCapError",
    "midpoint_rule",
    "certificate_constant",
    "error_certificate",
    "cell_contributions",
    "check_hypotheses",
    "adaptive_partition",
    "random_partition",
    "quad_run",
    "MAX_CELLS",
]

MAX_CELLS = 10**6


class PartitionCapError(QuadratureError):
    """Adaptive refinement would need more cells than allowed."""


@dataclass(frozen=True)
class Partition:
    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        if len(pts) < 2:
            raise ValueError("a partition needs at least two points")
        if any(not math.isfinite(x) for x in pts):
            raise ValueError("partition points must be finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("partition points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, iv: Interval, m: int) -> "Partition":
        if m < 1:
            raise ValueError("need at least one cell")
        pts = np.linspace(iv.u, iv.v, m + 1)
        pts[0], pts[-1] = iv.u, iv.v
        return cls(tuple(pts))

    @property
    def cells(self) -> int:
        return len(self.points) - 1

    @property
    def interval(self) -> Interval:
        return Interval(self.points[0], self.points[-1])

    def array(self) -> np.ndarray:
        return np.asarray(self.points)


@dataclass(frozen=True)
class QuadResult:
    value: float
    certificate: float
    cells: int
    true_error: float | None = None
    hypotheses: dict = field(default_factory=dict)

    @property
    def sound(self) -> bool | None:
        if self.true_error is None:
            return None
        return self.true_error <= self.certificate + 1e-9 * max(1.0, self.certificate)

    def to_dict(self) -> dict:
        out = {"value": self.value, "certificate": self.certificate, "cells": self.cells}
        if self.true_error is not None:
            out["true_error"] = self.true_error
        return out


def midpoint_rule(g: RealFn, d: Partition) -> float:
    x = d.array()
    w = np.diff(x)
    return math.fsum(np.asarray(g(0.5 * (x[:-1] + x[1:])), dtype=float) * w)


def certificate_constant(q_exp: float) -> float:
    """min(delta1, delta2); delta2 needs q > 1, so q = 1 uses delta1 alone."""
    if not q_exp >= 1:
        raise ValueError(f"q_exp must be >= 1, got {q_exp}")
    if q_exp == 1:
        return delta1()
    return min(delta1(), delta2(q_exp))


def _abs_d2(g, x):
    return np.abs(np.asarray(d2_of(g, x), dtype=float))


def cell_contributions(g: RealFn, d: Partition, q_exp: float) -> np.ndarray:
    x = d.array()
    a = _abs_d2(g, x)
    return certificate_constant(q_exp) * np.diff(x) ** 2 * (a[:-1] + a[1:])


def error_certificate(g: RealFn, d: Partition, q_exp: float) -> float:
    """min(delta1, delta2) * sum_j (x_{j+1} - x_j)^2 (|g''(x_j)| + |g''(x_{j+1})|)."""
    return math.fsum(cell_contributions(g, d, q_exp))


def check_hypotheses(g: RealFn, iv: Interval, q_exp: float) -> dict:
    """Which convexity premises hold: |g''|^q (statement) and |g''| (proof)."""
    q_conv = check_convex(abs_d2_power(g, q_exp), iv).is_convex
    abs_conv = q_conv if q_exp == 1 else check_convex(abs_d2_power(g, 1.0), iv).is_convex
    return {"abs_d2_q_convex": q_conv, "abs_d2_convex": abs_conv,
            "delta2_q1_limit": DELTA2_Q1_LIMIT}


def adaptive_partition(g: RealFn, iv: Interval, target: float, q_exp: float,
                       max_cells: int = MAX_CELLS) -> Partition:
    """Bisect the cell with the largest certificate contribution until the total meets ``target``."""
    if not target > 0:
        raise ValueError(f"target must be positive, got {target}")
    c = certificate_constant(q_exp)
    d2 = lambda x: float(abs(d2_of(g, x)))
    fu, fv = d2(iv.u), d2(iv.v)
    w = iv.v - iv.u
    first = c * w * w * (fu + fv)
    # heap entries: (-contribution, left, right, |g''(left)|, |g''(right)|)
    heap = [(-first, iv.u, iv.v, fu, fv)]
    total = first
    while total > target:
        if len(heap) >= max_cells:
            raise PartitionCapError(
                f"certificate {total:.3e} still above target {target:.3e} at {len(heap)} cells")
        neg, lo, hi, flo, fhi = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise PartitionCapError("cells reached floating-point resolution")
        fm = d2(mid)
        h = 0.5 * (hi - lo)
        left = c * h * h * (flo + fm)
        right = c * h * h * (fm + fhi)
        heapq.heappush(heap, (-left, lo, mid, flo, fm))
        heapq.heappush(heap, (-right, mid, hi, fm, fhi))
        total += left + right + neg
        if total <= target:
            # the running sum drifts; confirm with an exactly rounded sum
            total = math.fsum(-e[0] for e in heap)
    return Partition(tuple(sorted({e[1] for e in heap} | {iv.v})))


def random_partition(rng: np.random.Generator, iv: Interval, max_cells: int = 64) -> Partition:
    m = int(rng.integers(1, max_cells + 1))
    inner = np.sort(rng.uniform(iv.u, iv.v, m - 1))
    return Partition(tuple([iv.u, *np.unique(inner), iv.v]))


def quad_run(g: RealFn, iv: Interval, target: float, q_exp: float,
             exact: float | None = None, oracle: QuadSpec = ORACLE) -> QuadResult:
    """Adaptive partition, midpoint value, certificate and (oracle) true error."""
    d = adaptive_partition(g, iv, target, q_exp)
    value = midpoint_rule(g, d)
    if exact is None:
        exact = integrate(g, iv.u, iv.v, oracle)
    return QuadResult(value, error_certificate(g, d, q_exp), d.cells, abs(exact - value),
                      check_hypotheses(g, iv, q_exp))
