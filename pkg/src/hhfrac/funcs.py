"""Objective functions, monotone substitution maps and their test corpora."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "RealFn",
    "MonotoneMap",
    "Interval",
    "ConvexityReport",
    "check_convex",
    "abs_d2_power",
    "invert_map",
    "d2_of",
    "gen_convex_family",
    "gen_monotone_family",
    "parse_registry",
    "make_fn",
    "make_map",
    "IDENTITY",
]

EPS = np.finfo(float).eps
CONVEXITY_TOL = 1e-10
Q_TAGS = (1.0, 1.5, 2.0, 3.0)


def _apply(f, x):
    """Evaluate ``f`` on scalars or arrays, vectorizing scalar-only callables."""
    arr = np.asarray(x, dtype=float)
    try:
        out = np.asarray(f(arr), dtype=float)
        if out.shape == arr.shape:
            return out if arr.ndim else float(out)
    except (TypeError, ValueError):
        pass
    out = np.vectorize(lambda t: float(f(float(t))), otypes=[float])(arr)
    return out if arr.ndim else float(out)


@dataclass(frozen=True)
class RealFn:
    eval: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    label: str = "g"
    tags: dict = field(default_factory=dict, compare=False, hash=False)

    def __call__(self, x):
        return _apply(self.eval, x)

    def second(self, x):
        """g'' at ``x``, analytic when available."""
        return d2_of(self, x)

    def self_test(self, iv: "Interval", points: int = 20, rtol: float = 1e-5) -> bool:
        """Check analytic derivatives against central differences at interior points."""
        xs = np.linspace(iv.u, iv.v, points + 2)[1:-1]
        ok = True
        if self.d1 is not None:
            h = np.maximum(1.0, np.abs(xs)) * EPS ** (1 / 3)
            fd = (self(xs + h) - self(xs - h)) / (2 * h)
            ok &= _close(fd, _apply(self.d1, xs), rtol, self(xs))
        if self.d2 is not None:
            fd = np.array([d2_of(self, x, force_fd=True) for x in xs])
            ok &= _close(fd, _apply(self.d2, xs), rtol, self(xs))
        return bool(ok)


def _close(approx, exact, rtol, fvals):
    # floor keeps near-zero derivatives from demanding impossible relative accuracy
    floor = 1e-6 * max(1.0, float(np.max(np.abs(fvals))))
    return np.all(np.abs(approx - exact) <= rtol * np.abs(exact) + floor)


@dataclass(frozen=True)
class MonotoneMap:
    eval: Callable
    deriv: Callable
    inv: Optional[Callable] = None
    label: str = "psi"
    domain: tuple = (-math.inf, math.inf)

    def __call__(self, x):
        return _apply(self.eval, x)

    def preimage(self, u: float, v: float) -> tuple:
        """Points (a, b) with psi(a) = u and psi(b) = v."""
        return float(invert_map(self, u)), float(invert_map(self, v))


@dataclass(frozen=True)
class Interval:
    u: float
    v: float

    def __post_init__(self):
        if not (0.0 <= self.u < self.v):
            raise ValueError(f"need 0 <= u < v, got [{self.u}, {self.v}]")

    @property
    def mid(self) -> float:
        return 0.5 * (self.u + self.v)

    @property
    def width(self) -> float:
        return self.v - self.u

    def __str__(self):
        return f"[{self.u!r}, {self.v!r}]"


@dataclass(frozen=True)
class ConvexityReport:
    is_convex: bool
    worst_violation: float  # largest defect in excess of the tolerance
    samples: int


def check_convex(f, iv: Interval, grid: int = 33, tol: float = CONVEXITY_TOL) -> ConvexityReport:
    """Sampled test of f(eta x + (1-eta) y) <= eta f(x) + (1-eta) f(y)."""
    if grid < 3:
        raise ValueError("grid must be >= 3")
    xs = np.linspace(iv.u, iv.v, grid)
    x, y = np.meshgrid(xs, xs)
    fx, fy = _apply(f, x), _apply(f, y)
    worst = -math.inf
    for eta in (0.25, 0.5, 0.75):
        defect = _apply(f, eta * x + (1 - eta) * y) - eta * fx - (1 - eta) * fy
        if not np.all(np.isfinite(defect)):
            raise FloatingPointError(f"non-finite values of {getattr(f, 'label', f)} on {iv}")
        worst = max(worst, float(defect.max()))
    excess = worst - tol
    return ConvexityReport(excess <= 0.0, excess, 3 * grid * grid)


def abs_d2_power(f: RealFn, q: float) -> RealFn:
    """|f''|**q as a RealFn (the quantity whose convexity the bounds assume)."""
    return RealFn(lambda x: np.abs(d2_of(f, x)) ** q, label=f"|{f.label}''|^{q!r}")


def d2_of(f: RealFn, x, force_fd: bool = False):
    """Second derivative: analytic when present, else a central second difference."""
    if f.d2 is not None and not force_fd:
        return _apply(f.d2, x)
    x = np.asarray(x, dtype=float)
    h = np.maximum(1.0, np.abs(x)) * EPS**0.25
    out = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    return out if np.ndim(out) else float(out)


def invert_map(psi: MonotoneMap, y, bracket: tuple | None = None, tol: float = 1e-13):
    """Solve psi(x) = y with safeguarded Newton steps inside a bracket.

    ``bracket`` is an interval of psi-preimage space; when omitted, the map's
    domain is used, expanding outwards from finite anchors if it is unbounded.
    Accepts scalars or arrays.
    """
    if psi.inv is not None:
        with np.errstate(invalid="ignore", divide="ignore"):
            x = _apply(psi.inv, y)
        if not np.all(np.isfinite(x)):
            raise ValueError(f"value outside the image of {psi.label}")
        return x
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    lo, hi = bracket if bracket is not None else _auto_bracket(psi, y_arr)
    lo = np.full_like(y_arr, lo)
    hi = np.full_like(y_arr, hi)
    f_lo, f_hi = psi(lo) - y_arr, psi(hi) - y_arr
    if np.any(f_lo > 0) or np.any(f_hi < 0):
        raise ValueError(f"value outside the image of [{lo[0]}, {hi[0]}] under {psi.label}")
    x = 0.5 * (lo + hi)
    scale = tol * np.maximum(1.0, np.abs(y_arr))
    for _ in range(200):
        fx = psi(x) - y_arr
        done = np.abs(fx) <= scale
        lo = np.where(fx < 0, x, lo)
        hi = np.where(fx > 0, x, hi)
        if np.all(done | (hi - lo <= 4 * EPS * np.maximum(1.0, np.abs(x)))):
            break
        dp = _apply(psi.deriv, x)
        if np.any(dp <= 0):
            raise ValueError(f"derivative of {psi.label} is not positive near {x[dp <= 0][0]}")
        step = x - fx / dp
        inside = (step > lo) & (step < hi)
        x = np.where(done, x, np.where(inside, step, 0.5 * (lo + hi)))
    else:
        raise ArithmeticError(f"inversion of {psi.label} did not converge")
    return x if np.ndim(y) else float(x[0])


def _auto_bracket(psi, y):
    lo, hi = psi.domain
    a = lo if math.isfinite(lo) else (min(-1.0, hi - 1.0) if math.isfinite(hi) else -1.0)
    b = hi if math.isfinite(hi) else max(1.0, a + 1.0)
    span = 1.0
    for _ in range(200):
        if psi(a) <= y.min() and psi(b) >= y.max():
            return a, b
        if psi(a) > y.min() and not math.isfinite(lo):
            a -= span
        elif psi(a) > y.min():
            raise ValueError(f"{y.min()} lies below the image of {psi.label}")
        if psi(b) < y.max() and not math.isfinite(hi):
            b += span
        elif psi(b) < y.max():
            raise ValueError(f"{y.max()} lies above the image of {psi.label}")
        span *= 2.0
    raise ValueError(f"could not bracket {y} under {psi.label}")


# --- registry ---------------------------------------------------------------

def parse_registry(text: str) -> tuple[str, dict]:
    """Parse ``family[:key=value[,key=value]*]`` (an optional ``psi=`` prefix is dropped)."""
    text = text.strip()
    if text.startswith("psi="):
        text = text[4:]
    family, _, rest = text.partition(":")
    if not family:
        raise ValueError(f"empty family in {text!r}")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq or not key:
                raise ValueError(f"bad parameter {item!r} in {text!r}")
            params[key.strip()] = float(value)
    return family, params


def _fmt(family, **params):
    if not params:
        return family
    return family + ":" + ",".join(f"{k}={v!r}" for k, v in params.items())


def _power(a=1.0, n=2.0):
    return RealFn(
        lambda x: a * x**n,
        lambda x: a * n * x ** (n - 1),
        lambda x: a * n * (n - 1) * x ** (n - 2),
        _fmt("pow", a=a, n=n),
    )


def _make(family, p):
    if family == "pow":
        return _power(p.get("a", 1.0), p["n"])
    if family == "sq":
        return RealFn(lambda x: x * x, lambda x: 2 * x, lambda x: 2.0 + 0 * x, "sq")
    if family == "exp":
        a, b = p.get("a", 1.0), p.get("b", 1.0)
        return RealFn(lambda x: a * np.exp(b * x), lambda x: a * b * np.exp(b * x),
                      lambda x: a * b * b * np.exp(b * x), _fmt("exp", a=a, b=b))
    if family == "recip":
        a = p.get("a", 1.0)
        return RealFn(lambda x: a / x, lambda x: -a / x**2, lambda x: 2 * a / x**3,
                      _fmt("recip", a=a))
    if family == "lin":
        a, b = p.get("a", 1.0), p.get("b", 0.0)
        return RealFn(lambda x: a * x + b, lambda x: a + 0 * x, lambda x: 0 * x,
                      _fmt("lin", a=a, b=b))
    if family == "combo":
        a, n, c, b = p["a"], p["n"], p["c"], p["b"]
        return RealFn(lambda x: a * x**n + c * np.exp(b * x),
                      lambda x: a * n * x ** (n - 1) + c * b * np.exp(b * x),
                      lambda x: a * n * (n - 1) * x ** (n - 2) + c * b * b * np.exp(b * x),
                      _fmt("combo", a=a, n=n, c=c, b=b))
    if family == "sin":
        return RealFn(np.sin, np.cos, lambda x: -np.sin(x), "sin")
    raise ValueError(f"unknown function family {family!r}")


def make_fn(text: str) -> RealFn:
    """Build a RealFn from a registry string such as ``pow:n=4`` or ``exp:b=1.0``."""
    return _make(*parse_registry(text))


def make_map(text: str) -> MonotoneMap:
    """Build a MonotoneMap from a registry string such as ``pow:r=2`` or ``psi=exp``."""
    family, p = parse_registry(text)
    if family == "id":
        return IDENTITY
    if family == "shift":
        c = p.get("c", 0.0)
        return MonotoneMap(lambda x: x + c, lambda x: 1.0 + 0 * x, lambda y: y - c,
                           _fmt("shift", c=c))
    if family == "exp":
        lam, c = p.get("lam", 1.0), p.get("c", 0.0)
        return MonotoneMap(lambda x: np.exp(lam * x) + c, lambda x: lam * np.exp(lam * x),
                           lambda y: np.log(y - c) / lam, _fmt("exp", lam=lam, c=c))
    if family == "pow":
        r, c = p.get("r", 2.0), p.get("c", 0.0)
        return MonotoneMap(lambda x: x**r + c, lambda x: r * x ** (r - 1),
                           lambda y: (y - c) ** (1 / r), _fmt("pow", r=r, c=c), (0.0, math.inf))
    if family == "log1p":
        c = p.get("c", 0.0)
        return MonotoneMap(lambda x: np.log1p(x) + c, lambda x: 1 / (1 + x),
                           lambda y: np.expm1(y - c), _fmt("log1p", c=c), (-1.0, math.inf))
    if family == "combo":
        w, k, lam, c = p.get("w", 1.0), p.get("k", 1.0), p.get("lam", 1.0), p.get("c", 0.0)
        return MonotoneMap(lambda x: w * x + k * np.exp(lam * x) + c,
                           lambda x: w + k * lam * np.exp(lam * x),
                           None, _fmt("combo", w=w, k=k, lam=lam, c=c))
    raise ValueError(f"unknown map family {family!r}")


IDENTITY = MonotoneMap(lambda x: x, lambda x: 1.0 + 0 * x, lambda y: y, "id")


# --- generators ---------------------------------------------------------------

def _r(x):
    return round(float(x), 3)


def _tag_convexity(f: RealFn, iv: Interval) -> RealFn:
    tags = {q: check_convex(abs_d2_power(f, q), iv).is_convex for q in Q_TAGS}
    return RealFn(f.eval, f.d1, f.d2, f.label, {"abs_d2_convex": tags})


def gen_convex_family(seed: int, count: int, iv: Interval) -> list[RealFn]:
    """Deterministic corpus of smooth functions with convex |g''| on ``iv``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    cycle = ("pow", "exp", "sq", "recip", "combo")
    out = []
    for i in range(count):
        family = cycle[i % len(cycle)]
        if family == "recip" and iv.u <= 0:
            family = "pow"
        if family == "pow":
            text = _fmt("pow", a=_r(rng.uniform(0.5, 2.0)), n=float(rng.integers(3, 6)))
        elif family == "exp":
            text = _fmt("exp", a=_r(rng.uniform(0.5, 2.0)), b=_r(rng.uniform(0.3, 1.5)))
        elif family == "sq":
            text = "sq"
        elif family == "recip":
            text = _fmt("recip", a=_r(rng.uniform(0.5, 2.0)))
        else:
            text = _fmt("combo", a=_r(rng.uniform(0.2, 1.0)), n=float(rng.integers(3, 5)),
                        c=_r(rng.uniform(0.2, 1.0)), b=_r(rng.uniform(0.3, 1.2)))
        out.append(_tag_convexity(make_fn(text), iv))
    return out


def gen_monotone_family(seed: int, count: int, iv: Interval) -> list[MonotoneMap]:
    """Deterministic increasing maps whose image covers ``iv``; the identity comes first."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    u, v = iv.u, iv.v
    cycle = ("id", "shift", "exp", "pow", "log1p", "combo")
    out = []
    for i in range(count):
        family = cycle[i % len(cycle)]
        if family == "id":
            text = "id" if i == 0 else _fmt("shift", c=-_r(rng.uniform(0.1, 1.0)))
        elif family == "shift":
            text = _fmt("shift", c=_r(rng.uniform(0.1, 2.0)))
        elif family == "exp":
            # anchored so psi(0) = u
            text = _fmt("exp", lam=_r(rng.uniform(0.3, 2.0)), c=u - 1.0)
        elif family == "pow":
            # anchored so psi(1) = u, keeping the preimage away from 0
            text = _fmt("pow", r=_r(rng.uniform(0.5, 3.0)), c=u - 1.0)
        elif family == "log1p":
            text = _fmt("log1p", c=u)
        else:
            k = _r(rng.uniform(0.2, 1.0))
            text = _fmt("combo", w=_r(rng.uniform(0.2, 1.5)), k=k,
                        lam=_r(rng.uniform(0.3, 1.5)), c=u - k)
        out.append(make_map(text))
    return out
