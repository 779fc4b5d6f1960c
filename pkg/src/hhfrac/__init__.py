"""Midpoint-type Hermite-Hadamard bounds for fractional integrals with respect to a monotone map."""

from .bounds import BoundReport, HolderPair, sigma_routes
from .fracint import FAST, ORACLE, QuadSpec, psi_rl_left, psi_rl_right, rl_left, rl_right
from .funcs import IDENTITY, Interval, MonotoneMap, RealFn, make_fn, make_map
from .verify import SweepConfig, run_sweep

__all__ = [
    "BoundReport",
    "HolderPair",
    "sigma_routes",
    "FAST",
    "ORACLE",
    "QuadSpec",
    "rl_left",
    "rl_right",
    "psi_rl_left",
    "psi_rl_right",
    "IDENTITY",
    "Interval",
    "MonotoneMap",
    "RealFn",
    "make_fn",
    "make_map",
    "SweepConfig",
    "run_sweep",
]

__version__ = "0.1.0"
