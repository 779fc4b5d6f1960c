"""Command-line entry point: ``hhfrac <group> <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import math
import sys

from .bounds import HolderPair, bound_holder, bound_min_delta, bound_powermean, sigma_routes
from .fracint import ORACLE
from .funcs import Interval, make_fn, make_map
from .means import prop1_check, prop2_check, prop3_check, prop4_check
from .quadrature import PartitionCapError, quad_run
from .verify import (
    LEMMA_TOL,
    ConfigError,
    SweepConfig,
    emit_report,
    load_config,
    render_report,
    run_bessel_check,
    run_sweep,
)


def _clean(obj):
    # strict JSON has no inf/nan
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump(obj):
    print(json.dumps(_clean(obj), indent=2, sort_keys=True))


def _rows_ok(rows):
    return all(r.holds for r in rows if r.hypothesis_met)


def cmd_sweep(args):
    cfg = load_config(args.config) if args.config else SweepConfig()
    summary, rows = run_sweep(cfg)
    if args.out:
        emit_report(rows, args.format, args.out)
    _dump(summary.to_dict())
    return 0 if summary.ok else 1


def cmd_lemma(args):
    iv = Interval(args.u, args.v)
    sv = sigma_routes(make_fn(args.g), make_map(args.psi), args.mu, iv)
    _dump({"fractional": sv.via_fractional, "identity": sv.via_identity,
           "substituted": sv.via_substituted, "disagreement": sv.disagreement,
           "tolerance": LEMMA_TOL})
    return 0 if sv.disagreement <= LEMMA_TOL else 1


def cmd_bound(args):
    g, psi, iv, hp = make_fn(args.g), make_map(args.psi), Interval(args.u, args.v), HolderPair(args.q)
    if args.which == "thm31":
        r = bound_powermean(g, args.mu, hp, iv, psi)
    elif args.which == "thm32":
        r = bound_holder(g, args.mu, hp, iv, psi)
    else:
        r = bound_min_delta(g, hp, iv)
    sys.stdout.write(render_report([r]))
    return 0 if _rows_ok([r]) else 1


def cmd_means(args):
    if args.prop in (1, 3) and args.n is None:
        raise ValueError(f"--n is required for proposition {args.prop}")
    if args.prop == 1:
        rows = [prop1_check(args.n, args.u, args.v, args.q)]
    elif args.prop == 2:
        rows = [prop2_check(args.u, args.v, args.q)]
    elif args.prop == 3:
        rows = list(prop3_check(args.n, args.u, args.v, args.q))
    else:
        rows = [prop4_check(args.u, args.v, args.q)]
    sys.stdout.write(render_report(rows))
    return 0 if _rows_ok(rows) else 1


def cmd_quad(args):
    try:
        res = quad_run(make_fn(args.g), Interval(args.u, args.v), args.target, args.q, oracle=ORACLE)
    except PartitionCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _dump(res.to_dict())
    return 0 if res.certificate <= args.target and res.sound is not False else 1


def cmd_bessel(args):
    summary, rows = run_bessel_check([args.p], [Interval(args.u, args.v)], args.tol)
    if args.out:
        emit_report(rows, args.format, args.out)
    _dump(summary.to_dict())
    return 0 if summary.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hhfrac", description=__doc__)
    groups = parser.add_subparsers(dest="group", required=True)

    def sub(group, name, func, help_):
        p = group.add_parser(name, help=help_)
        p.set_defaults(func=func)
        return p

    verify = groups.add_parser("verify", help="verification sweeps and single checks")
    vcmds = verify.add_subparsers(dest="command", required=True)
    p = sub(vcmds, "sweep", cmd_sweep, "run the configured sweep")
    p.add_argument("--config", help="flat key = value config file (defaults when omitted)")
    p.add_argument("--out", help="write the row stream here")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub(vcmds, "lemma", cmd_lemma, "three-route evaluation of the midpoint deviation")
    p.add_argument("--g", required=True)
    p.add_argument("--psi", default="id")
    for flag in ("--mu", "--u", "--v"):
        p.add_argument(flag, type=float, required=True)

    p = sub(vcmds, "bound", cmd_bound, "one bound check")
    p.add_argument("--which", choices=("thm31", "thm32", "cor34"), required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--psi", default="id")
    p.add_argument("--mu", type=float, default=1.0)
    for flag in ("--q", "--u", "--v"):
        p.add_argument(flag, type=float, required=True)

    means = groups.add_parser("means", help="special-means inequalities")
    mcmds = means.add_subparsers(dest="command", required=True)
    p = sub(mcmds, "check", cmd_means, "check one proposition at one point")
    p.add_argument("--prop", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--n", type=int)
    for flag in ("--u", "--v", "--q"):
        p.add_argument(flag, type=float, required=True)

    quad = groups.add_parser("quad", help="certified composite midpoint rule")
    qcmds = quad.add_subparsers(dest="command", required=True)
    p = sub(qcmds, "run", cmd_quad, "adaptive partition to a target certificate")
    p.add_argument("--g", required=True)
    for flag in ("--u", "--v", "--target"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--q", type=float, default=1.0)

    bessel = groups.add_parser("bessel", help="normalized Bessel function checks")
    bcmds = bessel.add_subparsers(dest="command", required=True)
    p = sub(bcmds, "check", cmd_bessel, "derivative identities and the midpoint bound")
    for flag in ("--p", "--u", "--v"):
        p.add_argument(flag, type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
