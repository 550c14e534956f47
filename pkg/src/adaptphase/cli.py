"""Command line interface: ``adaptphase <estimate|sweep|analytic|narrow|pdf>``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analytics
from .circular_pdf import density_grid, write_coefficients_csv, write_density_csv
from .controller import make_schedule, parse_policy, replay, run_episode
from .harness import ConfigError, fit_loglog_slope, parse_config, run_sweep, write_sweep_csv
from .io import dumps, write_coherence_csv, write_json, write_rows_csv
from .measurement import ReadoutModel, RngStream
from .spin_bath import SpinBath, degenerate_bath, degenerate_steps, random_bath, run_narrowing


def _parse_params(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ValueError(f"bad --params entry {item!r}; expected key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = float(v)
    return out


def _int_param(params, key, default):
    v = params.get(key, default)
    if v != int(v):
        raise ValueError(f"parameter {key} must be an integer, got {v}")
    return int(v)


def analytic_curve(curve: str, params: dict):
    """Header and rows for one closed-form curve."""
    if curve in ("eq6", "eq7"):
        M = 1 if curve == "eq6" else 2
        lo = _int_param(params, "n_min", 1)
        hi = _int_param(params, "n_max", 12)
        rows = []
        for N in range(lo, hi + 1):
            T = M * (2 ** (N + 1) - 1)
            rows.append((N, T, analytics.holevo_closed_form(M, T)))
        return ["N", "T", "v_h"], rows
    if curve.startswith("recursion:"):
        M = {"m1": 1, "m2": 2}[curve.split(":", 1)[1]]
        c = params.get("c", 1.0)
        hi = _int_param(params, "n_max", 12)
        rows = []
        for n in range(hi + 1):
            p = analytics.coefficient_recursion(M, c, n)
            rows.append((n, p, analytics.holevo_from_abs_p(p)))
        return ["n", "abs_p", "v_h"], rows
    if curve.startswith("profile:"):
        M = {"m1": 1, "m2": 2}[curve.split(":", 1)[1]]
        N = _int_param(params, "N", 4)
        K = M * (2 ** (N + 1) - 1)
        return ["k", "abs_p"], [(k, analytics.final_coefficient_profile(M, N, k)) for k in range(K + 1)]
    if curve in ("gauss", "sinc"):
        M = 2 if curve == "gauss" else 1
        N = _int_param(params, "N", 4)
        grid = _int_param(params, "grid", 4096)
        phis = density_grid(grid)
        return ["phi", "density"], list(zip(phis, analytics.density_approximations(M, N, phis)))
    if curve == "readout-asymptote":
        eps = params.get("eps", 0.0)
        lo = _int_param(params, "n_min", 1)
        hi = _int_param(params, "n_max", 12)
        rows = []
        for N in range(lo, hi + 1):
            rec = analytics.holevo_from_abs_p(analytics.coefficient_recursion(2, 1.0 - eps, N))
            rows.append((N, analytics.readout_error_asymptote(eps, N), rec))
        return ["N", "v_h_asymptote", "v_h_recursion"], rows
    raise ValueError(f"unknown curve {curve!r}")


def parse_bath(text: str, n_steps: int | None):
    """Returns ``(bath, default_N)``."""
    if text.startswith("degenerate:"):
        nc, a = text.split(":", 1)[1].split(",")
        nc = int(nc)
        steps = degenerate_steps(nc) if n_steps is None else n_steps + 1
        return degenerate_bath(nc, float(a), steps), steps - 1
    if text.startswith("random:"):
        nc, seed = text.split(":", 1)[1].split(",")
        return random_bath(int(nc), int(seed)), 8
    doc = json.loads(Path(text).read_text())
    if isinstance(doc, list):
        return SpinBath(tuple(doc), label=str(text)), 8
    return SpinBath(tuple(doc["couplings"]), tau=float(doc.get("tau", 1.0)), label=str(text)), 8


def cmd_estimate(args):
    r = ReadoutModel(args.c, args.gamma)
    rng = RngStream(args.seed, 0)
    phi = rng.phase() if args.phi == "random" else float(args.phi)
    tr = run_episode(phi, make_schedule(args.n, parse_policy(args.policy)), r, rng)
    if args.trace:
        write_json(tr.to_dict(), args.trace)
    summary = {k: tr.to_dict()[k] for k in ("phi_true", "phi_est", "v_h", "total_time")}
    sys.stdout.write(dumps(summary))


def cmd_sweep(args):
    cfg = parse_config(Path(args.config).read_text())
    out = args.out or cfg.out
    if out is None:
        raise ValueError("no output path: pass --out or set 'out' in the config")
    res = run_sweep(cfg, workers=args.workers)
    write_sweep_csv(res, out)
    for p in cfg.policies:
        for c in cfg.c:
            for g in cfg.gamma:
                pts = [pt for pt in res.points(p, c, g) if math.isfinite(pt[1]) and pt[1] > 0]
                if len(pts) >= 3:
                    print(f"{p} c={c} gamma={g}: log-log slope {fit_loglog_slope(pts):.4f}")


def cmd_analytic(args):
    header, rows = analytic_curve(args.curve, _parse_params(args.params))
    write_rows_csv(header, rows, args.out)


def cmd_narrow(args):
    bath, default_n = parse_bath(args.bath, args.n)
    N = default_n if args.n is None else args.n
    sched = make_schedule(N, parse_policy(args.policy))
    rep = run_narrowing(bath, sched, ReadoutModel(args.c, args.gamma), RngStream(args.seed, 0))
    write_json(rep.to_dict(), args.out)
    if args.curves:
        write_coherence_csv(rep, args.curves)
    print(f"entropy bits {rep.entropy_bits_before:.6g} -> {rep.entropy_bits_after:.6g}; "
          f"T2* {rep.t2star_before:.6g} -> {rep.t2star_after:.6g}")


def cmd_pdf(args):
    doc = json.loads(Path(args.replay).read_text())
    r = ReadoutModel(float(doc["c"]), float(doc["gamma"]))
    pdf = replay(doc["steps"], r, parse_policy(doc["policy"]))
    write_density_csv(pdf, args.out, args.grid)
    if args.coeffs:
        write_coefficients_csv(pdf, args.coeffs)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adaptphase", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="run one adaptive episode")
    p.add_argument("--phi", default="random", help="true phase or 'random'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--policy", default="m2")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="Monte Carlo ensemble sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analytic", help="closed-form curves as CSV")
    p.add_argument("--curve", required=True)
    p.add_argument("--params", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("narrow", help="spin-bath narrowing run")
    p.add_argument("--bath", required=True, help="file | degenerate:Nc,a | random:Nc,seed")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--policy", default="m1")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--curves")
    p.set_defaults(func=cmd_narrow)

    p = sub.add_parser("pdf", help="replay a trace and dump the posterior density")
    p.add_argument("--replay", required=True)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--out", required=True)
    p.add_argument("--coeffs")
    p.set_defaults(func=cmd_pdf)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError, KeyError, ConfigError) as exc:
        print(f"adaptphase {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
