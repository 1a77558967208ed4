"""Command line: ``run``, ``converge`` and ``sample`` subcommands."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import sys

from ..diagnostics import estimate_order, format_float
from ..errors import DMMError
from ..vortex import sample_plane_vortices, sample_sphere_vortices
from .config import PRESETS, SCALES, config_from_dict, load_config, preset
from .io import write_ensemble
from .run import build, run


def _override(config, method=None, tau=None, steps=None, out_dir=None):
    raw = config.to_dict()
    if method is not None:
        raw["method"] = method
    if tau is not None:
        raw["tau"] = tau
    if steps is not None:
        raw["n_steps"] = steps
    if out_dir is not None:
        raw["output"] = {"dir": out_dir}
    return dataclasses.replace(config_from_dict(raw), base_dir=config.base_dir)


def _cmd_run(args) -> int:
    config = load_config(args.config) if args.config else preset(args.preset, args.scale)
    config = _override(config, args.method, args.tau, args.steps, args.out_dir)
    result = run(config)
    for name, err in result.errors.items():
        print(f"Error[{name}] = {err:.3e}")
    print(f"steps {result.n_completed}, mean iterations {result.iterations['mean']:.2f}, "
          f"wall {result.wall_time:.2f} s, output {result.out_dir}")
    if result.exit_status:
        print(f"solver failure: {result.message}", file=sys.stderr)
    return result.exit_status


def _cmd_converge(args) -> int:
    taus = [float(t) for t in args.taus.split(",")]
    config = _override(preset(args.preset, "desk"), args.method)
    exp = build(config)
    t_final = args.t_final if args.t_final is not None else 8 * max(taus)
    table = estimate_order(exp.scheme, exp.x0, config.t0 + t_final, taus, args.factor,
                           config.solver, t0=config.t0)
    w = csv.writer(sys.stdout)
    w.writerow(["tau", "error", "used"])
    for tau, err, used in zip(table.taus, table.errors, table.used):
        w.writerow([format_float(tau), format_float(err), int(used)])
    print(f"# slope = {table.slope:.4f} (rms residual {table.residual:.2e}, "
          f"{'reliable' if table.reliable else 'unreliable'})")
    return 0


def _cmd_sample(args) -> int:
    if args.system == "plane":
        state, gamma = sample_plane_vortices(args.n, min_dist=args.min_dist,
                                             strength_scale=args.strength_scale, seed=args.seed)
    else:
        state, gamma = sample_sphere_vortices(args.n, args.min_dist, args.strength_scale,
                                              args.seed)
    write_ensemble(args.out, state, gamma, args.system)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="manybody-dmm",
                                     description="Conservative integrator experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a configured or preset experiment")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="YAML experiment file")
    src.add_argument("--preset", choices=PRESETS)
    p.add_argument("--scale", choices=SCALES, default="desk")
    p.add_argument("--method")
    p.add_argument("--tau", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--out-dir")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("converge", help="estimate the convergence order")
    p.add_argument("--preset", choices=PRESETS, required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--taus", required=True, help="comma-separated, strictly decreasing")
    p.add_argument("--t-final", type=float, help="integration span (default 8 * max tau)")
    p.add_argument("--factor", type=int, default=64, help="reference refinement factor")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("sample", help="draw a random vortex ensemble")
    p.add_argument("--system", choices=("plane", "sphere"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--min-dist", type=float, help="default 10/n (plane) or 4 pi/n (sphere)")
    p.add_argument("--strength-scale", type=float, help="default 1/n")
    p.set_defaults(func=_cmd_sample)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DMMError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
