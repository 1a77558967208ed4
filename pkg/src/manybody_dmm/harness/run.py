"""Build systems and schemes from a configuration and drive a run to CSV."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ..core import OneStepScheme, iterate_steps
from ..diagnostics import ConservationTracker, write_conservation_csv, write_summary_csv
from ..errors import DMMError
from ..lotka_volterra import LotkaVolterraDMM, LVSystem, MeanVariant
from ..nbody import Gravity, LennardJones, NBodyDMM
from ..reference import ExplicitRK4, ImplicitMidpoint, StormerVerlet
from ..vortex import (PlanarVortexSystem, PlaneVortexDMM, SphereVortexDMM, SphereVortexSystem,
                      sample_plane_vortices, sample_sphere_vortices)
from .config import ExperimentConfig
from .io import TrajectoryWriter, load_bodies, read_ensemble, resolve_data_path


@dataclass
class Experiment:
    """Everything needed to integrate: system, scheme, initial state and labels."""
    system: object
    scheme: OneStepScheme
    x0: np.ndarray
    columns: list
    units: str = ""
    extra: Callable = None  # optional (t, x) -> dict of extra tracked diagnostics


def _state_columns_nbody(labels, dim):
    axes = "xyz"[:dim]
    q = [f"q{a}[{lab}]" for lab in labels for a in axes]
    p = [f"p{a}[{lab}]" for lab in labels for a in axes]
    return q + p


def _scheme(config: ExperimentConfig, system) -> OneStepScheme:
    kind, method = config.kind, config.method
    if method == "midpoint":
        return ImplicitMidpoint(system.rhs)
    if method == "rk4":
        return ExplicitRK4(system.rhs)
    if method == "verlet":
        return StormerVerlet(system)
    if kind == "lv":
        variant = MeanVariant.ARITHMETIC if method == "dmm-arith" else MeanVariant.GEOMETRIC
        return LotkaVolterraDMM(system, variant)
    if kind.startswith("nbody"):
        return NBodyDMM(system)
    if kind == "vortex-plane":
        return PlaneVortexDMM(system)
    return SphereVortexDMM(system)


def build(config: ExperimentConfig) -> Experiment:
    s = config.system
    kind = config.kind
    if kind == "lv":
        system = LVSystem(s["A"], s["xi"], s.get("D"))
        x0 = np.asarray(s["x0"], dtype=float)
        if x0.shape != (system.n,):
            raise ValueError(f"x0 has {x0.size} entries, expected {system.n}")
        return Experiment(system, _scheme(config, system), x0,
                          [f"x[{i}]" for i in range(system.n)])
    if kind.startswith("nbody"):
        path = resolve_data_path(s["bodies"], config.base_dir)
        potential = None
        if kind == "nbody-lj":
            potential = LennardJones(float(s["epsilon"]), float(s["sigma"]))
        elif "G" in s:
            potential = Gravity(float(s["G"]))
        system, x0, bodies = load_bodies(path, potential, float(s.get("mass_divisor", 1.0)))
        return Experiment(system, _scheme(config, system), x0,
                          _state_columns_nbody(bodies.labels, system.dim), bodies.units)
    sphere = kind == "vortex-sphere"
    if "ensemble" in s:
        path = resolve_data_path(s["ensemble"], config.base_dir)
        x0, gamma = read_ensemble(path, "sphere" if sphere else "plane")
    elif sphere:
        x0, gamma = sample_sphere_vortices(int(s["n"]), s.get("min_dist"),
                                           s.get("strength_scale"), config.seed)
    else:
        x0, gamma = sample_plane_vortices(int(s["n"]), float(s.get("box_half_width", 5.0)),
                                          s.get("min_dist"), s.get("strength_scale"),
                                          config.seed)
    n = gamma.size
    if sphere:
        system = SphereVortexSystem(gamma)
        cols = [f"{a}[{i}]" for i in range(n) for a in "xyz"]
        extra = lambda t, x: {"norm_defect": system.norm_defect(x)}
    else:
        system = PlanarVortexSystem(gamma)
        cols = [f"x[{i}]" for i in range(n)] + [f"y[{i}]" for i in range(n)]
        extra = None
    return Experiment(system, _scheme(config, system), x0, cols, extra=extra)


@dataclass
class RunResult:
    exit_status: int
    errors: dict = field(default_factory=dict)  # l-infinity drift per invariant
    iterations: dict = field(default_factory=dict)
    wall_time: float = 0.0
    n_completed: int = 0
    message: str = ""
    failed_step: Optional[int] = None
    norm_defect: Optional[float] = None
    out_dir: Optional[Path] = None

    def __bool__(self):
        return self.exit_status == 0


def run(config: ExperimentConfig, out_dir=None) -> RunResult:
    """Integrate ``config`` and write trajectory, conservation and summary CSVs.

    Returns a :class:`RunResult`; ``exit_status`` is 0 on success and 1 if the
    solver failed, in which case the CSVs cover the steps completed so far.
    """
    from .. import __version__

    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    exp = build(config)
    tracker = ConservationTracker(exp.system.invariants, config.sample_stride)
    its = []
    worst_defect = 0.0 if exp.extra is not None else None
    status, message, failed = 0, "", None

    start = time.perf_counter()
    with TrajectoryWriter(out / "trajectory.csv", exp.columns, config.sample_stride) as traj:
        try:
            for k, rec in enumerate(iterate_steps(exp.scheme, exp.x0, config.t0, config.tau,
                                                  config.n_steps, config.solver)):
                traj.write(rec.t, rec.state)
                tracker.update(rec.t, rec.state)
                if k > 0:
                    its.append(rec.iterations)
                if exp.extra is not None:
                    worst_defect = max(worst_defect, exp.extra(rec.t, rec.state)["norm_defect"])
        except DMMError as exc:
            status, message, failed = 1, str(exc), getattr(exc, "step", None)
    wall = time.perf_counter() - start

    report = tracker.report()
    errors = report.as_dict()
    write_conservation_csv(report, out / "conservation.csv")
    summary = dict(errors)
    if worst_defect is not None:
        summary["norm_defect"] = worst_defect
    write_summary_csv({config.method: summary}, out / "summary.csv")

    its_arr = np.asarray(its, dtype=float)
    iteration_stats = {
        "mean": float(its_arr.mean()) if its else 0.0,
        "max": int(its_arr.max()) if its else 0,
        "total": int(its_arr.sum()) if its else 0,
    }
    meta = {
        "config_sha256": config.digest(),
        "config": config.to_dict(),
        "library_version": __version__,
        "numpy_version": np.__version__,
        "units": exp.units,
        "steps_completed": len(its),
        "iterations": iteration_stats,
        "wall_time_s": wall,
        "exit_status": status,
        "message": message,
        "failed_step": failed,
        "errors": errors,
    }
    if worst_defect is not None:
        meta["norm_defect"] = worst_defect
    with open(out / "metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
    return RunResult(status, errors, iteration_stats, wall, len(its), message, failed,
                     worst_defect, out)
