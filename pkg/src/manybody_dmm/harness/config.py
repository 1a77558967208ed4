"""Experiment configuration: YAML files, presets and validation."""
from __future__ import annotations

import copy
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from ..core import ForwardEuler, PerturbedPrevious, PreviousSolution, SolverConfig
from ..errors import ConfigError

K_BOLTZMANN = 1.380658e-23  # J/K, value used for the argon rescaling

SYSTEM_KINDS = ("lv", "nbody-gravity", "nbody-lj", "vortex-plane", "vortex-sphere")

METHODS = {
    "lv": ("dmm-arith", "dmm-geo", "midpoint", "rk4"),
    "nbody-gravity": ("dmm", "midpoint", "verlet", "rk4"),
    "nbody-lj": ("dmm", "midpoint", "verlet", "rk4"),
    "vortex-plane": ("dmm", "midpoint", "rk4"),
    "vortex-sphere": ("dmm", "midpoint", "rk4"),
}

GUESS_NAMES = {"forward-euler": ForwardEuler, "previous": PreviousSolution,
               "perturbed-previous": PerturbedPrevious}

PRESETS = ("lv3", "solar10", "argon7", "plane-vortex", "sphere-vortex")
SCALES = ("paper", "desk")

LV3_SYSTEM = {
    "kind": "lv",
    "A": [[1.0, 1.0, 1.0], [0.0, 0.0, -2.0], [0.0, 1.0, 0.0]],
    "xi": [0.5, 0.5, 0.5],
    "D": [0.0, 1.0, 2.0],
    "x0": [0.1, 0.1, 0.1],
}


@dataclass
class ExperimentConfig:
    system: dict
    method: str
    tau: float
    n_steps: int
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    sample_stride: int = 1
    t0: float = 0.0
    out_dir: str = "out"
    name: str = "custom"
    base_dir: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        # the run seed also drives the perturbed initial guesses
        g = self.solver.guess_strategy
        if isinstance(g, PerturbedPrevious) and g.seed != self.seed:
            self.solver = dataclasses.replace(
                self.solver, guess_strategy=PerturbedPrevious(g.rel_magnitude, self.seed))

    @property
    def kind(self) -> str:
        return self.system["kind"]

    def to_dict(self) -> dict:
        s = self.solver
        solver = {"abs_tolerance": s.abs_tolerance, "max_iterations": s.max_iterations}
        for key, cls in GUESS_NAMES.items():
            if isinstance(s.guess_strategy, cls):
                solver["guess"] = key
        if isinstance(s.guess_strategy, PerturbedPrevious):
            solver["rel_magnitude"] = s.guess_strategy.rel_magnitude
        return {
            "name": self.name,
            "system": copy.deepcopy(self.system),
            "method": self.method,
            "tau": self.tau,
            "n_steps": self.n_steps,
            "t0": self.t0,
            "solver": solver,
            "seed": self.seed,
            "sample_stride": self.sample_stride,
            "output": {"dir": self.out_dir},
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _preset_dict(name: str, scale: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset '{name}' (choose from {', '.join(PRESETS)})", "preset")
    if scale not in SCALES:
        raise ConfigError(f"unknown scale '{scale}' (paper or desk)", "scale")
    paper = scale == "paper"
    perturbed = {"abs_tolerance": 1e-14, "max_iterations": 200,
                 "guess": "perturbed-previous", "rel_magnitude": 1e-7}
    if name == "lv3":
        return {"system": copy.deepcopy(LV3_SYSTEM), "method": "dmm-arith",
                "tau": 0.05, "n_steps": 1000,
                "solver": {"abs_tolerance": 1e-15, "max_iterations": 200,
                           "guess": "forward-euler"},
                "sample_stride": 1}
    if name == "solar10":
        # trajectory sampled every 500 days = 100 steps
        return {"system": {"kind": "nbody-gravity", "bodies": "solar10"},
                "method": "dmm", "tau": 5.0, "n_steps": 4_000_000 if paper else 40_000,
                "solver": perturbed, "sample_stride": 100}
    if name == "argon7":
        return {"system": {"kind": "nbody-lj", "bodies": "argon7", "epsilon": 119.8,
                           "sigma": 0.341, "mass_divisor": K_BOLTZMANN},
                "method": "dmm", "tau": 5e-6, "n_steps": 40_000 if paper else 4_000,
                "solver": perturbed, "sample_stride": 10 if paper else 1}
    n = 1000 if paper else 50
    steps = 1000 if paper else 200
    if name == "plane-vortex":
        system = {"kind": "vortex-plane", "n": n, "box_half_width": 5.0,
                  "min_dist": 10.0 / n, "strength_scale": 1.0 / n}
    else:
        system = {"kind": "vortex-sphere", "n": n, "min_dist": 4.0 * 3.141592653589793 / n,
                  "strength_scale": 1.0 / n}
    return {"system": system, "method": "dmm", "tau": 0.1, "n_steps": steps,
            "solver": perturbed, "sample_stride": 1}


_KIND_DEFAULT_PRESET = {"lv": "lv3", "nbody-gravity": "solar10", "nbody-lj": "argon7",
                        "vortex-plane": "plane-vortex", "vortex-sphere": "sphere-vortex"}


def preset(name: str, scale: str = "desk") -> ExperimentConfig:
    """Named experiment at paper or desk scale."""
    raw = _preset_dict(name, scale)
    raw["name"] = f"{name}-{scale}"
    raw["output"] = {"dir": f"out/{name}-{scale}"}
    return config_from_dict(raw)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _solver_from_dict(d: dict, seed: int) -> SolverConfig:
    if not isinstance(d, dict):
        raise ConfigError("solver must be a mapping", "solver")
    unknown = set(d) - {"abs_tolerance", "max_iterations", "guess", "rel_magnitude"}
    if unknown:
        raise ConfigError(f"unknown solver key(s): {', '.join(sorted(unknown))}", "solver")
    guess = d.get("guess", "forward-euler")
    if guess not in GUESS_NAMES:
        raise ConfigError(f"unknown guess strategy '{guess}'", "solver.guess")
    if guess == "perturbed-previous":
        rel = float(d.get("rel_magnitude", 1e-7))
        if rel < 0:
            raise ConfigError("rel_magnitude must be >= 0", "solver.rel_magnitude")
        strategy = PerturbedPrevious(rel, seed)
    else:
        strategy = GUESS_NAMES[guess]()
    try:
        return SolverConfig(float(d.get("abs_tolerance", 1e-14)),
                            int(d.get("max_iterations", 200)), strategy)
    except (TypeError, ValueError) as exc:
        field_name = "solver.abs_tolerance" if "tolerance" in str(exc) else "solver.max_iterations"
        raise ConfigError(str(exc), field_name) from exc


def _validate_system(system: dict) -> dict:
    kind = system["kind"]
    if kind == "lv":
        for key in ("A", "xi", "x0"):
            if key not in system:
                raise ConfigError(f"lv system needs '{key}'", f"system.{key}")
    elif kind.startswith("nbody"):
        if "bodies" not in system:
            raise ConfigError("n-body system needs a 'bodies' file", "system.bodies")
        if kind == "nbody-lj":
            for key in ("epsilon", "sigma"):
                if not float(system.get(key, 0)) > 0:
                    raise ConfigError(f"'{key}' must be positive", f"system.{key}")
    else:
        if "ensemble" not in system:
            n = system.get("n")
            if not isinstance(n, int) or n < 1:
                raise ConfigError("vortex system needs 'ensemble' or a positive integer 'n'",
                                  "system.n")
    return system


def config_from_dict(raw: dict, base_dir=None) -> ExperimentConfig:
    """Validate a parsed mapping, filling gaps from the system's desk preset."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping", None)
    known = {"name", "system", "method", "tau", "n_steps", "t0", "solver", "seed",
             "sample_stride", "output"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}", sorted(unknown)[0])
    system = raw.get("system")
    if not isinstance(system, dict) or "kind" not in system:
        raise ConfigError("'system' must be a mapping with a 'kind'", "system.kind")
    kind = system["kind"]
    if kind not in SYSTEM_KINDS:
        raise ConfigError(f"unknown system kind '{kind}'", "system.kind")

    defaults = _preset_dict(_KIND_DEFAULT_PRESET[kind], "desk")
    method = raw.get("method", defaults["method"])
    if method not in METHODS[kind]:
        raise ConfigError(f"method '{method}' is not valid for system '{kind}' "
                          f"(choose from {', '.join(METHODS[kind])})", "method")
    # a user-supplied data file must not inherit preset values tied to the
    # preset's own data (argon mass rescaling, sampled-ensemble parameters)
    own_data = "bodies" in system or "ensemble" in system
    merged_system = {} if own_data else dict(defaults["system"])
    merged_system.update(system)
    merged_system = _validate_system(merged_system)

    try:
        tau = float(raw.get("tau", defaults["tau"]))
        n_steps = int(raw.get("n_steps", defaults["n_steps"]))
        t0 = float(raw.get("t0", 0.0))
        seed = int(raw.get("seed", 0))
        stride = int(raw.get("sample_stride", defaults["sample_stride"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numeric value: {exc}", None) from exc
    if not tau > 0:
        raise ConfigError("tau must be positive", "tau")
    if n_steps < 0:
        raise ConfigError("n_steps must be >= 0", "n_steps")
    if stride < 1:
        raise ConfigError("sample_stride must be >= 1", "sample_stride")
    solver_raw = dict(defaults["solver"]) if "solver" not in raw else dict(raw["solver"])
    solver = _solver_from_dict(solver_raw, seed)
    output = raw.get("output", {}) or {}
    return ExperimentConfig(
        system=merged_system, method=method, tau=tau, n_steps=n_steps, solver=solver,
        seed=seed, sample_stride=stride, t0=t0, out_dir=str(output.get("dir", "out")),
        name=str(raw.get("name", "custom")),
        base_dir=None if base_dir is None else str(base_dir),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        raise ConfigError(f"{where}: parse error: {getattr(exc, 'problem', exc)}") from exc
    return config_from_dict(raw, base_dir=path.parent)


def save_config(config: ExperimentConfig, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=False)
