"""CSV readers and writers for body lists, vortex ensembles and trajectories."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from ..diagnostics import format_float
from ..errors import SchemaError
from ..nbody import Gravity, NBodySystem, RadialPotential

PACKAGED_DATA = ("solar10", "argon7")


def resolve_data_path(name_or_path, base_dir=None) -> Path:
    """Map a packaged dataset name (``solar10``, ``argon7``) or a path to a file."""
    if str(name_or_path) in PACKAGED_DATA:
        return Path(str(resources.files("manybody_dmm") / "data" / f"{name_or_path}.csv"))
    p = Path(name_or_path)
    if not p.is_absolute() and base_dir is not None:
        p = Path(base_dir) / p
    return p


def _read_commented_csv(path):
    header = {}
    lines = []
    with open(path, newline="") as fh:
        for raw in fh:
            stripped = raw.strip()
            if stripped.startswith("#"):
                body = stripped.lstrip("#").strip()
                for key in ("G", "units"):
                    if body.startswith(key) and body[len(key):].lstrip()[:1] in ("=", ":"):
                        header[key] = body[len(key):].lstrip()[1:].strip()
                continue
            if stripped:
                lines.append(raw)
    reader = csv.DictReader(io.StringIO("".join(lines)))
    rows = list(reader)
    return header, reader.fieldnames or [], rows


# ---------------------------------------------------------------------------
# bodies
# ---------------------------------------------------------------------------

@dataclass
class BodyFile:
    labels: list
    masses: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    G: Optional[float] = None
    units: str = ""
    comments: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


def read_bodies(path) -> BodyFile:
    header, fields, rows = _read_commented_csv(path)
    if not fields:
        raise SchemaError(f"{path}: no header row")
    dim = 3 if "z" in fields else 2
    axes = "xyz"[:dim]
    required = ["label", "mass"] + list(axes) + [f"v{a}" for a in axes]
    for col in required:
        if col not in fields:
            raise SchemaError(f"{path}: missing column '{col}'")
    if not rows:
        raise SchemaError(f"{path}: no bodies")
    try:
        masses = np.array([float(r["mass"]) for r in rows])
        q = np.array([[float(r[a]) for a in axes] for r in rows])
        v = np.array([[float(r[f"v{a}"]) for a in axes] for r in rows])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: non-numeric entry ({exc})") from exc
    if np.any(~(masses > 0)):
        raise SchemaError(f"{path}: column 'mass' must be positive")
    G = float(header["G"]) if "G" in header else None
    return BodyFile([r["label"] for r in rows], masses, q, v, G, header.get("units", ""))


def write_bodies(bodies: BodyFile, path) -> None:
    axes = "xyz"[: bodies.dim]
    with open(path, "w", newline="") as fh:
        for line in bodies.comments:
            fh.write(f"# {line}\n")
        if bodies.units:
            fh.write(f"# units: {bodies.units}\n")
        if bodies.G is not None:
            fh.write(f"# G = {bodies.G!r}\n")
        w = csv.writer(fh)
        w.writerow(["label", "mass"] + list(axes) + [f"v{a}" for a in axes])
        for i, label in enumerate(bodies.labels):
            w.writerow([label, repr(float(bodies.masses[i]))]
                       + [repr(float(c)) for c in bodies.positions[i]]
                       + [repr(float(c)) for c in bodies.velocities[i]])


def load_bodies(path, potential: Optional[RadialPotential] = None, mass_divisor: float = 1.0):
    """Read a body list and build ``(system, state, bodies)``.

    Momenta are ``p = m v`` with ``m`` the file mass divided by
    ``mass_divisor`` (used for the k_B-rescaled argon units).  Without an
    explicit potential the file must carry ``# G = ...`` and gravity is used.
    """
    bodies = read_bodies(path)
    if potential is None:
        if bodies.G is None:
            raise SchemaError(f"{path}: gravitational constant missing from header ('# G = ...')")
        potential = Gravity(bodies.G)
    masses = bodies.masses / mass_divisor
    system = NBodySystem(masses, potential, bodies.dim)
    state = system.pack(bodies.positions, masses[:, None] * bodies.velocities)
    return system, state, bodies


# ---------------------------------------------------------------------------
# vortex ensembles
# ---------------------------------------------------------------------------

def write_ensemble(path, state, gamma, geometry: str) -> None:
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.size
    state = np.asarray(state, dtype=float)
    if geometry == "plane":
        coords = np.column_stack([state[:n], state[n:]])
        cols = ["gamma", "x", "y"]
    elif geometry == "sphere":
        coords = state.reshape(n, 3)
        cols = ["gamma", "x", "y", "z"]
    else:
        raise ValueError(f"unknown geometry {geometry!r}")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for g, row in zip(gamma, coords):
            w.writerow([format_float(g)] + [format_float(c) for c in row])


def read_ensemble(path, geometry: str):
    _, fields, rows = _read_commented_csv(path)
    cols = ["gamma", "x", "y"] + (["z"] if geometry == "sphere" else [])
    for col in cols:
        if col not in fields:
            raise SchemaError(f"{path}: missing column '{col}'")
    try:
        gamma = np.array([float(r["gamma"]) for r in rows])
        coords = np.array([[float(r[c]) for c in cols[1:]] for r in rows])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: non-numeric entry ({exc})") from exc
    if geometry == "plane":
        state = np.concatenate([coords[:, 0], coords[:, 1]])
    else:
        state = coords.ravel()
    return state, gamma


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

class TrajectoryWriter:
    """Streams ``t`` plus state columns to CSV every ``stride`` records."""

    def __init__(self, path, columns, stride: int = 1):
        self._fh = open(path, "w", newline="")
        self._w = csv.writer(self._fh)
        self._w.writerow(["t"] + list(columns))
        self.stride = stride
        self._count = 0

    def write(self, t, state) -> None:
        if self._count % self.stride == 0:
            self._w.writerow([format_float(t)] + [format_float(v) for v in state])
        self._count += 1

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
