"""Point vortices in the plane and on the unit sphere.

Planar state layout: all x coordinates, then all y coordinates.
Spherical state layout: n consecutive unit vectors ``(x_i, y_i, z_i)``.

Both conservative schemes replace the singular kernel ``1 / h_ij`` (with
``h = r^2`` in the plane and ``h = 1 - x_i . x_j`` on the sphere) by the log
divided difference of ``h`` between the two time levels and use mean
positions elsewhere.
"""
from __future__ import annotations

import math

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import OneStepScheme, symmetric_log_ratio
from .errors import InfeasiblePackingError, SingularityError

PLANE_SINGULAR_DISTANCE = 1e-12
SPHERE_SINGULAR_GAP = 1e-14
SAMPLING_BUDGET = 10**6

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi


def _check_gamma(gamma):
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(gamma == 0) or not np.all(np.isfinite(gamma)):
        raise ValueError("circulations must be finite and nonzero")
    return gamma


def _off_diagonal_min(m):
    n = m.shape[0]
    if n < 2:
        return np.inf
    return np.min(m[~np.eye(n, dtype=bool)])


# ---------------------------------------------------------------------------
# plane
# ---------------------------------------------------------------------------

class PlaneInvariants(NamedTuple):
    P: np.ndarray
    L: float
    H: float


@dataclass
class PlanarVortexSystem:
    gamma: np.ndarray

    def __post_init__(self):
        self.gamma = _check_gamma(self.gamma)

    @property
    def n(self) -> int:
        return self.gamma.size

    @property
    def phase_dim(self) -> int:
        return 2 * self.n

    def split(self, state):
        state = np.asarray(state, dtype=float)
        if state.shape != (2 * self.n,):
            raise ValueError(f"state has shape {state.shape}, expected ({2 * self.n},)")
        return state[: self.n], state[self.n:]

    def pair_differences(self, x, y):
        """``x_ij = x_i - x_j``, ``y_ij`` and ``r_ij^2`` (diagonal of r^2 set to 1)."""
        xij = x[:, None] - x[None, :]
        yij = y[:, None] - y[None, :]
        r2 = xij * xij + yij * yij
        np.fill_diagonal(r2, 1.0)
        if _off_diagonal_min(r2) < PLANE_SINGULAR_DISTANCE**2:
            raise SingularityError("coincident planar vortices")
        return xij, yij, r2

    def rhs(self, t, state):
        return plane_rhs(self, state)

    def invariants(self, t, state) -> dict:
        inv = plane_conserved(self, state)
        return {"P_x": float(inv.P[0]), "P_y": float(inv.P[1]), "L": inv.L, "H": inv.H}


def plane_rhs(sys: PlanarVortexSystem, state) -> np.ndarray:
    x, y = sys.split(state)
    xij, yij, r2 = sys.pair_differences(x, y)
    w = sys.gamma[None, :] / r2
    np.fill_diagonal(w, 0.0)
    u = -np.sum(w * yij, axis=1) / TWO_PI
    v = np.sum(w * xij, axis=1) / TWO_PI
    return np.concatenate([u, v])


def plane_conserved(sys: PlanarVortexSystem, state) -> PlaneInvariants:
    x, y = sys.split(state)
    _, _, r2 = sys.pair_differences(x, y)
    g = sys.gamma
    P = np.array([np.sum(g * x), np.sum(g * y)])
    L = float(np.sum(g * (x * x + y * y)))
    iu = np.triu_indices(sys.n, 1)
    # log r = log(r^2) / 2
    H = float(-np.sum(np.outer(g, g)[iu] * np.log(r2[iu])) / FOUR_PI)
    return PlaneInvariants(P, L, H)


def plane_dmm_map(sys: PlanarVortexSystem, state_k, state_guess, tau: float) -> np.ndarray:
    """Fixed-point map of the conservative planar vortex scheme."""
    x0, y0 = sys.split(state_k)
    x1, y1 = sys.split(state_guess)
    _, _, r2_0 = sys.pair_differences(x0, y0)
    _, _, r2_1 = sys.pair_differences(x1, y1)
    xb = 0.5 * (x0 + x1)
    yb = 0.5 * (y0 + y1)
    xij = xb[:, None] - xb[None, :]
    yij = yb[:, None] - yb[None, :]
    w = sys.gamma[None, :] * symmetric_log_ratio(r2_0, r2_1)
    np.fill_diagonal(w, 0.0)
    x_new = x0 - tau / TWO_PI * np.sum(w * yij, axis=1)
    y_new = y0 + tau / TWO_PI * np.sum(w * xij, axis=1)
    return np.concatenate([x_new, y_new])


class PlaneVortexDMM(OneStepScheme):
    name = "dmm"
    is_symmetric = True

    def __init__(self, system: PlanarVortexSystem):
        self.system = system

    def rhs(self, t, x):
        return plane_rhs(self.system, x)

    def fixed_point_map(self, guess, x_k, t_k, tau):
        return plane_dmm_map(self.system, x_k, guess, tau)


# ---------------------------------------------------------------------------
# sphere
# ---------------------------------------------------------------------------

class SphereInvariants(NamedTuple):
    P: np.ndarray
    H: float


@dataclass
class SphereVortexSystem:
    gamma: np.ndarray

    def __post_init__(self):
        self.gamma = _check_gamma(self.gamma)

    @property
    def n(self) -> int:
        return self.gamma.size

    @property
    def phase_dim(self) -> int:
        return 3 * self.n

    def split(self, state):
        state = np.asarray(state, dtype=float)
        if state.shape != (3 * self.n,):
            raise ValueError(f"state has shape {state.shape}, expected ({3 * self.n},)")
        return state.reshape(self.n, 3)

    def gaps(self, X):
        """``1 - x_i . x_j`` for all pairs (diagonal set to 1)."""
        h = 1.0 - _pair_dots(X)
        np.fill_diagonal(h, 1.0)
        if _off_diagonal_min(h) < SPHERE_SINGULAR_GAP:
            raise SingularityError("coincident spherical vortices")
        return h

    def rhs(self, t, state):
        return sphere_rhs(self, state)

    def invariants(self, t, state) -> dict:
        inv = sphere_conserved(self, state)
        return {"P_x": float(inv.P[0]), "P_y": float(inv.P[1]), "P_z": float(inv.P[2]),
                "H": inv.H}

    def norm_defect(self, state) -> float:
        """``max_i | |x_i| - 1 |``."""
        X = self.split(state)
        return float(np.max(np.abs(np.sqrt(np.sum(X * X, axis=1)) - 1.0)))


def _pair_dots(X):
    # elementwise form keeps the matrix exactly symmetric (BLAS need not)
    return np.sum(X[:, None, :] * X[None, :, :], axis=2)


def _pair_cross_sum(w, X):
    # sum_j w_ij (x_j x x_i)
    cross = np.cross(X[None, :, :], X[:, None, :])
    return np.sum(w[:, :, None] * cross, axis=1)


def sphere_rhs(sys: SphereVortexSystem, state) -> np.ndarray:
    X = sys.split(state)
    w = sys.gamma[None, :] / sys.gaps(X)
    np.fill_diagonal(w, 0.0)
    return (_pair_cross_sum(w, X) / FOUR_PI).ravel()


def sphere_conserved(sys: SphereVortexSystem, state) -> SphereInvariants:
    X = sys.split(state)
    sys.gaps(X)
    g = sys.gamma
    P = np.sum(g[:, None] * X, axis=0)
    iu = np.triu_indices(sys.n, 1)
    dots = _pair_dots(X)[iu]
    H = float(-np.sum(np.outer(g, g)[iu] * np.log(2.0 - 2.0 * dots)) / FOUR_PI)
    return SphereInvariants(P, H)


def sphere_dmm_map(sys: SphereVortexSystem, state_k, state_guess, tau: float) -> np.ndarray:
    """Fixed-point map of the conservative spherical vortex scheme."""
    X0 = sys.split(state_k)
    X1 = sys.split(state_guess)
    h0 = sys.gaps(X0)
    h1 = sys.gaps(X1)
    w = sys.gamma[None, :] * symmetric_log_ratio(h0, h1)
    np.fill_diagonal(w, 0.0)
    Xb = 0.5 * (X0 + X1)
    return (X0 + tau / FOUR_PI * _pair_cross_sum(w, Xb)).ravel()


class SphereVortexDMM(OneStepScheme):
    name = "dmm"
    is_symmetric = True

    def __init__(self, system: SphereVortexSystem):
        self.system = system

    def rhs(self, t, x):
        return sphere_rhs(self.system, x)

    def fixed_point_map(self, guess, x_k, t_k, tau):
        return sphere_dmm_map(self.system, x_k, guess, tau)


# ---------------------------------------------------------------------------
# random ensembles
# ---------------------------------------------------------------------------

def _sample_with_min_distance(n, draw, min_dist, rng, budget=SAMPLING_BUDGET,
                              diameter=math.inf):
    if n > 1 and min_dist > diameter:
        raise InfeasiblePackingError(
            f"min_dist {min_dist:g} exceeds the domain diameter {diameter:g}")
    points = []
    draws = 0
    min_d2 = min_dist * min_dist
    while len(points) < n:
        if draws >= budget:
            raise InfeasiblePackingError(
                f"placed {len(points)} of {n} points within {budget} draws")
        candidate = draw(rng)
        draws += 1
        if points:
            d = np.asarray(points) - candidate
            if np.min(np.sum(d * d, axis=1)) < min_d2:
                continue
        points.append(candidate)
    return np.asarray(points)


def _strengths(n, strength_scale, rng):
    gamma = rng.uniform(-1.0, 1.0, size=n) * strength_scale
    # a zero draw has probability zero but would violate the system invariant
    gamma[gamma == 0.0] = strength_scale
    return gamma


def sample_plane_vortices(n: int, box_half_width: float = 5.0, min_dist=None,
                          strength_scale=None, seed: int = 0):
    """Uniform positions on ``[-w, w]^2`` with pairwise distance >= ``min_dist``.

    Defaults follow the planar experiment: ``min_dist = 10 / n`` and
    strengths uniform on ``[-1/n, 1/n]``.  Returns ``(state, gamma)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    min_dist = 10.0 / n if min_dist is None else min_dist
    strength_scale = 1.0 / n if strength_scale is None else strength_scale
    rng = np.random.default_rng(seed)
    w = box_half_width
    pts = _sample_with_min_distance(n, lambda r: r.uniform(-w, w, size=2), min_dist, rng,
                                    diameter=2.0 * math.sqrt(2.0) * w)
    gamma = _strengths(n, strength_scale, rng)
    return np.concatenate([pts[:, 0], pts[:, 1]]), gamma


def marsaglia_point(rng) -> np.ndarray:
    """One uniform point on the unit sphere by Marsaglia's disk rejection."""
    while True:
        u, v = rng.uniform(-1.0, 1.0, size=2)
        s = u * u + v * v
        if s < 1.0:
            f = 2.0 * np.sqrt(1.0 - s)
            return np.array([u * f, v * f, 1.0 - 2.0 * s])


def sample_sphere_vortices(n: int, min_dist=None, strength_scale=None, seed: int = 0):
    """Uniform points on the unit sphere with chordal distance >= ``min_dist``.

    Defaults: ``min_dist = 4 pi / n``, strengths uniform on ``[-1/n, 1/n]``.
    Returns ``(state, gamma)`` with the state as consecutive unit vectors.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    min_dist = FOUR_PI / n if min_dist is None else min_dist
    strength_scale = 1.0 / n if strength_scale is None else strength_scale
    rng = np.random.default_rng(seed)
    pts = _sample_with_min_distance(n, marsaglia_point, min_dist, rng, diameter=2.0)
    gamma = _strengths(n, strength_scale, rng)
    return pts.ravel(), gamma
