"""n bodies in 2D or 3D interacting through a pairwise radial potential.

State layout: all positions (n*dim) followed by all momenta (n*dim).

The conservative scheme (Greenspan--Labudde) uses midpoint momenta in the
position update and, in the momentum update, the symmetric divided
difference of the pair potential along the mean pair direction
``(qbar_i - qbar_j) / qbar_ij``, where ``qbar_ij`` is the mean of the two
scalar distances.  It conserves H, P, L and the centre-of-mass integral C.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .core import OneStepScheme
from .errors import CloseEncounterError, DomainError

COLLISION_THRESHOLD = 1e-12


# ---------------------------------------------------------------------------
# divided differences
# ---------------------------------------------------------------------------

def _check_positive(*qs):
    for q in qs:
        if np.any(~(np.asarray(q) > 0.0)):
            raise DomainError("distances must be positive")


def gravity_divided_difference(coupling, q_k, q_k1):
    """``(V(q_k1) - V(q_k)) / (q_k1 - q_k)`` for ``V = -coupling / q``.

    ``coupling`` is ``G m_i m_j``.  Equals ``coupling / (q_k1 q_k)``.
    """
    _check_positive(q_k, q_k1)
    return coupling / (np.asarray(q_k1) * np.asarray(q_k))


def _homogeneous_sum(a, b, degree):
    # sum_{l=0}^{degree} a^(degree-l) b^l, summed from the larger base down so
    # the result does not depend on argument order
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    hi_pow = [np.ones_like(hi)]
    lo_pow = [np.ones_like(lo)]
    for _ in range(degree):
        hi_pow.append(hi_pow[-1] * hi)
        lo_pow.append(lo_pow[-1] * lo)
    total = hi_pow[degree] * lo_pow[0]
    for l in range(1, degree + 1):
        total = total + hi_pow[degree - l] * lo_pow[l]
    return total


def lj_divided_difference(epsilon, sigma, q_k, q_k1):
    """Divided difference of ``V = 4 eps ((sigma/q)^12 - (sigma/q)^6)``.

    Evaluated through the two power sums (twelve and six terms) in the
    reciprocal scaled distances, which has no cancellation as ``q_k1 -> q_k``.
    """
    _check_positive(q_k, q_k1)
    return _lj_dd(epsilon, sigma, np.asarray(q_k, dtype=float), np.asarray(q_k1, dtype=float))


def _lj_dd(epsilon, sigma, q_k, q_k1):
    s1 = sigma / q_k1
    s0 = sigma / q_k
    prod = s1 * s0
    rep = _homogeneous_sum(s1, s0, 11)
    att = _homogeneous_sum(s1, s0, 5)
    return 4.0 * epsilon / sigma * prod * (att - rep)


@dataclass(frozen=True)
class Gravity:
    G: float

    def __post_init__(self):
        if not self.G > 0:
            raise ValueError("G must be positive")

    def potential(self, q, mm):
        return -self.G * mm / q

    def derivative(self, q, mm):
        return self.G * mm / (q * q)

    def divided_difference(self, q_k, q_k1, mm):
        return gravity_divided_difference(self.G * mm, q_k, q_k1)

    def _dd_unchecked(self, q_k, q_k1, mm):
        return self.G * mm / (q_k1 * q_k)


@dataclass(frozen=True)
class LennardJones:
    epsilon: float
    sigma: float

    def __post_init__(self):
        if not (self.epsilon > 0 and self.sigma > 0):
            raise ValueError("epsilon and sigma must be positive")

    def potential(self, q, mm=None):
        s6 = (self.sigma / q) ** 6
        return 4.0 * self.epsilon * (s6 * s6 - s6)

    def derivative(self, q, mm=None):
        s6 = (self.sigma / q) ** 6
        return 4.0 * self.epsilon * (-12.0 * s6 * s6 + 6.0 * s6) / q

    def divided_difference(self, q_k, q_k1, mm=None):
        return lj_divided_difference(self.epsilon, self.sigma, q_k, q_k1)

    def _dd_unchecked(self, q_k, q_k1, mm=None):
        return _lj_dd(self.epsilon, self.sigma, q_k, q_k1)


RadialPotential = Union[Gravity, LennardJones]


# ---------------------------------------------------------------------------
# system
# ---------------------------------------------------------------------------

class NBodyInvariants(NamedTuple):
    H: float
    P: np.ndarray
    L: np.ndarray
    C: np.ndarray


@dataclass
class NBodySystem:
    masses: np.ndarray
    potential: RadialPotential
    dim: int = 3
    collision_threshold: float = COLLISION_THRESHOLD

    def __post_init__(self):
        self.masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if np.any(~(self.masses > 0)):
            raise ValueError("masses must be positive")
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        self._mm = np.outer(self.masses, self.masses)
        self._diag = np.eye(self.masses.size, dtype=bool)
        self._inv_m = 1.0 / self.masses[:, None]
        # shape constants, read on every map evaluation
        self._n = self.masses.size
        self._half = self._n * self.dim
        self._shape = (self._n, self.dim)

    @property
    def n(self) -> int:
        return self._n

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    @property
    def phase_dim(self) -> int:
        return 2 * self._half

    def split(self, state):
        state = np.asarray(state, dtype=float)
        if state.shape != (2 * self._half,):
            raise ValueError(f"state has shape {state.shape}, expected ({2 * self._half},)")
        half = self._half
        return state[:half].reshape(self._shape), state[half:].reshape(self._shape)

    def pack(self, q, p):
        return np.concatenate([np.ravel(q), np.ravel(p)]).astype(float)

    def pair_geometry(self, q):
        """Antisymmetric displacement array ``q_i - q_j`` and symmetric distances.

        The diagonal of the distance matrix is set to 1 so it can be divided by.
        """
        diff = q[:, None, :] - q[None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", diff, diff)
        dist2[self._diag] = np.inf
        closest2 = dist2.min()
        if closest2 < self.collision_threshold**2:
            raise CloseEncounterError(
                f"pair distance {np.sqrt(closest2):.3e} below collision threshold")
        dist2[self._diag] = 1.0
        return diff, np.sqrt(dist2)

    def potential_gradient(self, q):
        """``dV/dq_i``, summed over partners j in ascending order."""
        diff, dist = self.pair_geometry(q)
        coef = self.potential.derivative(dist, self._mm) / dist
        np.fill_diagonal(coef, 0.0)
        return np.sum(coef[:, :, None] * diff, axis=1)

    def rhs(self, t, state):
        return nbody_rhs(self, state)

    def invariants(self, t, state) -> dict:
        inv = nbody_conserved(self, state, t)
        out = {"H": inv.H}
        axes = "xyz"[: self.dim]
        out.update({f"P_{a}": float(v) for a, v in zip(axes, inv.P)})
        if self.dim == 3:
            out.update({f"L_{a}": float(v) for a, v in zip(axes, inv.L)})
        else:
            out["L_z"] = float(inv.L[0])
        out.update({f"C_{a}": float(v) for a, v in zip(axes, inv.C)})
        return out


def nbody_rhs(sys: NBodySystem, state) -> np.ndarray:
    q, p = sys.split(state)
    qdot = p / sys.masses[:, None]
    pdot = -sys.potential_gradient(q)
    return sys.pack(qdot, pdot)


def _cross(q, p):
    if q.shape[1] == 3:
        return np.cross(q, p)
    return (q[:, 0] * p[:, 1] - q[:, 1] * p[:, 0])[:, None]


def nbody_conserved(sys: NBodySystem, state, t: float = 0.0) -> NBodyInvariants:
    q, p = sys.split(state)
    _, dist = sys.pair_geometry(q)
    iu = np.triu_indices(sys.n, 1)
    kinetic = np.sum(np.sum(p * p, axis=1) / (2.0 * sys.masses))
    potential = np.sum(sys.potential.potential(dist[iu], sys._mm[iu]))
    P = np.sum(p, axis=0)
    L = np.sum(_cross(q, p), axis=0)
    M = sys.total_mass
    C = np.sum(sys.masses[:, None] * q, axis=0) / M - P / M * t
    return NBodyInvariants(float(kinetic + potential), P, L, C)


def nbody_dmm_map(sys: NBodySystem, state_k, state_guess, tau: float,
                  _geom_k=None) -> np.ndarray:
    """Fixed-point map of the conservative n-body scheme."""
    half, shape = sys._half, sys._shape
    state_k = np.asarray(state_k, dtype=float)
    state_guess = np.asarray(state_guess, dtype=float)
    if state_k.shape != (2 * half,) or state_guess.shape != (2 * half,):
        raise ValueError(f"states must have shape ({2 * half},)")
    q0, p0 = state_k[:half].reshape(shape), state_k[half:].reshape(shape)
    q1, p1 = state_guess[:half].reshape(shape), state_guess[half:].reshape(shape)
    diff0, d0 = sys.pair_geometry(q0) if _geom_k is None else _geom_k
    diff1, d1 = sys.pair_geometry(q1)
    diff_bar = 0.5 * (diff0 + diff1)
    coef = sys.potential._dd_unchecked(d0, d1, sys._mm) / (0.5 * (d0 + d1))
    coef[sys._diag] = 0.0
    force = np.einsum("ij,ijk->ik", coef, diff_bar)
    out = np.empty(2 * half)
    out[:half] = (q0 + (0.5 * tau) * (p0 + p1) * sys._inv_m).ravel()
    out[half:] = (p0 - tau * force).ravel()
    return out


class NBodyDMM(OneStepScheme):
    name = "dmm"
    is_symmetric = True

    def __init__(self, system: NBodySystem):
        self.system = system
        self._cache_key = None
        self._cache_geom = None

    def rhs(self, t, x):
        return nbody_rhs(self.system, x)

    def fixed_point_map(self, guess, x_k, t_k, tau):
        # the solver passes the same x_k object on every iteration of a step
        if self._cache_key is not x_k:
            q0, _ = self.system.split(x_k)
            self._cache_geom = self.system.pair_geometry(q0)
            self._cache_key = x_k
        return nbody_dmm_map(self.system, x_k, guess, tau, self._cache_geom)
