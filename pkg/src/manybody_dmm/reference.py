"""Comparison integrators: implicit midpoint, classical RK4, Stormer--Verlet."""
from __future__ import annotations

from typing import Callable

import numpy as np

from .core import OneStepScheme
from .errors import DomainError
from .nbody import NBodySystem

Rhs = Callable[[float, np.ndarray], np.ndarray]


def midpoint_map(rhs: Rhs, x_k, x_guess, t_k: float, tau: float) -> np.ndarray:
    """``x_k + tau * f(t_k + tau/2, (x_k + x_guess)/2)``."""
    x_k = np.asarray(x_k, dtype=float)
    x_mid = 0.5 * (x_k + np.asarray(x_guess, dtype=float))
    return x_k + tau * np.asarray(rhs(t_k + 0.5 * tau, x_mid))


def rk4_step(rhs: Rhs, x_k, t_k: float, tau: float) -> np.ndarray:
    x_k = np.asarray(x_k, dtype=float)
    half = 0.5 * tau
    stages = ((0.0, None), (half, half), (half, half), (tau, tau))
    ks = []
    for s, (dt, a) in enumerate(stages):
        x_s = x_k if a is None else x_k + a * ks[-1]
        try:
            ks.append(np.asarray(rhs(t_k + dt, x_s), dtype=float))
        except DomainError as exc:
            raise type(exc)(f"RK4 stage {s + 1}: {exc}") from exc
    k1, k2, k3, k4 = ks
    return x_k + tau / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def stormer_verlet_step(system: NBodySystem, state_k, tau: float) -> np.ndarray:
    """Kick--drift--kick Stormer--Verlet for the separable n-body Hamiltonian."""
    q, p = system.split(state_k)
    p_half = p - 0.5 * tau * system.potential_gradient(q)
    q_new = q + tau * p_half / system.masses[:, None]
    p_new = p_half - 0.5 * tau * system.potential_gradient(q_new)
    return system.pack(q_new, p_new)


class ImplicitMidpoint(OneStepScheme):
    name = "midpoint"
    is_symmetric = True

    def __init__(self, rhs: Rhs):
        self._rhs = rhs

    def rhs(self, t, x):
        return self._rhs(t, x)

    def fixed_point_map(self, guess, x_k, t_k, tau):
        return midpoint_map(self._rhs, x_k, guess, t_k, tau)


class ExplicitRK4(OneStepScheme):
    name = "rk4"
    is_explicit = True

    def __init__(self, rhs: Rhs):
        self._rhs = rhs

    def rhs(self, t, x):
        return self._rhs(t, x)

    def fixed_point_map(self, guess, x_k, t_k, tau):
        return rk4_step(self._rhs, x_k, t_k, tau)


class StormerVerlet(OneStepScheme):
    name = "verlet"
    is_symmetric = True
    is_explicit = True

    def __init__(self, system: NBodySystem):
        self.system = system

    def rhs(self, t, x):
        return self.system.rhs(t, x)

    def fixed_point_map(self, guess, x_k, t_k, tau):
        return stormer_verlet_step(self.system, x_k, tau)
