"""n-species Lotka--Volterra dynamics ``x_i' = x_i * sum_j a_ij (x_j - xi_j)``.

When a diagonal ``D`` makes ``D A`` skew-symmetric the system conserves
``V(x) = sum_i d_i (xi_i log x_i - x_i)``.  The conservative scheme replaces
``1 - xi_j / x_j`` by its log divided difference ``1 - xi_j (log x_j)^Delta``
and averages the prefactors with an arithmetic or geometric mean.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import OneStepScheme, symmetric_log_ratio
from .errors import DomainError, UnsupportedQueryError

SKEW_TOLERANCE = 1e-12


class MeanVariant(enum.Enum):
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"


def lv_check_compatibility(A, D) -> bool:
    """True iff ``D A + A^T D`` vanishes entrywise to 1e-12."""
    A = np.asarray(A, dtype=float)
    d = np.asarray(D, dtype=float)
    if d.ndim == 2:
        d = np.diag(d)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    if d.shape != (A.shape[0],):
        raise ValueError(f"D has length {d.size}, expected {A.shape[0]}")
    DA = d[:, None] * A
    return bool(np.max(np.abs(DA + DA.T), initial=0.0) <= SKEW_TOLERANCE)


@dataclass
class LVSystem:
    A: np.ndarray
    xi: np.ndarray
    D: Optional[np.ndarray] = None

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        n = self.xi.size
        if self.A.shape != (n, n):
            raise ValueError(f"A has shape {self.A.shape}, expected {(n, n)}")
        if np.any(self.xi <= 0):
            raise ValueError("fixed point xi must be componentwise positive")
        if self.D is not None:
            self.D = np.asarray(self.D, dtype=float)
            if self.D.ndim == 2:
                self.D = np.diag(self.D).copy()
            if not lv_check_compatibility(self.A, self.D):
                raise ValueError("D A is not skew-symmetric")

    @property
    def n(self) -> int:
        return self.xi.size

    @property
    def dim(self) -> int:
        return self.n

    def rhs(self, t, x):
        return lv_rhs(self, x)

    def invariants(self, t, x) -> dict:
        if self.D is None:
            return {}
        return {"V": lv_conserved_V(self, x)}


def _require_positive(x, what="population"):
    if np.any(~(x > 0.0)):
        raise DomainError(f"nonpositive {what}")


def lv_rhs(sys: LVSystem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    _require_positive(x)
    return x * (sys.A @ (x - sys.xi))


def lv_conserved_V(sys: LVSystem, x) -> float:
    if sys.D is None:
        raise UnsupportedQueryError("V is only defined when D is supplied")
    x = np.asarray(x, dtype=float)
    _require_positive(x)
    return float(np.sum(sys.D * (sys.xi * np.log(x) - x)))


def lv_dmm_map(sys: LVSystem, variant: MeanVariant, x_k, x_guess, tau: float) -> np.ndarray:
    """Fixed-point map of the conservative Lotka--Volterra scheme."""
    x_k = np.asarray(x_k, dtype=float)
    x_g = np.asarray(x_guess, dtype=float)
    _require_positive(x_k)
    _require_positive(x_g, "iterate component")
    if variant is MeanVariant.ARITHMETIC:
        x_tau = 0.5 * (x_k + x_g)
    else:
        x_tau = np.sqrt(x_k * x_g)
    y = x_tau * (1.0 - sys.xi * symmetric_log_ratio(x_k, x_g))
    return x_k + tau * x_tau * (sys.A @ y)


class LotkaVolterraDMM(OneStepScheme):
    is_symmetric = True

    def __init__(self, system: LVSystem, variant: MeanVariant = MeanVariant.ARITHMETIC):
        self.system = system
        self.variant = MeanVariant(variant)
        self.name = "dmm-arith" if self.variant is MeanVariant.ARITHMETIC else "dmm-geo"

    def rhs(self, t, x):
        return lv_rhs(self.system, x)

    def fixed_point_map(self, guess, x_k, t_k, tau):
        return lv_dmm_map(self.system, self.variant, x_k, guess, tau)

    def restart_guess(self, x_k, t_k, tau):
        # damped forward Euler keeps the iterate positive for moderate tau
        guess = x_k + 0.5 * tau * lv_rhs(self.system, x_k)
        return guess if np.all(guess > 0) else None
