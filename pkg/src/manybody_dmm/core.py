"""System-agnostic stepping machinery.

Every integrator in the package is a one-step map.  Implicit schemes expose a
fixed-point map ``x <- Phi(guess; x_k, t_k, tau)`` whose fixed point is the
next state; :func:`solve_step` iterates it from a configurable initial guess
and :func:`integrate` drives the time loop.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

import numpy as np

from .errors import DivergenceError, DomainError, NonConvergenceError

#: |z - 1| below which ``stable_g`` switches to its Taylor series.
G_SERIES_THRESHOLD = 1e-4


# ---------------------------------------------------------------------------
# g(z) = log z / (z - 1) and its symmetric divided-difference form
# ---------------------------------------------------------------------------

def _g_array(z: np.ndarray) -> np.ndarray:
    w = z - 1.0
    small = np.abs(w) < G_SERIES_THRESHOLD
    # safe denominator on the series branch; the result there is overwritten
    w_safe = np.where(small, 1.0, w)
    out = np.log(z) / w_safe
    if np.any(small):
        ws = w[small]
        out[small] = 1.0 + ws * (-0.5 + ws * (1.0 / 3.0 + ws * (-0.25 + ws * 0.2)))
    return out


def stable_g(z):
    """Evaluate ``g(z) = log(z) / (z - 1)`` without cancellation near ``z = 1``.

    Uses a five-term Taylor series for ``|z - 1| < 1e-4`` and the closed form
    elsewhere.  Accepts scalars or arrays; ``g(1) = 1``.
    """
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError("stable_g requires z > 0")
    out = _g_array(np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def symmetric_log_ratio(h_k, h_k1):
    """Divided difference of the logarithm, ``(log h_k1 - log h_k) / (h_k1 - h_k)``.

    Computed as ``g(b / a) / a`` after ordering the arguments so that
    ``a <= b``; the result is therefore bitwise symmetric under swapping
    ``h_k`` and ``h_k1``.  For equal arguments it returns ``1 / h_k``.
    Both arguments must be nonzero and share a sign.
    """
    a = np.asarray(h_k, dtype=float)
    b = np.asarray(h_k1, dtype=float)
    if np.any(~(a * b > 0.0)):
        raise DomainError("symmetric_log_ratio requires nonzero arguments of equal sign")
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    out = _g_array(np.atleast_1d(hi / lo)) / np.atleast_1d(lo)
    if out.size == 1 and a.ndim == 0 and b.ndim == 0:
        return float(out[0])
    return out.reshape(np.broadcast(a, b).shape)


# ---------------------------------------------------------------------------
# Solver configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ForwardEuler:
    """Initial guess ``x_k + tau * f(t_k, x_k)``."""


@dataclass(frozen=True)
class PreviousSolution:
    """Initial guess ``x_k``."""


@dataclass(frozen=True)
class PerturbedPrevious:
    """Initial guess ``x_k * (1 + xi)`` with ``xi ~ U[-rel_magnitude, rel_magnitude]``."""

    rel_magnitude: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if not self.rel_magnitude >= 0.0:
            raise ValueError("rel_magnitude must be >= 0")


GuessStrategy = Union[ForwardEuler, PreviousSolution, PerturbedPrevious]


@dataclass(frozen=True)
class SolverConfig:
    abs_tolerance: float = 1e-14
    max_iterations: int = 200
    guess_strategy: GuessStrategy = field(default_factory=ForwardEuler)

    def __post_init__(self):
        if not self.abs_tolerance > 0.0:
            raise ValueError("abs_tolerance must be > 0")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        if not isinstance(self.guess_strategy, (ForwardEuler, PreviousSolution, PerturbedPrevious)):
            raise TypeError(f"unknown guess strategy {self.guess_strategy!r}")


def make_initial_guess(strategy: GuessStrategy, x_k, rhs_at_xk, tau: float,
                       rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Starting point for the fixed-point iteration.

    ``rhs_at_xk`` is only read by :class:`ForwardEuler` and may be ``None``
    otherwise.  For :class:`PerturbedPrevious` a generator seeded from the
    strategy is created when ``rng`` is not supplied.
    """
    x_k = np.asarray(x_k, dtype=float)
    if isinstance(strategy, ForwardEuler):
        rhs = np.asarray(rhs_at_xk, dtype=float)
        if not np.all(np.isfinite(rhs)):
            raise DomainError("right-hand side is not finite at x_k")
        return x_k + tau * rhs
    if isinstance(strategy, PreviousSolution):
        return x_k.copy()
    if isinstance(strategy, PerturbedPrevious):
        if strategy.rel_magnitude == 0.0:
            return x_k.copy()
        if rng is None:
            rng = np.random.default_rng(strategy.seed)
        xi = rng.uniform(-strategy.rel_magnitude, strategy.rel_magnitude, size=x_k.shape)
        return x_k * (1.0 + xi)
    raise TypeError(f"unknown guess strategy {strategy!r}")


# ---------------------------------------------------------------------------
# One-step schemes
# ---------------------------------------------------------------------------

class OneStepScheme:
    """Base class for one-step integrators.

    Subclasses implement :meth:`rhs` (the continuous vector field) and
    :meth:`fixed_point_map`.  Explicit schemes ignore ``guess``.
    """

    name = "scheme"
    is_symmetric = False
    is_explicit = False

    def rhs(self, t: float, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def fixed_point_map(self, guess, x_k, t_k: float, tau: float) -> np.ndarray:
        raise NotImplementedError

    def residual(self, x_next, x_k, t_k: float, tau: float) -> np.ndarray:
        """``tau`` times the discrete residual ``F(x_next, x_k)``.

        Zero exactly when ``x_next`` is a fixed point of the map.  For a
        symmetric scheme ``residual(b, a, t, tau) == -residual(a, b, t + tau, -tau)``.
        """
        return np.asarray(x_next, dtype=float) - self.fixed_point_map(x_next, x_k, t_k, tau)

    def restart_guess(self, x_k, t_k: float, tau: float) -> Optional[np.ndarray]:
        """Fallback guess after a domain error during iteration, or ``None``."""
        return None


@dataclass
class StepRecord:
    t: float
    state: np.ndarray
    iterations: int = 0
    residual_norm: float = 0.0


@dataclass
class TimeSeries:
    tau: float
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    @property
    def states(self) -> np.ndarray:
        return np.array([r.state for r in self.records])

    @property
    def iterations(self) -> np.ndarray:
        return np.array([r.iterations for r in self.records])


def _max_abs(v: np.ndarray) -> float:
    return float(np.abs(v).max()) if v.size else 0.0


def solve_step(scheme: OneStepScheme, x_k, t_k: float, tau: float,
               config: SolverConfig = SolverConfig(),
               rng: Optional[np.random.Generator] = None):
    """Advance one step; returns ``(x_next, iterations, residual_norm)``.

    Implicit schemes iterate the fixed-point map until the max-norm of the
    difference between successive iterates is at most ``abs_tolerance``.
    """
    x_k = np.asarray(x_k, dtype=float)
    if scheme.is_explicit:
        x_next = scheme.fixed_point_map(None, x_k, t_k, tau)
        if not np.all(np.isfinite(x_next)):
            raise DivergenceError("non-finite state produced by explicit step")
        return x_next, 1, 0.0

    strategy = config.guess_strategy
    rhs_k = scheme.rhs(t_k, x_k) if isinstance(strategy, ForwardEuler) else None
    x = make_initial_guess(strategy, x_k, rhs_k, tau, rng)
    restarted = False
    diff = math.inf
    it = 0
    while it < config.max_iterations:
        it += 1
        try:
            x_new = scheme.fixed_point_map(x, x_k, t_k, tau)
        except DomainError:
            fallback = None if restarted else scheme.restart_guess(x_k, t_k, tau)
            if fallback is None:
                raise
            restarted = True
            x = fallback
            continue
        # x is finite, so any inf/nan in x_new shows up in the difference
        new_diff = _max_abs(x_new - x)
        if not math.isfinite(new_diff):
            raise DivergenceError(f"non-finite iterate at iteration {it}", residual=diff)
        diff = new_diff
        x = x_new
        if diff <= config.abs_tolerance:
            return x, it, diff
    raise NonConvergenceError(
        f"fixed-point iteration did not reach {config.abs_tolerance:g} in "
        f"{config.max_iterations} iterations (last difference {diff:.3e})",
        residual=diff,
    )


def iterate_steps(scheme: OneStepScheme, x0, t0: float, tau: float, n_steps: int,
                  config: SolverConfig = SolverConfig()) -> Iterator[StepRecord]:
    """Yield the ``n_steps + 1`` records of a run without storing them."""
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    x = np.array(x0, dtype=float)
    yield StepRecord(t0, x.copy(), 0, 0.0)
    rng = None
    if isinstance(config.guess_strategy, PerturbedPrevious):
        rng = np.random.default_rng(config.guess_strategy.seed)
    for k in range(n_steps):
        t_k = t0 + k * tau
        try:
            x, its, res = solve_step(scheme, x, t_k, tau, config, rng)
        except (DomainError, NonConvergenceError, DivergenceError) as exc:
            exc.step = k
            exc.args = (f"step {k} (t={t_k:g}): {exc.args[0] if exc.args else exc}",)
            raise
        yield StepRecord(t0 + (k + 1) * tau, x, its, res)


def integrate(scheme: OneStepScheme, x0, t0: float, tau: float, n_steps: int,
              config: SolverConfig = SolverConfig()) -> TimeSeries:
    """Run ``n_steps`` uniform steps of size ``tau`` starting from ``(t0, x0)``."""
    return TimeSeries(tau, list(iterate_steps(scheme, x0, t0, tau, n_steps, config)))
