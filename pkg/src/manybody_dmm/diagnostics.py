"""Conservation errors, convergence orders and adjoint round-trip checks."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .core import OneStepScheme, SolverConfig, TimeSeries, integrate, solve_step
from .errors import DMMError, NonConvergenceError

Quantities = Callable[[float, np.ndarray], Mapping[str, float]]

#: errors below this are treated as solver noise when fitting orders
ERROR_FLOOR = 1e-12


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# conservation
# ---------------------------------------------------------------------------

@dataclass
class ConservationReport:
    names: list
    initial: np.ndarray
    linf: np.ndarray
    sample_steps: np.ndarray
    sample_times: np.ndarray
    drift: np.ndarray  # (n_samples, n_quantities) signed drift

    def as_dict(self) -> dict:
        return dict(zip(self.names, (float(v) for v in self.linf)))

    def __getitem__(self, name) -> float:
        return float(self.linf[self.names.index(name)])


class ConservationTracker:
    """Streaming accumulator behind :func:`conservation_report`."""

    def __init__(self, quantities: Quantities, sample_stride: int = 1):
        if sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")
        self.quantities = quantities
        self.stride = sample_stride
        self.names = None
        self.initial = None
        self.linf = None
        self._steps, self._times, self._drift = [], [], []
        self._count = 0

    def update(self, t: float, state) -> None:
        k = self._count
        try:
            values = self.quantities(t, state)
        except DMMError as exc:
            exc.step = k
            exc.args = (f"evaluating invariants at step {k}: {exc}",)
            raise
        if self.names is None:
            self.names = list(values)
            self.initial = np.array([values[n] for n in self.names], dtype=float)
            self.linf = np.zeros(len(self.names))
            drift = np.zeros(len(self.names))
        else:
            drift = np.array([values[n] for n in self.names], dtype=float) - self.initial
            np.maximum(self.linf, np.abs(drift), out=self.linf)
        if k % self.stride == 0:
            self._steps.append(k)
            self._times.append(t)
            self._drift.append(drift)
        self._count += 1

    def report(self) -> ConservationReport:
        if self.names is None:
            raise ValueError("no states recorded")
        return ConservationReport(
            self.names, self.initial, self.linf.copy(), np.array(self._steps),
            np.array(self._times), np.array(self._drift).reshape(-1, len(self.names)))


def conservation_report(series: TimeSeries, quantities: Quantities,
                        sample_stride: int = 1) -> ConservationReport:
    """ell-infinity drift of each invariant relative to the first record.

    The maximum is taken over every record; ``sample_stride`` only thins the
    stored drift history.
    """
    if len(series) == 0:
        raise ValueError("empty time series")
    tracker = ConservationTracker(quantities, sample_stride)
    for rec in series.records:
        tracker.update(rec.t, rec.state)
    return tracker.report()


def write_conservation_csv(report: ConservationReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "t"] + list(report.names))
        for k, t, row in zip(report.sample_steps, report.sample_times, report.drift):
            w.writerow([int(k), format_float(t)] + [format_float(v) for v in row])


def write_summary_csv(rows: Mapping[str, Mapping[str, float]], path) -> None:
    """One row per method, one ``Error[...]`` column per invariant."""
    names = []
    for vals in rows.values():
        names.extend(n for n in vals if n not in names)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method"] + [f"Error[{n}]" for n in names])
        for method, vals in rows.items():
            w.writerow([method] + [format_float(vals[n]) if n in vals else "" for n in names])


# ---------------------------------------------------------------------------
# convergence order
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceTable:
    taus: np.ndarray
    errors: np.ndarray
    slope: float = float("nan")
    residual: float = float("nan")
    reliable: bool = False
    used: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def rows(self):
        return list(zip(self.taus.tolist(), self.errors.tolist()))


class OrderEstimationError(NonConvergenceError):
    def __init__(self, message, table: ConvergenceTable, residual=float("nan")):
        super().__init__(message, residual)
        self.table = table


def fit_order(taus: Sequence[float], errors: Sequence[float],
              floor: float = ERROR_FLOOR) -> ConvergenceTable:
    """Least-squares slope of ``log(error)`` against ``log(tau)``.

    Points with error below ``floor`` are excluded; fewer than two usable
    points leave the slope as NaN and the table flagged unreliable.
    """
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    used = errors >= floor
    table = ConvergenceTable(taus, errors, used=used)
    if np.count_nonzero(used) >= 2:
        lt, le = np.log(taus[used]), np.log(errors[used])
        A = np.vstack([lt, np.ones_like(lt)]).T
        coef, *_ = np.linalg.lstsq(A, le, rcond=None)
        table.slope = float(coef[0])
        table.residual = float(np.sqrt(np.mean((A @ coef - le) ** 2)))
        table.reliable = bool(np.count_nonzero(used) >= 3)
    return table


def estimate_order(scheme: OneStepScheme, x0, t_final: float, taus: Iterable[float],
                   reference: Union[Callable[[float], np.ndarray], int] = 64,
                   config: SolverConfig = SolverConfig(), t0: float = 0.0,
                   floor: float = ERROR_FLOOR) -> ConvergenceTable:
    """Global error at ``t_final`` for each step size and the fitted order.

    ``reference`` is either the exact solution ``t -> x(t)`` or an integer
    refinement factor: the same scheme run with ``min(taus) / factor``.
    """
    taus = np.asarray(list(taus), dtype=float)
    if taus.size < 3:
        raise ValueError("need at least three step sizes")
    if np.any(np.diff(taus) >= 0):
        raise ValueError("step sizes must be strictly decreasing")
    span = t_final - t0

    def run(tau):
        n = int(round(span / tau))
        if not np.isclose(n * tau, span, rtol=1e-12, atol=0):
            raise ValueError(f"tau={tau} does not divide the interval")
        return integrate(scheme, x0, t0, tau, n, config).records[-1].state

    if callable(reference):
        x_ref = np.asarray(reference(t_final), dtype=float)
    else:
        if int(reference) < 16:
            raise ValueError("reference refinement factor must be >= 16")
        x_ref = run(taus[-1] / int(reference))

    errors = []
    for tau in taus:
        try:
            x = run(tau)
        except NonConvergenceError as exc:
            partial = fit_order(taus[: len(errors)], errors, floor)
            raise OrderEstimationError(f"tau={tau}: {exc}", partial, exc.residual) from exc
        errors.append(float(np.max(np.abs(x - x_ref))))
    return fit_order(taus, errors, floor)


# ---------------------------------------------------------------------------
# symmetry
# ---------------------------------------------------------------------------

def symmetry_check(scheme: OneStepScheme, x, t: float, tau: float,
                   config: SolverConfig = SolverConfig(),
                   rng: Optional[np.random.Generator] = None) -> float:
    """Max-norm of ``x - Phi_{-tau}(Phi_tau(x))``."""
    x = np.asarray(x, dtype=float)
    x1, _, _ = solve_step(scheme, x, t, tau, config, rng)
    x2, _, _ = solve_step(scheme, x1, t + tau, -tau, config, rng)
    return float(np.max(np.abs(x - x2)))
