"""Three-species Lotka--Volterra: how well is the first integral kept?

Integrates the same orbit with both conservative variants and with two
classical methods, then prints the worst drift of V over the run.

    python demos/lotka_volterra.py
"""
import numpy as np

from manybody_dmm import (ExplicitRK4, ImplicitMidpoint, LotkaVolterraDMM, LVSystem, MeanVariant,
                          SolverConfig, conservation_report, integrate)

A = [[1.0, 1.0, 1.0], [0.0, 0.0, -2.0], [0.0, 1.0, 0.0]]
system = LVSystem(A, xi=[0.5, 0.5, 0.5], D=[0.0, 1.0, 2.0])
x0 = np.array([0.1, 0.1, 0.1])
tau, n_steps = 0.05, 1000
config = SolverConfig(1e-15)

schemes = {
    "dmm (arithmetic)": LotkaVolterraDMM(system, MeanVariant.ARITHMETIC),
    "dmm (geometric)": LotkaVolterraDMM(system, MeanVariant.GEOMETRIC),
    "implicit midpoint": ImplicitMidpoint(system.rhs),
    "rk4": ExplicitRK4(system.rhs),
}

print(f"{'method':<20} {'max |V - V0|':>14}")
for name, scheme in schemes.items():
    series = integrate(scheme, x0, 0.0, tau, n_steps, config)
    drift = conservation_report(series, system.invariants)["V"]
    print(f"{name:<20} {drift:14.3e}")

# The conservative variants sit at the round-off level; the classical
# methods drift by many orders of magnitude more at the same step size.
