"""Observed order of accuracy on problems with known solutions.

A Kepler circular orbit and a co-rotating vortex pair both have closed-form
solutions, so the global error can be measured exactly as tau is halved.

    python demos/convergence.py
"""
import numpy as np

from manybody_dmm import (ExplicitRK4, Gravity, NBodyDMM, NBodySystem, PlanarVortexSystem,
                          PlaneVortexDMM, SolverConfig, estimate_order)

config = SolverConfig(1e-15)

# two unit masses on a circle of radius 1/2 around the origin, G = 1
kepler = NBodySystem([1.0, 1.0], Gravity(1.0), 2)
omega = np.sqrt(2.0)


def kepler_exact(t):
    c, s = 0.5 * np.cos(omega * t), 0.5 * np.sin(omega * t)
    v = 0.5 * omega
    q = [[c, s], [-c, -s]]
    p = [[-v * np.sin(omega * t), v * np.cos(omega * t)],
         [v * np.sin(omega * t), -v * np.cos(omega * t)]]
    return kepler.pack(q, p)


# two unit vortices a unit distance apart rotate at 1/pi
pair = PlanarVortexSystem([1.0, 1.0])


def pair_exact(t):
    a = t / np.pi
    return np.array([0.5 * np.cos(a), -0.5 * np.cos(a), 0.5 * np.sin(a), -0.5 * np.sin(a)])


cases = [
    ("kepler, dmm", NBodyDMM(kepler), kepler_exact, 1.0, 0.1),
    ("vortex pair, dmm", PlaneVortexDMM(pair), pair_exact, 4.0, 0.4),
    ("vortex pair, rk4", ExplicitRK4(pair.rhs), pair_exact, 4.0, 0.4),
]
for name, scheme, exact, t_final, tau0 in cases:
    taus = [tau0 / 2**k for k in range(5)]
    table = estimate_order(scheme, exact(0.0), t_final, taus, exact, config)
    print(f"{name:<18} slope {table.slope:.3f}")
    for tau, err in zip(table.taus, table.errors):
        print(f"    tau={tau:<9.4g} error={err:.3e}")
