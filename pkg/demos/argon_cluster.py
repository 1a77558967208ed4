"""Seven argon atoms in the plane, conservative scheme against Stormer-Verlet.

Verlet is symplectic, so its energy error stays bounded but oscillates at
the level of tau^2; the conservative scheme holds H to round-off.

    python demos/argon_cluster.py
"""
from manybody_dmm import (LennardJones, NBodyDMM, PerturbedPrevious, SolverConfig, StormerVerlet,
                          conservation_report, integrate)
from manybody_dmm.harness.config import K_BOLTZMANN
from manybody_dmm.harness.io import load_bodies, resolve_data_path

# energies in units of k_B (epsilon/k_B = 119.8 K), lengths in nm, time in ns
system, state0, _ = load_bodies(resolve_data_path("argon7"), LennardJones(119.8, 0.341),
                                mass_divisor=K_BOLTZMANN)
config = SolverConfig(1e-14, guess_strategy=PerturbedPrevious(1e-7, seed=0))

for name, scheme, tau in [("dmm", NBodyDMM(system), 5e-6),
                          ("verlet", StormerVerlet(system), 5e-6),
                          ("verlet, tau/10", StormerVerlet(system), 5e-7)]:
    steps = int(round(0.01 / tau))
    series = integrate(scheme, state0, 0.0, tau, steps, config)
    report = conservation_report(series, system.invariants)
    print(f"{name:<15} H drift {report['H']:.2e}   P_x drift {report['P_x']:.2e}")
