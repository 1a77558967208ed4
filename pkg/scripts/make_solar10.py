"""Build ``solar10.csv``: Sun, eight planets and Pluto at epoch J2000.

Positions and velocities come from the approximate Keplerian mean elements
published by JPL (E. M. Standish, "Keplerian Elements for Approximate
Positions of the Major Planets", valid 1800--2050).  Units: AU, day, solar
mass.  The state is shifted to the barycentric frame so the total momentum
vanishes.  Output goes to stdout.
"""
import math

import numpy as np

G = 2.959122082855911e-4  # AU^3 / (M_sun day^2), Gaussian constant squared

# name, mass [M_sun], a [AU], e, I, L, long. perihelion, long. asc. node [deg]
ELEMENTS = [
    ("mercury", 1.6601141530543488e-07, 0.38709927, 0.20563593, 7.00497902, 252.25032350, 77.45779628, 48.33076593),
    ("venus", 2.4478382877847715e-06, 0.72333566, 0.00677672, 3.39467605, 181.97909950, 131.60246718, 76.67984255),
    ("earth", 3.0404326462685257e-06, 1.00000261, 0.01671123, -0.00001531, 100.46457166, 102.93768193, 0.0),
    ("mars", 3.2271560375549977e-07, 1.52371034, 0.09339410, 1.84969142, -4.55343205, -23.94362959, 49.55953891),
    ("jupiter", 9.5479194398116052e-04, 5.20288700, 0.04838624, 1.30439695, 34.39644051, 14.72847983, 100.47390909),
    ("saturn", 2.8588567438170680e-04, 9.53667594, 0.05386179, 2.48599187, 49.95424423, 92.59887831, 113.66242448),
    ("uranus", 4.3662496996882730e-05, 19.18916464, 0.04725744, 0.77263783, 313.23810451, 170.95427630, 74.01692503),
    ("neptune", 5.1513890204661145e-05, 30.06992276, 0.00859048, 1.77004347, -55.12002969, 44.96476227, 131.78422574),
    ("pluto", 6.5812e-09, 39.48211675, 0.24882730, 17.14001206, 238.92903833, 224.06891629, 110.30393684),
]


def kepler_state(mu, a, e, inc, L, varpi, node):
    inc, L, varpi, node = map(math.radians, (inc, L, varpi, node))
    omega = varpi - node
    M = math.remainder(L - varpi, 2 * math.pi)
    E = M + e * math.sin(M)
    for _ in range(50):
        E -= (E - e * math.sin(E) - M) / (1 - e * math.cos(E))
    n = math.sqrt(mu / a**3)
    x, y = a * (math.cos(E) - e), a * math.sqrt(1 - e * e) * math.sin(E)
    edot = n / (1 - e * math.cos(E))
    vx, vy = -a * math.sin(E) * edot, a * math.sqrt(1 - e * e) * math.cos(E) * edot
    co, so, cn, sn, ci, si = (math.cos(omega), math.sin(omega), math.cos(node),
                              math.sin(node), math.cos(inc), math.sin(inc))
    R = np.array([
        [co * cn - so * sn * ci, -so * cn - co * sn * ci, 0.0],
        [co * sn + so * cn * ci, -so * sn + co * cn * ci, 0.0],
        [so * si, co * si, 0.0],
    ])
    return R @ np.array([x, y, 0.0]), R @ np.array([vx, vy, 0.0])


def main():
    names, masses, qs, vs = ["sun"], [1.0], [np.zeros(3)], [np.zeros(3)]
    for name, m, *el in ELEMENTS:
        q, v = kepler_state(G * (1.0 + m), *el)
        names.append(name)
        masses.append(m)
        qs.append(q)
        vs.append(v)
    m = np.array(masses)
    q, v = np.array(qs), np.array(vs)
    q -= (m[:, None] * q).sum(0) / m.sum()
    v -= (m[:, None] * v).sum(0) / m.sum()
    print("# Ten-body solar system (Sun, Mercury..Neptune, Pluto) at J2000, barycentric ecliptic frame.")
    print("# Provenance: external. Generated by scripts/make_solar10.py from JPL approximate mean elements.")
    print("# units: length=AU time=day mass=solar_mass")
    print(f"# G = {G!r}")
    print("label,mass,x,y,z,vx,vy,vz")
    for i, name in enumerate(names):
        row = [name, repr(float(m[i]))] + [repr(float(c)) for c in q[i]] + [repr(float(c)) for c in v[i]]
        print(",".join(row))


if __name__ == "__main__":
    main()
