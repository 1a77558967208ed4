"""Conservative one-step integrators for many-body systems.

Lotka--Volterra populations, radial-potential n-body problems and point
vortices in the plane and on the sphere, each with a symmetric second-order
scheme that conserves the system's first integrals to round-off, plus
reference integrators and diagnostics to check that claim.
"""
from .core import (
    ForwardEuler,
    OneStepScheme,
    PerturbedPrevious,
    PreviousSolution,
    SolverConfig,
    StepRecord,
    TimeSeries,
    integrate,
    iterate_steps,
    make_initial_guess,
    solve_step,
    stable_g,
    symmetric_log_ratio,
)
from .diagnostics import (
    ConservationReport,
    ConvergenceTable,
    conservation_report,
    estimate_order,
    fit_order,
    symmetry_check,
)
from .errors import (
    CloseEncounterError,
    ConfigError,
    DivergenceError,
    DMMError,
    DomainError,
    InfeasiblePackingError,
    NonConvergenceError,
    SchemaError,
    SingularityError,
    UnsupportedQueryError,
)
from .lotka_volterra import (
    LotkaVolterraDMM,
    LVSystem,
    MeanVariant,
    lv_check_compatibility,
    lv_conserved_V,
    lv_dmm_map,
    lv_rhs,
)
from .nbody import (
    Gravity,
    LennardJones,
    NBodyDMM,
    NBodySystem,
    gravity_divided_difference,
    lj_divided_difference,
    nbody_conserved,
    nbody_dmm_map,
    nbody_rhs,
)
from .reference import (
    ExplicitRK4,
    ImplicitMidpoint,
    StormerVerlet,
    midpoint_map,
    rk4_step,
    stormer_verlet_step,
)
from .vortex import (
    PlanarVortexSystem,
    PlaneVortexDMM,
    SphereVortexDMM,
    SphereVortexSystem,
    plane_conserved,
    plane_dmm_map,
    plane_rhs,
    sample_plane_vortices,
    sample_sphere_vortices,
    sphere_conserved,
    sphere_dmm_map,
    sphere_rhs,
)

__version__ = "0.1.0"
