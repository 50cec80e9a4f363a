"""Quantum-state-manifold geometry of the long-range zz-Ising spin-s system.

Exact dense simulation of N spin-s particles coupled all-to-all through
their z components, plus the closed-form Fubini-Study metric, scalar
curvature, Gauss-Bonnet topology and evolution-speed results for the
three-parameter family of states reached from a polarized product state.
"""

from .spin_ops import (
    SpinSystem,
    SiteOperator,
    ManyBodyOperator,
    Direction,
    FieldConfig,
    DimensionGuardError,
    build_spin_operators,
    embed_site_operator,
    build_ising_hamiltonian,
    build_field_hamiltonian,
)
from .evolution import (
    StateVector,
    CoordinatePoint,
    TangentStates,
    initial_state,
    evolve_ising,
    evolve_with_field,
    tangent_states,
    state_at,
)
from .fs_metric import (
    MetricTensor,
    metric_numeric,
    energy_uncertainty,
    speed_numeric,
    distance_along_evolution,
)
from .analytic import (
    ManifoldSpec,
    SpeedExtrema,
    SingularPoint,
    OutOfRange,
    DegenerateDirection,
    chi_max_for,
    metric_closed_form,
    metric_closed_form_field,
    scalar_curvature,
    curvature_min,
    curvature_numeric_from_profile,
    angular_defect,
    gauss_bonnet_euler,
    speed_closed_form,
    speed_extrema,
    curvature_from_speed,
    thermo_limit,
    min_speed_field,
    special_case_speed,
)
from .verify import SweepGrid, VerificationReport, run_full_suite

__all__ = [
    "SpinSystem",
    "SiteOperator",
    "ManyBodyOperator",
    "Direction",
    "FieldConfig",
    "DimensionGuardError",
    "build_spin_operators",
    "embed_site_operator",
    "build_ising_hamiltonian",
    "build_field_hamiltonian",
    "StateVector",
    "CoordinatePoint",
    "TangentStates",
    "initial_state",
    "evolve_ising",
    "evolve_with_field",
    "tangent_states",
    "state_at",
    "MetricTensor",
    "metric_numeric",
    "energy_uncertainty",
    "speed_numeric",
    "distance_along_evolution",
    "ManifoldSpec",
    "SpeedExtrema",
    "SingularPoint",
    "OutOfRange",
    "DegenerateDirection",
    "chi_max_for",
    "metric_closed_form",
    "metric_closed_form_field",
    "scalar_curvature",
    "curvature_min",
    "curvature_numeric_from_profile",
    "angular_defect",
    "gauss_bonnet_euler",
    "speed_closed_form",
    "speed_extrema",
    "curvature_from_speed",
    "thermo_limit",
    "min_speed_field",
    "special_case_speed",
    "SweepGrid",
    "VerificationReport",
    "run_full_suite",
]

__version__ = "0.1.0"
