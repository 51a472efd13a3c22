"""n-body configurations and dynamics on surfaces of constant curvature.

The package models point masses constrained to the quadric
kappa * (x^2 + y^2 + sigma * z^2) = 1 (a sphere for kappa > 0, the upper
hyperboloid sheet for kappa < 0).  It provides the equations of motion with
a constraint-preserving integrator, the delta/gamma balance criterion for
polygonal configurations, a mechanized nonexistence certificate showing that
irregular polygons admit no positive masses satisfying the criterion, an
independent linear-programming feasibility search that cross-checks the
certificate, and a batch CLI.
"""

from .certificate import (
    BaseGroup,
    Certificate,
    CoefficientSystem,
    FeasibilityResult,
    GroupTerm,
    MassForm,
    WitnessForm,
    base_groups,
    certify,
    classify_case,
    decompose,
    find_contradiction_j,
    mass_feasibility,
    mu_derivative,
    pairing_possibility1,
    pairing_u,
    pairing_v,
)
from .criterion import (
    CriterionReport,
    MassVector,
    PolygonConfig,
    Rho,
    canonicalize,
    chord_c,
    chord_s,
    criterion_check,
    cyclic_gaps,
    delta_gamma,
    is_regular,
    mu,
    nu,
    random_irregular_polygon,
    random_scalene_triangle,
    rho_grid,
    turn_class,
    validate_rho_for_kappa,
)
from .dynamics import (
    BodySystem,
    DiagnosticsReport,
    IntegratorConfig,
    RelativeEquilibrium,
    Trajectory,
    acceleration,
    build_polygon_state,
    diagnostics,
    integrate,
    pair_acceleration,
    solve_omega,
    step,
)
from .errors import (
    AmbiguousGroupingError,
    CoincidentAngleError,
    ConfigError,
    ConstraintDriftError,
    CurvedNBodyError,
    DisagreementError,
    InternalConsistencyError,
    KernelDomainError,
    NoBalanceError,
    NonProjectableError,
    RegularPolygonError,
    SingularConfigurationError,
)
from .geometry import (
    Curvature,
    project_point,
    project_tangent,
    sigma_inner,
    surface_residual,
    vec3,
)

__version__ = "1.0.0"

__all__ = [
    "__version__",
    # geometry
    "Curvature",
    "vec3",
    "sigma_inner",
    "surface_residual",
    "project_point",
    "project_tangent",
    # criterion
    "PolygonConfig",
    "MassVector",
    "Rho",
    "CriterionReport",
    "chord_c",
    "chord_s",
    "mu",
    "nu",
    "delta_gamma",
    "criterion_check",
    "canonicalize",
    "cyclic_gaps",
    "is_regular",
    "turn_class",
    "rho_grid",
    "random_irregular_polygon",
    "random_scalene_triangle",
    "validate_rho_for_kappa",
    # certificate
    "mu_derivative",
    "decompose",
    "MassForm",
    "GroupTerm",
    "BaseGroup",
    "CoefficientSystem",
    "base_groups",
    "pairing_possibility1",
    "pairing_u",
    "pairing_v",
    "find_contradiction_j",
    "classify_case",
    "WitnessForm",
    "Certificate",
    "certify",
    "FeasibilityResult",
    "mass_feasibility",
    # dynamics
    "BodySystem",
    "IntegratorConfig",
    "RelativeEquilibrium",
    "Trajectory",
    "DiagnosticsReport",
    "pair_acceleration",
    "acceleration",
    "step",
    "integrate",
    "build_polygon_state",
    "solve_omega",
    "diagnostics",
    # errors
    "CurvedNBodyError",
    "NonProjectableError",
    "KernelDomainError",
    "CoincidentAngleError",
    "SingularConfigurationError",
    "ConstraintDriftError",
    "NoBalanceError",
    "RegularPolygonError",
    "AmbiguousGroupingError",
    "InternalConsistencyError",
    "DisagreementError",
    "ConfigError",
]
