from .config import Manifest, RunConfig
from .darboux import (
    ExtensionReport,
    ModeProblem,
    ModeSolution,
    RadialEigenfunction,
    RecoveredField,
    assemble_field,
    backward_solve_mode,
    darboux_residual,
    dirichlet_eigendata,
    extension_check,
    separable_solution,
    solve_modes,
    vanishing_diagnostic,
)
from .errors import (
    AliasingError,
    ConditioningError,
    DimensionError,
    DomainError,
    GridError,
    InputError,
    SpheremeanError,
    WidthError,
)
from .harmonics import (
    AngularCoefficients,
    SphereGrid,
    angular_decompose,
    angular_synthesize,
    harmonic_dimension,
    harmonic_eval,
    harmonic_indices,
    sphere_grid,
)
from .opalg import (
    DiffOp,
    LaurentPoly,
    build_L,
    build_Q,
    certificate_check,
    derivative_row,
    independence_chain,
    nondegeneracy_check,
    op_compose,
    shift_row_check,
    system_matrix,
    verify_lemma,
)
from .profile import RadialProfile
from .rangecond import (
    ModeSeries,
    MomentReport,
    RangeReport,
    fourier_bessel,
    moment_test,
    orthogonality_residuals,
    range_project,
    surface_orthogonality,
)
from .specfun import ZeroTable, bessel_j, bessel_j_derivative, bessel_zeros, gamma_fn, normalized_j
from .transform import (
    BoundaryData,
    Phantom,
    demo_phantom,
    forward_data,
    perturbation_bump,
    phantom_eval,
    spherical_mean,
    t_grid,
)
from .xfunction import BasisXFunction, BundleXFunction, XFunction

__all__ = [
    "Manifest",
    "RunConfig",
    "ExtensionReport",
    "ModeProblem",
    "ModeSolution",
    "RadialEigenfunction",
    "RecoveredField",
    "assemble_field",
    "backward_solve_mode",
    "darboux_residual",
    "dirichlet_eigendata",
    "extension_check",
    "separable_solution",
    "solve_modes",
    "vanishing_diagnostic",
    "AliasingError",
    "ConditioningError",
    "DimensionError",
    "DomainError",
    "GridError",
    "InputError",
    "SpheremeanError",
    "WidthError",
    "AngularCoefficients",
    "SphereGrid",
    "angular_decompose",
    "angular_synthesize",
    "harmonic_dimension",
    "harmonic_eval",
    "harmonic_indices",
    "sphere_grid",
    "DiffOp",
    "LaurentPoly",
    "build_L",
    "build_Q",
    "certificate_check",
    "derivative_row",
    "independence_chain",
    "nondegeneracy_check",
    "op_compose",
    "shift_row_check",
    "system_matrix",
    "verify_lemma",
    "RadialProfile",
    "ModeSeries",
    "MomentReport",
    "RangeReport",
    "fourier_bessel",
    "moment_test",
    "orthogonality_residuals",
    "range_project",
    "surface_orthogonality",
    "ZeroTable",
    "bessel_j",
    "bessel_j_derivative",
    "bessel_zeros",
    "gamma_fn",
    "normalized_j",
    "BoundaryData",
    "Phantom",
    "demo_phantom",
    "forward_data",
    "perturbation_bump",
    "phantom_eval",
    "spherical_mean",
    "t_grid",
    "BasisXFunction",
    "BundleXFunction",
    "XFunction",
]
