"""Grunsky coefficient operators on the disk and on quasidisks.

Computes truncated Grunsky and generalized kernel coefficient matrices,
their operator norms over the l^2 sphere, extremal pairings of Beltrami
coefficients with holomorphic squares, dilatation bounds, Fredholm
eigenvalue estimates via norm reciprocity, and holomorphic homotopy norm
profiles.
"""

from .beltrami import (
    BeltramiSpec,
    BoundReport,
    MomentVector,
    MoserReport,
    RationalPoly,
    alpha_functional,
    bound_check,
    disk_moments,
    harmonic_tail_moments,
    moser_approximant,
    strengthened_bound,
    variational_map,
)
from .errors import (
    BranchWindingError,
    ConvergenceError,
    GrunskyError,
    InvariantViolation,
    NumericalError,
    OrderUnderflowError,
    QuadratureError,
    ValidationError,
)
from .forms import (
    NormEstimate,
    SymmetricForm,
    build_form,
    form_eval,
    form_norm,
    norm_convergence,
)
from .fredholm import (
    FredholmReport,
    SchwarzianData,
    fredholm_eigenvalue,
    harmonic_beltrami,
    schwarzian,
)
from .homotopy import (
    HomogeneityReport,
    HomotopyProfile,
    homogeneity_check,
    homotopy_map,
    norm_profile,
)
from .quasidomain import (
    CassiniInterior,
    ConformalImage,
    DomainSpec,
    EllipseInterior,
    MilinBasis,
    UnitDisk,
    alpha_functional_domain,
    cassini_maps,
    ellipse_basis,
    ellipse_maps,
    generalized_coefficients,
    milin_polynomials,
)
from .series import (
    KernelMatrix,
    LaurentFunction,
    TaylorSeries,
    compose_at_infinity,
    kernel_oracle_sampling,
    revert_at_infinity,
    series_log_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # series
    "TaylorSeries",
    "LaurentFunction",
    "KernelMatrix",
    "series_log_ratio",
    "kernel_oracle_sampling",
    "compose_at_infinity",
    "revert_at_infinity",
    # forms
    "SymmetricForm",
    "NormEstimate",
    "build_form",
    "form_norm",
    "form_eval",
    "norm_convergence",
    # beltrami
    "BeltramiSpec",
    "RationalPoly",
    "MomentVector",
    "disk_moments",
    "harmonic_tail_moments",
    "alpha_functional",
    "strengthened_bound",
    "BoundReport",
    "bound_check",
    "variational_map",
    "MoserReport",
    "moser_approximant",
    # quasidomain
    "DomainSpec",
    "UnitDisk",
    "EllipseInterior",
    "CassiniInterior",
    "ConformalImage",
    "MilinBasis",
    "ellipse_maps",
    "ellipse_basis",
    "cassini_maps",
    "milin_polynomials",
    "generalized_coefficients",
    "alpha_functional_domain",
    # fredholm
    "SchwarzianData",
    "FredholmReport",
    "schwarzian",
    "harmonic_beltrami",
    "fredholm_eigenvalue",
    # homotopy
    "HomotopyProfile",
    "HomogeneityReport",
    "homotopy_map",
    "homogeneity_check",
    "norm_profile",
    # errors
    "GrunskyError",
    "ValidationError",
    "OrderUnderflowError",
    "NumericalError",
    "QuadratureError",
    "ConvergenceError",
    "BranchWindingError",
    "InvariantViolation",
]
