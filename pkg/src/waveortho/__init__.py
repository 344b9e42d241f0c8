"""waveortho: approximate-orthogonality solver for scalar diffraction and scattering.

The package has three layers:

* ``specfun`` and ``geometry``: special functions, quadrature surfaces, and
  free-space Green's functions.
* ``method``: the solver itself (basis traces, Gram system, diagonal and
  Galerkin solves, iterative refinement, far fields, diagnostics).
* ``oracles`` and ``born``: independent reference solutions (separation of
  variables, Kirchhoff, dense boundary elements, volume integral equations)
  and Born-type expansions used to validate the method.
"""

from .born import BornOrder, BornResult, beta_weight, born_approximation
from .errors import (
    DegenerateBasisError,
    DomainError,
    InvalidBasisError,
    NotProlateError,
    SingularityError,
    SingularSystemError,
    TooCoarseError,
    UndefinedNormalizationError,
    UnsupportedOrderError,
    UnsupportedRegionError,
    UsageError,
)
from .geometry import Sphere, Spheroid, Strip, Surface, make_surface
from .method import (
    BasisTraces,
    BoundaryCondition,
    DensitySpectrum,
    FarFieldPattern,
    GramSystem,
    IncidentField,
    PlaneWaveBasis,
    PointSourceBasis,
    SphericalModeBasis,
    angular_spectrum,
    assemble_gram,
    boundary_residual,
    epsilon_diagnostic,
    eval_basis_trace,
    eval_scattered,
    far_field,
    iteration_spectral_radius,
    kernel_profile,
    kernel_values,
    project_incident,
    refine_iterate,
    solve_diagonal,
    solve_galerkin,
)

__version__ = "0.1.0"

__all__ = [
    "BasisTraces",
    "BornOrder",
    "BornResult",
    "BoundaryCondition",
    "DegenerateBasisError",
    "DensitySpectrum",
    "DomainError",
    "FarFieldPattern",
    "GramSystem",
    "IncidentField",
    "InvalidBasisError",
    "NotProlateError",
    "PlaneWaveBasis",
    "PointSourceBasis",
    "SingularityError",
    "SingularSystemError",
    "Sphere",
    "SphericalModeBasis",
    "Spheroid",
    "Strip",
    "Surface",
    "TooCoarseError",
    "UndefinedNormalizationError",
    "UnsupportedOrderError",
    "UnsupportedRegionError",
    "UsageError",
    "angular_spectrum",
    "assemble_gram",
    "beta_weight",
    "born_approximation",
    "boundary_residual",
    "epsilon_diagnostic",
    "eval_basis_trace",
    "eval_scattered",
    "far_field",
    "iteration_spectral_radius",
    "kernel_profile",
    "kernel_values",
    "make_surface",
    "project_incident",
    "refine_iterate",
    "solve_diagonal",
    "solve_galerkin",
    "__version__",
]
