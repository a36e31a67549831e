"""Numerical laboratory for sectorial solutions of a singularly perturbed
q-difference-differential Cauchy problem.

The package builds Borel-plane coefficient families by exact term-list
recursion, sums them along rays by truncated Laplace integrals, measures
weighted norms and fits q-Gevrey growth envelopes, estimates Dirichlet-type
series two ways, and reconstructs shared asymptotic expansions from sector
differences by Cauchy-Heine integrals.
"""

from .asymptotics import (
    DirichletParams,
    check_expansion,
    dirichlet_bound_check,
    dirichlet_direct,
    dirichlet_euler_maclaurin,
    envelope_constant,
    fit_flat_type,
    watson_transfer,
)
from .errors import (
    ConfigError,
    DivergenceError,
    FlatnessError,
    GeometryError,
    HypothesisError,
    QgevreyError,
    ResourceError,
    SingularityError,
    TruncationError,
    ValidationError,
    WrongSectorError,
)
from .heine import (
    coboundary_check,
    flat_cocycle,
    heine_primitive,
    reconstruct_expansion,
    taylor_coefficients,
)
from .laplace import (
    build_solution,
    cocycle_difference,
    laplace_ray,
    pde_residual,
)
from .model import (
    NormParams,
    ProblemSpec,
    RadiusSchedule,
    RationalTerm,
    RhsTerm,
    Sector,
    SectorGeometry,
    TimeDomain,
    check_assumption_A,
    check_assumption_B,
    check_good_covering,
    validate_geometry,
)
from .norms import fit_growth, inner_norm, outer_norm
from .recursion import BorelFamily, build_coefficient, singularity_ledger
from .scenario import load_scenario

__version__ = "0.1.0"

__all__ = [
    "BorelFamily",
    "ConfigError",
    "DirichletParams",
    "DivergenceError",
    "FlatnessError",
    "GeometryError",
    "HypothesisError",
    "NormParams",
    "ProblemSpec",
    "QgevreyError",
    "RadiusSchedule",
    "RationalTerm",
    "ResourceError",
    "RhsTerm",
    "Sector",
    "SectorGeometry",
    "SingularityError",
    "TimeDomain",
    "TruncationError",
    "ValidationError",
    "WrongSectorError",
    "build_coefficient",
    "build_solution",
    "check_assumption_A",
    "check_assumption_B",
    "check_expansion",
    "check_good_covering",
    "coboundary_check",
    "cocycle_difference",
    "dirichlet_bound_check",
    "dirichlet_direct",
    "dirichlet_euler_maclaurin",
    "envelope_constant",
    "fit_flat_type",
    "fit_growth",
    "flat_cocycle",
    "heine_primitive",
    "inner_norm",
    "laplace_ray",
    "load_scenario",
    "outer_norm",
    "pde_residual",
    "reconstruct_expansion",
    "singularity_ledger",
    "taylor_coefficients",
    "validate_geometry",
    "watson_transfer",
]
