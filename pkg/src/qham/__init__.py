"""Quasi-Hamiltonian spaces with group-valued momentum maps, their axioms and reductions."""
from .errors import (ChartFailure, DegenerateClass, EmptyLevel, EmptySurface, GroupMismatch, NoConvergence,
                     NotOnLevel, NotTangent, OutOfBall, QHamError, UnsupportedType)
from .level import LevelSolverConfig, SolveResult, level_residual, solve_level_one
from .lie import GroupSpec, exp, log
from .spaces import (ConjugacyClassSpace, DoubleSpace, FusionSpace, QHamSpace, TangentVector, class_generator,
                     conjugacy_class, double, fuse, surface_space)
from .strata import (IsotropyType, ReducedFormResult, StrataConfig, StratumRecord, classify_isotropy,
                     fixed_tangent_subspace, isotropy_algebra, isotropy_qham_check, kernel_restriction_check,
                     reduced_form, stratify)
from .verify import AxiomReport, VerifierConfig, verify_space

__version__ = "0.1.0"

__all__ = [
    "ChartFailure",
    "DegenerateClass",
    "EmptyLevel",
    "EmptySurface",
    "GroupMismatch",
    "NoConvergence",
    "NotOnLevel",
    "NotTangent",
    "OutOfBall",
    "QHamError",
    "UnsupportedType",
    "LevelSolverConfig",
    "SolveResult",
    "level_residual",
    "solve_level_one",
    "GroupSpec",
    "exp",
    "log",
    "ConjugacyClassSpace",
    "DoubleSpace",
    "FusionSpace",
    "QHamSpace",
    "TangentVector",
    "class_generator",
    "conjugacy_class",
    "double",
    "fuse",
    "surface_space",
    "IsotropyType",
    "ReducedFormResult",
    "StrataConfig",
    "StratumRecord",
    "classify_isotropy",
    "fixed_tangent_subspace",
    "isotropy_algebra",
    "isotropy_qham_check",
    "kernel_restriction_check",
    "reduced_form",
    "stratify",
    "AxiomReport",
    "VerifierConfig",
    "verify_space",
]
