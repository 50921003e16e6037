"""Separatrix detection, refinement and reconstruction for competition models."""

__version__ = "0.1.0"

from .config import PipelineConfig, load_config
from .dynamics import (
    UNRESOLVED,
    ClassificationResult,
    IntegratorConfig,
    Trajectory,
    classify,
    integrate,
)
from .models import (
    Equilibrium,
    ThreePopParams,
    TwoPopParams,
    equilibria,
    jacobian,
    rhs,
    separatrix_saddle,
    stable_attractors,
    table_conditions,
)
from .pu_interp import (
    Covering,
    PUInterpolant,
    Subdomain,
    WendlandC2,
    build_covering,
    evaluate,
    fill_distance,
    fit,
    wendland_c2,
)
from .refine import RefinedPointSet, augment, refine_2d, refine_3d
from .separatrix import (
    BisectionHit,
    ProbePair,
    SeparatrixPointSet,
    bisect,
    boundary_probes,
    detect,
)

__all__ = [
    "__version__",
    "PipelineConfig",
    "load_config",
    "TwoPopParams",
    "ThreePopParams",
    "Equilibrium",
    "rhs",
    "jacobian",
    "equilibria",
    "separatrix_saddle",
    "stable_attractors",
    "table_conditions",
    "IntegratorConfig",
    "ClassificationResult",
    "Trajectory",
    "UNRESOLVED",
    "integrate",
    "classify",
    "ProbePair",
    "BisectionHit",
    "SeparatrixPointSet",
    "boundary_probes",
    "bisect",
    "detect",
    "RefinedPointSet",
    "refine_2d",
    "refine_3d",
    "augment",
    "WendlandC2",
    "wendland_c2",
    "Subdomain",
    "Covering",
    "PUInterpolant",
    "build_covering",
    "fit",
    "evaluate",
    "fill_distance",
]
