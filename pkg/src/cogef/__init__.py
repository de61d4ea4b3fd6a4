"""Exact extended formulations for integer hulls of strictly Delta-modular
cones with cographic row matroids."""

from .formulation import ExtendedFormulation, Row
from .generators import gen_counterexample, gen_dual_complete, gen_odd_cycle_stab
from .io import emit, parse_instance
from .linalg import Matrix
from .modularity import ModularityProfile, subdeterminant_profile
from .oracle import VerificationReport, verify_hull, verify_size_bound
from .pipeline import (
    ConditionError,
    ConditionReport,
    EfArtifact,
    GraphHint,
    ProblemInstance,
    build_ef,
    check_conditions,
    stab_box_intersect,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionError", "ConditionReport", "EfArtifact", "ExtendedFormulation", "GraphHint",
    "Matrix", "ModularityProfile", "ProblemInstance", "Row", "VerificationReport",
    "build_ef", "check_conditions", "emit", "gen_counterexample", "gen_dual_complete",
    "gen_odd_cycle_stab", "parse_instance", "stab_box_intersect", "subdeterminant_profile",
    "verify_hull", "verify_size_bound",
]
