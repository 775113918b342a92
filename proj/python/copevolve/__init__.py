"""Evolve constrained problem instances that are hard for one solver and easy for the others."""

from ._core import (
    Bounds,
    Config,
    Constraint,
    ContractViolation,
    DataError,
    NoBoundaryError,
    Problem,
    UndefinedAngleError,
    UnsupportedKindError,
    derive_seed,
    emit_report,
    evaluate,
    evolve_hard_instance,
    feasibility_ratio,
    features,
    load_config,
    pairwise_angle,
    read_instance,
    run_pipeline,
    shortest_distance,
    solve,
    write_instance,
)

SOLVERS = ("DE", "ES", "PSO")

__all__ = [
    "Bounds",
    "Config",
    "Constraint",
    "ContractViolation",
    "DataError",
    "NoBoundaryError",
    "Problem",
    "SOLVERS",
    "UndefinedAngleError",
    "UnsupportedKindError",
    "derive_seed",
    "emit_report",
    "evaluate",
    "evolve_hard_instance",
    "feasibility_ratio",
    "features",
    "load_config",
    "pairwise_angle",
    "read_instance",
    "run_pipeline",
    "shortest_distance",
    "solve",
    "write_instance",
]
