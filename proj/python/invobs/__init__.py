"""Invariant observers on Lie groups: SO(3) attitude and SE(2) car examples."""

from ._core import (
    AtCutLocus,
    GroupElement,
    GroupMismatch,
    InvobsError,
    NotObservable,
    ParseError,
    SingularBasis,
    StepRejected,
    ValidationError,
    bracket,
    check_equivariance,
    design_gain_adjoint,
    design_gain_pole,
    linearize,
    observability_rank,
    run_scenario_file,
    run_scenario_text,
    system_names,
)

__all__ = [
    "AtCutLocus",
    "GroupElement",
    "GroupMismatch",
    "InvobsError",
    "NotObservable",
    "ParseError",
    "SingularBasis",
    "StepRejected",
    "ValidationError",
    "bracket",
    "check_equivariance",
    "design_gain_adjoint",
    "design_gain_pole",
    "linearize",
    "observability_rank",
    "run_scenario_file",
    "run_scenario_text",
    "system_names",
]
