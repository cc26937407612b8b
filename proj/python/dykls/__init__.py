"""Dual block-coordinate solvers for best approximation onto level sets.

Thin wrapper over the C++ core: instance generation, the distributed sweep
solver, the single-set outer-approximation solver, halfspace projections and
rate-fit diagnostics.
"""

from ._core import (
    DegenerateSeries,
    InfeasibleIntersection,
    ValidationFailedError,
    distance_to_halfspace,
    envelope_lemma25,
    generate_instance,
    oneset_ball,
    oneset_lss,
    project_halfspace,
    project_two_halfspaces,
    rate_fit,
    run,
    run_preset,
    supporting_halfspace,
    validate_instance,
)

__all__ = [
    "DegenerateSeries",
    "InfeasibleIntersection",
    "ValidationFailedError",
    "distance_to_halfspace",
    "envelope_lemma25",
    "generate_instance",
    "oneset_ball",
    "oneset_lss",
    "project_halfspace",
    "project_two_halfspaces",
    "rate_fit",
    "run",
    "run_preset",
    "supporting_halfspace",
    "validate_instance",
]

__version__ = "0.1.0"
