"""Coincidence probabilities and exceptional points in lossy linear optical networks."""

from ._ptsim import (
    ModeNetworkSpec,
    NotFoundError,
    NumericalError,
    PtsimError,
    SectionLayout,
    ValidationError,
    coupler_closed_form,
    determinant,
    find_crossing,
    find_ep_threshold,
    mat_exp,
    permanent,
    protocol_rotation,
    rotation_at_threshold,
    run,
    schur,
    sweep,
    validate,
)

__all__ = [
    "ModeNetworkSpec",
    "NotFoundError",
    "NumericalError",
    "PtsimError",
    "SectionLayout",
    "ValidationError",
    "coupler_closed_form",
    "determinant",
    "find_crossing",
    "find_ep_threshold",
    "mat_exp",
    "permanent",
    "protocol_rotation",
    "rotation_at_threshold",
    "run",
    "schur",
    "sweep",
    "validate",
]
