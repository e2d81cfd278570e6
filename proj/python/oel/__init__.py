"""Orbit equivalence between odometers: construction, verification, entropy reports."""

from ._oel import (
    ArtifactError,
    CapExceededError,
    InfeasibleError,
    InvariantError,
    OelError,
    __version__,
    cocycle_generator,
    construct,
    entropy,
    growth,
    remark_entropy,
    verify,
)


def worked_run(**overrides):
    """The d = (12, 132) reference run."""
    args = {"prefix": [2, 2, 3, 11]}
    args.update(overrides)
    return construct(**args)


__all__ = [
    "ArtifactError",
    "CapExceededError",
    "InfeasibleError",
    "InvariantError",
    "OelError",
    "__version__",
    "cocycle_generator",
    "construct",
    "entropy",
    "growth",
    "remark_entropy",
    "verify",
    "worked_run",
]
