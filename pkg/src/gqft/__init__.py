"""Finite-lattice realization of Galilean quantum field theory with a
numerical verification harness for its structural theorems."""

from .algebra import AlgebraConfig, build_generators, casimir_invariants
from .errors import (
    ConfigInvalid,
    GqftError,
    LatticeMismatch,
    MissingAntiparticle,
    NotGridCompatible,
    OffGridImage,
    TruncationTooSmall,
)
from .fock import FockVector, Mode, ModeLattice, Species
from .galilei import GalileiElement, Rotation, SpaceTimePoint
from .harness import HarnessConfig, Report, run

__version__ = "0.1.0"

__all__ = [
    "AlgebraConfig",
    "ConfigInvalid",
    "FockVector",
    "GalileiElement",
    "GqftError",
    "HarnessConfig",
    "LatticeMismatch",
    "Mode",
    "ModeLattice",
    "MissingAntiparticle",
    "NotGridCompatible",
    "OffGridImage",
    "Report",
    "Rotation",
    "SpaceTimePoint",
    "Species",
    "TruncationTooSmall",
    "build_generators",
    "casimir_invariants",
    "run",
]
