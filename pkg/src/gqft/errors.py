"""Exception types shared across the package."""


class GqftError(Exception):
    """Base class for package errors."""


class LatticeMismatch(GqftError):
    """Two state vectors or operators live on different mode lattices."""


class TruncationTooSmall(GqftError):
    """The requested interior subspace of a truncated basis is empty."""


class NotGridCompatible(GqftError):
    """A kinematic transformation does not map the lattice onto itself."""


class OffGridImage(GqftError):
    """The image of a grid point under a transformation leaves the grid."""


class MissingAntiparticle(GqftError):
    """A field with eta != 0 was requested for a species with no partner."""


class ConfigInvalid(GqftError):
    """A harness configuration failed validation.

    ``errors`` collects field-level diagnostics.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
