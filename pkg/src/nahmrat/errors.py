"""Exception hierarchy.

Every domain failure derives from :class:`NahmRatError`; the CLI reports the
class name as the structured error string.
"""


class NahmRatError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


# rational maps
class DegreeError(NahmRatError):
    pass


class NotCoprime(NahmRatError):
    def __init__(self, message, common_root=None):
        super().__init__(message)
        self.common_root = common_root


class PoleHit(NahmRatError):
    pass


class RepeatedPoles(NahmRatError):
    pass


class ZeroResidue(NahmRatError):
    pass


# Donaldson pairs
class NotSymmetric(NahmRatError):
    pass


class NotOrthogonal(NahmRatError):
    pass


class NoMatch(NahmRatError):
    pass


class NotSignRelated(NahmRatError):
    pass


# Nahm data and the scattering flow
class GridOutOfRange(NahmRatError):
    pass


class NoPole(NahmRatError):
    pass


class StepFailure(NahmRatError):
    pass


class DivergentEndpoint(NahmRatError):
    pass


# monodromy
class SizeMismatch(NahmRatError):
    pass


class CollisionRisk(NahmRatError):
    pass


class InvalidLoop(NahmRatError):
    pass


class RefinementExhausted(NahmRatError):
    pass


# input files
class FormatError(NahmRatError):
    """Malformed input document (wrong keys, shapes or value types)."""
