"""Exception and warning types raised by eulertorsion."""


class TorsionError(Exception):
    """Base class for all library errors."""


class InputError(TorsionError):
    """Malformed input document or argument."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}" if pointer is not None else message)
        self.pointer = pointer


class NotAcyclic(TorsionError):
    pass


class IllConditioned(TorsionError):
    pass


class RankMismatch(TorsionError):
    pass


class SingularChange(TorsionError):
    pass


class GradingMismatch(TorsionError):
    pass


class SingularGenerator(TorsionError):
    pass


class ComplexViolation(TorsionError):
    pass


class RelatorViolation(TorsionError):
    pass


class UnrepresentableClass(TorsionError):
    pass


class BaseMismatch(TorsionError):
    pass


class NoDualData(TorsionError):
    pass


class NotSupported(TorsionError):
    pass


class NonPositiveMetric(TorsionError):
    pass


class ZeroDenominator(TorsionError):
    pass


class SignDiscontinuity(TorsionError):
    pass


class NoConsistentClass(TorsionError):
    pass


class ChiNonzeroWarning(UserWarning):
    """The Euler characteristic is nonzero, so the base frame choice matters."""


class BorderlineRankWarning(UserWarning):
    """A singular value sits close to the rank threshold."""
