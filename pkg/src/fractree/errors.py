"""Exception hierarchy shared by every fractree module."""


class FractreeError(Exception):
    """Base class for all library errors."""


class ValidationError(FractreeError, ValueError):
    """Raised by :func:`fractree.model.validate` with every violated constraint.

    ``violations`` is a list of ``(kind, field)`` pairs where kind is one of
    ``"NonPositive"``, ``"RatioNotAboveOne"``, ``"AngleOutOfRange"``,
    ``"ZeroLevels"``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        msg = ", ".join(f"{kind}({field})" for kind, field in self.violations)
        super().__init__(f"invalid parameters: {msg}")

    @property
    def kinds(self):
        return [kind for kind, _ in self.violations]


class IndexOutOfRange(FractreeError, IndexError):
    pass


class IllConditioned(FractreeError, ArithmeticError):
    """A ratio sits inside the guard band around a removable singularity."""


class SingularSystem(FractreeError, ArithmeticError):
    pass


class RatioOutOfRange(FractreeError, ValueError):
    pass


class DepthExceeded(FractreeError, RuntimeError):
    pass


class DivergentParameters(FractreeError, ValueError):
    pass


class InvalidCancellation(FractreeError, ValueError):
    pass


class OutOfRange(FractreeError, ValueError):
    pass


class TooFewSamples(FractreeError, ValueError):
    pass


class DegenerateScales(FractreeError, ValueError):
    pass
