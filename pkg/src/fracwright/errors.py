"""Exception hierarchy shared by every module."""


class FracWrightError(Exception):
    """Base class for all library errors."""


class NumericalError(FracWrightError):
    """A numerical routine could not deliver the requested accuracy."""


class NonConvergent(NumericalError):
    pass


class DomainExceeded(NumericalError):
    """Argument outside the region where the evaluation route is certified."""


class NoDecay(NumericalError):
    pass


class SpecViolation(FracWrightError):
    """Input data violate a hypothesis of the boundary-value problem."""


class NonPositiveSpectrum(SpecViolation):
    pass


class BadExponents(SpecViolation):
    pass


class ParseError(FracWrightError):
    pass
