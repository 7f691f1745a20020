"""Exception hierarchy.

Every error that stems from a violated mathematical hypothesis carries a
short human-readable ``hypothesis`` string; the CLI prints it verbatim.
"""


class GLSError(Exception):
    """Base class for all package errors."""

    hypothesis = ""

    def __init__(self, message="", hypothesis=None, **details):
        super().__init__(message)
        if hypothesis is not None:
            self.hypothesis = hypothesis
        self.details = details


class DomainError(GLSError, ValueError):
    hypothesis = "argument must lie inside the function's domain"


class NotMonotone(GLSError):
    hypothesis = "function must be strictly monotone"


class NotIncreasing(NotMonotone):
    hypothesis = "p/psi(p) must be strictly increasing on the support of psi"


class OutOfRange(GLSError):
    hypothesis = "target value must lie in the attained range of the function"


class TruncationUncertain(GLSError):
    """The supremum is not certified on the truncated domain.

    ``lower_bound`` holds the best value found, which is a valid lower bound
    for the true supremum.
    """

    hypothesis = "supremum must be attained (or certified) before the truncation point"

    def __init__(self, message="", lower_bound=None, **kw):
        super().__init__(message, **kw)
        self.lower_bound = lower_bound


class TailUncertain(TruncationUncertain):
    hypothesis = "tail of the sup over p must be certified below the attained maximum"


class NonYoung(GLSError):
    hypothesis = "Young function must vanish only at 0, increase and be convex"


class NonConvex(GLSError):
    hypothesis = "function must be convex on the scan grid"


class AllNonConvex(NonConvex):
    hypothesis = "ln(C + N(z)) must be convex for some constant C"


class ExtensionNotConvex(NonYoung):
    hypothesis = "log-log slope of N at e^2 must be at least 1 for a convex power extension"


class NoValidC5(GLSError):
    hypothesis = "the patched Young function needs a knot where the elasticity is below alpha"


class BracketFailure(UserWarning):
    """Minimization bracket hit the search limits; result is an endpoint value."""
