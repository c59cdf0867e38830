"""Exception hierarchy shared by the solver modules."""


class ModelError(Exception):
    """Base class for domain errors raised by truncelb."""


class ParameterError(ModelError, ValueError):
    """A parameter is non-finite or outside its admissible range."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NoBifurcation(ModelError):
    """F(p) has no root in (0, 1): ELB dynamics are stable for every p."""


class ContradictionError(ModelError):
    """Neither regime passes its verification check at some period."""


class MixedStructureError(ModelError):
    """Regimes along a path are not an ELB block followed by a Normal block."""


class InconclusiveError(ModelError):
    """Neither convergence nor divergence was detected within the cap."""


class ClassifierMismatch(ModelError):
    """Candidate-validity count disagrees with the threshold rules."""

    def __init__(self, message: str, p: float | None = None, d: float | None = None):
        self.p = p
        self.d = d
        if p is not None and d is not None:
            message = f"{message} at (p={p!r}, d={d!r})"
        super().__init__(message)


class UnsupportedDecomposition(ModelError):
    """Modal decomposition requested for a repeated-root recursion."""
