"""Exception types shared across the library.

Every error carries a machine-readable ``code`` so the CLI can emit a
stable JSON error object.
"""


class VogelError(Exception):
    code = "error"

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self)}


class ParseError(VogelError):
    """Syntax or name error while reading a polynomial string."""

    code = "parse-error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ContextMismatch(VogelError):
    code = "context-mismatch"


class ProblemSpecError(VogelError):
    code = "invalid-problem"


class NotZeroDimensional(VogelError):
    code = "not-zero-dimensional"


class DecompositionIncomplete(VogelError):
    """The splitting strategy could not certify primality of a leaf ideal."""

    code = "decomposition-incomplete"

    def __init__(self, message: str, ideal=None):
        super().__init__(message)
        self.ideal = ideal

    def payload(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.ideal is not None:
            out["offending_ideal"] = [str(g) for g in self.ideal.groebner()]
        return out


class SliceFailure(VogelError):
    """Random affine slices disagreed twice; retry with a new seed."""

    code = "slice-failure"


class ImproperIntersection(VogelError):
    """A hypersurface contained a whole component of the cycle."""

    code = "improper-intersection"

    def __init__(self, message: str, component=None):
        super().__init__(message)
        self.component = component

    def payload(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.component is not None:
            out["offending_ideal"] = [str(g) for g in self.component.prime.groebner()]
        return out


class CorrectDimensionViolated(VogelError):
    """A gap set or a tower cycle failed its purity requirement."""

    code = "correct-dimension-violated"

    def __init__(self, message: str, level=None, ideal=None):
        super().__init__(message)
        self.level = level
        self.ideal = ideal

    def payload(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.level is not None:
            out["level"] = self.level
        if self.ideal is not None:
            out["offending_ideal"] = [str(g) for g in self.ideal.groebner()]
        return out


class ReorganizationBudgetExhausted(VogelError):
    code = "reorganization-budget-exhausted"

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate

    def payload(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


class FiberDegreeDisagreement(VogelError):
    code = "fiber-degree-disagreement"


class NonRationalPoint(VogelError):
    code = "non-rational-point"
