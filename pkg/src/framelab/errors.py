"""Exception hierarchy shared by every framelab module."""


class FramelabError(Exception):
    """Base class for all framelab errors."""


class BudgetExceeded(FramelabError):
    def __init__(self, what, bound, detail=""):
        self.what = what
        self.bound = bound
        self.detail = detail
        msg = f"budget exceeded while building {what}: more than {bound} items"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class MismatchedSpaces(FramelabError):
    pass


class TypeMismatch(FramelabError):
    pass


class FamilyMismatch(FramelabError):
    pass


class NotMonotone(FramelabError):
    pass


class NoSuchElement(FramelabError):
    pass


class TermSyntaxError(FramelabError):
    def __init__(self, position, expected, found=None):
        self.position = position
        self.expected = tuple(expected)
        self.found = found
        what = " or ".join(self.expected)
        got = f", found {found!r}" if found is not None else ""
        super().__init__(f"syntax error at offset {position}: expected {what}{got}")


class TermTypeError(FramelabError):
    def __init__(self, subterm, expected, actual):
        self.subterm = subterm
        self.expected = expected
        self.actual = actual
        super().__init__(f"ill-typed subterm {subterm}: expected {expected}, got {actual}")


class UnknownConstant(FramelabError):
    pass


class UnboundVariable(FramelabError):
    pass


class FuelExhausted(FramelabError):
    """Raised when reduction runs out of fuel; carries the partial reduct."""

    def __init__(self, partial, steps):
        self.partial = partial
        self.steps = steps
        super().__init__(f"no normal form within {steps} steps")


class MissingConstantInterpretation(FramelabError):
    pass


class ModelConditionFailed(FramelabError):
    pass


class PreconditionFailed(FramelabError):
    def __init__(self, offending, message=""):
        self.offending = tuple(offending)
        super().__init__(message or f"constants not in relation: {', '.join(self.offending)}")


class SynthesisError(FramelabError):
    """A synthesized witness failed its round-trip check."""


class TheoryViolation(FramelabError):
    pass
