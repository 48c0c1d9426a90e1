"""Exception hierarchy.

Two families: :class:`SpecError` for inputs that violate the problem's
assumptions, :class:`NumericalError` for iterations that fail to converge.
The CLI maps them to exit codes 2 and 3.
"""


class FuncEqError(Exception):
    pass


class SpecError(FuncEqError):
    pass


class NumericalError(FuncEqError):
    pass


class NoFixedPoint(SpecError):
    pass


class NotRepelling(SpecError):
    pass


class DegenerateSpec(SpecError):
    pass


class UnsupportedSpec(SpecError):
    pass


class WrongSpec(SpecError):
    pass


class BadArity(ValueError, FuncEqError):
    pass


class PoleOfGamma(ValueError, FuncEqError):
    pass


class SignConventionMismatch(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class NewtonDiverged(NumericalError):
    pass


class DepthExceeded(NumericalError):
    pass


class AtSingularity(NumericalError):
    pass


class BadShift(NumericalError):
    pass


class ZeroCoefficient(NumericalError):
    pass
