"""Exception hierarchy shared by all modules."""


class SparseGaloisError(Exception):
    """Base class for every error raised by this package."""


class InputError(SparseGaloisError):
    """The input is malformed or outside the supported domain."""


class NumericalError(SparseGaloisError):
    """A floating point computation could not be certified."""


class DimensionUnsupported(InputError):
    pass


class EmptySupport(InputError):
    pass


class RankDeficient(InputError):
    """The supports generate a lattice of rank < n, so the generic system has no isolated roots."""


class Reducible(InputError):
    def __init__(self, subset, message=None):
        self.subset = tuple(subset)
        super().__init__(message or f"tuple is reducible: sets {list(self.subset)} "
                         f"fit in a sublattice of rank <= {len(self.subset)}")


class NotAnalogous(InputError):
    pass


class NotEssential(InputError):
    pass


class ParseError(InputError):
    pass


class NonIntegralVolume(SparseGaloisError):
    pass


class Condition1Unverifiable(SparseGaloisError):
    pass


class ZeroCoordinate(NumericalError):
    pass


class DegenerateLeadingCoefficient(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class CountMismatch(NumericalError):
    def __init__(self, found, expected):
        self.found = found
        self.expected = expected
        super().__init__(f"found {found} roots, expected {expected}")


class DegenerateResultant(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class SingularJacobian(NumericalError):
    pass


class TrackingFailure(NumericalError):
    pass


class SignatureMismatch(NumericalError):
    pass


class BlockStructureViolated(NumericalError):
    pass


class DivisibilityViolated(NumericalError):
    pass


class BudgetExhausted(SparseGaloisError):
    """The loop budget ran out before the run stabilized; partial results are attached."""

    def __init__(self, run=None, message="loop budget exhausted"):
        self.run = run
        super().__init__(message)
