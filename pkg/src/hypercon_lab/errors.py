"""Exception hierarchy for hypercon_lab.

Everything raised on purpose by the library derives from
:class:`HyperconLabError`, so callers (the CLI in particular) can map
numeric failures to a single exit code.
"""


class HyperconLabError(Exception):
    """Base class for all library errors."""


class NonSquareError(HyperconLabError, ValueError):
    pass


class NonFiniteError(HyperconLabError, ValueError):
    pass


class DimensionMismatchError(HyperconLabError, ValueError):
    pass


class NonHermitianError(HyperconLabError, ValueError):
    def __init__(self, defect, tol):
        self.defect = float(defect)
        self.tol = float(tol)
        super().__init__(
            f"matrix is not Hermitian: defect {self.defect:.3e} > tol {self.tol:.3e}")


class BranchCutViolation(HyperconLabError, ValueError):
    pass


class DivergentSeriesError(HyperconLabError, ArithmeticError):
    pass


class ToleranceNotReached(HyperconLabError, ArithmeticError):
    def __init__(self, max_terms, bound, tol):
        self.max_terms = int(max_terms)
        self.bound = float(bound)
        self.tol = float(tol)
        super().__init__(
            f"tail bound {self.bound:.3e} still above tol {self.tol:.3e} "
            f"after {self.max_terms} terms")


class NotAContraction(HyperconLabError, ValueError):
    pass


class NotStrictContraction(NotAContraction):
    pass


class DimensionGuard(HyperconLabError, ValueError):
    pass


class AlphaOutOfRange(HyperconLabError, ValueError):
    pass


class ModelMismatch(HyperconLabError, ValueError):
    pass


class TruncationTooSmall(HyperconLabError, ValueError):
    pass


class MissingControlOperator(HyperconLabError, ValueError):
    pass


class NotExponentiallyStable(HyperconLabError, ValueError):
    pass


class SingularCayley(HyperconLabError, ArithmeticError):
    pass


class NumericOverflow(HyperconLabError, OverflowError):
    pass


class PreconditionError(HyperconLabError, ValueError):
    """A documented precondition of an experiment does not hold."""
