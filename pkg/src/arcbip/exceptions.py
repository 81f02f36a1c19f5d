"""Exception hierarchy used throughout the package."""


class ArcbipError(Exception):
    """Base class for all package errors."""


class NonFiniteEvaluation(ArcbipError, FloatingPointError):
    """A problem callback returned NaN or Inf."""


class DomainError(ArcbipError, ValueError):
    """A barrier term was evaluated at a nonpositive slack."""


class RankDeficient(ArcbipError, ValueError):
    """A matrix is numerically rank deficient."""


class NotSymmetric(ArcbipError, ValueError):
    pass


class NotPositiveDefinite(ArcbipError, ValueError):
    pass


class MaxSecularIterations(ArcbipError, RuntimeError):
    """The scalar root-find of the cubic subproblem did not converge."""


class Unbounded(ArcbipError, ValueError):
    """A one-dimensional model has no minimizer on an unbounded interval."""


class UnknownProblem(ArcbipError, KeyError):
    def __init__(self, name, valid):
        self.name = name
        self.valid = list(valid)
        super().__init__(f"unknown problem {name!r}; valid names: {', '.join(self.valid)}")

    def __str__(self):
        return self.args[0]


class MismatchedProblemSets(ArcbipError, ValueError):
    """Variants passed to the profile emitter do not cover the same problems."""


class InvariantViolation(ArcbipError, AssertionError):
    """A runtime check on an iteration of the solver failed."""
