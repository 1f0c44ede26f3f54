"""Exception hierarchy shared by every module."""


class MoritaError(Exception):
    """Base class for all library errors."""


class InvalidInputError(MoritaError, ValueError):
    """Input violates a documented precondition or type invariant."""


class NumericalDegeneracyError(MoritaError, ArithmeticError):
    """A computation landed too close to a rank or rounding threshold to trust."""


class NoEquivalenceError(MoritaError):
    """Two projections do not have the same K0 class."""


class AxiomViolationError(MoritaError):
    """A bimodule fails one of the representation axioms.

    The failing axiom is stored in ``axiom`` ("a", "b", "c", "d", "closure", ...).
    """

    def __init__(self, axiom, message, residual=None):
        super().__init__(f"axiom ({axiom}) violated: {message}")
        self.axiom = axiom
        self.residual = residual


class PreconditionError(MoritaError):
    """An operation was called on an object lacking a required property
    (for example a bimodule that is not left-full)."""
