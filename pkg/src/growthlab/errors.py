"""Typed errors shared across the library."""


class GrowthLabError(Exception):
    """Base class for all library errors."""


class ParentMismatch(GrowthLabError):
    """Operands belong to different parent groups."""


class BudgetExceeded(GrowthLabError):
    """An exact computation would exceed the element budget.

    Raised instead of ever truncating a result.
    """

    def __init__(self, op: str, needed, budget: int):
        super().__init__(f"{op}: needs ~{needed} elements/iterations, budget is {budget}")
        self.op = op
        self.needed = needed
        self.budget = budget


class NotNilpotent(GrowthLabError):
    """Lower central series failed to terminate within the structural bound."""


class NotAbelian(GrowthLabError):
    """Operation requires commuting elements / an abelian parent."""


class StepTooLow(GrowthLabError):
    """Operation requires nilpotency step >= 2."""


class CosetCountExceeded(GrowthLabError):
    """Set meets more cosets than the stated bound k."""


class StepDropFailed(GrowthLabError):
    """A reduced factor failed to drop in nilpotency step; signals a bug."""


class CertificateError(GrowthLabError):
    """A claimed certificate fails its defining verification."""


class ContainmentError(GrowthLabError):
    """An exactly-verified containment or bound failed; signals a bug."""


class FormatError(GrowthLabError):
    """Malformed text serialization input."""


class RecipeError(GrowthLabError):
    """Malformed or unsupported example-recipe string."""
