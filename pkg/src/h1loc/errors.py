"""Exception types shared across the package."""


class H1locError(Exception):
    """Base class for all package errors."""


class ModulusMismatch(H1locError):
    """Two values with different moduli were combined."""


class NonUnitError(H1locError):
    """Inversion of a residue or matrix that is not a unit."""


class NonSimpleRootError(H1locError):
    """Hensel lifting attempted at a root where the derivative vanishes mod p."""


class ClosureCapExceeded(H1locError):
    """Group closure grew past the configured cap.

    Signals that the group is too large for exact cohomology; callers
    should fall back to sampling mode.
    """


class BudgetExceeded(H1locError):
    """A cohomology computation was requested on a group above the size budget."""


class NotSubgroupError(H1locError):
    """An operation expected a subgroup relationship that does not hold."""


class NotCentralError(H1locError):
    """An element assumed central fails to commute with the group."""


class ContainmentError(H1locError):
    """A quotient was requested for a pair of spans without containment."""


class NoNormalSylow(H1locError):
    """The p-power-order elements of a group are not closed under products."""


class InputError(H1locError):
    """Malformed user input (group spec files, CLI arguments)."""


class FalsificationError(H1locError):
    """A theorem-level check failed; carries a reproduction bundle.

    This always indicates an implementation bug or a genuinely surprising
    group, so it aborts loudly instead of being counted.
    """

    def __init__(self, message: str, bundle: dict):
        super().__init__(message)
        self.bundle = bundle
