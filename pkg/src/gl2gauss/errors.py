"""Exception types shared across the package.

Errors ending in ``Error`` that are documented as "internal" signal a logic
bug in this library (a quantity that is mathematically forced failed to
materialize); they should never be caught and retried.
"""


class GL2GaussError(Exception):
    """Base class for all package errors."""


class NonUnitError(GL2GaussError):
    """An argument required to be coprime to p was divisible by p."""


class BadArgumentError(GL2GaussError):
    """An argument violated a documented precondition."""


class BadConductorError(GL2GaussError):
    """A root-of-unity order does not divide the ambient conductor."""


class TooLargeError(GL2GaussError):
    """An enumeration would exceed the configured element cap."""


class NotInSubgroupError(GL2GaussError):
    """A matrix lies outside the domain of the character being evaluated."""


class UnsupportedFamilyError(GL2GaussError):
    """The requested operation does not apply to this character family."""


class NotFoundError(GL2GaussError):
    """A search guaranteed to succeed found nothing (internal)."""


class NotUniqueError(GL2GaussError):
    """A search guaranteed to be unique found several matches (internal)."""


class DecompositionError(GL2GaussError):
    """A coset decomposition that must exist failed (internal)."""


class ConstructionError(GL2GaussError):
    """A constrained generator/element could not be built (internal)."""


class InexactDivisionError(GL2GaussError):
    """A division that must be exact left a remainder (internal)."""


class DivisibilityError(GL2GaussError):
    """An integer that must be divisible by a prime power was not (internal)."""
