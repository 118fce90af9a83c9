"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures to stable process exit statuses without a lookup table.
"""


class GarsiaError(Exception):
    exit_code = 2


class InvalidInput(GarsiaError):
    exit_code = 2


class EmptyInput(InvalidInput):
    pass


class ZeroLeadingCoefficient(InvalidInput):
    pass


class ZeroConstantTerm(InvalidInput):
    pass


class NonPrimitive(InvalidInput):
    pass


class ZeroPolynomial(InvalidInput):
    pass


class InvalidMeasure(InvalidInput):
    pass


class DenominatorNotMPower(InvalidInput):
    pass


class WrongConjugateProfile(InvalidInput):
    pass


class NoBoundAvailable(InvalidInput):
    pass


class VanishingNotVerified(InvalidInput):
    pass


class AmbiguousRoot(InvalidInput):
    pass


class NotCyclic(InvalidInput):
    pass


class CyclicButOneNotGenerator(NotCyclic):
    pass


class BudgetExceeded(GarsiaError):
    exit_code = 3


class AtomBudgetExceeded(BudgetExceeded):
    pass


class CombinatorialBudgetExceeded(BudgetExceeded):
    pass


class InternalConsistencyError(GarsiaError):
    """Raised when a self-check fails; never caused by valid user input."""

    exit_code = 1


class OrderMismatch(InternalConsistencyError):
    pass


class EquivalenceViolation(InternalConsistencyError):
    pass
