"""Exception hierarchy shared by all modules."""


class DerivlabError(Exception):
    pass


class RingError(DerivlabError, ValueError):
    pass


class NotAssociative(RingError):
    pass


class NotCommutative(RingError):
    pass


class NoUnit(RingError):
    pass


class NotLocal(RingError):
    pass


class NotInvertible(DerivlabError, ValueError):
    pass


class BudgetExceeded(DerivlabError):
    def __init__(self, needed: int, budget: int, what: str = "enumeration"):
        super().__init__(f"{what} needs {needed} candidates, budget is {budget}")
        self.needed = needed
        self.budget = budget


class ComplexError(DerivlabError, ValueError):
    pass


class SimplicialIdentityError(DerivlabError, ValueError):
    pass


class GroupError(DerivlabError, ValueError):
    pass


class NotASubgroup(GroupError):
    pass


class NotAHomomorphism(DerivlabError, ValueError):
    pass


class NotBorelValued(DerivlabError, ValueError):
    pass


class PairingNotEquivariant(DerivlabError, ValueError):
    pass


class MissingInertia(DerivlabError, ValueError):
    pass


class KernelNotSquareZero(DerivlabError, ValueError):
    pass


class CentralizerViolation(DerivlabError, ValueError):
    pass


class NoMatch(DerivlabError):
    pass


class Ambiguous(DerivlabError):
    pass


class PresentationError(DerivlabError, ValueError):
    """Relations accepted a generator assignment that is not a homomorphism."""


class UnknownFixture(DerivlabError, KeyError):
    pass


class ParseError(DerivlabError, ValueError):
    pass


class ValidationErrors(DerivlabError, ValueError):
    """Every problem found in a scenario, collected rather than stopping at the first."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)
