"""Exception hierarchy for critlat.

Every error raised by the library derives from CritlatError, so CLI code can
catch one type and map it to exit code 2.
"""


class CritlatError(Exception):
    """Base class for all critlat errors."""


# --- lattice construction / validation ---

class DuplicateLabel(CritlatError):
    pass


class UnknownElement(CritlatError):
    pass


class CycleDetected(CritlatError):
    pass


class NotALattice(CritlatError):
    """Some pair of elements has no meet or no join. Carries the pair."""

    def __init__(self, pair, kind):
        self.pair = pair
        self.kind = kind  # "meet", "join", or "universe"
        if kind == "universe":
            super().__init__("lattice universe must be nonempty")
        else:
            super().__init__(f"no {kind} exists for pair {pair}")


class SizeCapExceeded(CritlatError):
    pass


class BudgetExceeded(CritlatError):
    pass


class FormatError(CritlatError):
    """Malformed lattice/diagram/lifting file."""


# --- partial lattices ---

class NotSpanning(CritlatError):
    pass


class NotASublattice(CritlatError):
    pass


# --- congruences ---

class NotACongruence(CritlatError):
    pass


class HostMismatch(CritlatError):
    pass


class ConNotBoolean(CritlatError):
    pass


class ArityMismatch(CritlatError):
    pass


# --- varieties ---

class NotSubdirectlyIrreducible(CritlatError):
    pass


# --- diagrams ---

class EmptyChainSet(CritlatError):
    pass


class BadChainShapes(CritlatError):
    pass


class RestrictionMismatch(CritlatError):
    pass


class NotLowerSubset(CritlatError):
    pass


class PreconditionFailed(CritlatError):
    pass


class TooFewElements(CritlatError):
    pass


class PosetMismatch(CritlatError):
    pass


# --- liftings ---

class MissingDirectChain(CritlatError):
    """No direct congruence chain exists at the named node."""

    def __init__(self, node, message=""):
        self.node = node
        super().__init__(message or f"no direct congruence chain at node {node}")


class VerificationFailed(CritlatError):
    """An extracted embedding failed one of its postcondition checks."""

    def __init__(self, witness, message=""):
        self.witness = witness
        super().__init__(message or f"verification failed at {witness}")


class HypothesisUnmet(CritlatError):
    pass
