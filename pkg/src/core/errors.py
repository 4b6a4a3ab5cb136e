"""
Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it.
"""
from typing import Optional, Sequence


class PosetGridError(Exception):
    exit_code = 1


# ==================== Input errors (exit 4) ====================

class InputError(PosetGridError):
    exit_code = 4


class CycleError(InputError):
    """The closure of a relation contains x < x."""

    def __init__(self, cycle: Sequence[str]):
        self.cycle = tuple(cycle)
        super().__init__("relation contains a cycle: " + " < ".join(self.cycle + self.cycle[:1]))


class ShapeMismatch(InputError):
    pass


class ShapeError(InputError):
    pass


class RangeError(InputError):
    pass


class DivisibilityError(InputError):
    pass


class SizeError(InputError):
    pass


class NotAChain(InputError):
    pass


class PrecondError(InputError):
    pass


class ThresholdNotMet(InputError):
    pass


# ==================== Search outcomes ====================

class BudgetExceeded(PosetGridError):
    exit_code = 3

    def __init__(self, nodes: int, message: Optional[str] = None):
        self.nodes = nodes
        super().__init__(message or f"node budget exhausted after {nodes} nodes")


class ContractUnmet(PosetGridError):
    exit_code = 2


# ==================== Internal bug signals ====================

class ExtractionFailed(PosetGridError):
    exit_code = 1


class InvariantViolation(PosetGridError):
    exit_code = 1
