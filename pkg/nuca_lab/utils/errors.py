from typing import Iterable, Tuple


class NucaError(Exception):
    """Base class of every error raised by nuca_lab"""


class CoordinateBoundError(NucaError, ValueError):
    """A coordinate exceeds the configured safe bound"""


class DomainError(NucaError, ValueError):
    """A cell lies outside a distribution's domain or has the wrong dimension"""


class ClosureError(DomainError):
    """A rule distribution references neighbors outside its own domain"""

    def __init__(self, violations):
        self.violations = tuple(violations)
        first = self.violations[0] if self.violations else None
        super().__init__(
            f"Closure violated at {len(self.violations)} cell(s); first: {first}"
        )


class RuleError(NucaError, ValueError):
    """A local rule is malformed or applied to an invalid neighborhood tuple"""


class SchemaError(NucaError, ValueError):
    """A JSON document does not match the expected schema"""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class OutsideKnownRegionError(NucaError):
    """An exact computation consulted a cell whose state is undefined"""

    def __init__(self, cells: Iterable[Tuple[int, ...]]):
        self.cells = tuple(sorted(cells))
        shown = ', '.join(str(c) for c in self.cells[:8])
        more = '' if len(self.cells) <= 8 else f" (+{len(self.cells) - 8} more)"
        super().__init__(
            f"outside known region: {len(self.cells)} uncovered cell(s): {shown}{more}"
        )


class MemoryBudgetError(NucaError, MemoryError):
    """A planned evolution would not fit in the available memory"""
