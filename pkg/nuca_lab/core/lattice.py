"""
Cells, windows, patterns and finite stand-ins for configurations.

A configuration of a NUCA assigns a state to every cell of Z^d (or of N). Only
finite windows are ever observed, so a configuration is represented by a
Pattern on a finite window plus a fill policy for every other cell.
"""
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from nuca_lab.utils.constants import SAFE_COORDINATE_BOUND
from nuca_lab.utils.errors import CoordinateBoundError, DomainError, OutsideKnownRegionError

Cell = Tuple[int, ...]

_MASK64 = (1 << 64) - 1


def check_cell(cell: Iterable[int], bound: int = SAFE_COORDINATE_BOUND) -> Cell:
    """Normalise a cell to a tuple of ints and reject coordinates above the bound"""
    coords = tuple(int(c) for c in cell)
    if not coords:
        raise DomainError("A cell needs at least one coordinate")
    for c in coords:
        if abs(c) > bound:
            raise CoordinateBoundError(f"Coordinate {c} of cell {coords} exceeds safe bound {bound}")
    return coords


def add_cells(a: Cell, b: Cell, bound: int = SAFE_COORDINATE_BOUND) -> Cell:
    if len(a) != len(b):
        raise DomainError(f"Dimension mismatch: {a} + {b}")
    return check_cell((x + y for x, y in zip(a, b)), bound)


def sub_cells(a: Cell, b: Cell, bound: int = SAFE_COORDINATE_BOUND) -> Cell:
    if len(a) != len(b):
        raise DomainError(f"Dimension mismatch: {a} - {b}")
    return check_cell((x - y for x, y in zip(a, b)), bound)


@dataclass(frozen=True, eq=False)
class Window:
    """
    Finite, non-empty set of cells.

    Cells are kept sorted lexicographically. Box windows also remember their
    corners so that box arithmetic stays cheap.
    """
    cells: Tuple[Cell, ...]
    lo: Optional[Cell] = None
    hi: Optional[Cell] = None

    def __post_init__(self):
        if not self.cells:
            raise DomainError("A window must contain at least one cell")
        d = len(self.cells[0])
        if any(len(c) != d for c in self.cells):
            raise DomainError("All cells of a window must share one dimension")

    @classmethod
    def box(cls, lo: Iterable[int], hi: Iterable[int], bound: int = SAFE_COORDINATE_BOUND) -> 'Window':
        lo, hi = check_cell(lo, bound), check_cell(hi, bound)
        if len(lo) != len(hi):
            raise DomainError(f"Box corners {lo} and {hi} differ in dimension")
        if any(a > b for a, b in zip(lo, hi)):
            raise DomainError(f"Box needs lo <= hi componentwise, got {lo} > {hi}")
        ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
        return cls(tuple(itertools.product(*ranges)), lo, hi)

    @classmethod
    def interval(cls, a: int, b: int, bound: int = SAFE_COORDINATE_BOUND) -> 'Window':
        """One-dimensional box [a, b]"""
        return cls.box((a,), (b,), bound)

    @classmethod
    def from_cells(cls, cells: Iterable[Iterable[int]], bound: int = SAFE_COORDINATE_BOUND) -> 'Window':
        normalised = sorted({check_cell(c, bound) for c in cells})
        return cls(tuple(normalised))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Window):
            return NotImplemented
        return self.cells == other.cells

    def __hash__(self) -> int:
        return hash(self.cells)

    @property
    def dimension(self) -> int:
        return len(self.cells[0])

    @property
    def is_box(self) -> bool:
        return self.lo is not None

    @cached_property
    def cell_set(self) -> FrozenSet[Cell]:
        return frozenset(self.cells)

    @cached_property
    def positions(self) -> Dict[Cell, int]:
        return {c: i for i, c in enumerate(self.cells)}

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells)

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self.cell_set

    def issubset(self, other: 'Window') -> bool:
        return self.cell_set <= other.cell_set

    def shifted(self, x: Cell, bound: int = SAFE_COORDINATE_BOUND) -> 'Window':
        """The window D - x"""
        cells = tuple(sub_cells(c, x, bound) for c in self.cells)
        if self.is_box:
            return Window(cells, sub_cells(self.lo, x, bound), sub_cells(self.hi, x, bound))
        return Window(cells)

    def bounding_box(self) -> Tuple[Cell, Cell]:
        if self.is_box:
            return self.lo, self.hi
        d = self.dimension
        lo = tuple(min(c[i] for c in self.cells) for i in range(d))
        hi = tuple(max(c[i] for c in self.cells) for i in range(d))
        return lo, hi

    def __repr__(self) -> str:
        if self.is_box:
            return f"Window.box({self.lo}, {self.hi})"
        if len(self.cells) <= 6:
            return f"Window({list(self.cells)})"
        return f"Window(<{len(self.cells)} cells>)"


@dataclass(frozen=True)
class Pattern:
    """States on a finite window, aligned with the window's sorted cells"""
    domain: Window
    values: Tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.domain):
            raise DomainError(
                f"Pattern has {len(self.values)} states for {len(self.domain)} cells"
            )
        if any(v < 0 for v in self.values):
            raise DomainError("Pattern states must be non-negative")

    @classmethod
    def from_mapping(cls, states: Mapping[Cell, int]) -> 'Pattern':
        domain = Window.from_cells(states.keys())
        return cls(domain, tuple(int(states[c]) for c in domain.cells))

    @classmethod
    def from_array(cls, domain: Window, values: Sequence[int]) -> 'Pattern':
        return cls(domain, tuple(int(v) for v in values))

    @classmethod
    def uniform(cls, domain: Window, state: int) -> 'Pattern':
        return cls(domain, (int(state),) * len(domain))

    @classmethod
    def from_list(cls, start: int, values: Sequence[int]) -> 'Pattern':
        """One-dimensional pattern on [start, start + len(values) - 1]"""
        return cls(Window.interval(start, start + len(values) - 1), tuple(int(v) for v in values))

    def __getitem__(self, cell) -> int:
        key = tuple(cell)
        try:
            return self.values[self.domain.positions[key]]
        except KeyError:
            raise DomainError(f"Cell {key} is not in the pattern's domain")

    def get(self, cell, default: Optional[int] = None) -> Optional[int]:
        idx = self.domain.positions.get(tuple(cell))
        return default if idx is None else self.values[idx]

    def items(self) -> Iterator[Tuple[Cell, int]]:
        return zip(self.domain.cells, self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.uint8)

    def as_dict(self) -> Dict[Cell, int]:
        return dict(self.items())

    def restrict(self, window: Window) -> 'Pattern':
        return Pattern(window, tuple(self[c] for c in window.cells))


def shift_pattern(p: Pattern, x: Iterable[int], bound: int = SAFE_COORDINATE_BOUND) -> Pattern:
    """sigma_x(p): the pattern on p.domain - x with sigma_x(p)(y) = p(y + x)"""
    x = check_cell(x, bound)
    if len(x) != p.domain.dimension:
        raise DomainError(f"Shift {x} does not match pattern dimension {p.domain.dimension}")
    # subtracting a constant keeps the lexicographic order, so values stay aligned
    return Pattern(p.domain.shifted(x, bound), p.values)


# Fill policies

def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class UniformState:
    state: int

    def states(self, cells: Sequence[Cell], q: int) -> np.ndarray:
        if not 0 <= self.state < q:
            raise DomainError(f"Uniform fill state {self.state} outside [0, {q})")
        return np.full(len(cells), self.state, dtype=np.uint8)

    def describe(self) -> str:
        return f"uniform:{self.state}"


@dataclass(frozen=True)
class Undefined:

    def states(self, cells: Sequence[Cell], q: int) -> np.ndarray:
        if len(cells):
            raise OutsideKnownRegionError(cells)
        return np.zeros(0, dtype=np.uint8)

    def describe(self) -> str:
        return "undefined"


@dataclass(frozen=True)
class SeededRandom:
    """
    Reproducible pseudo-random fill.

    The state of a cell is a hash of (seed, cell), so it does not depend on
    which other cells were queried or in which order.
    """
    seed: int

    def states(self, cells: Sequence[Cell], q: int) -> np.ndarray:
        if not len(cells):
            return np.zeros(0, dtype=np.uint8)
        coords = np.asarray(cells, dtype=np.int64).reshape(len(cells), -1).view(np.uint64)
        h = _splitmix64(np.full(len(cells), self.seed & _MASK64, dtype=np.uint64))
        for axis in range(coords.shape[1]):
            h = _splitmix64(h ^ coords[:, axis])
        return (h % np.uint64(q)).astype(np.uint8)

    def describe(self) -> str:
        return f"seed:{self.seed}"


FillPolicy = Union[UniformState, Undefined, SeededRandom]


@dataclass(frozen=True)
class WindowConfiguration:
    """
    Known states on a finite window plus a fill policy for everything else.

    ``known`` may be None when the fill alone describes the configuration
    (uniform or seeded starts).
    """
    known: Optional[Pattern] = None
    fill: FillPolicy = field(default_factory=Undefined)

    @classmethod
    def uniform(cls, state: int) -> 'WindowConfiguration':
        return cls(None, UniformState(state))

    @classmethod
    def seeded(cls, seed: int) -> 'WindowConfiguration':
        return cls(None, SeededRandom(seed))

    @classmethod
    def from_pattern(cls, pattern: Pattern, fill: Optional[FillPolicy] = None) -> 'WindowConfiguration':
        return cls(pattern, fill if fill is not None else Undefined())

    def uncovered(self, cells: Iterable[Cell]) -> List[Cell]:
        """Cells that would consult an Undefined fill"""
        if not isinstance(self.fill, Undefined):
            return []
        known = self.known.domain.cell_set if self.known is not None else frozenset()
        return [c for c in cells if c not in known]

    def states_for(self, cells: Sequence[Cell], q: int) -> np.ndarray:
        """States of the given cells as a uint8 array aligned with ``cells``"""
        out = np.empty(len(cells), dtype=np.uint8)
        missing_idx = []
        missing_cells = []
        positions = self.known.domain.positions if self.known is not None else {}
        values = self.known.values if self.known is not None else ()
        for i, c in enumerate(cells):
            j = positions.get(c)
            if j is None:
                missing_idx.append(i)
                missing_cells.append(c)
            else:
                v = values[j]
                if v >= q:
                    raise DomainError(f"Known state {v} at {c} outside [0, {q})")
                out[i] = v
        if missing_cells:
            out[np.asarray(missing_idx, dtype=np.int64)] = self.fill.states(missing_cells, q)
        return out

    def state_at(self, cell: Iterable[int], q: int) -> int:
        c = tuple(cell)
        return int(self.states_for([c], q)[0])

    def restrict(self, window: Window, q: int) -> Pattern:
        return Pattern.from_array(window, self.states_for(window.cells, q))

    def overridden(self, states: Mapping[Cell, int]) -> 'WindowConfiguration':
        """Copy of this configuration with some cells set explicitly"""
        merged = self.known.as_dict() if self.known is not None else {}
        merged.update({tuple(c): int(v) for c, v in states.items()})
        return WindowConfiguration(Pattern.from_mapping(merged), self.fill)

    def describe(self) -> str:
        if self.known is None:
            return self.fill.describe()
        return f"pattern({len(self.known.domain)} cells)+{self.fill.describe()}"


def cylinder_member(c: WindowConfiguration, base: Pattern, q: int) -> bool:
    """True iff c agrees with ``base`` on every cell of base.domain; q is the state count of c"""
    states = c.states_for(base.domain.cells, q)
    return all(int(s) == v for s, v in zip(states, base.values))
