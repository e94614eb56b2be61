"""
Local rules as lookup tables and the rule sets built from them.

A table is indexed lexicographically by the neighbor states in declared
neighborhood order: the first offset is the most significant digit.
"""
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from nuca_lab.core.lattice import Cell, check_cell
from nuca_lab.utils.constants import ORIENTATIONS
from nuca_lab.utils.errors import RuleError

# Odometer rule f: left neighbor 0 keeps, 1 swaps 0<->1, 2 swaps 0<->2
ODOMETER_F_TABLE = (
    0, 1, 2,
    1, 0, 2,
    2, 1, 0,
)
# Three-cycle g: 0 -> 1 -> 2 -> 0
CYCLE_G_TABLE = (1, 2, 0)
# Candidate rule h: cycles when the left neighbor is 0, otherwise as f
CANDIDATE_H_TABLE = (
    1, 2, 0,
    1, 0, 2,
    2, 1, 0,
)

LINE_NEIGHBORHOOD: Tuple[Cell, ...] = ((-1,), (0,), (1,))
LEFT_NEIGHBORHOOD: Tuple[Cell, ...] = ((-1,), (0,))


@dataclass(frozen=True)
class LocalRule:
    """Finite lookup table over a neighborhood of integer offsets"""
    name: str
    q: int
    neighborhood: Tuple[Cell, ...]
    table: Tuple[int, ...]

    def __post_init__(self):
        if not self.name:
            raise RuleError("A rule needs a name")
        if self.q < 2:
            raise RuleError(f"Rule {self.name}: q must be at least 2, got {self.q}")
        if not self.neighborhood:
            raise RuleError(f"Rule {self.name}: neighborhood must not be empty")
        d = len(self.neighborhood[0])
        if any(len(n) != d for n in self.neighborhood):
            raise RuleError(f"Rule {self.name}: offsets of mixed dimension")
        if len(set(self.neighborhood)) != len(self.neighborhood):
            raise RuleError(f"Rule {self.name}: neighborhood offsets must be distinct")
        expected = self.q ** len(self.neighborhood)
        if len(self.table) != expected:
            raise RuleError(
                f"Rule {self.name}: table has {len(self.table)} entries, expected "
                f"q^m = {self.q}^{len(self.neighborhood)} = {expected}"
            )
        for i, out in enumerate(self.table):
            if not 0 <= out < self.q:
                raise RuleError(f"Rule {self.name}: table[{i}] = {out} outside [0, {self.q})")

    @classmethod
    def create(cls, name: str, q: int, neighborhood: Iterable[Iterable[int]], table: Iterable[int]) -> 'LocalRule':
        return cls(name, int(q), tuple(check_cell(n) for n in neighborhood), tuple(int(v) for v in table))

    @classmethod
    def from_function(cls, name: str, q: int, neighborhood: Iterable[Iterable[int]], fn) -> 'LocalRule':
        """Tabulate ``fn(states)`` over every neighbor-state tuple in lexicographic order"""
        neighborhood = tuple(check_cell(n) for n in neighborhood)
        table = [fn(states) for states in itertools.product(range(q), repeat=len(neighborhood))]
        return cls(name, q, neighborhood, tuple(int(v) for v in table))

    @property
    def arity(self) -> int:
        return len(self.neighborhood)

    @property
    def dimension(self) -> int:
        return len(self.neighborhood[0])

    @cached_property
    def weights(self) -> Tuple[int, ...]:
        m = self.arity
        return tuple(self.q ** (m - 1 - j) for j in range(m))

    @cached_property
    def table_array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.uint8)

    def index_of(self, states: Sequence[int]) -> int:
        if len(states) != self.arity:
            raise RuleError(
                f"Rule {self.name} expects {self.arity} neighbor states, got {len(states)}"
            )
        index = 0
        for s in states:
            if not 0 <= s < self.q:
                raise RuleError(f"Rule {self.name}: state {s} outside [0, {self.q})")
            index = index * self.q + s
        return index

    def apply(self, states: Sequence[int]) -> int:
        return self.table[self.index_of(states)]

    def essential_offsets(self) -> Tuple[Cell, ...]:
        """Offsets whose state can change the output for some neighborhood tuple"""
        return self._essential

    @cached_property
    def _essential(self) -> Tuple[Cell, ...]:
        cube = self.table_array.reshape((self.q,) * self.arity)
        essential = []
        for j, offset in enumerate(self.neighborhood):
            if np.any(cube != np.take(cube, [0], axis=j)):
                essential.append(offset)
        return tuple(essential)

    def with_neighborhood(self, name: str, neighborhood: Iterable[Iterable[int]]) -> 'LocalRule':
        """Same table read over a different (re-oriented) neighborhood"""
        return LocalRule(name, self.q, tuple(check_cell(n) for n in neighborhood), self.table)


def apply_rule(r: LocalRule, neighbor_states: Sequence[int]) -> int:
    return r.apply(neighbor_states)


@dataclass(frozen=True)
class RuleSet:
    """Named local rules sharing one state count"""
    q: int
    rules: Tuple[LocalRule, ...]

    def __post_init__(self):
        if not self.rules:
            raise RuleError("A rule set needs at least one rule")
        names = [r.name for r in self.rules]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise RuleError(f"Duplicate rule names: {duplicates}")
        for r in self.rules:
            if r.q != self.q:
                raise RuleError(f"Rule {r.name} has q={r.q}, rule set has q={self.q}")

    @classmethod
    def of(cls, *rules: LocalRule) -> 'RuleSet':
        return cls(rules[0].q, tuple(rules))

    @cached_property
    def by_name(self) -> Dict[str, LocalRule]:
        return {r.name: r for r in self.rules}

    @cached_property
    def index_by_name(self) -> Dict[str, int]:
        return {r.name: i for i, r in enumerate(self.rules)}

    @property
    def names(self) -> List[str]:
        return [r.name for r in self.rules]

    def __getitem__(self, name: str) -> LocalRule:
        try:
            return self.by_name[name]
        except KeyError:
            raise RuleError(f"No rule named {name!r} in rule set {self.names}")

    def __contains__(self, name: str) -> bool:
        return name in self.by_name


# Builtin rules

def right_shift(q: int = 2, name: str = 'shift_right') -> LocalRule:
    """f(p) = p(-1) over the neighborhood {-1, 0, 1}"""
    return LocalRule.from_function(name, q, LINE_NEIGHBORHOOD, lambda s: s[0])


def left_shift(q: int = 2, name: str = 'shift_left') -> LocalRule:
    """f(p) = p(1) over the neighborhood {-1, 0, 1}"""
    return LocalRule.from_function(name, q, LINE_NEIGHBORHOOD, lambda s: s[2])


def toggle(name: str = 'toggle') -> LocalRule:
    """g(p) = p(0) xor 1 over the neighborhood {-1, 0, 1}"""
    return LocalRule.from_function(name, 2, LINE_NEIGHBORHOOD, lambda s: s[1] ^ 1)


def odometer_f(name: str = 'f') -> LocalRule:
    return LocalRule(name, 3, LEFT_NEIGHBORHOOD, ODOMETER_F_TABLE)


def cycle_g(d: int = 1, name: str = 'g') -> LocalRule:
    return LocalRule(name, 3, ((0,) * d,), CYCLE_G_TABLE)


def candidate_h(name: str = 'h') -> LocalRule:
    return LocalRule(name, 3, LEFT_NEIGHBORHOOD, CANDIDATE_H_TABLE)


def pinned_left_boundary(rule: LocalRule, state: int = 0, name: str = '') -> LocalRule:
    """
    Restrict a two-cell rule {-1, 0} to the cell itself by fixing the left
    neighbor to ``state``.
    """
    if rule.neighborhood != LEFT_NEIGHBORHOOD:
        raise RuleError(f"Rule {rule.name} does not use the neighborhood {{-1, 0}}")
    table = rule.table[state * rule.q:(state + 1) * rule.q]
    return LocalRule(name or f"{rule.name}_boundary", rule.q, ((0,),), table)


def oriented_f(direction: Tuple[int, int]) -> LocalRule:
    """Odometer rule f in the plane, reading its left neighbor at ``direction``"""
    if direction not in ORIENTATIONS:
        raise RuleError(f"Direction {direction} is not a unit offset")
    return odometer_f().with_neighborhood(f"f_{ORIENTATIONS[direction]}", (direction, (0, 0)))
