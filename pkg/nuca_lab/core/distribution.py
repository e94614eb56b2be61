"""
Finitely described rule distributions: which local rule sits at which cell.
"""
from dataclasses import dataclass, field
from functools import cached_property
from math import prod
from typing import Dict, Iterable, List, NamedTuple, Tuple, Union

from nuca_lab.core.lattice import Cell, check_cell
from nuca_lab.core.rules import LocalRule, RuleSet
from nuca_lab.core.spiral_map import SpiralMap
from nuca_lab.utils.constants import ORIENTATIONS
from nuca_lab.utils.errors import ClosureError, DomainError

FULL = 'full'
HALFLINE = 'halfline'
DOMAINS = (FULL, HALFLINE)


@dataclass(frozen=True)
class Uniform:
    rule: str


@dataclass(frozen=True)
class FiniteExceptions:
    default: str
    exceptions: Tuple[Tuple[Cell, str], ...]

    @classmethod
    def of(cls, default: str, exceptions: Dict[Cell, str]) -> 'FiniteExceptions':
        return cls(default, tuple(sorted((check_cell(c), r) for c, r in exceptions.items())))

    @cached_property
    def mapping(self) -> Dict[Cell, str]:
        return dict(self.exceptions)


@dataclass(frozen=True)
class Rays1D:
    """``left`` below ``start``, ``explicit`` on [start, end], ``right`` above ``end``"""
    left: str
    start: int
    explicit: Tuple[str, ...]
    right: str

    @property
    def end(self) -> int:
        return self.start + len(self.explicit) - 1


@dataclass(frozen=True)
class Periodic:
    """
    Axis-aligned periods p_1..p_d; ``fundamental`` lists the rules of the box
    [0, p_1 - 1] x ... x [0, p_d - 1] in lexicographic cell order.
    """
    periods: Tuple[int, ...]
    fundamental: Tuple[str, ...]


@dataclass(frozen=True)
class Spiral:
    """g at the origin; at s(k), k > 0, the rule oriented toward s(k - 1)"""
    origin: str
    oriented: Tuple[Tuple[str, str], ...]  # (compass letter, rule name)

    @cached_property
    def by_orientation(self) -> Dict[str, str]:
        return dict(self.oriented)


DistributionKind = Union[Uniform, FiniteExceptions, Rays1D, Periodic, Spiral]


class ClosureViolation(NamedTuple):
    cell: Cell
    rule: str
    offset: Cell
    neighbor: Cell


@dataclass(frozen=True)
class RuleDistribution:
    """
    Assignment of local rules to the cells of Z^d or of the half-line N.

    Distributions are validated on construction: kind parameters must name
    rules of the rule set and neighbors of every cell must stay inside the
    domain. ``checked=False`` skips the closure check so that a faulty
    distribution can still be inspected with validate_closure.
    """
    rule_set: RuleSet
    d: int
    domain: str
    kind: DistributionKind
    name: str = field(default='', compare=False)
    checked: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise DomainError(f"Unknown domain {self.domain!r}, expected one of {DOMAINS}")
        if self.d < 1:
            raise DomainError(f"Dimension must be >= 1, got {self.d}")
        if self.domain == HALFLINE and self.d != 1:
            raise DomainError("The half-line domain is one-dimensional")
        for rule_name in self.referenced_rules():
            rule = self.rule_set[rule_name]
            if rule.dimension != self.d:
                raise DomainError(
                    f"Rule {rule_name} is {rule.dimension}-dimensional, distribution has d={self.d}"
                )
        self._check_kind()
        if self.checked:
            violations = validate_closure(self)
            if violations:
                raise ClosureError(violations)

    def _check_kind(self):
        kind = self.kind
        if isinstance(kind, Rays1D):
            if self.d != 1:
                raise DomainError("Rays1D distributions are one-dimensional")
            if not kind.explicit:
                raise DomainError("Rays1D needs at least one explicit cell")
        elif isinstance(kind, Periodic):
            if len(kind.periods) != self.d or any(p < 1 for p in kind.periods):
                raise DomainError(f"Periodic needs {self.d} positive periods, got {kind.periods}")
            if len(kind.fundamental) != prod(kind.periods):
                raise DomainError(
                    f"Periodic fundamental pattern has {len(kind.fundamental)} rules, "
                    f"expected {prod(kind.periods)}"
                )
        elif isinstance(kind, Spiral):
            if self.d != 2 or self.domain != FULL:
                raise DomainError("Spiral distributions live on the full plane")
            missing = sorted(set(ORIENTATIONS.values()) - set(kind.by_orientation))
            if missing:
                raise DomainError(f"Spiral distribution lacks rules for orientations {missing}")
        elif isinstance(kind, FiniteExceptions):
            for cell, _ in kind.exceptions:
                if len(cell) != self.d:
                    raise DomainError(f"Exception cell {cell} does not have dimension {self.d}")
        elif not isinstance(kind, Uniform):
            raise DomainError(f"Unknown distribution kind {type(kind).__name__}")

    def referenced_rules(self) -> List[str]:
        kind = self.kind
        if isinstance(kind, Uniform):
            names = [kind.rule]
        elif isinstance(kind, FiniteExceptions):
            names = [kind.default] + [r for _, r in kind.exceptions]
        elif isinstance(kind, Rays1D):
            names = [kind.left, *kind.explicit, kind.right]
        elif isinstance(kind, Periodic):
            names = list(kind.fundamental)
        elif isinstance(kind, Spiral):
            names = [kind.origin] + [r for _, r in kind.oriented]
        else:
            names = []
        return sorted(set(names))

    @property
    def q(self) -> int:
        return self.rule_set.q

    def in_domain(self, cell: Cell) -> bool:
        if len(cell) != self.d:
            return False
        return self.domain == FULL or cell[0] >= 0

    def rule_name_at(self, x: Cell) -> str:
        x = tuple(x)
        if not self.in_domain(x):
            raise DomainError(f"Cell {x} is outside the {self.domain} domain (d={self.d})")
        kind = self.kind
        if isinstance(kind, Uniform):
            return kind.rule
        if isinstance(kind, FiniteExceptions):
            return kind.mapping.get(x, kind.default)
        if isinstance(kind, Rays1D):
            v = x[0]
            if v < kind.start:
                return kind.left
            if v > kind.end:
                return kind.right
            return kind.explicit[v - kind.start]
        if isinstance(kind, Periodic):
            index = 0
            for coord, period in zip(x, kind.periods):
                index = index * period + coord % period
            return kind.fundamental[index]
        # Spiral
        k = SpiralMap.index(x)
        if k == 0:
            return kind.origin
        prev = SpiralMap.cell(k - 1)
        direction = (prev[0] - x[0], prev[1] - x[1])
        return kind.by_orientation[ORIENTATIONS[direction]]

    def rule_at(self, x: Cell) -> LocalRule:
        return self.rule_set[self.rule_name_at(x)]

    def neighbors(self, x: Cell, pruned: bool = False) -> List[Cell]:
        """N_theta(x): the rule's offsets translated to x"""
        rule = self.rule_at(x)
        offsets = rule.essential_offsets() if pruned else rule.neighborhood
        return [tuple(a + b for a, b in zip(x, n)) for n in offsets]

    def describe(self) -> str:
        return self.name or f"{type(self.kind).__name__}({self.domain}, d={self.d})"


def rule_at(theta: RuleDistribution, x: Iterable[int]) -> LocalRule:
    return theta.rule_at(tuple(x))


def _closure_sample_cells(theta: RuleDistribution) -> List[Cell]:
    """Half-line cells that could reach below 0: those closer to 0 than the longest left reach"""
    reach = 0
    for name in theta.referenced_rules():
        for offset in theta.rule_set[name].neighborhood:
            reach = max(reach, -offset[0])
    return [(x,) for x in range(reach)]


def validate_closure(theta: RuleDistribution) -> List[ClosureViolation]:
    """
    Every neighbor x + n of a domain cell x must lie in the domain.

    Returns:
        List[ClosureViolation]: Empty when the distribution is closed
    """
    if theta.domain == FULL:
        return []
    violations = []
    for cell in _closure_sample_cells(theta):
        rule = theta.rule_at(cell)
        for offset in rule.neighborhood:
            neighbor = tuple(a + b for a, b in zip(cell, offset))
            if not theta.in_domain(neighbor):
                violations.append(ClosureViolation(cell, rule.name, offset, neighbor))
    return violations
