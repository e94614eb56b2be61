"""
Finite checks of dynamical properties.

Statements about infinite configurations are only ever checked through
finite invariants that hold exactly: a witness re-verified by exact
evolution, a state that two steps leave unchanged, a trace that depends on
one cell only.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from nuca_lab.configs.engine_config import EngineConfig
from nuca_lab.core.distribution import FULL, Rays1D, RuleDistribution
from nuca_lab.core.engine import InfluenceClosure, evolve_exact, influence_closure
from nuca_lab.core.lattice import Cell, Pattern, Window, WindowConfiguration, add_cells, check_cell, cylinder_member
from nuca_lab.core.period_detector import PeriodReport, minimal_period
from nuca_lab.core.report import VerificationReport
from nuca_lab.core.rules import RuleSet, left_shift, right_shift, toggle
from nuca_lab.utils.constants import DEFAULT_CONE_CAP, DEFAULT_RECURRENCE_RADIUS, DEFAULT_TRACE_BUDGET
from nuca_lab.utils.errors import DomainError

# Largest box scanned by recurrence_offsets
RECURRENCE_SCAN_LIMIT = 10 ** 7


def build_example1() -> RuleDistribution:
    """Right shift on negative cells, the toggle at 0, left shift on positive cells"""
    rule_set = RuleSet.of(right_shift(2), toggle(), left_shift(2))
    return RuleDistribution(rule_set, 1, FULL, Rays1D('shift_right', 0, ('toggle',), 'shift_left'), name='example1')


@dataclass(frozen=True)
class TransitivityWitness:
    """
    A configuration e' in Cyl(c, D) that reaches e on e's window after r steps.
    """
    r: int
    e_prime: Pattern
    c_window: Pattern
    D: Window
    e_window: Pattern
    verified: bool

    def as_dict(self) -> Dict[str, object]:
        lo, hi = self.e_prime.domain.bounding_box()
        return {
            'r': self.r,
            'e_prime': {'start': lo[0], 'states': list(self.e_prime.values)},
            'verified': self.verified,
        }


def _witness_time(c0: int, e0: int, D: Window) -> int:
    radius = max(abs(c[0]) for c in D.cells)
    r = max(radius, 1)
    if r % 2 != (c0 != e0):
        r += 1
    return r


def strong_transitivity_witness(
    c_window: Pattern,
    e_window: Pattern,
    D: Window,
    theta: Optional[RuleDistribution] = None,
) -> TransitivityWitness:
    """
    Build and verify e' with e'|D = c|D and H^r(e')|[-m, m] = e.

    e' lives on [-(m + r), m + r]: it copies e shifted outward by r on both
    sides, so the shifts carry it back in, and it copies c on [-r, r]. Cells
    of [-r, r] outside c's window are set to 0; the shifts move them out of
    [-m, m] within r steps. r is the smallest time with D inside [-r, r]
    whose parity turns c(0) into e(0) under the toggle.

    Args:
        c_window: Source pattern; must cover D and the origin
        e_window: Target pattern on a box [-m, m]
        D: Cells on which e' must agree with c
        theta: Distribution to verify against, Example 1 by default

    Returns:
        TransitivityWitness: with ``verified`` set by an independent exact evolution
    """
    theta = theta or build_example1()
    if D.dimension != 1 or c_window.domain.dimension != 1 or e_window.domain.dimension != 1:
        raise DomainError("Transitivity witnesses are built on the line")
    if not D.issubset(c_window.domain):
        raise DomainError(f"D = {D} is not inside the source window")
    if (0,) not in c_window.domain or (0,) not in e_window.domain:
        raise DomainError("Both windows must contain the origin")
    m = e_window.domain.bounding_box()[1][0]
    if e_window.domain != Window.interval(-m, m):
        raise DomainError(f"Target window must be a box [-m, m], got {e_window.domain}")

    r = _witness_time(c_window[(0,)], e_window[(0,)], D)
    states = {}
    for x in range(-(m + r), m + r + 1):
        if x < -r:
            states[(x,)] = e_window[(x + r,)]
        elif x > r:
            states[(x,)] = e_window[(x - r,)]
        else:
            states[(x,)] = c_window.get((x,), 0)
    e_prime = Pattern.from_mapping(states)

    init = WindowConfiguration.from_pattern(e_prime)
    final = evolve_exact(theta, init, e_window.domain, r).final
    verified = final == e_window and cylinder_member(init, c_window.restrict(D), theta.q)
    return TransitivityWitness(r, e_prime, c_window, D, e_window, verified)


def _random_patterns(rng: np.random.Generator, window: Window, count: int, q: int = 2) -> List[Pattern]:
    values = rng.integers(0, q, size=(count, len(window)))
    return [Pattern.from_array(window, row) for row in values]


def transitivity_witness_report(samples: int, radius: int = 4, seed: int = 0) -> VerificationReport:
    """Random c, e on [-radius, radius], D = [-radius/2, radius/2]; every witness must verify"""
    theta = build_example1()
    rng = np.random.default_rng(seed)
    window = Window.interval(-radius, radius)
    D = Window.interval(-(radius // 2), radius // 2)
    sources = _random_patterns(rng, window, samples)
    targets = _random_patterns(rng, window, samples)
    failures = []
    times = set()
    for i, (c, e) in enumerate(zip(sources, targets)):
        witness = strong_transitivity_witness(c, e, D, theta)
        times.add(witness.r)
        if not witness.verified:
            failures.append(i)
    details: Dict[str, object] = {'witnesses': samples, 'times': sorted(times)}
    if failures:
        details['failure'] = f"witness {failures[0]} does not re-verify"
    return VerificationReport('example1-witness', {'samples': samples, 'radius': radius, 'seed': seed}, not failures, details)


def check_origin_invariant_H2(samples: int, seed: int = 0) -> VerificationReport:
    """
    Two steps of Example 1 leave cell 0 unchanged, so cell 0's state
    separates the cylinders of H^2 orbits.
    """
    theta = build_example1()
    window = Window.interval(-2, 2)
    origin = Window(((0,),))
    rng = np.random.default_rng(seed)
    for i, pattern in enumerate(_random_patterns(rng, window, samples)):
        states = evolve_exact(theta, WindowConfiguration.from_pattern(pattern), origin, 2).states[:, 0]
        if states[2] != states[0]:
            return VerificationReport('example1-h2', {'samples': samples, 'seed': seed}, False, {
                'failure': f"sample {i}: cell 0 goes {states[0]} -> {states[2]} in two steps",
            })
    return VerificationReport('example1-h2', {'samples': samples, 'seed': seed}, True, {'checked': samples})


def check_weak_mixing_obstruction(
    samples: int,
    steps: int = 10 ** 4,
    seed: int = 0,
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    """
    Cell 0's trace depends on c(0) only: pairs agreeing at 0 share it for
    every step, pairs differing at 0 stay complementary.

    Uses pruned cones; the toggle reads no neighbor, so the cone is {0}.
    """
    theta = build_example1()
    origin = Window(((0,),))
    rng = np.random.default_rng(seed)
    params = {'samples': samples, 'steps': steps, 'seed': seed}
    for i in range(samples):
        s0 = int(rng.integers(0, 2))
        base = WindowConfiguration.seeded(int(rng.integers(0, 2 ** 31))).overridden({(0,): s0})
        same = WindowConfiguration.seeded(int(rng.integers(0, 2 ** 31))).overridden({(0,): s0})
        flipped = WindowConfiguration.seeded(int(rng.integers(0, 2 ** 31))).overridden({(0,): 1 - s0})
        traces = [
            evolve_exact(theta, init, origin, steps, pruned=True, config=config).states[:, 0]
            for init in (base, same, flipped)
        ]
        if not np.array_equal(traces[0], traces[1]):
            t = int(np.flatnonzero(traces[0] != traces[1])[0])
            return VerificationReport('example1-trace', params, False, {
                'failure': f"pair {i} agreeing at 0 splits at t={t}",
            })
        if not np.array_equal(traces[0], 1 - traces[2]):
            t = int(np.flatnonzero(traces[0] == traces[2])[0])
            return VerificationReport('example1-trace', params, False, {
                'failure': f"pair {i} differing at 0 agrees at t={t}",
            })
    return VerificationReport('example1-trace', params, True, {'pairs': samples})


@dataclass(frozen=True)
class RecurrenceOffsets:
    D: Window
    offsets: Tuple[Cell, ...]
    search_radius: int

    def as_dict(self) -> Dict[str, object]:
        return {
            'offsets': [list(o) for o in self.offsets],
            'count': len(self.offsets),
            'search_radius': self.search_radius,
        }

    def nearest(self, count: int) -> Tuple[Cell, ...]:
        """Up to ``count`` offsets, smallest max-norm first"""
        return tuple(sorted(self.offsets, key=lambda o: (max(abs(v) for v in o), o))[:count])


def recurrence_offsets(theta: RuleDistribution, D: Window, radius: int = DEFAULT_RECURRENCE_RADIUS) -> RecurrenceOffsets:
    """
    Every x != 0 with max-norm <= radius such that theta(y + x) = theta(y) for all y in D.

    Rules are tabulated once on the box spanned by D and the radius; boxes
    above RECURRENCE_SCAN_LIMIT cells are refused, so two-dimensional
    distributions need a radius well below the default.
    """
    if radius < 0:
        raise ValueError(f"Search radius must be non-negative, got {radius}")
    if D.dimension != theta.d:
        raise DomainError(f"Window is {D.dimension}-dimensional, distribution has d={theta.d}")
    lo, hi = D.bounding_box()
    box_lo = np.asarray(lo) - radius
    shape = tuple(int(b - a) + 2 * radius + 1 for a, b in zip(lo, hi))
    if int(np.prod(shape, dtype=np.float64)) > RECURRENCE_SCAN_LIMIT:
        raise ValueError(f"Recurrence scan of {shape} cells exceeds the limit {RECURRENCE_SCAN_LIMIT}")

    cells = np.indices(shape).reshape(theta.d, -1).T + box_lo
    index = theta.rule_set.index_by_name
    ids = np.fromiter(
        (index[theta.rule_name_at(tuple(c))] if theta.in_domain(tuple(c)) else -1 for c in cells.tolist()),
        dtype=np.int64,
        count=len(cells),
    ).reshape(shape)

    span = 2 * radius + 1
    mask = np.ones((span,) * theta.d, dtype=bool)
    for y in D.cells:
        rel = tuple(int(v - a) for v, a in zip(y, box_lo))
        own = ids[rel]
        if own < 0:
            raise DomainError(f"Cell {y} of the window is outside the domain")
        block = ids[tuple(slice(c - radius, c + radius + 1) for c in rel)]
        mask &= block == own
    mask[(radius,) * theta.d] = False
    offsets = tuple(tuple(int(v) - radius for v in row) for row in np.argwhere(mask))
    return RecurrenceOffsets(D, offsets, radius)


def recurrence_report(theta: RuleDistribution, D: Window, radius: int = DEFAULT_RECURRENCE_RADIUS) -> VerificationReport:
    """recurrence_offsets as a report; an empty result is a finding, not a failure"""
    result = recurrence_offsets(theta, D, radius)
    params = {'distribution': theta.name, 'window': [list(c) for c in D.cells], 'radius': radius}
    return VerificationReport('recurrence', params, True, result.as_dict())


@dataclass(frozen=True)
class CellPeriods:
    cell: Cell
    periods: Tuple[PeriodReport, ...]

    @property
    def consistent(self) -> bool:
        values = {p.minimal_period for p in self.periods}
        return len(values) == 1 and None not in values

    @property
    def period(self) -> Optional[int]:
        return self.periods[0].minimal_period if self.consistent else None


def trace_period_probe(
    theta: RuleDistribution,
    cells: Sequence,
    inits: Sequence[WindowConfiguration],
    t_max: int = DEFAULT_TRACE_BUDGET,
    pruned: bool = True,
    config: Optional[EngineConfig] = None,
    offsets: Optional[RecurrenceOffsets] = None,
    max_copies: int = 4,
) -> VerificationReport:
    """
    Minimal trace periods per cell across starts.

    A cell passes when every start gives it the same Exact period. Cones are
    pruned to essential offsets by default; the traces are the same, and the
    declared cone of Example 1 grows linearly with t_max.

    With ``offsets`` the copies of the first cell are taken from the nearest
    recurrence offsets (the first cell must lie in ``offsets.D``) and evolved
    too; ``copies_agree`` then says whether each copy has the first cell's
    period. Without them it compares the given cells among themselves.
    """
    cells = [check_cell(c) for c in cells]
    if not cells:
        raise ValueError('At least one cell is required')
    copies: Dict[str, Cell] = {}
    if offsets is not None:
        if cells[0] not in offsets.D:
            raise DomainError(f"Cell {cells[0]} is not in the window the offsets were searched for")
        for o in offsets.nearest(max_copies):
            copies[','.join(map(str, o))] = add_cells(cells[0], o)
    tracked = list(dict.fromkeys(cells + list(copies.values())))
    targets = Window.from_cells(tracked)
    per_cell: Dict[Cell, List[PeriodReport]] = {c: [] for c in tracked}
    for init in inits:
        evolution = evolve_exact(theta, init, targets, t_max, pruned=pruned, config=config)
        for c in tracked:
            per_cell[c].append(minimal_period(evolution.column(c)))
    results = {c: CellPeriods(c, tuple(per_cell[c])) for c in tracked}
    details: Dict[str, object] = {
        ','.join(map(str, c)): {
            'periods': [p.minimal_period for p in results[c].periods],
            'consistent': results[c].consistent,
        }
        for c in cells
    }
    consistent = all(results[c].consistent and all(p.exact for p in results[c].periods) for c in cells)
    if offsets is None:
        details['copies_agree'] = consistent and len({results[c].period for c in cells}) == 1
    else:
        details['copies'] = {label: results[cell].period for label, cell in copies.items()}
        origin = results[cells[0]].period
        details['copies_agree'] = bool(copies) and all(results[cell].period == origin for cell in copies.values())
    if not consistent:
        details['failure'] = 'trace periods depend on the start'
    params = {
        'cells': [list(c) for c in cells],
        'inits': [i.describe() for i in inits],
        't_max': t_max,
        'pruned': pruned,
    }
    return VerificationReport('trace-period', params, consistent, details)


def cone_boundedness_probe(
    theta: RuleDistribution, cells: Sequence, cap: int = DEFAULT_CONE_CAP, pruned: bool = False
) -> Dict[Cell, InfluenceClosure]:
    """
    Influence closure per cell. A finite closure bounds every cone of the
    cell and so witnesses equicontinuity there; reaching the cap is
    inconclusive and says nothing about sensitivity.
    """
    return {check_cell(c): influence_closure(theta, c, cap, pruned) for c in cells}


def cone_boundedness_report(
    theta: RuleDistribution, cells: Sequence, cap: int = DEFAULT_CONE_CAP, pruned: bool = False
) -> VerificationReport:
    closures = cone_boundedness_probe(theta, cells, cap, pruned)
    details = {
        ','.join(map(str, cell)): {
            'label': result.label,
            'size': len(result.window) if result.finite else None,
            'growth_tail': list(result.growth[-3:]),
        }
        for cell, result in closures.items()
    }
    params = {'cells': [list(c) for c in closures], 'cap': cap, 'pruned': pruned}
    return VerificationReport('cone-boundedness', params, True, details)
