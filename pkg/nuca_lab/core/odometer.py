"""
The three-state odometer on the half-line and its candidate variant.

Rule g (the three-cycle) sits at cell 0 and rule f everywhere else. Reading
its left neighbor, f keeps the cell's state on 0 and swaps 0 with the
neighbor's nonzero state otherwise, so the first n cells count through all
3^n words like the digits of a counter.
"""
import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from nuca_lab.configs.engine_config import EngineConfig
from nuca_lab.core.distribution import HALFLINE, FULL, FiniteExceptions, Rays1D, RuleDistribution
from nuca_lab.core.engine import Evolution, encode_window_words, evolve_exact
from nuca_lab.core.lattice import Window, WindowConfiguration
from nuca_lab.core.period_detector import minimal_period
from nuca_lab.core.report import VerificationReport, combine
from nuca_lab.core.rules import (
    ODOMETER_F_TABLE,
    RuleSet,
    candidate_h,
    cycle_g,
    odometer_f,
    pinned_left_boundary,
    right_shift,
)

ALL_ZERO = WindowConfiguration.uniform(0)


def build_three_state_odometer() -> Tuple[RuleSet, RuleDistribution]:
    """g at cell 0, f at every cell x > 0"""
    rule_set = RuleSet.of(cycle_g(), odometer_f())
    theta = RuleDistribution(rule_set, 1, HALFLINE, FiniteExceptions.of('f', {(0,): 'g'}), name='odometer')
    return rule_set, theta


def extend_to_Z() -> RuleDistribution:
    """The odometer on Z: negative cells run the right shift and never reach cell 0"""
    rule_set = RuleSet.of(right_shift(3), cycle_g(), odometer_f())
    return RuleDistribution(rule_set, 1, FULL, Rays1D('shift_right', 0, ('g',), 'f'), name='odometer-z')


def build_candidate_odometer() -> Tuple[RuleSet, RuleDistribution, RuleDistribution]:
    """
    Candidate odometer built from rule h.

    Returns:
        Tuple of the rule set, variant A (g at 0, h elsewhere) and variant B
        (h everywhere, cell 0 reading a constant 0 on its left)
    """
    h = candidate_h()
    boundary = pinned_left_boundary(h, 0)
    rule_set = RuleSet.of(cycle_g(), h, boundary)
    variant_a = RuleDistribution(
        rule_set, 1, HALFLINE, FiniteExceptions.of('h', {(0,): 'g'}), name='candidate'
    )
    variant_b = RuleDistribution(
        rule_set, 1, HALFLINE, FiniteExceptions.of('h', {(0,): boundary.name}), name='candidate-boundary'
    )
    return rule_set, variant_a, variant_b


def first_cells(n: int) -> Window:
    return Window.interval(0, n - 1)


def window_evolution(
    theta: RuleDistribution,
    n: int,
    steps: int,
    init: WindowConfiguration = ALL_ZERO,
    config: Optional[EngineConfig] = None,
) -> Evolution:
    """Evolution of cells 0..n-1, whose cone never leaves them"""
    return evolve_exact(theta, init, first_cells(n), steps, config=config)


def _first_mismatch(values: np.ndarray, p: int) -> Optional[int]:
    diff = np.flatnonzero(values[p:] != values[:len(values) - p])
    return int(diff[0]) if diff.size else None


def verify_trace_period(
    x_max: int,
    init: WindowConfiguration = ALL_ZERO,
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    """
    Check that T_x has minimal period 3^(x+1) for every x <= x_max.

    All traces come from one evolution of cells 0..x_max over three periods
    of the slowest cell.
    """
    _, theta = build_three_state_odometer()
    steps = 3 * 3 ** (x_max + 1)
    evolution = window_evolution(theta, x_max + 1, steps, init, config)
    details: Dict[str, object] = {}
    passed = True
    for x in range(x_max + 1):
        expected = 3 ** (x + 1)
        values = evolution.states[:3 * expected + 1, x]
        report = minimal_period(values)
        ok = report.minimal_period == expected and report.preperiod == 0 and report.exact
        entry = {'expected': expected, **report.as_dict(), 'pass': ok}
        if not ok:
            entry['first_divergence'] = _first_mismatch(values, expected)
            if passed:
                details['failure'] = f"T_{x} has period {report.minimal_period}, expected {expected}"
            passed = False
        details[f"x={x}"] = entry
    return VerificationReport('odometer-period', {'xmax': x_max, 'init': init.describe()}, passed, details)


@dataclass(frozen=True)
class BlockDecomposition:
    """
    One period of T_x split after its leading 0 into a 1-block A and a 2-block B.

    A = [pi + 1, pi + n] and B = [pi + n + 1, pi + 2n] with p = 2n + 1.
    """
    x: int
    i: int
    p: int
    n: int
    leading_zero_time: int
    leading_symbol: int
    a_block: Tuple[int, int]
    b_block: Tuple[int, int]
    ones_in_A: int
    twos_in_A: int
    ones_in_B: int
    twos_in_B: int

    @property
    def expected_count(self) -> int:
        return 3 ** self.x

    @property
    def valid(self) -> bool:
        return (
            self.p == 3 ** (self.x + 1)
            and self.leading_symbol == 0
            and self.ones_in_A == self.twos_in_B == self.expected_count
            and self.twos_in_A == self.ones_in_B == 0
        )

    @property
    def odd(self) -> bool:
        return self.ones_in_A % 2 == 1 and self.twos_in_B % 2 == 1

    def as_dict(self) -> Dict[str, object]:
        return {
            'i': self.i,
            'leading_zero_time': self.leading_zero_time,
            'ones_in_A': self.ones_in_A,
            'twos_in_A': self.twos_in_A,
            'ones_in_B': self.ones_in_B,
            'twos_in_B': self.twos_in_B,
            'odd': self.odd,
            'valid': self.valid,
        }


def decompose_blocks(x: int, values: Sequence[int], periods: int) -> List[BlockDecomposition]:
    values = np.asarray(values)
    p = 3 ** (x + 1)
    n = (p - 1) // 2
    blocks = []
    for i in range(periods):
        start = p * i
        a = values[start + 1:start + n + 1]
        b = values[start + n + 1:start + 2 * n + 1]
        blocks.append(BlockDecomposition(
            x=x,
            i=i,
            p=p,
            n=n,
            leading_zero_time=start,
            leading_symbol=int(values[start]),
            a_block=(start + 1, start + n),
            b_block=(start + n + 1, start + 2 * n),
            ones_in_A=int(np.count_nonzero(a == 1)),
            twos_in_A=int(np.count_nonzero(a == 2)),
            ones_in_B=int(np.count_nonzero(b == 1)),
            twos_in_B=int(np.count_nonzero(b == 2)),
        ))
    return blocks


def verify_block_structure(
    x: int,
    periods: int = 3,
    config: Optional[EngineConfig] = None,
) -> List[BlockDecomposition]:
    """Block decomposition of every complete period of T_x from the all-0 start"""
    if periods < 2:
        raise ValueError(f"Block structure needs at least 2 periods, got {periods}")
    _, theta = build_three_state_odometer()
    p = 3 ** (x + 1)
    evolution = window_evolution(theta, x + 1, periods * p, config=config)
    return decompose_blocks(x, evolution.column((x,)), periods)


def block_structure_report(x_max: int, periods: int = 3, config: Optional[EngineConfig] = None) -> VerificationReport:
    _, theta = build_three_state_odometer()
    evolution = window_evolution(theta, x_max + 1, periods * 3 ** (x_max + 1), config=config)
    details: Dict[str, object] = {}
    passed = True
    for x in range(x_max + 1):
        blocks = decompose_blocks(x, evolution.column((x,)), periods)
        bad = [b for b in blocks if not (b.valid and b.odd)]
        details[f"x={x}"] = {
            'expected_count': 3 ** x,
            'periods': [b.as_dict() for b in blocks],
            'pass': not bad,
        }
        if bad and passed:
            details['failure'] = f"x={x}, period {bad[0].i}: {bad[0].as_dict()}"
            passed = False
    return VerificationReport('odometer-blocks', {'xmax': x_max, 'periods': periods}, passed, details)


def _decode_word(code: int, q: int, n: int) -> List[int]:
    return [(code // q ** i) % q for i in range(n)]


def surjectivity_details(words: np.ndarray, q: int, n: int) -> Tuple[bool, Dict[str, object]]:
    """
    Words 0..q^n-1 visited during the first q^n steps, plus pure periodicity.

    ``words`` must cover times 0..q^n.
    """
    total = q ** n
    visited = np.unique(words[:total])
    details: Dict[str, object] = {'distinct_words': int(visited.size), 'expected': total}
    passed = visited.size == total
    if not passed:
        missing = np.setdiff1d(np.arange(total), visited)
        details['failure'] = f"word {_decode_word(int(missing[0]), q, n)} never appears"
        details['missing_words'] = int(missing.size)
        return False, details
    period = minimal_period(words, repetitions=1).minimal_period
    details['period'] = period
    if words[total] != words[0]:
        details['failure'] = f"window does not return to its start after {total} steps"
        return False, details
    return passed, details


def verify_window_surjectivity(
    n: int,
    init: WindowConfiguration = ALL_ZERO,
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    """The first n cells visit all 3^n words within 3^n steps, then repeat"""
    _, theta = build_three_state_odometer()
    evolution = window_evolution(theta, n, 3 ** n, init, config)
    passed, details = surjectivity_details(encode_window_words(evolution, 3), 3, n)
    return VerificationReport('odometer-surjectivity', {'n': n, 'init': init.describe()}, passed, details)


def surjectivity_report(
    n_max: int,
    inits: Sequence[WindowConfiguration],
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    parts = {}
    for n in range(1, n_max + 1):
        for init in inits:
            parts[f"n={n},{init.describe()}"] = verify_window_surjectivity(n, init, config)
    return combine('odometer-surjectivity', {'nmax': n_max, 'inits': [i.describe() for i in inits]}, parts)


def verify_start_independence(
    n: int,
    inits: Sequence[WindowConfiguration],
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    """Every start runs through the same cycle of window words as the all-0 start"""
    _, theta = build_three_state_odometer()
    total = 3 ** n
    reference = encode_window_words(window_evolution(theta, n, total - 1, config=config), 3)
    details: Dict[str, object] = {}
    passed = True
    for init in inits:
        words = encode_window_words(window_evolution(theta, n, total - 1, init, config), 3)
        hits = np.flatnonzero(reference == words[0])
        rotation = int(hits[0]) if hits.size else None
        ok = rotation is not None and np.array_equal(np.roll(reference, -rotation), words)
        details[init.describe()] = {'rotation': rotation, 'pass': bool(ok)}
        if not ok and passed:
            details['failure'] = f"{init.describe()} is not a rotation of the all-0 cycle"
            passed = False
    return VerificationReport('odometer-start-independence', {'n': n}, passed, details)


# Lemma oracles: a single cell driven by its left neighbor's state sequence,
# stepped with the f table directly and never through the engine.

def transduce(segment: np.ndarray, start: np.ndarray) -> np.ndarray:
    """
    Run cell states through f for each column of ``segment``.

    Args:
        segment: (words, L) left-neighbor states
        start: (words,) initial states of the driven cell

    Returns:
        np.ndarray: (words, L + 1) states of the driven cell
    """
    table = np.asarray(ODOMETER_F_TABLE, dtype=np.uint8).reshape(3, 3)
    states = np.empty((segment.shape[0], segment.shape[1] + 1), dtype=np.uint8)
    states[:, 0] = start
    for t in range(segment.shape[1]):
        states[:, t + 1] = table[segment[:, t], states[:, t]]
    return states


def segments(a: int, length: int) -> np.ndarray:
    """Every word of {0, a}^length, one per row"""
    if length == 0:
        return np.zeros((1, 0), dtype=np.uint8)
    bits = np.array(list(itertools.product((0, 1), repeat=length)), dtype=np.uint8)
    return bits * np.uint8(a)


def lemma1_oracle(l_max: int) -> VerificationReport:
    """
    A {0, a} segment driving the next cell from complementary starts 0 and a
    keeps the two runs complementary at every step.
    """
    checked = 0
    for a in (1, 2):
        for length in range(l_max + 1):
            words = segments(a, length)
            zero = np.zeros(len(words), dtype=np.uint8)
            first = transduce(words, zero)
            second = transduce(words, zero + np.uint8(a))
            ok = (first != second) & np.isin(first, (0, a)) & np.isin(second, (0, a))
            checked += 2 * len(words)
            if not ok.all():
                row, step = (int(v) for v in np.argwhere(~ok)[0])
                return VerificationReport('lemma1', {'lmax': l_max}, False, {
                    'failure': f"a={a}, u={words[row].tolist()}: runs agree at step {step}",
                    'checked': checked,
                })
    return VerificationReport('lemma1', {'lmax': l_max}, True, {'checked': checked})


def lemma2_oracle(l_max: int) -> VerificationReport:
    """From state 0, a {0, a} segment leaves the next cell at a iff it holds an odd number of a's"""
    checked = 0
    for a in (1, 2):
        for length in range(l_max + 1):
            words = segments(a, length)
            final = transduce(words, np.zeros(len(words), dtype=np.uint8))[:, -1]
            odd = (np.count_nonzero(words, axis=1) % 2).astype(bool)
            expected = np.where(odd, a, 0).astype(np.uint8)
            checked += len(words)
            bad = np.flatnonzero(final != expected)
            if bad.size:
                row = int(bad[0])
                return VerificationReport('lemma2', {'lmax': l_max}, False, {
                    'failure': f"a={a}, u={words[row].tolist()} ends at {int(final[row])}",
                    'checked': checked,
                })
    return VerificationReport('lemma2', {'lmax': l_max}, True, {'checked': checked})


def verify_candidate_equivalence(
    n_cells: int,
    steps: int,
    inits: Sequence[WindowConfiguration],
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    """Variants A and B of the candidate agree on cells 0..n_cells-1"""
    _, variant_a, variant_b = build_candidate_odometer()
    details: Dict[str, object] = {}
    passed = True
    for init in inits:
        a = window_evolution(variant_a, n_cells, steps, init, config)
        b = window_evolution(variant_b, n_cells, steps, init, config)
        diff = np.argwhere(a.states != b.states)
        ok = diff.size == 0
        details[init.describe()] = {'pass': ok}
        if not ok and passed:
            t, i = (int(v) for v in diff[0])
            details['failure'] = f"{init.describe()}: cell {i} differs at t={t}"
            passed = False
    params = {'cells': n_cells, 'steps': steps, 'inits': [i.describe() for i in inits]}
    return VerificationReport('candidate-equivalence', params, passed, details)


def candidate_period_report(
    x_max: int,
    steps: Optional[int] = None,
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    """Measured minimal periods of the candidate's traces from all-0; nothing is asserted"""
    _, variant_a, _ = build_candidate_odometer()
    steps = 3 * 3 ** (x_max + 1) if steps is None else steps
    evolution = window_evolution(variant_a, x_max + 1, steps, config=config)
    details = {f"x={x}": minimal_period(evolution.column((x,))).as_dict() for x in range(x_max + 1)}
    return VerificationReport('candidate-period', {'xmax': x_max, 'steps': steps}, True, details, conjecture=True)
