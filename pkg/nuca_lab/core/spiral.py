"""
The odometer embedded in the plane along the square spiral.

Cell s(k), k > 0, runs rule f reading its neighbor s(k - 1); the origin runs
the three-cycle g. Restricted to s(0..n-1) this is the half-line odometer on
cells 0..n-1 with the cells renamed.
"""
from typing import Dict, List, Optional, Sequence

import numpy as np

from nuca_lab.configs.engine_config import EngineConfig
from nuca_lab.core.distribution import FULL, RuleDistribution, Spiral
from nuca_lab.core.engine import Evolution, evolve_exact
from nuca_lab.core.lattice import Pattern, UniformState, Window, WindowConfiguration
from nuca_lab.core.odometer import ALL_ZERO, build_three_state_odometer, surjectivity_details, window_evolution
from nuca_lab.core.report import VerificationReport
from nuca_lab.core.rules import RuleSet, cycle_g, oriented_f
from nuca_lab.core.spiral_map import SpiralMap
from nuca_lab.utils.constants import ORIENTATIONS


def build_spiral_odometer() -> RuleDistribution:
    oriented = [oriented_f(direction) for direction in ORIENTATIONS]
    rule_set = RuleSet.of(cycle_g(d=2), *oriented)
    kind = Spiral('g', tuple(sorted((r.name[-1], r.name) for r in oriented)))
    return RuleDistribution(rule_set, 2, FULL, kind, name='spiral')


def spiral_cells(n: int) -> List[tuple]:
    return [SpiralMap.cell(k) for k in range(n)]


def spiral_window(n: int) -> Window:
    return Window.from_cells(spiral_cells(n))


def spiral_init(init: WindowConfiguration, n: int, q: int = 3) -> WindowConfiguration:
    """
    Plane configuration with s(i) holding the state a half-line start gives cell i.

    Only s(0..n-1) are defined, which is all their cones ever read.
    """
    if init.known is None and isinstance(init.fill, UniformState):
        return init
    states = init.states_for([(i,) for i in range(n)], q)
    mapping = {SpiralMap.cell(i): int(s) for i, s in enumerate(states)}
    return WindowConfiguration.from_pattern(Pattern.from_mapping(mapping))


def spiral_evolution(
    n: int,
    steps: int,
    init: WindowConfiguration = ALL_ZERO,
    config: Optional[EngineConfig] = None,
) -> Evolution:
    """Evolution of s(0..n-1) from the plane image of a half-line start"""
    theta = build_spiral_odometer()
    return evolve_exact(theta, spiral_init(init, n, theta.q), spiral_window(n), steps, config=config)


def spiral_states(evolution: Evolution, n: int) -> np.ndarray:
    """(steps + 1, n) states with column i holding cell s(i)"""
    columns = [evolution.targets.positions[c] for c in spiral_cells(n)]
    return evolution.states[:, columns]


def verify_embedding_equivalence(
    n: int,
    steps: int,
    inits: Sequence[WindowConfiguration] = (ALL_ZERO,),
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    """States at s(i) equal states of half-line cell i, for i < n and t <= steps"""
    _, line = build_three_state_odometer()
    details: Dict[str, object] = {}
    passed = True
    for init in inits:
        plane = spiral_states(spiral_evolution(n, steps, init, config), n)
        reference = window_evolution(line, n, steps, init, config).states
        diff = np.argwhere(plane != reference)
        ok = diff.size == 0
        entry: Dict[str, object] = {'pass': ok}
        if not ok:
            t, i = (int(v) for v in diff[0])
            entry['first_divergence'] = {'index': i, 't': t}
            if passed:
                details['failure'] = f"{init.describe()}: s({i}) diverges at t={t}"
            passed = False
        details[init.describe()] = entry
    params = {'n': n, 'steps': steps, 'inits': [i.describe() for i in inits]}
    return VerificationReport('spiral-equivalence', params, passed, details)


def verify_embedded_surjectivity(
    n: int,
    init: WindowConfiguration = ALL_ZERO,
    config: Optional[EngineConfig] = None,
) -> VerificationReport:
    """s(0..n-1) visit all 3^n words within 3^n steps"""
    states = spiral_states(spiral_evolution(n, 3 ** n, init, config), n).astype(np.int64)
    words = np.zeros(states.shape[0], dtype=np.int64)
    for i in reversed(range(n)):
        words = words * 3 + states[:, i]
    passed, details = surjectivity_details(words, 3, n)
    return VerificationReport('spiral-surjectivity', {'n': n, 'init': init.describe()}, passed, details)


def spiral_csv(n: int) -> str:
    """
    CSV of the first n spiral cells with their rules.

    Columns: k,x,y,rule,orientation (orientation is '-' at the origin).
    """
    theta = build_spiral_odometer()
    lines = ['k,x,y,rule,orientation']
    for k, cell in enumerate(SpiralMap.walk(n)):
        rule = theta.rule_name_at(cell)
        orientation = rule.split('_', 1)[1] if '_' in rule else '-'
        lines.append(f"{k},{cell[0]},{cell[1]},{rule},{orientation}")
    return '\n'.join(lines) + '\n'
