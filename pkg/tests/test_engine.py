import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import ODOMETER_ROWS
from nuca_lab.configs.engine_config import EngineConfig
from nuca_lab.core.dynamics import build_example1
from nuca_lab.core.engine import dependency_cone, encode_window_words, evolve_exact, influence_closure, trace
from nuca_lab.core.lattice import Pattern, Window, WindowConfiguration
from nuca_lab.core.spiral import spiral_window
from nuca_lab.core.spiral_map import SpiralMap
from nuca_lab.utils.errors import CoordinateBoundError, DomainError, OutsideKnownRegionError

ZERO = WindowConfiguration.uniform(0)
EXAMPLE1 = build_example1()
FRONTIER = EngineConfig(strategy='frontier')
COMPILED = EngineConfig(strategy='compiled')
PARALLEL_FRONTIER = EngineConfig(strategy='frontier', threads=4, parallel_min_cells=2)


def test_odometer_cone_is_the_cells_to_the_left(odometer):
    assert dependency_cone(odometer, Window(((5,),)), 2).required == Window.interval(3, 5)
    assert dependency_cone(odometer, Window(((5,),)), 5).required == Window.interval(0, 5)
    assert dependency_cone(odometer, Window(((5,),)), 50).required == Window.interval(0, 5)


def test_example1_cone_grows_both_ways(example1):
    for t in (0, 1, 7):
        assert dependency_cone(example1, Window(((0,),)), t).required == Window.interval(-t, t)


def test_pruned_cone_of_the_toggle_is_the_origin(example1):
    cone = dependency_cone(example1, Window(((0,),)), 100, pruned=True)
    assert cone.required == Window(((0,),))
    assert cone.closed


def test_cone_is_monotone_in_time(example1):
    targets = Window.interval(-2, 3)
    previous = dependency_cone(example1, targets, 0).required
    assert previous == targets
    for t in range(1, 6):
        current = dependency_cone(example1, targets, t).required
        assert previous.issubset(current)
        previous = current


def test_targets_outside_domain(odometer):
    with pytest.raises(DomainError):
        dependency_cone(odometer, Window(((-1,),)), 1)


def test_odometer_window_sequence(odometer):
    evolution = evolve_exact(odometer, ZERO, Window.interval(0, 1), 9)
    pairs = [tuple(p.values) for p in evolution]
    assert pairs == [(0, 0), (1, 0), (2, 1), (0, 1), (1, 1), (2, 0), (0, 2), (1, 2), (2, 2), (0, 0)]


@pytest.mark.parametrize('config', [FRONTIER, EngineConfig(), PARALLEL_FRONTIER])
def test_odometer_space_time_matches_hand_stepped_rows(odometer, config):
    evolution = evolve_exact(odometer, ZERO, Window.interval(0, 9), 18, config=config)
    rows = [''.join(str(v) for v in row) for row in evolution.states]
    assert rows == ODOMETER_ROWS


def test_zero_steps_returns_the_restricted_start(odometer):
    init = WindowConfiguration.seeded(3)
    evolution = evolve_exact(odometer, init, Window.interval(0, 4), 0)
    assert len(evolution) == 1
    assert evolution[0] == init.restrict(Window.interval(0, 4), 3)


def test_example1_one_step_from_the_witness(example1):
    e_prime = Pattern.from_list(-3, [1, 1, 0, 0, 0, 1, 1])
    final = evolve_exact(example1, WindowConfiguration.from_pattern(e_prime), Window.interval(-2, 2), 1).final
    assert final.values == (1, 1, 1, 1, 1)


def test_cone_escape_carries_the_uncovered_cells(example1):
    init = WindowConfiguration.from_pattern(Pattern.from_list(-1, [0, 0, 0]))
    with pytest.raises(OutsideKnownRegionError) as info:
        evolve_exact(example1, init, Window(((0,),)), 2)
    assert info.value.cells == ((-2,), (2,))
    assert str(info.value).startswith('outside known region')


def test_coordinates_above_the_bound(example1):
    config = EngineConfig(safe_bound=10)
    with pytest.raises(CoordinateBoundError):
        evolve_exact(example1, ZERO, Window(((9,),)), 3, config=config)


def test_traces(odometer):
    assert trace(odometer, ZERO, (0,), 6).values.tolist() == [0, 1, 2, 0, 1, 2, 0]
    assert trace(odometer, ZERO, (1,), 9).values.tolist() == [0, 0, 1, 1, 1, 0, 2, 2, 2, 0]
    assert trace(odometer, ZERO, (1,), 2).to_csv() == 't,state\n0,0\n1,0\n2,1\n'


def test_extension_to_z_agrees_with_half_line(odometer, odometer_z):
    init = WindowConfiguration.seeded(11)
    line = evolve_exact(odometer, init, Window.interval(0, 6), 40).states
    full = evolve_exact(odometer_z, init, Window.interval(0, 6), 40).states
    assert np.array_equal(line, full)


def test_compiled_and_frontier_agree(odometer):
    init = WindowConfiguration.seeded(5)
    targets = Window.interval(0, 5)
    compiled = evolve_exact(odometer, init, targets, 800, config=COMPILED)
    frontier = evolve_exact(odometer, init, targets, 800, config=FRONTIER)
    assert compiled.strategy == 'compiled' and frontier.strategy == 'frontier'
    assert np.array_equal(compiled.states, frontier.states)


def test_compiled_strategy_needs_a_closed_cone(example1):
    with pytest.raises(ValueError):
        evolve_exact(example1, ZERO, Window(((0,),)), 5, config=COMPILED)


def test_parallel_steps_are_bitwise_identical(example1, spiral_theta):
    serial = EngineConfig(strategy='frontier')
    parallel = EngineConfig(strategy='frontier', threads=4, parallel_min_cells=8)
    init = WindowConfiguration.seeded(2)
    targets = Window.interval(-30, 30)
    a = evolve_exact(example1, init, targets, 25, config=serial)
    b = evolve_exact(example1, init, targets, 25, config=parallel)
    assert np.array_equal(a.states, b.states)

    window = spiral_window(25)
    plane = WindowConfiguration.from_pattern(Pattern.from_mapping({c: (i * 7) % 3 for i, c in enumerate(window)}))
    a = evolve_exact(spiral_theta, plane, window, 60, config=serial)
    b = evolve_exact(spiral_theta, plane, window, 60, config=parallel)
    assert np.array_equal(a.states, b.states)


def test_engine_config_from_env(monkeypatch):
    monkeypatch.setenv('NUCA_THREADS', '3')
    monkeypatch.setenv('NUCA_PARALLEL_MIN_CELLS', '2')
    config = EngineConfig.from_env(verbose=True)
    assert (config.threads, config.parallel_min_cells, config.verbose) == (3, 2, True)
    monkeypatch.setenv('NUCA_PARALLEL_MIN_CELLS', 'many')
    with pytest.raises(ValueError):
        EngineConfig.from_env()
    monkeypatch.delenv('NUCA_THREADS')
    monkeypatch.delenv('NUCA_PARALLEL_MIN_CELLS')
    assert EngineConfig.from_env() == EngineConfig()


def test_encode_window_words(odometer):
    evolution = evolve_exact(odometer, ZERO, Window.interval(0, 1), 3)
    assert encode_window_words(evolution, 3).tolist() == [0, 1, 2 + 3, 0 + 3]


def test_influence_closure(odometer, spiral_theta, example1):
    closure = influence_closure(odometer, (5,), 100)
    assert closure.finite and closure.window == Window.interval(0, 5)

    nine = influence_closure(spiral_theta, SpiralMap.cell(9), 100)
    assert nine.finite and nine.window == Window.from_cells(SpiralMap.cell(k) for k in range(10))

    grows = influence_closure(example1, (0,), 100)
    assert not grows.finite and grows.label == 'inconclusive'
    assert grows.growth[-1] == 201


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(0, 2 ** 32),
    t=st.integers(0, 6),
    lo=st.integers(-5, 5),
    width=st.integers(0, 4),
    where=st.integers(-30, 30),
)
def test_mutating_outside_the_cone_changes_nothing(seed, t, lo, width, where):
    targets = Window.interval(lo, lo + width)
    cone = dependency_cone(EXAMPLE1, targets, t)
    if (where,) in cone.required:
        return
    init = WindowConfiguration.seeded(seed)
    mutated = init.overridden({(where,): 1 - init.state_at((where,), 2)})
    a = evolve_exact(EXAMPLE1, init, targets, t).states
    b = evolve_exact(EXAMPLE1, mutated, targets, t).states
    assert np.array_equal(a, b)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2 ** 32), t=st.integers(0, 6), extra=st.integers(1, 5))
def test_enlarging_the_known_window_changes_nothing(seed, t, extra):
    targets = Window.interval(-1, 1)
    required = dependency_cone(EXAMPLE1, targets, t).required
    fill = WindowConfiguration.seeded(seed)
    exact = WindowConfiguration.from_pattern(fill.restrict(required, 2))
    lo, hi = required.bounding_box()
    larger = WindowConfiguration.from_pattern(fill.restrict(Window.interval(lo[0] - extra, hi[0] + extra), 2))
    assert np.array_equal(
        evolve_exact(EXAMPLE1, exact, targets, t).states,
        evolve_exact(EXAMPLE1, larger, targets, t).states,
    )
