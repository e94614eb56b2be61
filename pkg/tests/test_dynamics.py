import pytest

from nuca_lab.core.distribution import FULL, Periodic, RuleDistribution, Uniform
from nuca_lab.core.dynamics import (
    check_origin_invariant_H2,
    check_weak_mixing_obstruction,
    cone_boundedness_probe,
    cone_boundedness_report,
    recurrence_offsets,
    recurrence_report,
    strong_transitivity_witness,
    trace_period_probe,
    transitivity_witness_report,
)
from nuca_lab.core.engine import evolve_exact
from nuca_lab.core.lattice import Pattern, Window, WindowConfiguration
from nuca_lab.core.rules import RuleSet, cycle_g, toggle
from nuca_lab.core.spiral_map import spiral
from nuca_lab.utils.constants import DEFAULT_CONE_CAP, DEFAULT_RECURRENCE_RADIUS
from nuca_lab.utils.errors import DomainError


def _step(theta, pattern: Pattern, targets: Window) -> Pattern:
    return evolve_exact(theta, WindowConfiguration.from_pattern(pattern), targets, 1).final


def test_example1_rules(example1):
    assert example1.q == 2
    assert example1.rule_at((0,)).name == 'toggle'
    c = Pattern.from_list(-6, [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0])
    after = _step(example1, c, Window.interval(-2, 5))
    assert after[(-2,)] == c[(-3,)]
    assert after[(5,)] == c[(6,)]
    assert after[(0,)] == 1 - c[(0,)]


def test_witness_with_odd_time():
    c = Pattern.uniform(Window.interval(-1, 1), 0)
    e = Pattern.uniform(Window.interval(-1, 1), 1)
    witness = strong_transitivity_witness(c, e, Window(((0,),)))
    assert witness.r == 1
    assert witness.e_prime == Pattern.from_list(-2, [1, 0, 0, 0, 1])
    assert witness.verified


def test_witness_with_even_time():
    zeros = Pattern.uniform(Window.interval(-1, 1), 0)
    witness = strong_transitivity_witness(zeros, zeros, Window(((0,),)))
    assert witness.r == 2 and witness.verified


def test_witness_time_covers_D():
    c = Pattern.from_list(-4, [0] * 9)
    e = Pattern.from_list(-2, [1, 0, 0, 1, 1])
    witness = strong_transitivity_witness(c, e, Window.interval(-3, 3))
    assert witness.r == 4
    assert witness.verified


def test_witness_preconditions():
    c = Pattern.from_list(-1, [0, 0, 0])
    with pytest.raises(DomainError):
        strong_transitivity_witness(c, c, Window.interval(-2, 2))
    with pytest.raises(DomainError):
        strong_transitivity_witness(c, Pattern.from_list(0, [1, 1]), Window(((0,),)))


def test_random_witnesses_verify():
    report = transitivity_witness_report(100)
    assert report.passed and report.details['witnesses'] == 100


def test_origin_invariant_under_two_steps():
    assert check_origin_invariant_H2(1000).passed


def test_cell_zero_trace_depends_on_cell_zero_only():
    assert check_weak_mixing_obstruction(10, steps=500).passed


@pytest.mark.slow
def test_cell_zero_trace_long_run():
    assert check_weak_mixing_obstruction(100, steps=10 ** 4).passed


def test_recurrence_of_periodic_distribution():
    rule_set = RuleSet.of(toggle('a'), toggle('b'), toggle('c'), toggle('d'))
    theta = RuleDistribution(rule_set, 1, FULL, Periodic((4,), ('a', 'b', 'c', 'd')))
    offsets = recurrence_offsets(theta, Window.interval(0, 3), 12).offsets
    assert offsets == ((-12,), (-8,), (-4,), (4,), (8,), (12,))


def test_uniform_distribution_recurs_everywhere():
    theta = RuleDistribution(RuleSet.of(cycle_g(2)), 2, FULL, Uniform('g'))
    assert len(recurrence_offsets(theta, Window.box((0, 0), (1, 1)), 3).offsets) == 7 * 7 - 1


def test_extended_odometer_is_not_recurrent_near_zero(odometer_z):
    assert recurrence_offsets(odometer_z, Window.interval(-1, 1)).offsets == ()


def test_trace_periods_per_start(odometer, example1):
    inits = [WindowConfiguration.seeded(s) for s in range(5)]
    report = trace_period_probe(odometer, [(0,)], inits, t_max=30)
    assert report.passed and report.details['0']['periods'] == [3] * 5
    report = trace_period_probe(example1, [(0,)], inits, t_max=40)
    assert report.params['pruned']
    assert report.passed and report.details['0']['periods'] == [2] * 5


def test_trace_periods_of_copies_agree():
    rule_set = RuleSet.of(toggle('a'), toggle('b'))
    theta = RuleDistribution(rule_set, 1, FULL, Periodic((2,), ('a', 'b')))
    report = trace_period_probe(theta, [(0,), (2,)], [WindowConfiguration.seeded(1)], t_max=20, pruned=True)
    assert report.passed and report.details['copies_agree']


def test_cone_boundedness(odometer, spiral_theta, example1):
    assert all(r.finite for r in cone_boundedness_probe(odometer, [(x,) for x in range(6)], 100).values())
    assert all(r.finite for r in cone_boundedness_probe(spiral_theta, [spiral(k) for k in range(12)], 100).values())
    results = cone_boundedness_probe(example1, [(1,), (-3,)], 50)
    assert all(r.label == 'inconclusive' for r in results.values())


def test_finite_closure_is_stable_in_the_cap(odometer):
    small = cone_boundedness_probe(odometer, [(4,)], 10)[(4,)]
    large = cone_boundedness_probe(odometer, [(4,)], 1000)[(4,)]
    assert small.finite and large.finite and small.window == large.window


def test_copies_come_from_recurrence_offsets():
    rule_set = RuleSet.of(toggle('a'), toggle('b'))
    theta = RuleDistribution(rule_set, 1, FULL, Periodic((2,), ('a', 'b')))
    offsets = recurrence_offsets(theta, Window(((0,),)), 6)
    assert offsets.offsets == ((-6,), (-4,), (-2,), (2,), (4,), (6,))
    assert offsets.nearest(4) == ((-2,), (2,), (-4,), (4,))
    report = trace_period_probe(theta, [(0,)], [WindowConfiguration.seeded(3)], t_max=20, offsets=offsets)
    assert report.passed and report.details['copies_agree']
    assert report.details['copies'] == {'-2': 2, '2': 2, '-4': 2, '4': 2}


def test_copies_need_the_offset_window():
    theta = RuleDistribution(RuleSet.of(cycle_g(2)), 1, FULL, Uniform('g'))
    offsets = recurrence_offsets(theta, Window(((0,),)), 2)
    with pytest.raises(DomainError):
        trace_period_probe(theta, [(1,)], [WindowConfiguration.seeded(0)], t_max=10, offsets=offsets)


def test_recurrence_report(odometer_z):
    report = recurrence_report(odometer_z, Window.interval(-1, 1))
    assert report.passed and report.check == 'recurrence'
    assert report.params['radius'] == DEFAULT_RECURRENCE_RADIUS
    assert report.details['offsets'] == [] and report.details['count'] == 0


def test_plane_recurrence_needs_a_small_radius(spiral_theta):
    D = Window((spiral(0),))
    with pytest.raises(ValueError):
        recurrence_offsets(spiral_theta, D)
    result = recurrence_offsets(spiral_theta, D, 3)
    assert result.search_radius == 3
    assert all(spiral_theta.rule_at(o).name == spiral_theta.rule_at(spiral(0)).name for o in result.offsets)


def test_cone_boundedness_report(odometer, example1):
    report = cone_boundedness_report(odometer, [(0,), (3,)])
    assert report.params['cap'] == DEFAULT_CONE_CAP
    assert {v['label'] for v in report.details.values()} == {'finite'}
    report = cone_boundedness_report(example1, [(1,)], 40)
    assert report.details['1']['label'] == 'inconclusive' and report.details['1']['size'] is None
