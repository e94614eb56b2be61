import pytest
from hypothesis import given, strategies as st

from nuca_lab.core.distribution import (
    FULL,
    HALFLINE,
    FiniteExceptions,
    Periodic,
    RuleDistribution,
    Uniform,
    rule_at,
    validate_closure,
)
from nuca_lab.core.rules import (
    LocalRule,
    RuleSet,
    apply_rule,
    candidate_h,
    cycle_g,
    odometer_f,
    oriented_f,
    pinned_left_boundary,
    toggle,
)
from nuca_lab.utils.errors import ClosureError, DomainError, RuleError


def test_table_length_must_be_q_to_the_arity():
    with pytest.raises(RuleError):
        LocalRule.create('bad', 3, [(-1,), (0,)], [0] * 8)


def test_outputs_must_be_states():
    with pytest.raises(RuleError):
        LocalRule.create('bad', 2, [(0,)], [0, 2])


def test_apply_rule_checks_arity():
    with pytest.raises(RuleError):
        apply_rule(odometer_f(), [0])


# (left neighbor, cell, next state)
F_ROWS = [
    (0, 0, 0), (0, 1, 1), (0, 2, 2),
    (1, 0, 1), (1, 1, 0), (1, 2, 2),
    (2, 0, 2), (2, 1, 1), (2, 2, 0),
]
G_ROWS = [(0, 1), (1, 2), (2, 0)]
H_ROWS = [
    (0, 0, 1), (0, 1, 2), (0, 2, 0),
    (1, 0, 1), (1, 1, 0), (1, 2, 2),
    (2, 0, 2), (2, 1, 1), (2, 2, 0),
]


@pytest.mark.parametrize('left, cell, expected', F_ROWS)
def test_odometer_f_rows(left, cell, expected):
    assert apply_rule(odometer_f(), [left, cell]) == expected


@pytest.mark.parametrize('cell, expected', G_ROWS)
def test_cycle_g_rows(cell, expected):
    assert apply_rule(cycle_g(), [cell]) == expected


@pytest.mark.parametrize('left, cell, expected', H_ROWS)
def test_candidate_h_rows(left, cell, expected):
    assert apply_rule(candidate_h(), [left, cell]) == expected


@pytest.mark.parametrize('direction', [(-1, 0), (1, 0), (0, 1), (0, -1)])
def test_oriented_f_keeps_the_table(direction):
    rule = oriented_f(direction)
    assert [apply_rule(rule, [left, cell]) for left, cell, _ in F_ROWS] == [e for _, _, e in F_ROWS]


def test_pinned_boundary_of_h_is_the_three_cycle():
    boundary = pinned_left_boundary(candidate_h())
    assert boundary.name == 'h_boundary'
    assert boundary.table == cycle_g().table
    assert boundary.neighborhood == ((0,),)


def test_essential_offsets():
    assert toggle().essential_offsets() == ((0,),)
    assert odometer_f().essential_offsets() == ((-1,), (0,))


def test_oriented_f_reads_its_direction():
    rule = oriented_f((0, -1))
    assert rule.name == 'f_S'
    assert rule.neighborhood == ((0, -1), (0, 0))


def test_rule_set_rejects_duplicates_and_unknown_names():
    with pytest.raises(RuleError):
        RuleSet.of(odometer_f(), odometer_f())
    with pytest.raises(RuleError):
        RuleSet.of(odometer_f())['g']


def test_odometer_rule_at(odometer):
    assert rule_at(odometer, (0,)).name == 'g'
    assert rule_at(odometer, (3,)).name == 'f'
    assert apply_rule(rule_at(odometer, (0,)), [1]) == 2
    with pytest.raises(DomainError):
        rule_at(odometer, (-1,))


def test_extended_odometer_rule_at(odometer_z):
    assert rule_at(odometer_z, (-1,)).name == 'shift_right'
    assert rule_at(odometer_z, (0,)).name == 'g'
    assert rule_at(odometer_z, (7,)).name == 'f'


def test_half_line_closure_violation_is_reported():
    rule_set = RuleSet.of(odometer_f())
    with pytest.raises(ClosureError) as info:
        RuleDistribution(rule_set, 1, HALFLINE, Uniform('f'))
    assert info.value.violations[0].neighbor == (-1,)

    unchecked = RuleDistribution(rule_set, 1, HALFLINE, Uniform('f'), checked=False)
    assert [v.cell for v in validate_closure(unchecked)] == [(0,)]


def test_odometer_passes_closure(odometer):
    assert validate_closure(odometer) == []


def test_periodic_distribution_lookup():
    rule_set = RuleSet.of(toggle('a'), toggle('b'), toggle('c'))
    theta = RuleDistribution(rule_set, 1, FULL, Periodic((3,), ('a', 'b', 'c')))
    assert [theta.rule_name_at((x,)) for x in range(-3, 4)] == ['a', 'b', 'c', 'a', 'b', 'c', 'a']


def test_kind_must_reference_known_rules():
    with pytest.raises(RuleError):
        RuleDistribution(RuleSet.of(cycle_g()), 1, FULL, FiniteExceptions.of('g', {(0,): 'nope'}))


PLANE_RULES = RuleSet.of(*(cycle_g(2, name) for name in 'abcdef'))
PLANE_PERIODIC = RuleDistribution(PLANE_RULES, 2, FULL, Periodic((2, 3), tuple('abcdef')))


def test_periodic_plane_lookup():
    assert PLANE_PERIODIC.rule_name_at((0, 0)) == 'a'
    assert PLANE_PERIODIC.rule_name_at((0, 2)) == 'c'
    assert PLANE_PERIODIC.rule_name_at((1, 0)) == 'd'
    assert PLANE_PERIODIC.rule_name_at((-1, -1)) == 'f'


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6), st.integers(-50, 50))
def test_periodic_plane_rule_repeats_along_each_axis(x, y, k):
    here = PLANE_PERIODIC.rule_at((x, y))
    assert PLANE_PERIODIC.rule_at((x + 2 * k, y)) == here
    assert PLANE_PERIODIC.rule_at((x, y + 3 * k)) == here
