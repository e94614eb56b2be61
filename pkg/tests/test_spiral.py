import pytest
from hypothesis import given, strategies as st

from nuca_lab.core.engine import influence_closure
from nuca_lab.core.lattice import Window, WindowConfiguration
from nuca_lab.core.spiral import (
    build_spiral_odometer,
    spiral_csv,
    verify_embedded_surjectivity,
    verify_embedding_equivalence,
)
from nuca_lab.core.spiral_map import SpiralMap, spiral, spiral_index
from nuca_lab.utils.errors import DomainError

FIRST_CELLS = [(0, 0), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (2, -1), (2, 0), (2, 1), (2, 2)]


def test_spiral_starts_at_origin_and_turns_counterclockwise():
    assert [spiral(k) for k in range(13)] == FIRST_CELLS


def test_closed_form_matches_walk():
    walked = list(SpiralMap.walk(20_000))
    assert walked == [SpiralMap.cell(k) for k in range(20_000)]
    assert all(spiral_index(c) == k for k, c in enumerate(walked))


@given(st.integers(1, 10 ** 6))
def test_unit_steps_and_inverse(k):
    a, b = spiral(k - 1), spiral(k)
    assert abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1
    assert spiral_index(b) == k


@given(st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_index_inverts_cell(x, y):
    assert spiral(spiral_index((x, y))) == (x, y)


def test_negative_index_is_rejected():
    with pytest.raises(DomainError):
        spiral(-1)


def test_spiral_rules():
    theta = build_spiral_odometer()
    assert theta.rule_at((0, 0)).neighborhood == ((0, 0),)
    assert theta.rule_at(spiral(1)).neighborhood == ((-1, 0), (0, 0))
    names = {theta.rule_name_at(spiral(k)) for k in range(1, 200)}
    assert names == {'f_E', 'f_N', 'f_S', 'f_W'}
    for k in range(1, 200):
        offset = theta.rule_at(spiral(k)).neighborhood[0]
        assert tuple(a + b for a, b in zip(spiral(k), offset)) == spiral(k - 1)


def test_influence_closure_is_the_spiral_prefix():
    theta = build_spiral_odometer()
    closure = influence_closure(theta, spiral(30), 1000)
    assert closure.window == Window.from_cells(spiral(k) for k in range(31))


def test_equivalence_small():
    assert verify_embedding_equivalence(1, 9).passed
    inits = [WindowConfiguration.uniform(0)] + [WindowConfiguration.seeded(s) for s in range(5)]
    assert verify_embedding_equivalence(10, 3 ** 5, inits).passed


def test_equivalence_twenty_five_cells():
    inits = [WindowConfiguration.uniform(0)] + [WindowConfiguration.seeded(s) for s in range(1, 6)]
    assert verify_embedding_equivalence(25, 3 ** 6, inits).passed


def test_embedded_surjectivity():
    assert verify_embedded_surjectivity(4).passed
    assert verify_embedded_surjectivity(3, WindowConfiguration.seeded(9)).passed


def test_spiral_csv_golden(golden_dir):
    assert spiral_csv(101) == (golden_dir / 'spiral_101.csv').read_text()
    assert spiral_csv(2) == 'k,x,y,rule,orientation\n0,0,0,g,-\n1,1,0,f_W,W\n'
