from hypothesis import given, strategies as st

from nuca_lab.core.period_detector import EXACT, INSUFFICIENT, is_period, minimal_period, suffix_periods

T_1 = [0, 0, 1, 1, 1, 0, 2, 2, 2]


def test_visibly_periodic():
    report = minimal_period([0, 1, 2] * 3)
    assert (report.minimal_period, report.preperiod, report.confidence) == (3, 0, EXACT)


def test_constant_trace():
    assert minimal_period([2] * 5).minimal_period == 1


def test_odometer_t1_over_forty_steps():
    values = (T_1 * 5)[:41]
    report = minimal_period(values)
    assert report.minimal_period == 9 and report.exact


def test_too_few_repetitions_is_insufficient():
    report = minimal_period([0, 1, 2, 0, 1])
    assert report.confidence == INSUFFICIENT
    assert report.minimal_period == 3


def test_no_period_shorter_than_the_trace():
    report = minimal_period([0, 1, 2, 3])
    assert report.minimal_period is None and report.confidence == INSUFFICIENT


def test_preperiod():
    report = minimal_period([5, 4] + [0, 1] * 4)
    assert (report.minimal_period, report.preperiod) == (2, 2)


def test_empty_trace():
    assert minimal_period([]).minimal_period is None


def test_suffix_periods():
    assert suffix_periods([1, 0, 1, 0, 1]) == [2, 2, 2, 2, 1]


@given(st.lists(st.integers(0, 2), min_size=1, max_size=6), st.integers(3, 6))
def test_detected_period_divides_every_period(block, repeats):
    values = block * repeats
    p = minimal_period(values).minimal_period
    assert p is not None and is_period(values, p)
    assert len(block) % p == 0
    for q in range(1, p):
        assert not is_period(values, q)
