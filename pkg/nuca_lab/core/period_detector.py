"""
Period detection on finite traces.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from nuca_lab.utils.constants import EXACT_PERIOD_REPETITIONS

EXACT = 'Exact'
INSUFFICIENT = 'Insufficient'


@dataclass(frozen=True)
class PeriodReport:
    minimal_period: Optional[int]
    preperiod: int
    confidence: str
    length: int

    @property
    def exact(self) -> bool:
        return self.confidence == EXACT

    def as_dict(self) -> dict:
        return {
            'minimal_period': self.minimal_period,
            'preperiod': self.preperiod,
            'confidence': self.confidence,
            'length': self.length,
        }


def _prefix_function(values: Sequence[int]) -> List[int]:
    pi = [0] * len(values)
    k = 0
    for i in range(1, len(values)):
        while k and values[i] != values[k]:
            k = pi[k - 1]
        if values[i] == values[k]:
            k += 1
        pi[i] = k
    return pi


def suffix_periods(values: Sequence[int]) -> List[int]:
    """
    Smallest period of every suffix: result[s] is the period of values[s:].

    Runs the prefix function on the reversed sequence, whose prefixes are the
    reversed suffixes.
    """
    n = len(values)
    pi = _prefix_function(list(values)[::-1])
    return [(n - s) - pi[n - s - 1] for s in range(n)]


def is_period(values: Sequence[int], p: int, start: int = 0) -> bool:
    v = np.asarray(values)
    return p >= 1 and bool(np.array_equal(v[start + p:], v[start:len(v) - p]))


def minimal_period(tr, repetitions: int = EXACT_PERIOD_REPETITIONS) -> PeriodReport:
    """
    Smallest period of a trace and the offset from which it holds.

    The preperiod is the smallest s such that values[s:] shows at least
    ``repetitions`` full copies of its own smallest period; the report is then
    Exact. Otherwise it is Insufficient and carries the smallest pure period
    of the whole trace when one shorter than the trace exists.

    Args:
        tr: A Trace or any sequence of states
        repetitions: Number of observed periods required for Exact

    Returns:
        PeriodReport: Period, preperiod and confidence
    """
    values = [int(v) for v in getattr(tr, 'values', tr)]
    n = len(values)
    if n == 0:
        return PeriodReport(None, 0, INSUFFICIENT, 0)
    periods = suffix_periods(values)
    for s in range(n):
        if periods[s] * repetitions <= n - s:
            return PeriodReport(periods[s], s, EXACT, n)
    p = periods[0]
    return PeriodReport(p if p < n else None, 0, INSUFFICIENT, n)
