import json

import pytest

from nuca_lab.core.report import VerificationReport, combine
from nuca_lab.core.system_monitor import SystemMonitor
from nuca_lab.utils.errors import MemoryBudgetError


def test_json_layout_is_stable():
    report = VerificationReport('lemma1', {'lmax': 4}, True, {'checked': 30})
    text = report.to_json()
    assert text.endswith('\n')
    assert json.loads(text) == {'check': 'lemma1', 'params': {'lmax': 4}, 'pass': True, 'details': {'checked': 30}}
    assert text == VerificationReport('lemma1', {'lmax': 4}, True, {'checked': 30}).to_json()


def test_summary_names_the_failure():
    report = VerificationReport('odometer-period', {}, False, {'failure': 'x=3 has period 9'})
    assert report.summary() == 'odometer-period: FAIL (x=3 has period 9)'
    assert VerificationReport('spiral-equivalence', {}, True).summary() == 'spiral-equivalence: PASS'


def test_conjecture_label():
    report = VerificationReport('candidate-period', {}, True, {'x=0': 3}, conjecture=True)
    assert report.as_dict()['details'] == {'x=0': 3, 'label': 'CONJECTURE'}
    assert 'CONJECTURE' in report.summary()


def test_combine():
    ok = VerificationReport('a', {}, True, {'n': 1})
    bad = VerificationReport('a', {}, False, {'n': 2})
    assert combine('all', {}, {'n=1': ok}).passed
    merged = combine('all', {}, {'n=1': ok, 'n=2': bad})
    assert not merged.passed and merged.details['failure'] == 'failed for n=2'


def test_memory_budget():
    SystemMonitor.check_budget(1024)
    with pytest.raises(MemoryBudgetError):
        SystemMonitor.check_budget(2 ** 62)
    assert SystemMonitor.get_memory_usage() > 0


def test_memory_status_goes_to_stderr(capsys):
    SystemMonitor.print_memory_status('start')
    captured = capsys.readouterr()
    assert captured.out == ''
    assert captured.err.startswith('[start] Memory usage:')


def test_memory_budget_uses_available_memory(monkeypatch):
    monkeypatch.setattr(SystemMonitor, 'get_available_memory', staticmethod(lambda: 100.0))
    SystemMonitor.check_budget(40 * 1024 * 1024)
    with pytest.raises(MemoryBudgetError, match='100.0 MB available'):
        SystemMonitor.check_budget(60 * 1024 * 1024)
