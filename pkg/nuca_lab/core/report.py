import json
from dataclasses import dataclass, field
from typing import Any, Dict

CONJECTURE = 'CONJECTURE'


@dataclass(frozen=True)
class VerificationReport:
    """
    Outcome of one verifier or finite dynamics check.

    Serialised as {check, params, pass, details} with sorted keys so that
    identical runs produce identical bytes.
    """
    check: str
    params: Dict[str, Any]
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    conjecture: bool = False

    def as_dict(self) -> Dict[str, Any]:
        details = dict(self.details)
        if self.conjecture:
            details['label'] = CONJECTURE
        return {
            'check': self.check,
            'params': self.params,
            'pass': self.passed,
            'details': details,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + '\n'

    def summary(self) -> str:
        """One human-readable status line"""
        if self.conjecture:
            return f"{self.check}: {CONJECTURE} report only (nothing asserted)"
        status = 'PASS' if self.passed else 'FAIL'
        line = f"{self.check}: {status}"
        reason = self.details.get('failure')
        return f"{line} ({reason})" if reason else line


def combine(check: str, params: Dict[str, Any], parts: Dict[str, VerificationReport]) -> VerificationReport:
    """One report passing iff every part passes; details keyed like ``parts``"""
    passed = all(p.passed for p in parts.values())
    details = {key: p.as_dict()['details'] for key, p in parts.items()}
    failed = [key for key, p in parts.items() if not p.passed]
    if failed:
        details['failure'] = f"failed for {failed[0]}"
    return VerificationReport(check, params, passed, details)
