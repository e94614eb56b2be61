"""
JSON rule files and distribution files.

Rule file:          {"q": int, "rules": [{"name", "neighborhood", "table"}]}
Distribution file:  {"d": int, "domain": "full"|"halfline", "kind": {"type": ..., ...}}
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from nuca_lab.core.distribution import (
    FiniteExceptions,
    Periodic,
    Rays1D,
    RuleDistribution,
    Spiral,
    Uniform,
)
from nuca_lab.core.rules import LocalRule, RuleSet
from nuca_lab.utils.errors import NucaError, SchemaError

Source = Union[bytes, str]

KIND_FIELDS = {
    'uniform': {'type', 'rule'},
    'finite_exceptions': {'type', 'default', 'exceptions'},
    'rays': {'type', 'left', 'start', 'explicit', 'right'},
    'periodic': {'type', 'periods', 'fundamental'},
    'spiral': {'type', 'origin', 'oriented'},
}


def get_project_root() -> Path:
    """Returns the repository directory"""
    return Path(__file__).parent.parent.parent


def get_rulesets_dir() -> Path:
    return get_project_root() / 'rulesets'


def _parse(source: Source) -> Any:
    if isinstance(source, bytes):
        try:
            source = source.decode('utf-8')
        except UnicodeDecodeError as e:
            raise SchemaError('$', f"not UTF-8: {e}")
    try:
        return json.loads(source)
    except json.JSONDecodeError as e:
        raise SchemaError('$', f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})")


def _expect_object(value: Any, path: str, fields: set, optional: set = frozenset()) -> Dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected an object, got {type(value).__name__}")
    unknown = sorted(set(value) - fields - optional)
    if unknown:
        raise SchemaError(f"{path}.{unknown[0]}", "unknown field")
    missing = sorted(fields - set(value))
    if missing:
        raise SchemaError(f"{path}.{missing[0]}", "missing field")
    return value


def _expect_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {json.dumps(value)}")
    return value


def _expect_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected a string, got {json.dumps(value)}")
    return value


def _expect_list(value: Any, path: str) -> List:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected a list, got {type(value).__name__}")
    return value


def _expect_cell(value: Any, path: str) -> tuple:
    items = _expect_list(value, path)
    if not items:
        raise SchemaError(path, "a cell needs at least one coordinate")
    return tuple(_expect_int(v, f"{path}[{i}]") for i, v in enumerate(items))


def rules_from_dict(data: Any) -> RuleSet:
    doc = _expect_object(data, '$', {'q', 'rules'})
    q = _expect_int(doc['q'], '$.q')
    rules = []
    for i, raw in enumerate(_expect_list(doc['rules'], '$.rules')):
        path = f"$.rules[{i}]"
        item = _expect_object(raw, path, {'name', 'neighborhood', 'table'})
        name = _expect_str(item['name'], f"{path}.name")
        neighborhood = [
            _expect_cell(c, f"{path}.neighborhood[{j}]")
            for j, c in enumerate(_expect_list(item['neighborhood'], f"{path}.neighborhood"))
        ]
        table = [
            _expect_int(v, f"{path}.table[{j}]")
            for j, v in enumerate(_expect_list(item['table'], f"{path}.table"))
        ]
        expected = q ** len(neighborhood)
        if len(table) != expected:
            raise SchemaError(
                f"{path}.table",
                f"has {len(table)} entries, expected q^m = {q}^{len(neighborhood)} = {expected}",
            )
        try:
            rules.append(LocalRule.create(name, q, neighborhood, table))
        except NucaError as e:
            raise SchemaError(path, str(e))
    try:
        return RuleSet(q, tuple(rules))
    except NucaError as e:
        raise SchemaError('$.rules', str(e))


def rules_to_dict(rule_set: RuleSet) -> Dict:
    return {
        'q': rule_set.q,
        'rules': [
            {
                'name': r.name,
                'neighborhood': [list(n) for n in r.neighborhood],
                'table': list(r.table),
            }
            for r in rule_set.rules
        ],
    }


def _kind_from_dict(raw: Any, path: str):
    if not isinstance(raw, dict):
        raise SchemaError(path, f"expected an object, got {type(raw).__name__}")
    kind_type = _expect_str(raw.get('type'), f"{path}.type")
    if kind_type not in KIND_FIELDS:
        raise SchemaError(f"{path}.type", f"unknown distribution kind {kind_type!r}")
    doc = _expect_object(raw, path, KIND_FIELDS[kind_type])
    if kind_type == 'uniform':
        return Uniform(_expect_str(doc['rule'], f"{path}.rule"))
    if kind_type == 'finite_exceptions':
        exceptions = {}
        for i, item in enumerate(_expect_list(doc['exceptions'], f"{path}.exceptions")):
            entry_path = f"{path}.exceptions[{i}]"
            entry = _expect_object(item, entry_path, {'cell', 'rule'})
            exceptions[_expect_cell(entry['cell'], f"{entry_path}.cell")] = _expect_str(
                entry['rule'], f"{entry_path}.rule"
            )
        return FiniteExceptions.of(_expect_str(doc['default'], f"{path}.default"), exceptions)
    if kind_type == 'rays':
        explicit = tuple(
            _expect_str(v, f"{path}.explicit[{i}]")
            for i, v in enumerate(_expect_list(doc['explicit'], f"{path}.explicit"))
        )
        return Rays1D(
            _expect_str(doc['left'], f"{path}.left"),
            _expect_int(doc['start'], f"{path}.start"),
            explicit,
            _expect_str(doc['right'], f"{path}.right"),
        )
    if kind_type == 'periodic':
        periods = tuple(
            _expect_int(v, f"{path}.periods[{i}]")
            for i, v in enumerate(_expect_list(doc['periods'], f"{path}.periods"))
        )
        fundamental = tuple(
            _expect_str(v, f"{path}.fundamental[{i}]")
            for i, v in enumerate(_expect_list(doc['fundamental'], f"{path}.fundamental"))
        )
        return Periodic(periods, fundamental)
    oriented = doc['oriented']
    if not isinstance(oriented, dict):
        raise SchemaError(f"{path}.oriented", "expected an object mapping compass letters to rules")
    return Spiral(
        _expect_str(doc['origin'], f"{path}.origin"),
        tuple(sorted((k, _expect_str(v, f"{path}.oriented.{k}")) for k, v in oriented.items())),
    )


def _kind_to_dict(kind) -> Dict:
    if isinstance(kind, Uniform):
        return {'type': 'uniform', 'rule': kind.rule}
    if isinstance(kind, FiniteExceptions):
        return {
            'type': 'finite_exceptions',
            'default': kind.default,
            'exceptions': [{'cell': list(c), 'rule': r} for c, r in kind.exceptions],
        }
    if isinstance(kind, Rays1D):
        return {
            'type': 'rays',
            'left': kind.left,
            'start': kind.start,
            'explicit': list(kind.explicit),
            'right': kind.right,
        }
    if isinstance(kind, Periodic):
        return {'type': 'periodic', 'periods': list(kind.periods), 'fundamental': list(kind.fundamental)}
    return {'type': 'spiral', 'origin': kind.origin, 'oriented': dict(kind.oriented)}


def distribution_from_dict(data: Any, rule_set: RuleSet, name: str = '') -> RuleDistribution:
    doc = _expect_object(data, '$', {'d', 'domain', 'kind'})
    d = _expect_int(doc['d'], '$.d')
    domain = _expect_str(doc['domain'], '$.domain')
    if domain not in ('full', 'halfline'):
        raise SchemaError('$.domain', f"expected 'full' or 'halfline', got {domain!r}")
    kind = _kind_from_dict(doc['kind'], '$.kind')
    try:
        return RuleDistribution(rule_set, d, domain, kind, name)
    except NucaError as e:
        raise SchemaError('$', str(e))


def distribution_to_dict(theta: RuleDistribution) -> Dict:
    return {'d': theta.d, 'domain': theta.domain, 'kind': _kind_to_dict(theta.kind)}


def _dump(data: Dict) -> str:
    return json.dumps(data, indent=2) + '\n'


def load_rules(source: Source) -> RuleSet:
    return rules_from_dict(_parse(source))


def save_rules(rule_set: RuleSet) -> str:
    return _dump(rules_to_dict(rule_set))


def load_distribution(source: Source, rule_set: RuleSet, name: str = '') -> RuleDistribution:
    return distribution_from_dict(_parse(source), rule_set, name)


def save_distribution(theta: RuleDistribution) -> str:
    return _dump(distribution_to_dict(theta))


def _read(path: Path) -> bytes:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found at: {path}")
    return path.read_bytes()


def load_rules_file(path: Path) -> RuleSet:
    return load_rules(_read(path))


def load_distribution_file(path: Path, rule_set: RuleSet) -> RuleDistribution:
    path = Path(path)
    return load_distribution(_read(path), rule_set, name=path.stem)


def save_files(theta: RuleDistribution, rules_path: Path, distribution_path: Optional[Path] = None):
    """Write a distribution's rule set and, optionally, the distribution itself"""
    Path(rules_path).write_text(save_rules(theta.rule_set), encoding='utf-8')
    if distribution_path is not None:
        Path(distribution_path).write_text(save_distribution(theta), encoding='utf-8')
