from typing import Callable, Dict

from nuca_lab.core.distribution import RuleDistribution
from nuca_lab.core.dynamics import build_example1
from nuca_lab.core.odometer import build_candidate_odometer, build_three_state_odometer, extend_to_Z
from nuca_lab.core.spiral import build_spiral_odometer
from nuca_lab.utils.constants import BUILTIN_NAMES

BUILDERS: Dict[str, Callable[[], RuleDistribution]] = {
    'odometer': lambda: build_three_state_odometer()[1],
    'odometer-z': extend_to_Z,
    'candidate': lambda: build_candidate_odometer()[1],
    'candidate-boundary': lambda: build_candidate_odometer()[2],
    'example1': build_example1,
    'spiral': build_spiral_odometer,
}


def builtin_distribution(name: str) -> RuleDistribution:
    """Builtin distribution by name"""
    if name not in BUILDERS:
        raise ValueError(f"Unknown builtin {name!r}, expected one of {', '.join(BUILTIN_NAMES)}")
    return BUILDERS[name]()
