import os
from dataclasses import dataclass, replace

from nuca_lab.utils.constants import (
    COMPILE_STATE_LIMIT,
    DEFAULT_THREADS,
    PARALLEL_MIN_CELLS,
    PARALLEL_MIN_CELLS_ENV_VAR,
    SAFE_COORDINATE_BOUND,
    THREADS_ENV_VAR,
)

STRATEGIES = ('auto', 'frontier', 'compiled')


@dataclass(frozen=True)
class EngineConfig:
    """Settings of the exact evolution engine. None of them changes results."""
    safe_bound: int = SAFE_COORDINATE_BOUND
    threads: int = DEFAULT_THREADS
    strategy: str = 'auto'
    compile_state_limit: int = COMPILE_STATE_LIMIT
    parallel_min_cells: int = PARALLEL_MIN_CELLS
    verbose: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"Unknown strategy {self.strategy!r}, expected one of {STRATEGIES}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.safe_bound < 1:
            raise ValueError(f"safe_bound must be positive, got {self.safe_bound}")

    @classmethod
    def from_env(cls, **overrides) -> 'EngineConfig':
        """Build a configuration, reading NUCA_THREADS and NUCA_PARALLEL_MIN_CELLS"""
        config = cls(
            threads=max(1, _env_int(THREADS_ENV_VAR, DEFAULT_THREADS)),
            parallel_min_cells=max(1, _env_int(PARALLEL_MIN_CELLS_ENV_VAR, PARALLEL_MIN_CELLS)),
        )
        return replace(config, **overrides) if overrides else config


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


DEFAULT_CONFIG = EngineConfig()
