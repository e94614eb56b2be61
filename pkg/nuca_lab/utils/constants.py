from typing import Dict, Tuple

# Coordinates with a larger magnitude are rejected, never wrapped
SAFE_COORDINATE_BOUND = 2 ** 40

# Engine
THREADS_ENV_VAR = 'NUCA_THREADS'
DEFAULT_THREADS = 1
COMPILE_STATE_LIMIT = 3 ** 12  # largest q^|window| compiled into a successor table
PARALLEL_MIN_CELLS = 1 << 16   # smaller frontiers are stepped on one thread
PARALLEL_MIN_CELLS_ENV_VAR = 'NUCA_PARALLEL_MIN_CELLS'

# Period detection: "Exact" needs this many observed periods
EXACT_PERIOD_REPETITIONS = 3

# Defaults of the dynamics checks (all overridable from the command line)
DEFAULT_CONE_CAP = 10 ** 3
DEFAULT_RECURRENCE_RADIUS = 10 ** 5
DEFAULT_TRACE_BUDGET = 10 ** 5

# Space-time rendering
PGM_MAX_GRAY = 255
PNG_CELL_SIZE = 8  # pixels per cell-step in PNG output

# Builtin distribution names understood by the command line
BUILTIN_NAMES: Tuple[str, ...] = (
    'odometer',
    'odometer-z',
    'candidate',
    'candidate-boundary',
    'example1',
    'spiral',
)

# Exit codes of the command line
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CONE_ESCAPE = 2
EXIT_VERIFICATION_FAILED = 3

# Compass names of the four unit offsets used by the spiral embedding
ORIENTATIONS: Dict[Tuple[int, int], str] = {
    (-1, 0): 'W',
    (1, 0): 'E',
    (0, 1): 'N',
    (0, -1): 'S',
}
