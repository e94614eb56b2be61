"""
Exact evolution of a NUCA on finite windows.

Every result is computed on the backward dependency cone of its target cells,
so it never depends on states outside the cone and never guesses a boundary.
Two strategies produce bitwise identical results:

  frontier  step the whole cone, shrinking it by one layer per time step
  compiled  for closed cones with few words, tabulate one step on every word
            of the cone and follow the successor table
"""
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from nuca_lab.configs.engine_config import DEFAULT_CONFIG, EngineConfig
from nuca_lab.core.distribution import RuleDistribution
from nuca_lab.core.lattice import Cell, Pattern, Window, WindowConfiguration, check_cell
from nuca_lab.core.system_monitor import SystemMonitor
from nuca_lab.utils.errors import DomainError, OutsideKnownRegionError


@dataclass(frozen=True)
class ConeReport:
    """
    Cells whose time-0 states determine the targets at every time 0..steps.

    ``layer_sizes[k]`` is the size of the k-fold backward expansion of the
    targets (the last entry repeats once the expansion is closed).
    """
    targets: Window
    steps: int
    required: Window
    layer_sizes: Tuple[int, ...]
    closed: bool
    pruned: bool = False


@dataclass(frozen=True)
class _ConePlan:
    order: Tuple[Cell, ...]       # targets first, then each new layer sorted
    layer_sizes: Tuple[int, ...]
    closed: bool

    def size(self, k: int) -> int:
        return self.layer_sizes[min(k, len(self.layer_sizes) - 1)]


@dataclass(frozen=True)
class _StepTables:
    flat: np.ndarray     # all rule tables concatenated
    base: np.ndarray     # per cell: offset of its rule's table in ``flat``
    nbr: np.ndarray      # per cell and neighborhood slot: position in the state array
    weights: np.ndarray  # per cell and slot: q^(m-1-j), 0 for padding


def _check_targets(theta: RuleDistribution, targets: Window):
    if targets.dimension != theta.d:
        raise DomainError(f"Targets are {targets.dimension}-dimensional, distribution has d={theta.d}")
    outside = [c for c in targets.cells if not theta.in_domain(c)]
    if outside:
        raise DomainError(f"Targets outside the distribution's domain: {outside[:5]}")


@lru_cache(maxsize=64)
def _plan_cone(theta: RuleDistribution, targets: Window, t: int, pruned: bool) -> _ConePlan:
    _check_targets(theta, targets)
    order: List[Cell] = list(targets.cells)
    seen = set(order)
    frontier = order
    sizes = [len(order)]
    closed = False
    for _ in range(t):
        fresh = set()
        for x in frontier:
            for y in theta.neighbors(x, pruned):
                if y not in seen:
                    if not theta.in_domain(y):
                        raise DomainError(
                            f"Neighbor {y} of cell {x} lies outside the distribution's domain"
                        )
                    fresh.add(y)
        if not fresh:
            closed = True
            break
        layer = sorted(fresh)
        seen.update(layer)
        order.extend(layer)
        sizes.append(len(order))
        frontier = layer
    return _ConePlan(tuple(order), tuple(sizes), closed)


def dependency_cone(
    theta: RuleDistribution,
    targets: Window,
    t: int,
    pruned: bool = False,
) -> ConeReport:
    """
    Backward dependency cone of ``targets`` over ``t`` steps.

    Args:
        theta: Rule distribution
        targets: Cells whose states are wanted
        t: Number of time steps
        pruned: Expand only along offsets the local tables actually depend on

    Returns:
        ConeReport: the required time-0 cells
    """
    if t < 0:
        raise ValueError(f"Number of steps must be non-negative, got {t}")
    plan = _plan_cone(theta, targets, t, pruned)
    return ConeReport(
        targets=targets,
        steps=t,
        required=Window(tuple(sorted(plan.order))),
        layer_sizes=plan.layer_sizes,
        closed=plan.closed,
        pruned=pruned,
    )


def _build_tables(theta: RuleDistribution, order: Sequence[Cell], n_update: int, pruned: bool) -> _StepTables:
    rule_set = theta.rule_set
    offsets = {}
    chunks = []
    position = 0
    for rule in rule_set.rules:
        offsets[rule.name] = position
        chunks.append(rule.table_array)
        position += len(rule.table)
    flat = np.concatenate(chunks)

    width = max(r.arity for r in rule_set.rules)
    dummy = len(order)
    pos = {c: i for i, c in enumerate(order)}
    base = np.zeros(n_update, dtype=np.int64)
    nbr = np.full((n_update, width), dummy, dtype=np.int64)
    weights = np.zeros((n_update, width), dtype=np.int64)
    for i in range(n_update):
        x = order[i]
        rule = theta.rule_at(x)
        essential = set(rule.essential_offsets()) if pruned else None
        base[i] = offsets[rule.name]
        for j, offset in enumerate(rule.neighborhood):
            weights[i, j] = rule.weights[j]
            if essential is not None and offset not in essential:
                continue  # reads the dummy slot; the table ignores this position
            nbr[i, j] = pos[tuple(a + b for a, b in zip(x, offset))]
    return _StepTables(flat, base, nbr, weights)


def _step_range(states: np.ndarray, tables: _StepTables, lo: int, hi: int) -> np.ndarray:
    gathered = states[tables.nbr[lo:hi]].astype(np.int64)
    idx = tables.base[lo:hi] + (gathered * tables.weights[lo:hi]).sum(axis=1)
    return tables.flat[idx]


def _chunks(n: int, parts: int) -> List[Tuple[int, int]]:
    size = -(-n // parts)
    return [(lo, min(n, lo + size)) for lo in range(0, n, size)]


def _run_frontier(
    states: np.ndarray,
    plan: _ConePlan,
    tables: _StepTables,
    n_targets: int,
    t: int,
    config: EngineConfig,
) -> np.ndarray:
    out = np.empty((t + 1, n_targets), dtype=np.uint8)
    out[0] = states[:n_targets]
    executor = ThreadPoolExecutor(max_workers=config.threads) if config.threads > 1 else None
    try:
        for s in range(t):
            n_active = plan.size(t - s - 1)
            if executor is not None and n_active >= config.parallel_min_cells:
                parts = executor.map(
                    lambda bounds: _step_range(states, tables, *bounds),
                    _chunks(n_active, config.threads),
                )
                new = np.concatenate(list(parts))
            else:
                new = _step_range(states, tables, 0, n_active)
            states[:n_active] = new
            out[s + 1] = states[:n_targets]
    finally:
        if executor is not None:
            executor.shutdown()
    return out


@lru_cache(maxsize=16)
def _successor_table(theta: RuleDistribution, order: Tuple[Cell, ...], pruned: bool) -> np.ndarray:
    """
    One step applied to every word of a closed window.

    Words are coded as sum(state_i * q^i) over the window's cells in ``order``.
    """
    q = theta.q
    n = len(order)
    tables = _build_tables(theta, order, n, pruned)
    codes = np.arange(q ** n, dtype=np.int64)
    digits = np.zeros((n + 1, q ** n), dtype=np.uint8)
    for i in range(n):
        digits[i] = (codes // q ** i) % q
    successor = np.zeros(q ** n, dtype=np.int64)
    for i in range(n):
        idx = np.full(q ** n, tables.base[i], dtype=np.int64)
        for j in range(tables.nbr.shape[1]):
            if tables.weights[i, j]:
                idx += digits[tables.nbr[i, j]].astype(np.int64) * tables.weights[i, j]
        successor += tables.flat[idx].astype(np.int64) * q ** i
    return successor


def _run_compiled(
    theta: RuleDistribution,
    states: np.ndarray,
    plan: _ConePlan,
    n_targets: int,
    t: int,
    pruned: bool,
) -> np.ndarray:
    q = theta.q
    n = len(plan.order)
    successor = _successor_table(theta, plan.order, pruned).tolist()
    code = 0
    for i in reversed(range(n)):
        code = code * q + int(states[i])
    orbit = [code] * (t + 1)
    for s in range(1, t + 1):
        code = successor[code]
        orbit[s] = code
    codes = np.asarray(orbit, dtype=np.int64)
    out = np.empty((t + 1, n_targets), dtype=np.uint8)
    for i in range(n_targets):
        out[:, i] = (codes // q ** i) % q
    return out


def _choose_strategy(theta: RuleDistribution, plan: _ConePlan, t: int, config: EngineConfig) -> str:
    n = len(plan.order)
    compilable = plan.closed and theta.q ** n <= config.compile_state_limit
    if config.strategy == 'compiled':
        if not compilable:
            raise ValueError(
                f"Cone of {n} cells is not compilable (closed={plan.closed}, "
                f"q^n={theta.q}^{n}, limit {config.compile_state_limit})"
            )
        return 'compiled'
    if config.strategy == 'frontier' or not compilable:
        return 'frontier'
    return 'compiled' if (t + 1) * n * 16 >= theta.q ** n else 'frontier'


@dataclass(frozen=True)
class Evolution:
    """
    Exact states of the target cells at times 0..t.

    Indexing an Evolution yields the Pattern on the targets at that time.
    """
    targets: Window
    states: np.ndarray  # shape (t + 1, |targets|), read-only
    cone: ConeReport
    source: str
    strategy: str

    @property
    def steps(self) -> int:
        return self.states.shape[0] - 1

    def __len__(self) -> int:
        return self.states.shape[0]

    def __getitem__(self, s: int) -> Pattern:
        return Pattern.from_array(self.targets, self.states[s])

    def __iter__(self) -> Iterator[Pattern]:
        for s in range(len(self)):
            yield self[s]

    @property
    def final(self) -> Pattern:
        return self[len(self) - 1]

    def column(self, cell) -> np.ndarray:
        return self.states[:, self.targets.positions[tuple(cell)]]


def evolve_exact(
    theta: RuleDistribution,
    init: WindowConfiguration,
    targets: Window,
    t: int,
    pruned: bool = False,
    config: Optional[EngineConfig] = None,
) -> Evolution:
    """
    States of ``targets`` at times 0..t, computed exactly on their dependency cone.

    Args:
        theta: Rule distribution
        init: Initial configuration; must determine every cell of the cone
        targets: Cells to report
        t: Number of steps
        pruned: Use essential neighborhoods for the cone
        config: Engine settings (threads, strategy); never affect the result

    Returns:
        Evolution: one Pattern on ``targets`` per time step

    Raises:
        OutsideKnownRegionError: if the cone consults an undefined cell
    """
    config = config or DEFAULT_CONFIG
    if t < 0:
        raise ValueError(f"Number of steps must be non-negative, got {t}")
    for c in targets.cells:
        check_cell(c, config.safe_bound)
    plan = _plan_cone(theta, targets, t, pruned)
    cone = ConeReport(
        targets=targets,
        steps=t,
        required=Window(tuple(sorted(plan.order))),
        layer_sizes=plan.layer_sizes,
        closed=plan.closed,
        pruned=pruned,
    )
    for c in plan.order[len(targets):]:
        check_cell(c, config.safe_bound)
    uncovered = init.uncovered(plan.order)
    if uncovered:
        raise OutsideKnownRegionError(uncovered)

    n_targets = len(targets)
    n_cells = len(plan.order)
    width = max(r.arity for r in theta.rule_set.rules)
    SystemMonitor.check_budget((t + 1) * n_targets + n_cells * (1 + 16 * width + 8))

    strategy = _choose_strategy(theta, plan, t, config)
    if config.verbose:
        print(
            f"Evolving {n_targets} target cell(s) for {t} steps on a cone of {n_cells} cells "
            f"({strategy})",
            file=sys.stderr,
        )

    states = np.zeros(n_cells + 1, dtype=np.uint8)
    states[:n_cells] = init.states_for(plan.order, theta.q)
    if strategy == 'compiled':
        out = _run_compiled(theta, states, plan, n_targets, t, pruned)
    else:
        n_update = plan.size(t - 1) if t > 0 else 0
        tables = _build_tables(theta, plan.order, n_update, pruned)
        out = _run_frontier(states, plan, tables, n_targets, t, config)
    out.setflags(write=False)
    return Evolution(targets, out, cone, init.describe(), strategy)


@dataclass(frozen=True)
class Trace:
    """Time-indexed states T_x(0..T) of one cell"""
    cell: Cell
    values: np.ndarray
    source: str
    cone: Optional[ConeReport] = None

    def __len__(self) -> int:
        return len(self.values)

    def to_csv(self) -> str:
        lines = ['t,state']
        lines.extend(f"{t},{int(v)}" for t, v in enumerate(self.values))
        return '\n'.join(lines) + '\n'


def trace(
    theta: RuleDistribution,
    init: WindowConfiguration,
    x,
    T: int,
    pruned: bool = False,
    config: Optional[EngineConfig] = None,
) -> Trace:
    """T_x(t) = H^t(init)(x) for t = 0..T"""
    cell = check_cell(x)
    evolution = evolve_exact(theta, init, Window((cell,)), T, pruned, config)
    return Trace(cell, evolution.states[:, 0], evolution.source, evolution.cone)


def encode_window_words(evolution: Evolution, q: int) -> np.ndarray:
    """Each target pattern as the integer sum(state_i * q^i) over the target order"""
    codes = np.zeros(len(evolution), dtype=np.int64)
    for i in reversed(range(len(evolution.targets))):
        codes = codes * q + evolution.states[:, i].astype(np.int64)
    return codes


@dataclass(frozen=True)
class InfluenceClosure:
    """
    Outcome of closing the backward expansion of one cell.

    finite: the expansion reached a fixed point; ``window`` then bounds every
            dependency cone of the cell, for all t
    otherwise the cap was reached; ``growth`` records the layer sizes seen
    """
    cell: Cell
    finite: bool
    window: Optional[Window]
    growth: Tuple[int, ...]
    cap: int

    @property
    def label(self) -> str:
        return 'finite' if self.finite else 'inconclusive'


def influence_closure(theta: RuleDistribution, x, cap: int, pruned: bool = False) -> InfluenceClosure:
    cell = check_cell(x)
    plan = _plan_cone(theta, Window((cell,)), cap, pruned)
    window = Window(tuple(sorted(plan.order))) if plan.closed else None
    return InfluenceClosure(cell, plan.closed, window, plan.layer_sizes, cap)
