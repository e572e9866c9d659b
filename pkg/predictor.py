# Codes By Visionnn

"""
burstscale Capacity Predictors

Short-term: a per-split-level capacity frontier of <active flows, packets>
a core can finish inside one epoch. The core mapper asks it whether a
backlog fits.

Long-term: a rate-threshold table T[f], the highest steady packet rate a
dedicated core sustains under the SLO with f active flows. The server
mapper packs RSS buckets against it.

Both are trained by driving the simulator through injected callables, or
derived in closed form from the chain costs.
"""

import math
from bisect import bisect_left
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from chain_model import (
    UNSPLIT,
    ChainSpec,
    SplitScheme,
    best_split,
    service_time,
    sub_chain_costs,
)
from config import (
    FLOW_GRID,
    MAX_PROBE_FLOWS,
    NS_PER_S,
    PLAN_OVERHEAD_NS,
    PROBE_FLOOR_DIVISOR,
    PROBE_HEADROOM,
    SATURATION_EPOCHS,
    SEARCH_RESOLUTION,
)
from core_mapper import epoch_length
from errors import PredictorError
from fingerprint import chain_hash
from logger import log
from traffic import PacketRecord

Point = Tuple[int, int]


class EpochSample(NamedTuple):
    f: int           # distinct flows among packets completed in the epoch
    p: int           # packets completed in the epoch
    violated: bool   # some completion in the epoch exceeded the SLO


# ─── Types ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CapacityFrontier:
    epoch_length: int
    points: Tuple[Point, ...]
    scheme: SplitScheme = UNSPLIT
    flow_agnostic: bool = False

    def __post_init__(self) -> None:
        points = tuple((int(f), int(p)) for f, p in self.points)
        object.__setattr__(self, "points", points)
        if not points:
            raise PredictorError("frontier has no points")
        for (f0, p0), (f1, p1) in zip(points, points[1:]):
            if f1 <= f0:
                raise PredictorError(f"frontier flow counts must increase: {f0} then {f1}")
            if p1 > p0:
                raise PredictorError(f"frontier packets must not increase: {p0} then {p1}")
        if points[0][0] <= 0 or points[-1][1] <= 0:
            raise PredictorError("frontier points must be positive")
        object.__setattr__(self, "_flows", tuple(f for f, _ in points))

    @property
    def level(self) -> int:
        return self.scheme.n

    def capacity(self, f: int) -> Optional[int]:
        """Packets admitted at f flows, None when f is beyond the trained range."""
        if self.flow_agnostic:
            return self.points[0][1]
        idx = bisect_left(self._flows, max(f, 1))
        if idx == len(self._flows):
            return None
        return self.points[idx][1]


@dataclass(frozen=True)
class FrontierFamily:
    chain_hash: str
    epoch_length: int
    slo: int
    frontiers: Tuple[CapacityFrontier, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.frontiers, key=lambda fr: fr.level))
        object.__setattr__(self, "frontiers", ordered)
        levels = [fr.level for fr in ordered]
        if len(set(levels)) != len(levels):
            raise PredictorError(f"duplicate split levels in frontier family: {levels}")

    @property
    def max_level(self) -> int:
        return self.frontiers[-1].level if self.frontiers else 0

    def for_level(self, n: int) -> Optional[CapacityFrontier]:
        for frontier in self.frontiers:
            if frontier.level == n:
                return frontier
        return None

    def admits(self, n: int, f: int, p: int) -> bool:
        frontier = self.for_level(n)
        if frontier is None:
            return p == 0
        return admits(frontier, f, p)


@dataclass(frozen=True)
class RateThresholdTable:
    chain_hash: str
    slo: int
    grid: Tuple[int, ...]
    rates: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", tuple(int(g) for g in self.grid))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if not self.grid or len(self.grid) != len(self.rates):
            raise PredictorError("threshold grid and rates must be non-empty and equally long")
        if any(g1 <= g0 for g0, g1 in zip(self.grid, self.grid[1:])) or self.grid[0] < 1:
            raise PredictorError(f"threshold grid must be positive and increasing: {self.grid}")
        if any(r < 0 for r in self.rates):
            raise PredictorError("threshold rates must be non-negative")
        if any(r1 > r0 for r0, r1 in zip(self.rates, self.rates[1:])):
            raise PredictorError("threshold rates must not increase with flow count")

    def threshold(self, flows: float) -> float:
        """T at the nearest grid point >= flows; 0.0 past the grid."""
        idx = bisect_left(self.grid, flows)
        if idx == len(self.grid):
            return 0.0
        return self.rates[idx]

    def scaled(self, factor: float) -> "RateThresholdTable":
        return replace(self, rates=tuple(r * factor for r in self.rates))


@dataclass
class BacklogPartition:
    """First assignment is the dedicated core's retained share."""

    assignments: List[List[Tuple[int, int]]] = field(default_factory=list)
    whales: List[Tuple[int, int]] = field(default_factory=list)

    def totals(self) -> List[Point]:
        return [(len(a), sum(p for _, p in a)) for a in self.assignments]


# ─── Queries ──────────────────────────────────────────────────────────────────

def admits(frontier: CapacityFrontier, f: int, p: int) -> bool:
    """
    True iff <f, p> lies on or under the frontier. Untrained f rounds up to
    the nearest trained point; f beyond the grid is refused unless p is 0.
    """
    if p <= 0:
        return True
    capacity = frontier.capacity(f)
    return capacity is not None and p <= capacity


def partition_backlog(family: FrontierFamily, flows: Sequence[Tuple[int, int]]) -> BacklogPartition:
    """
    Split a backlog of (flow, task_size) pairs into per-core shares under the
    1-core frontier. The retained share takes the smallest flows first; the
    rest are packed first-fit-decreasing. Flows too big for one core on their
    own are returned as whales.
    """
    base = family.for_level(1)
    if base is None:
        raise PredictorError("frontier family has no 1-core frontier")

    partition = BacklogPartition(assignments=[[]])
    ordered = sorted(((flow, size) for flow, size in flows if size > 0), key=lambda x: (x[1], x[0]))
    overflow: List[Tuple[int, int]] = []

    retained = partition.assignments[0]
    retained_p = 0
    for flow, size in ordered:
        if not admits(base, 1, size):
            partition.whales.append((flow, size))
        elif not overflow and admits(base, len(retained) + 1, retained_p + size):
            retained.append((flow, size))
            retained_p += size
        else:
            overflow.append((flow, size))

    bins: List[List[Tuple[int, int]]] = []
    loads: List[int] = []
    for flow, size in sorted(overflow, key=lambda x: (-x[1], x[0])):
        for i, members in enumerate(bins):
            if admits(base, len(members) + 1, loads[i] + size):
                members.append((flow, size))
                loads[i] += size
                break
        else:
            bins.append([(flow, size)])
            loads.append(size)

    partition.assignments.extend(bins)
    return partition


# ─── Short-term training ──────────────────────────────────────────────────────

def frontier_points(samples: Iterable[EpochSample]) -> Tuple[Point, ...]:
    """
    Highest p seen in an SLO-violating epoch for each f, turned into a
    non-increasing envelope: p'(f) = max over f' >= f of p(f').
    """
    best: Dict[int, int] = {}
    for sample in samples:
        if sample.violated and sample.f > 0 and sample.p > 0:
            best[sample.f] = max(best.get(sample.f, 0), sample.p)
    if not best:
        return ()

    envelope: List[Point] = []
    running = 0
    for f in sorted(best, reverse=True):
        running = max(running, best[f])
        envelope.append((f, running))
    envelope.reverse()
    return tuple(envelope)


def saturation_trace(
    chain: ChainSpec,
    scheme: SplitScheme,
    epoch: int,
    flows: int,
    epochs: int = SATURATION_EPOCHS,
) -> List[PacketRecord]:
    """
    A backlog present at t=0, laid out flow after flow so that about `flows`
    fresh flows are served in each epoch. One flow means one deep flow.
    """
    bottleneck = max(sub_chain_costs(chain, scheme))
    total = max(1, epochs * epoch // bottleneck)
    if flows <= 1:
        per_flow = total
    else:
        per_flow = max(1, int((epoch / flows - chain.per_new_flow_cost) // bottleneck))
    count = math.ceil(total / per_flow)
    return [
        PacketRecord(0, flow, 0)
        for flow in range(1, count + 1)
        for _ in range(per_flow)
    ]


def train_short_term(
    profile: Callable[[SplitScheme, Sequence[PacketRecord]], List[EpochSample]],
    chain: ChainSpec,
    slo: int,
    workload: Sequence[PacketRecord],
    max_split: int,
    flow_grid: Sequence[int] = FLOW_GRID,
    max_probe_flows: int = MAX_PROBE_FLOWS,
) -> FrontierFamily:
    """
    Train one frontier per split level. `profile(scheme, trace)` runs the
    trace on an isolated queue served by that scheme with every mapper off
    and returns per-epoch samples.
    """
    epoch = epoch_length(slo)
    frontiers: List[CapacityFrontier] = []

    for n in range(1, max_split + 1):
        scheme = UNSPLIT if n == 1 else best_split(chain, n)
        if scheme is None:
            break

        points = frontier_points(profile(scheme, workload)) if workload else ()
        if not points:
            log.warning(
                f"TRAIN | frontier unconstrained for n={n} slo_us={slo / 1000:g}; "
                f"falling back to saturation probing"
            )
            samples: List[EpochSample] = []
            for flows in flow_grid:
                if flows > max_probe_flows:
                    break
                samples.extend(profile(scheme, saturation_trace(chain, scheme, epoch, flows)))
            points = frontier_points(samples)
        if not points:
            raise PredictorError(f"could not train a frontier for split level {n}")

        frontiers.append(CapacityFrontier(epoch, points, scheme))
        log.info(f"TRAIN | frontier n={n} cuts={scheme.label()} points={len(points)} p(1)={points[0][1]}")

    return FrontierFamily(chain_hash(chain), epoch, slo, tuple(frontiers))


# ─── Long-term training ───────────────────────────────────────────────────────

def train_long_term(
    probe: Callable[[int, float, int], Optional[int]],
    chain: ChainSpec,
    slo: int,
    flow_grid: Sequence[int] = FLOW_GRID,
    resolution: float = SEARCH_RESOLUTION,
    seed: int = 1,
) -> RateThresholdTable:
    """
    Binary-search T[f] for each grid point. `probe(f, rate, seed)` returns
    the p99 latency in ns of a single dedicated core fed by f paced flows, or
    None when packets were dropped. The search is biased low: the final
    candidate must also pass with seed+1, stepping down until it does.
    """

    def passes(flows: int, rate: float, run_seed: int) -> bool:
        p99 = probe(flows, rate, run_seed)
        return p99 is not None and p99 <= slo

    hi_bound = PROBE_HEADROOM * NS_PER_S / service_time(chain, False)
    floor_rate = hi_bound / PROBE_FLOOR_DIVISOR
    rates: List[float] = []

    for flows in flow_grid:
        if not passes(flows, floor_rate, seed):
            log.warning(f"TRAIN | T[{flows}]=0: even {floor_rate:.0f} pkts/s violates slo_us={slo / 1000:g}")
            rates.append(0.0)
            continue

        if passes(flows, hi_bound, seed):
            candidate = hi_bound
        else:
            lo, hi = floor_rate, hi_bound
            while hi - lo > resolution * hi:
                mid = (lo + hi) / 2
                if passes(flows, mid, seed):
                    lo = mid
                else:
                    hi = mid
            candidate = lo

        step = resolution * candidate
        while candidate > 0 and not passes(flows, candidate, seed + 1):
            candidate -= step
        rates.append(max(candidate, 0.0))
        log.debug(f"TRAIN | T[{flows}]={rates[-1]:.0f} pkts/s")

    # non-increasing in f
    for i in range(1, len(rates)):
        rates[i] = min(rates[i], rates[i - 1])

    return RateThresholdTable(chain_hash(chain), slo, tuple(flow_grid), tuple(rates))


# ─── Closed-form predictors ───────────────────────────────────────────────────

def analytic_frontier(
    chain: ChainSpec,
    slo: int,
    scheme: SplitScheme,
    max_flows: int,
    plan_overhead: int = PLAN_OVERHEAD_NS,
) -> Optional[CapacityFrontier]:
    """
    Worst-case frontier for a scheme on a core that is idle at the boundary.
    The plan overhead comes off the epoch and every flow is assumed new. A
    pipeline finishes p packets within
    sum(stages) + (p-1)*bottleneck + f*new_flow_cost.

    A batch still in service at the boundary is not part of this budget: the
    core mapper charges it per queue, in packets, when it plans.
    """
    epoch = epoch_length(slo)
    costs = sub_chain_costs(chain, scheme)
    bottleneck = max(costs)
    budget = epoch - plan_overhead - sum(costs)

    steps: List[Point] = []
    for f in range(1, max_flows + 1):
        remaining = budget - f * chain.per_new_flow_cost
        if remaining < 0:
            break
        p = remaining // bottleneck + 1
        if steps and steps[-1][1] == p:
            steps[-1] = (f, p)
        else:
            steps.append((f, p))
    if not steps:
        return None
    return CapacityFrontier(epoch, tuple(steps), scheme)


def analytic_frontier_family(
    chain: ChainSpec,
    slo: int,
    max_split: int,
    flow_grid: Sequence[int] = FLOW_GRID,
    plan_overhead: int = PLAN_OVERHEAD_NS,
) -> FrontierFamily:
    frontiers: List[CapacityFrontier] = []
    for n in range(1, max_split + 1):
        scheme = UNSPLIT if n == 1 else best_split(chain, n)
        if scheme is None:
            break
        frontier = analytic_frontier(chain, slo, scheme, max(flow_grid), plan_overhead)
        if frontier is not None:
            frontiers.append(frontier)
    if not frontiers or frontiers[0].level != 1:
        raise PredictorError(
            f"slo_us={slo / 1000:g} leaves no epoch budget for chain cost {chain.total_cost} ns "
            f"plus new-flow cost {chain.per_new_flow_cost} ns"
        )
    return FrontierFamily(chain_hash(chain), epoch_length(slo), slo, tuple(frontiers))


def analytic_threshold_table(
    chain: ChainSpec,
    slo: int,
    flow_grid: Sequence[int] = FLOW_GRID,
    window: int = NS_PER_S,
) -> RateThresholdTable:
    """
    Closed-form T[f]: core utilisation is capped so two worst-case packets
    still fit in the SLO, and f flows pay their setup cost once per window.
    """
    worst = service_time(chain, True)
    utilisation = max(0.0, 1.0 - 2.0 * worst / slo)
    rates = [
        utilisation * max(0.0, window - f * chain.per_new_flow_cost) / chain.total_cost
        for f in flow_grid
    ]
    if not any(rates):
        log.warning(f"PREDICT | analytic thresholds are all zero at slo_us={slo / 1000:g}")
    return RateThresholdTable(chain_hash(chain), slo, tuple(flow_grid), tuple(rates))


# ─── Ablation variants ────────────────────────────────────────────────────────

def _flat(family: FrontierFamily, pick: Callable[[Iterable[int]], int]) -> FrontierFamily:
    flat = []
    for frontier in family.frontiers:
        p_const = pick(p for _, p in frontier.points)
        flat.append(CapacityFrontier(frontier.epoch_length, ((frontier.points[-1][0], p_const),),
                                     frontier.scheme, flow_agnostic=True))
    return replace(family, frontiers=tuple(flat))


def static_safe(family: FrontierFamily) -> FrontierFamily:
    """Flow-agnostic frontier at the smallest trained p of each level."""
    return _flat(family, min)


def static_unsafe(family: FrontierFamily) -> FrontierFamily:
    """Flow-agnostic frontier at the largest trained p of each level."""
    return _flat(family, max)


def static_threshold(table: RateThresholdTable, which: str) -> RateThresholdTable:
    """Constant T over the grid, at its minimum ('safe') or maximum ('unsafe')."""
    value = min(table.rates) if which == "safe" else max(table.rates)
    return replace(table, rates=tuple(value for _ in table.rates))


class Predictors(NamedTuple):
    family: FrontierFamily
    table: RateThresholdTable


def analytic_predictors(
    chain: ChainSpec,
    slo: int,
    max_split: int,
    flow_grid: Sequence[int] = FLOW_GRID,
    plan_overhead: int = PLAN_OVERHEAD_NS,
) -> Predictors:
    return Predictors(
        analytic_frontier_family(chain, slo, max_split, flow_grid, plan_overhead),
        analytic_threshold_table(chain, slo, flow_grid),
    )
