# Codes By Visionnn

"""
burstscale Core Mapper
Epoch-scale burst handling on one dedicated core. At every epoch boundary
the core reads its queue counters, keeps what its frontier says it can
finish in the next epoch, and moves the rest to auxiliary cores, raising a
queue's split level or splitting a whale's chain when one core is not
enough. Flows that fit nowhere stay put and raise an alert.

This module only plans. The simulator owns the queues and applies plans.
"""

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Protocol, Sequence, Tuple

from config import PLAN_OVERHEAD_NS
from logger import log

if TYPE_CHECKING:
    from predictor import FrontierFamily

LOCAL_QUEUE = 0


def epoch_length(slo: int) -> int:
    """Epoch in ns: half the latency SLO."""
    return slo // 2


# ─── Statistics ───────────────────────────────────────────────────────────────

@dataclass
class QueueCounters:
    """Per-queue counters, reset at each epoch boundary except the carry."""

    carried: int = 0
    arrived: int = 0
    processed: int = 0

    @property
    def queued(self) -> int:
        return self.carried + self.arrived - self.processed


class QueueView(Protocol):
    queue_id: int
    split: int
    counters: QueueCounters

    def flow_backlog(self) -> Dict[int, int]: ...


@dataclass(frozen=True)
class QueueStats:
    queue_id: int
    split: int
    pkts_arrived: int
    pkts_processed: int
    pkts_queued: int
    flows_queued: int
    pkts_in_service: int = 0


@dataclass(frozen=True)
class FlowStats:
    flow: int
    task_size: int
    queue_id: int


@dataclass(frozen=True)
class EpochStats:
    queues: Tuple[QueueStats, ...]
    flows: Tuple[FlowStats, ...]
    next_queue_id: int = 1

    @property
    def backlog(self) -> Tuple[int, int]:
        return len(self.flows), sum(fs.task_size for fs in self.flows)


@dataclass(frozen=True)
class CoreMapperConfig:
    slo: int
    max_split: int = 1
    plan_overhead: int = PLAN_OVERHEAD_NS
    aux_request_budget: Optional[int] = None

    def __post_init__(self) -> None:
        if epoch_length(self.slo) <= 0:
            raise ValueError(f"slo must give a positive epoch, got {self.slo}")
        if self.max_split < 1:
            raise ValueError(f"max_split must be >= 1, got {self.max_split}")

    @property
    def epoch(self) -> int:
        return epoch_length(self.slo)


def update_stats(
    queues: Sequence[QueueView],
    next_queue_id: int = 1,
    in_service: Optional[Mapping[int, int]] = None,
) -> EpochStats:
    """
    Snapshot every queue at an epoch boundary, then roll the counters:
    arrivals and processed reset, the queued count carries over.
    `in_service` maps a queue to the packets its cores still owe from a
    batch that straddles the boundary.
    """
    in_service = in_service or {}
    queue_stats: List[QueueStats] = []
    flow_stats: List[FlowStats] = []
    for queue in queues:
        counters = queue.counters
        queued = counters.queued
        backlog = queue.flow_backlog()
        queue_stats.append(QueueStats(
            queue_id=queue.queue_id,
            split=queue.split,
            pkts_arrived=counters.arrived,
            pkts_processed=counters.processed,
            pkts_queued=queued,
            flows_queued=sum(1 for size in backlog.values() if size > 0),
            pkts_in_service=in_service.get(queue.queue_id, 0),
        ))
        flow_stats.extend(
            FlowStats(flow, size, queue.queue_id)
            for flow, size in sorted(backlog.items())
            if size > 0
        )
        counters.carried = queued
        counters.arrived = 0
        counters.processed = 0
    return EpochStats(tuple(queue_stats), tuple(flow_stats), next_queue_id)


# ─── Plans ────────────────────────────────────────────────────────────────────

class AuxPool(Protocol):
    def available(self) -> int: ...


@dataclass(frozen=True)
class FlowMove:
    flow: int
    src_queue: int
    dst_queue: int
    packets: int


@dataclass(frozen=True)
class NewQueue:
    queue_id: int
    level: int


@dataclass(frozen=True)
class WhaleDecision:
    n: Optional[int]
    best_effort: bool
    alert: Optional[str] = None


@dataclass
class MigrationPlan:
    moves: List[FlowMove] = field(default_factory=list)
    new_queues: List[NewQueue] = field(default_factory=list)
    level_changes: Dict[int, int] = field(default_factory=dict)
    whale_splits: List[Tuple[int, int]] = field(default_factory=list)   # (flow, level)
    alerts: List[Tuple[int, str]] = field(default_factory=list)         # (flow, reason)
    at_risk: bool = False
    loads: Dict[int, Tuple[int, int, int]] = field(default_factory=dict)  # queue -> (level, f, p)
    cores_requested: int = 0

    @property
    def is_empty(self) -> bool:
        return not (self.moves or self.new_queues or self.level_changes)


@dataclass
class _Bin:
    queue_id: int
    level: int
    f: int = 0
    p: int = 0
    new: bool = False


def plan_whale_split(task_size: int, family: "FrontierFamily", max_split: int) -> WhaleDecision:
    """
    Smallest split level whose frontier admits the flow on its own. No level
    does: process best-effort and alert the operator.
    """
    for n in range(1, max_split + 1):
        if family.for_level(n) is not None and family.admits(n, 1, task_size):
            return WhaleDecision(n, False)
    return WhaleDecision(
        None,
        True,
        f"flow backlog of {task_size} packets exceeds every split level up to {max_split}",
    )


def absorb_bursts(
    stats: EpochStats,
    family: "FrontierFamily",
    aux_pool: AuxPool,
    max_split: int,
    budget: Optional[int] = None,
) -> MigrationPlan:
    """
    Plan this epoch's migrations.

    Every queue starts loaded with the packets still in service on it, then
    keeps its own flows, smallest backlog first, while its frontier admits
    them. Each overflow flow, smallest first, then goes to the
    first other queue that admits it at its current or a higher split level,
    else to a new auxiliary queue, else to a new split queue of its own.
    When the pool runs dry the flow stays and the epoch is at risk.
    """
    plan = MigrationPlan()
    pool_left = aux_pool.available()
    if budget is not None:
        pool_left = min(pool_left, budget)

    bins: List[_Bin] = [_Bin(q.queue_id, q.split, p=q.pkts_in_service) for q in stats.queues]
    by_id: Dict[int, _Bin] = {b.queue_id: b for b in bins}
    next_id = max([stats.next_queue_id] + [q.queue_id + 1 for q in stats.queues])

    per_queue: Dict[int, List[FlowStats]] = {b.queue_id: [] for b in bins}
    for fs in stats.flows:
        per_queue.setdefault(fs.queue_id, []).append(fs)

    # ── Step 1: each queue keeps what it can finish ───────────────────────────
    overflow: List[FlowStats] = []
    for b in bins:
        spilled = False
        for fs in sorted(per_queue[b.queue_id], key=lambda x: (x.task_size, x.flow)):
            if not spilled and family.admits(b.level, b.f + 1, b.p + fs.task_size):
                b.f += 1
                b.p += fs.task_size
            else:
                spilled = True
                overflow.append(fs)

    # ── Step 2: place the overflow ────────────────────────────────────────────
    queue_rank = {b.queue_id: i for i, b in enumerate(bins)}
    overflow.sort(key=lambda x: (queue_rank[x.queue_id], x.task_size, x.flow))

    for fs in overflow:
        target = _first_fit(bins, fs, family, max_split, pool_left)
        if target is not None:
            b, level = target
            extra = level - b.level
            if extra:
                pool_left -= extra
                plan.cores_requested += extra
                b.level = level
                if not b.new:
                    plan.level_changes[b.queue_id] = level
                else:
                    _retag_new_queue(plan, b)
            _place(plan, b, fs)
            continue

        if family.admits(1, 1, fs.task_size):
            if pool_left >= 1:
                b = _open_queue(plan, bins, by_id, next_id, 1)
                next_id += 1
                pool_left -= 1
                plan.cores_requested += 1
                _place(plan, b, fs)
            else:
                _stay(by_id[fs.queue_id], fs)
                plan.at_risk = True
            continue

        decision = plan_whale_split(fs.task_size, family, max_split)
        if decision.best_effort:
            _stay(by_id[fs.queue_id], fs)
            plan.alerts.append((fs.flow, decision.alert))
            log.warning(f"ALERT | flow={fs.flow} queue={fs.queue_id} {decision.alert}")
        elif pool_left >= decision.n:
            b = _open_queue(plan, bins, by_id, next_id, decision.n)
            next_id += 1
            pool_left -= decision.n
            plan.cores_requested += decision.n
            plan.whale_splits.append((fs.flow, decision.n))
            _place(plan, b, fs)
        else:
            _stay(by_id[fs.queue_id], fs)
            plan.at_risk = True

    plan.loads = {b.queue_id: (b.level, b.f, b.p) for b in bins}
    if plan.at_risk:
        log.debug(f"EPOCH | auxiliary pool exhausted; {len(plan.moves)} moves planned")
    return plan


def _first_fit(bins, fs, family, max_split, pool_left):
    for b in bins:
        if b.queue_id == fs.queue_id:
            continue
        # the dedicated core's own queue never splits
        top = b.level if b.queue_id == LOCAL_QUEUE else max_split
        for level in range(b.level, top + 1):
            if level - b.level > pool_left:
                break
            if family.admits(level, b.f + 1, b.p + fs.task_size):
                return b, level
    return None


def _open_queue(plan: MigrationPlan, bins, by_id, queue_id: int, level: int) -> _Bin:
    b = _Bin(queue_id, level, new=True)
    bins.append(b)
    by_id[queue_id] = b
    plan.new_queues.append(NewQueue(queue_id, level))
    return b


def _retag_new_queue(plan: MigrationPlan, b: _Bin) -> None:
    plan.new_queues = [NewQueue(q.queue_id, b.level) if q.queue_id == b.queue_id else q
                       for q in plan.new_queues]


def _place(plan: MigrationPlan, b: _Bin, fs: FlowStats) -> None:
    b.f += 1
    b.p += fs.task_size
    plan.moves.append(FlowMove(fs.flow, fs.queue_id, b.queue_id, fs.task_size))


def _stay(b: _Bin, fs: FlowStats) -> None:
    b.f += 1
    b.p += fs.task_size
