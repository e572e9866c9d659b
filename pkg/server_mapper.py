# Codes By Visionnn

"""
burstscale Server Mapper
Second-scale packing of RSS buckets onto the fewest dedicated cores of one
server, the exact MILP used to check the heuristic on small instances,
delayed installation of new bucket tables, and the boost-mode trigger.
"""

import enum
from collections import Counter, deque
from dataclasses import dataclass
from itertools import product
from typing import Deque, Dict, FrozenSet, List, Optional, Sequence, Tuple

import pulp

from config import (
    BOOST_THRESHOLD,
    DECISION_INTERVAL_S,
    DISPATCH_COST_NS,
    NS_PER_S,
    ON_DEMAND_GAP_S,
    ORACLE_MAX_BUCKETS,
    ORACLE_MAX_CORES,
    RSS_UPDATE_DELAY_S,
    SAFETY_MARGIN,
)
from errors import InfeasibleMappingError, OracleTooLargeError
from logger import log
from predictor import RateThresholdTable


# ─── Types ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BucketStats:
    rates: Tuple[float, ...]   # BR[j], pkts/s
    flows: Tuple[float, ...]   # BF[j], mean active flows per epoch

    def __post_init__(self) -> None:
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        object.__setattr__(self, "flows", tuple(float(f) for f in self.flows))
        if len(self.rates) != len(self.flows):
            raise ValueError("bucket rates and flows must have the same length")
        if any(r < 0 for r in self.rates) or any(f < 0 for f in self.flows):
            raise ValueError("bucket rates and flows must be non-negative")

    @property
    def buckets(self) -> int:
        return len(self.rates)

    @classmethod
    def from_counts(cls, packets: Sequence[int], flow_sums: Sequence[float], epochs: int, interval_ns: int) -> "BucketStats":
        seconds = interval_ns / NS_PER_S
        return cls(
            tuple(p / seconds for p in packets),
            tuple(f / max(epochs, 1) for f in flow_sums),
        )


@dataclass(frozen=True)
class CoreMapping:
    assignment: Tuple[int, ...]   # bucket j -> core
    cores: int                    # candidate cores C

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        for core in self.assignment:
            if not 0 <= core < self.cores:
                raise ValueError(f"bucket assigned to core {core} outside 0..{self.cores - 1}")

    @classmethod
    def spread(cls, buckets: int, cores: int, active: int = 1) -> "CoreMapping":
        """Buckets round-robin over the first `active` cores."""
        active = max(1, min(active, cores))
        return cls(tuple(j % active for j in range(buckets)), cores)

    def active_cores(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.assignment)))

    def buckets_of(self, core: int) -> List[int]:
        return [j for j, c in enumerate(self.assignment) if c == core]

    def core_rate(self, stats: BucketStats, core: int) -> float:
        return sum(stats.rates[j] for j in self.buckets_of(core))

    def core_flows(self, stats: BucketStats, core: int) -> float:
        return sum(stats.flows[j] for j in self.buckets_of(core))

    def moved_buckets(self, other: "CoreMapping") -> FrozenSet[int]:
        return frozenset(j for j, (a, b) in enumerate(zip(self.assignment, other.assignment)) if a != b)


@dataclass(frozen=True)
class RemapResult:
    mapping: CoreMapping
    migrated: FrozenSet[int]
    feasible: bool = True


@dataclass(frozen=True)
class ExactPacking:
    cores: int
    mapping: CoreMapping


@dataclass(frozen=True)
class ServerMapperConfig:
    decision_interval: int = int(DECISION_INTERVAL_S * NS_PER_S)
    rss_update_delay: int = int(RSS_UPDATE_DELAY_S * NS_PER_S)
    boost_threshold: int = BOOST_THRESHOLD
    dispatch_cost: int = DISPATCH_COST_NS
    safety_margin: float = SAFETY_MARGIN
    on_demand_gap: int = int(ON_DEMAND_GAP_S * NS_PER_S)

    def __post_init__(self) -> None:
        if self.decision_interval <= 0 or self.boost_threshold <= 0:
            raise ValueError("decision interval and boost threshold must be positive")
        if self.rss_update_delay < 0 or self.dispatch_cost < 0:
            raise ValueError("rss update delay and dispatch cost must be non-negative")
        if not 0.0 <= self.safety_margin < 1.0:
            raise ValueError(f"safety margin must be in [0, 1), got {self.safety_margin}")


class BoostTransition(enum.Enum):
    ENTER = "enter"
    EXIT = "exit"
    STAY = "stay"


# ─── Capacity check ───────────────────────────────────────────────────────────

def fits(rate: float, flows: float, table: RateThresholdTable) -> bool:
    return rate <= table.threshold(flows)


# ─── Greedy remap ─────────────────────────────────────────────────────────────

class _Packer:
    """Running per-core loads for a mutable assignment."""

    def __init__(self, stats: BucketStats, mapping: CoreMapping, table: RateThresholdTable):
        self.stats = stats
        self.table = table
        self.assign = list(mapping.assignment)
        self.cores = mapping.cores
        self.members: Dict[int, List[int]] = {i: [] for i in range(self.cores)}
        for j, core in enumerate(self.assign):
            self.members[core].append(j)
        self.rate = [sum(stats.rates[j] for j in self.members[i]) for i in range(self.cores)]
        self.flows = [sum(stats.flows[j] for j in self.members[i]) for i in range(self.cores)]

    def active(self) -> List[int]:
        return [i for i in range(self.cores) if self.members[i]]

    def ok(self, core: int, extra_rate: float = 0.0, extra_flows: float = 0.0) -> bool:
        return fits(self.rate[core] + extra_rate, self.flows[core] + extra_flows, self.table)

    def move(self, j: int, dst: int) -> None:
        src = self.assign[j]
        self.members[src].remove(j)
        self.rate[src] -= self.stats.rates[j]
        self.flows[src] -= self.stats.flows[j]
        self.members[dst].append(j)
        self.rate[dst] += self.stats.rates[j]
        self.flows[dst] += self.stats.flows[j]
        self.assign[j] = dst

    def by_rate(self, buckets: Sequence[int]) -> List[int]:
        return sorted(buckets, key=lambda j: (-self.stats.rates[j], -j))


def remap_greedy(stats: BucketStats, mapping: CoreMapping, table: RateThresholdTable) -> RemapResult:
    """
    Two-phase repack.

    Phase 1 sheds the largest buckets off each overloaded core until it fits
    and first-fits them into the other active cores, opening the lowest idle
    core only when none has room. If that leaves a core over threshold the
    whole server is repacked from scratch before giving up. Phase 2
    repeatedly tries to empty the least-loaded core into the others and
    reclaims it on success.
    """
    if stats.buckets != len(mapping.assignment):
        raise ValueError(f"stats cover {stats.buckets} buckets, mapping has {len(mapping.assignment)}")

    packer = _Packer(stats, mapping, table)
    feasible = True

    # ── Phase 1: relieve overloaded cores ─────────────────────────────────────
    for core in packer.active():
        if packer.ok(core):
            continue
        evicted: List[int] = []
        for j in packer.by_rate(packer.members[core]):
            if packer.ok(core):
                break
            evicted.append(j)
            packer.rate[core] -= stats.rates[j]
            packer.flows[core] -= stats.flows[j]
        # put them back in the books before moving them for real
        for j in evicted:
            packer.rate[core] += stats.rates[j]
            packer.flows[core] += stats.flows[j]

        for j in packer.by_rate(evicted):
            target = _first_fit(packer, j, exclude=core)
            if target is None:
                idle = [i for i in range(packer.cores) if not packer.members[i] and i != core]
                if idle:
                    target = idle[0]
                    if not packer.ok(target, stats.rates[j], stats.flows[j]):
                        feasible = False
                else:
                    others = [i for i in packer.active() if i != core] or [core]
                    target = min(others, key=lambda i: (packer.rate[i], i))
                    feasible = False
            packer.move(j, target)

    if not feasible:
        repacked = _repack(stats, mapping, table)
        if repacked is not None:
            packer = _Packer(stats, repacked, table)
            feasible = True
            log.info(f"REMAP | greedy left cores overloaded; repacked onto {len(packer.active())} of {mapping.cores} cores")
        else:
            log.warning(f"REMAP | instance infeasible with {packer.cores} cores; keeping best-effort mapping")

    # ── Phase 2: reclaim lightly loaded cores ─────────────────────────────────
    reclaimed = True
    while reclaimed:
        reclaimed = False
        active = packer.active()
        if len(active) <= 1:
            break
        for core in sorted(active, key=lambda i: (packer.rate[i], i)):
            if _try_empty(packer, core):
                reclaimed = True
                break

    new_mapping = CoreMapping(tuple(packer.assign), mapping.cores)
    return RemapResult(new_mapping, mapping.moved_buckets(new_mapping), feasible)


def _first_fit(packer: _Packer, j: int, exclude: int) -> Optional[int]:
    for core in packer.active():
        if core != exclude and packer.ok(core, packer.stats.rates[j], packer.stats.flows[j]):
            return core
    return None


def _try_empty(packer: _Packer, core: int) -> bool:
    """Move every bucket of `core` into the other active cores, or nothing at all."""
    targets = [i for i in packer.active() if i != core]
    rate = {i: packer.rate[i] for i in targets}
    flows = {i: packer.flows[i] for i in targets}
    placement: List[Tuple[int, int]] = []
    for j in packer.by_rate(packer.members[core]):
        r, f = packer.stats.rates[j], packer.stats.flows[j]
        for i in targets:
            if fits(rate[i] + r, flows[i] + f, packer.table):
                rate[i] += r
                flows[i] += f
                placement.append((j, i))
                break
        else:
            return False
    for j, i in placement:
        packer.move(j, i)
    return True


def _repack(stats: BucketStats, mapping: CoreMapping, table: RateThresholdTable) -> Optional[CoreMapping]:
    """
    Packing from scratch over all C cores: first-fit decreasing, then, on an
    instance small enough for the oracle, a search for the fewest cores.
    Cores are relabelled to keep as many buckets in place as possible.
    """
    assign = _pack_decreasing(stats, table, mapping.cores)
    if assign is None and stats.buckets <= ORACLE_MAX_BUCKETS:
        assign = _search_packing(stats, table, mapping.cores)
    if assign is None:
        return None
    return CoreMapping(tuple(_relabel(assign, mapping.assignment, mapping.cores)), mapping.cores)


def _decreasing(stats: BucketStats) -> List[int]:
    return sorted(range(stats.buckets), key=lambda j: (-stats.rates[j], -stats.flows[j], j))


def _pack_decreasing(stats: BucketStats, table: RateThresholdTable, cores: int) -> Optional[List[int]]:
    rate = [0.0] * cores
    flows = [0.0] * cores
    assign = [0] * stats.buckets
    for j in _decreasing(stats):
        r, f = stats.rates[j], stats.flows[j]
        for i in range(cores):
            if fits(rate[i] + r, flows[i] + f, table):
                rate[i] += r
                flows[i] += f
                assign[j] = i
                break
        else:
            return None
    return assign


def _search_packing(stats: BucketStats, table: RateThresholdTable, cores: int) -> Optional[List[int]]:
    """Depth-first search for the fewest cores; a bucket opens at most one new core."""
    order = _decreasing(stats)
    rate = [0.0] * cores
    flows = [0.0] * cores
    assign = [0] * stats.buckets
    best: Optional[List[int]] = None
    best_used = cores + 1

    def place(k: int, used: int) -> None:
        nonlocal best, best_used
        if used >= best_used:
            return
        if k == len(order):
            best, best_used = list(assign), used
            return
        j = order[k]
        r, f = stats.rates[j], stats.flows[j]
        for i in range(min(used + 1, cores)):
            if fits(rate[i] + r, flows[i] + f, table):
                rate[i] += r
                flows[i] += f
                assign[j] = i
                place(k + 1, max(used, i + 1))
                rate[i] -= r
                flows[i] -= f

    place(0, 0)
    return best


def _relabel(assign: Sequence[int], old: Sequence[int], cores: int) -> List[int]:
    groups: Dict[int, List[int]] = {}
    for j, i in enumerate(assign):
        groups.setdefault(i, []).append(j)
    label: Dict[int, int] = {}
    taken = set()
    for i in sorted(groups, key=lambda g: (-len(groups[g]), g)):
        votes = Counter(old[j] for j in groups[i] if old[j] not in taken)
        if votes:
            label[i] = min(votes, key=lambda c: (-votes[c], c))
        else:
            label[i] = min(c for c in range(cores) if c not in taken)
        taken.add(label[i])
    return [label[i] for i in assign]


# ─── Exact oracle ─────────────────────────────────────────────────────────────

def milp_exact(stats: BucketStats, table: RateThresholdTable, cores: int) -> ExactPacking:
    """
    Minimum number of active cores over all assignments, solved with CBC.

    Each core picks one grid point g (z[i,g]); its flow count must stay at or
    below grid[g] and its rate at or below T[g]. Test oracle only.

    Raises:
        OracleTooLargeError: more than 12 buckets or 6 cores.
        InfeasibleMappingError: no assignment satisfies the thresholds.
    """
    buckets = stats.buckets
    if buckets > ORACLE_MAX_BUCKETS or cores > ORACLE_MAX_CORES:
        raise OracleTooLargeError(
            f"oracle limited to {ORACLE_MAX_BUCKETS} buckets and {ORACLE_MAX_CORES} cores, "
            f"got {buckets} and {cores}"
        )

    grid = range(len(table.grid))
    prob = pulp.LpProblem("bucket_packing", pulp.LpMinimize)
    m = {(i, j): pulp.LpVariable(f"M_{i}_{j}", cat="Binary") for i in range(cores) for j in range(buckets)}
    cpu = {i: pulp.LpVariable(f"CPU_{i}", cat="Binary") for i in range(cores)}
    z = {(i, g): pulp.LpVariable(f"z_{i}_{g}", cat="Binary") for i in range(cores) for g in grid}

    prob += pulp.lpSum(cpu.values())
    for j in range(buckets):
        prob += pulp.lpSum(m[i, j] for i in range(cores)) == 1
    for i in range(cores):
        prob += pulp.lpSum(m[i, j] for j in range(buckets)) <= buckets * cpu[i]
        prob += pulp.lpSum(z[i, g] for g in grid) == cpu[i]
        prob += (pulp.lpSum(stats.flows[j] * m[i, j] for j in range(buckets))
                 <= pulp.lpSum(table.grid[g] * z[i, g] for g in grid))
        prob += (pulp.lpSum(stats.rates[j] * m[i, j] for j in range(buckets))
                 <= pulp.lpSum(table.rates[g] * z[i, g] for g in grid))
    for i in range(cores - 1):
        prob += cpu[i] >= cpu[i + 1]

    status = prob.solve(pulp.PULP_CBC_CMD(msg=False))
    if pulp.LpStatus[status] != "Optimal":
        raise InfeasibleMappingError(
            f"no assignment of {buckets} buckets onto {cores} cores meets the thresholds "
            f"(solver status {pulp.LpStatus[status]})"
        )

    assignment = [
        next(i for i in range(cores) if (m[i, j].value() or 0) > 0.5)
        for j in range(buckets)
    ]
    mapping = CoreMapping(tuple(assignment), cores)
    log.info(f"ORACLE | buckets={buckets} cores={cores} optimum={len(mapping.active_cores())}")
    return ExactPacking(len(mapping.active_cores()), mapping)


def enumerate_exact(stats: BucketStats, table: RateThresholdTable, cores: int) -> Optional[int]:
    """Brute-force minimum active cores over all C^F assignments; None if infeasible."""
    best: Optional[int] = None
    for assignment in product(range(cores), repeat=stats.buckets):
        rate = [0.0] * cores
        flows = [0.0] * cores
        for j, i in enumerate(assignment):
            rate[i] += stats.rates[j]
            flows[i] += stats.flows[j]
        used = set(assignment)
        if all(fits(rate[i], flows[i], table) for i in used):
            if best is None or len(used) < best:
                best = len(used)
    return best


# ─── Installation ─────────────────────────────────────────────────────────────

class MappingInstaller:
    """
    Bucket tables take effect rss_update_delay after they are written.
    Until then packets keep following the old table; a second install
    queues behind the first.
    """

    def __init__(self, delay: int):
        self.delay = delay
        self._pending: Deque[Tuple[int, CoreMapping]] = deque()

    def install_mapping(self, mapping: CoreMapping, now: int) -> int:
        start = max(now, self._pending[-1][0]) if self._pending else now
        effective_at = start + self.delay
        self._pending.append((effective_at, mapping))
        log.debug(f"REMAP | install active={len(mapping.active_cores())} effective_at={effective_at}")
        return effective_at

    def pending(self) -> bool:
        return bool(self._pending)

    def latest(self) -> Optional[CoreMapping]:
        return self._pending[-1][1] if self._pending else None

    def pop_due(self, now: int) -> List[CoreMapping]:
        due: List[CoreMapping] = []
        while self._pending and self._pending[0][0] <= now:
            due.append(self._pending.popleft()[1])
        return due


# ─── Boost ────────────────────────────────────────────────────────────────────

def boost_check(backlog: int, in_boost: bool, threshold: int = BOOST_THRESHOLD) -> BoostTransition:
    if not in_boost and backlog > threshold:
        return BoostTransition.ENTER
    if in_boost and backlog == 0:
        return BoostTransition.EXIT
    return BoostTransition.STAY
