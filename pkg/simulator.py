# Codes By Visionnn

"""
burstscale Simulator
Deterministic packet-level discrete-event simulation of a rack running the
ingress, server and core mappers (or one of the baselines) over a trace.

Events live in a heap ordered by (time, kind, seq). Trace arrivals are not
pushed; they are merged with the heap as a second sorted stream so a
multi-million packet trace never sits in the heap at once.
"""

import enum
import heapq
import itertools
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, replace
from typing import Any, Callable, Deque, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from chain_model import UNSPLIT, ChainSpec, SplitScheme, best_split, sub_chain_costs, sub_chain_new_flow_costs
from config import (
    AUX_POOL_SIZE,
    BOOST_THRESHOLD,
    CORES_PER_SERVER,
    DECISION_INTERVAL_S,
    DEFAULT_MAX_SPLIT,
    DEFAULT_SERVERS,
    DISPATCH_COST_NS,
    DRAIN_TIMEOUT_S,
    HASH_CORES,
    INITIAL_DEDICATED_CORES,
    NIC_QUEUE_CAPACITY,
    NS_PER_S,
    NS_PER_US,
    ON_DEMAND_GAP_S,
    PLAN_OVERHEAD_NS,
    PREFIX_LEN,
    PROPAGATION_DELAY_NS,
    RSS_BUCKETS,
    RSS_UPDATE_DELAY_S,
    SAFETY_MARGIN,
    SW_QUEUE_CAPACITY,
    USAGE_WINDOW_US,
)
from core_mapper import LOCAL_QUEUE, CoreMapperConfig, MigrationPlan, QueueCounters, absorb_bursts, epoch_length, update_stats
from errors import PredictorMismatchError, SimulationError, UnknownModeError
from fingerprint import chain_hash
from flow_id import rss_bucket
from ingress_mapper import IngressMapper
from logger import log
from metrics import DROP_NIC, DROP_SW, Alert, IntervalRecord, Metrics, nearest_rank
from predictor import (
    EpochSample,
    FrontierFamily,
    Predictors,
    RateThresholdTable,
    analytic_predictors,
    static_safe,
    static_threshold,
    static_unsafe,
)
from server_mapper import (
    BoostTransition,
    BucketStats,
    CoreMapping,
    MappingInstaller,
    ServerMapperConfig,
    boost_check,
    remap_greedy,
)
from traffic import PacketRecord, paced_flows


class EventKind(enum.IntEnum):
    """Value order is the tie-break order for events at the same time."""

    MAPPING_EFFECTIVE = 0
    BATCH_COMPLETE = 1
    PACKET_ARRIVAL = 2
    EPOCH_BOUNDARY = 3
    SERVER_MAPPER_TICK = 4
    USAGE_SAMPLE = 5
    TRACE_END = 6


# ─── Modes ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ModeProfile:
    name: str
    placement: str               # rack | hash | per_flow | isolated
    core_mapper: bool = False
    boost: bool = False
    server_mapper: bool = False
    on_demand: bool = False
    frontier: str = "trained"    # trained | static_safe | static_unsafe
    thresholds: str = "trained"  # trained | static_safe | static_unsafe

    @property
    def needs_predictors(self) -> bool:
        return self.core_mapper or self.server_mapper or self.on_demand


MODE_PROFILES: Dict[str, ModeProfile] = {
    "full": ModeProfile("full", "rack", core_mapper=True, boost=True, server_mapper=True),
    "per_flow_per_core": ModeProfile("per_flow_per_core", "per_flow"),
    "hash_only": ModeProfile("hash_only", "hash"),
    "no_core_mapper": ModeProfile("no_core_mapper", "rack", boost=True, server_mapper=True),
    "static_safe": ModeProfile("static_safe", "rack", True, True, True, frontier="static_safe"),
    "static_unsafe": ModeProfile("static_unsafe", "rack", True, True, True, frontier="static_unsafe"),
    "no_boost": ModeProfile("no_boost", "rack", core_mapper=True, server_mapper=True),
    "on_demand_remap": ModeProfile("on_demand_remap", "rack", core_mapper=True, server_mapper=True, on_demand=True),
    "server_static_safe": ModeProfile("server_static_safe", "rack", True, True, True, thresholds="static_safe"),
    "server_static_unsafe": ModeProfile("server_static_unsafe", "rack", True, True, True, thresholds="static_unsafe"),
}
MODES: Tuple[str, ...] = tuple(MODE_PROFILES)

# used by predictor training only
_ISOLATED = ModeProfile("isolated", "isolated")
_PROBE = ModeProfile("probe", "hash")


def mode_profile(name: str) -> ModeProfile:
    try:
        return MODE_PROFILES[name]
    except KeyError:
        raise UnknownModeError(f"unknown mode '{name}' (known: {', '.join(MODES)})") from None


# ─── Parameters ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SimParams:
    """Every knob the kernel reads, in ns where it is a duration."""

    servers: int = DEFAULT_SERVERS
    cores_per_server: int = CORES_PER_SERVER
    aux_pool: int = AUX_POOL_SIZE
    initial_dedicated: int = INITIAL_DEDICATED_CORES
    nic_capacity: int = NIC_QUEUE_CAPACITY
    sw_capacity: int = SW_QUEUE_CAPACITY
    max_split: int = DEFAULT_MAX_SPLIT
    plan_overhead: int = PLAN_OVERHEAD_NS
    buckets: int = RSS_BUCKETS
    decision_interval: int = int(DECISION_INTERVAL_S * NS_PER_S)
    rss_update_delay: int = int(RSS_UPDATE_DELAY_S * NS_PER_S)
    boost_threshold: int = BOOST_THRESHOLD
    dispatch_cost: int = DISPATCH_COST_NS
    safety_margin: float = SAFETY_MARGIN
    on_demand_gap: int = int(ON_DEMAND_GAP_S * NS_PER_S)
    prefix_len: int = PREFIX_LEN
    tau: Optional[int] = None
    propagation_delay: int = PROPAGATION_DELAY_NS
    hash_cores: int = HASH_CORES
    drain_timeout: int = int(DRAIN_TIMEOUT_S * NS_PER_S)
    usage_window: int = USAGE_WINDOW_US * NS_PER_US

    def __post_init__(self) -> None:
        if self.cores_per_server - self.aux_pool < 1:
            raise SimulationError(
                f"aux pool of {self.aux_pool} leaves no dedicated cores out of {self.cores_per_server}"
            )
        if self.servers < 1 or self.hash_cores < 1 or self.buckets < 1:
            raise SimulationError("servers, hash cores and RSS buckets must be positive")

    @property
    def candidate_cores(self) -> int:
        return self.cores_per_server - self.aux_pool

    @property
    def ingress_tau(self) -> int:
        """Dedicated cores a server may hold before ingress looks elsewhere."""
        return self.tau if self.tau is not None else self.candidate_cores

    @classmethod
    def from_config(cls, config: Any) -> "SimParams":
        rack, cm, sm, ing, sim = config.rack, config.core_mapper, config.server_mapper, config.ingress, config.simulator
        return cls(
            servers=rack.servers,
            cores_per_server=rack.cores_per_server,
            aux_pool=rack.aux_pool_size,
            initial_dedicated=rack.initial_dedicated,
            nic_capacity=rack.nic_queue_capacity,
            sw_capacity=rack.sw_queue_capacity,
            max_split=cm.max_split,
            plan_overhead=cm.plan_overhead_ns,
            buckets=sm.buckets,
            decision_interval=int(sm.decision_interval_s * NS_PER_S),
            rss_update_delay=int(sm.rss_update_delay_s * NS_PER_S),
            boost_threshold=sm.boost_threshold,
            dispatch_cost=sm.dispatch_cost_ns,
            safety_margin=sm.safety_margin,
            on_demand_gap=int(sm.on_demand_gap_s * NS_PER_S),
            prefix_len=ing.prefix_len,
            tau=ing.tau if ing.tau is not None else rack.cores_per_server - rack.aux_pool_size,
            propagation_delay=ing.propagation_delay_ns,
            hash_cores=sim.hash_cores,
            drain_timeout=int(sim.drain_timeout_s * NS_PER_S),
            usage_window=int(sim.usage_window_us * NS_PER_US),
        )


# ─── Entities ─────────────────────────────────────────────────────────────────

class _Packet:
    __slots__ = ("arrival", "flow", "seq", "bucket")

    def __init__(self, arrival: int, flow: int, seq: int, bucket: int):
        self.arrival = arrival
        self.flow = flow
        self.seq = seq
        self.bucket = bucket


class SoftwareQueue:
    """
    FIFO of packets with per-flow backlog and epoch counters. Queue 0 of a
    dedicated core is its NIC queue.
    """

    def __init__(self, queue_id: int, capacity: Optional[int], split: int = 1):
        self.queue_id = queue_id
        self.capacity = capacity
        self.split = split
        self.counters = QueueCounters()
        self._packets: Deque[_Packet] = deque()
        self._per_flow: Counter = Counter()

    def __len__(self) -> int:
        return len(self._packets)

    def flow_backlog(self) -> Dict[int, int]:
        return dict(self._per_flow)

    def push(self, pkt: _Packet, force: bool = False) -> bool:
        if not force and self.capacity is not None and len(self._packets) >= self.capacity:
            return False
        self._packets.append(pkt)
        self._per_flow[pkt.flow] += 1
        self.counters.arrived += 1
        return True

    def push_many(self, pkts: Iterable[_Packet]) -> None:
        for pkt in pkts:
            self.push(pkt, force=True)

    def push_front(self, pkts: Sequence[_Packet]) -> None:
        """Put packets back at the head, keeping their order."""
        for pkt in reversed(pkts):
            self._packets.appendleft(pkt)
            self._per_flow[pkt.flow] += 1
        self.counters.arrived += len(pkts)

    def pop_batch(self, limit: int) -> List[_Packet]:
        batch: List[_Packet] = []
        while self._packets and len(batch) < limit:
            pkt = self._packets.popleft()
            self._drop_flow(pkt.flow)
            batch.append(pkt)
        self.counters.processed += len(batch)
        return batch

    def take(self, keep: Callable[[_Packet], bool]) -> Dict[int, List[_Packet]]:
        """Remove every packet `keep` rejects, grouped by flow in queue order."""
        taken: Dict[int, List[_Packet]] = {}
        remaining: Deque[_Packet] = deque()
        for pkt in self._packets:
            if keep(pkt):
                remaining.append(pkt)
            else:
                taken.setdefault(pkt.flow, []).append(pkt)
                self._drop_flow(pkt.flow)
        self._packets = remaining
        moved = sum(len(v) for v in taken.values())
        # removed packets leave the carried backlog, not the processed count
        self.counters.carried -= moved
        return taken

    def take_flows(self, flows: Set[int]) -> Dict[int, List[_Packet]]:
        if not flows or not any(f in self._per_flow for f in flows):
            return {}
        return self.take(lambda pkt: pkt.flow not in flows)

    def _drop_flow(self, flow: int) -> None:
        self._per_flow[flow] -= 1
        if self._per_flow[flow] <= 0:
            del self._per_flow[flow]


class Worker:
    """One queue and the physical cores serving it (one per sub-chain)."""

    def __init__(self, queue: SoftwareQueue, cores: List[int], owner: Optional["DedicatedCore"], dispatches: bool):
        self.queue = queue
        self.cores = cores
        self.owner = owner
        self.dispatches = dispatches
        self.busy_until = 0
        self.not_before = 0
        self.in_service = False
        self.wake_pending = False
        self.retired = False
        self.release_when_idle = False
        self.seen: Set[int] = set()

    @property
    def level(self) -> int:
        return len(self.cores)


class DedicatedCore:
    def __init__(self, slot: int, nic_capacity: int, server: Optional["ServerState"] = None):
        self.slot = slot
        self.server = server
        self.nic = SoftwareQueue(LOCAL_QUEUE, nic_capacity)
        self.worker = Worker(self.nic, [slot], self, dispatches=True)
        self.borrowed: Dict[int, Worker] = {}
        self.redirects: Dict[int, int] = {}      # flow -> borrowed queue id
        self.boost = False
        self.boost_qid: Optional[int] = None
        self.next_qid = 1

    def workers(self) -> List[Worker]:
        return [self.worker] + [self.borrowed[q] for q in sorted(self.borrowed)]


class ServerState:
    def __init__(self, server_id: int, params: SimParams):
        self.server_id = server_id
        buckets = params.buckets
        candidates = params.candidate_cores
        self.mapping = CoreMapping.spread(buckets, candidates, params.initial_dedicated)
        self.installer = MappingInstaller(params.rss_update_delay)
        self.dedicated: Dict[int, DedicatedCore] = {}
        self.retiring: List[Worker] = []
        self.free_aux: List[int] = list(range(candidates, params.cores_per_server))
        self.bucket_packets = [0] * buckets
        self.flow_sums = [0.0] * buckets
        self.epochs = 0
        self.epoch_packets = [0] * buckets
        self.epoch_flows: Dict[int, Set[int]] = defaultdict(set)
        self.last_epoch_packets = [0] * buckets
        self.last_epoch_flows = [0.0] * buckets
        self.last_tick = 0
        self.last_on_demand: Optional[int] = None
        self.boost_entries = 0
        self.boost_exits = 0
        self.boost_starved_logged = False

    def available(self) -> int:
        return len(self.free_aux)

    def take_aux(self, count: int) -> List[int]:
        if count > len(self.free_aux):
            raise SimulationError(
                f"server {self.server_id}: {count} auxiliary cores requested, {len(self.free_aux)} free"
            )
        taken, self.free_aux = self.free_aux[:count], self.free_aux[count:]
        return taken

    def return_aux(self, cores: Iterable[int]) -> None:
        self.free_aux = sorted(self.free_aux + list(cores))

    def roll_epoch(self) -> None:
        self.last_epoch_packets = self.epoch_packets
        self.last_epoch_flows = [0.0] * len(self.epoch_packets)
        for bucket, flows in self.epoch_flows.items():
            self.last_epoch_flows[bucket] = float(len(flows))
            self.flow_sums[bucket] += len(flows)
        self.epochs += 1
        self.epoch_packets = [0] * len(self.epoch_packets)
        self.epoch_flows = defaultdict(set)


# ─── Kernel ───────────────────────────────────────────────────────────────────

class Simulator:
    def __init__(
        self,
        params: SimParams,
        chain: ChainSpec,
        slo: int,
        mode: ModeProfile,
        family: Optional[FrontierFamily] = None,
        table: Optional[RateThresholdTable] = None,
        isolated_scheme: SplitScheme = UNSPLIT,
        on_complete: Optional[Callable[[int, int, int], None]] = None,
    ):
        if mode.core_mapper and family is None:
            raise SimulationError(f"mode '{mode.name}' needs a frontier family")
        if mode.server_mapper and table is None:
            raise SimulationError(f"mode '{mode.name}' needs a rate-threshold table")
        self.params = params
        self.chain = chain
        self.slo = slo
        self.epoch = epoch_length(slo)
        try:
            self.core_config = CoreMapperConfig(slo, params.max_split, params.plan_overhead) if mode.core_mapper else None
            self.server_config = ServerMapperConfig(
                params.decision_interval,
                params.rss_update_delay,
                params.boost_threshold,
                params.dispatch_cost,
                params.safety_margin,
                params.on_demand_gap,
            )
        except ValueError as e:
            raise SimulationError(str(e)) from e
        self.mode = mode
        self.family = family
        self.table = table
        self.on_complete = on_complete
        self.metrics = Metrics()
        self.now = 0

        self._heap: List[Tuple[int, int, int, Any]] = []
        self._seq = itertools.count()
        self._ended = False
        self._outstanding = 0
        self._arrival_seq = 0
        self._bucket_of: Dict[int, int] = {}
        self._stage_costs: Dict[int, Tuple[List[int], List[int]]] = {}
        self._last_done: Dict[int, Tuple[int, int]] = {}          # flow -> (seq, completion)
        self._last_service: Dict[int, Tuple[Worker, int]] = {}    # flow -> (worker, end)

        self.servers: List[ServerState] = []
        self.ingress: Optional[IngressMapper] = None
        self._static: List[DedicatedCore] = []
        self._per_flow: Dict[int, DedicatedCore] = {}
        self._isolated: Optional[Worker] = None

        if mode.placement == "rack":
            self.ingress = IngressMapper(params.servers, params.prefix_len, params.ingress_tau)
            for sid in range(params.servers):
                srv = ServerState(sid, params)
                for slot in srv.mapping.active_cores():
                    srv.dedicated[slot] = DedicatedCore(slot, params.nic_capacity, srv)
                self.servers.append(srv)
                self.ingress.report_cores(sid, len(srv.dedicated))
        elif mode.placement == "hash":
            self._static = [DedicatedCore(i, params.nic_capacity) for i in range(params.hash_cores)]
        elif mode.placement == "isolated":
            queue = SoftwareQueue(LOCAL_QUEUE, None, isolated_scheme.n)
            self._isolated = Worker(queue, list(range(isolated_scheme.n)), None, dispatches=False)
            self._stage_costs[isolated_scheme.n] = (
                sub_chain_costs(chain, isolated_scheme),
                sub_chain_new_flow_costs(chain, isolated_scheme),
            )
        elif mode.placement != "per_flow":
            raise SimulationError(f"unknown placement '{mode.placement}'")

    # ── Event loop ────────────────────────────────────────────────────────────

    def _push(self, time: int, kind: EventKind, payload: Any = None) -> None:
        heapq.heappush(self._heap, (time, int(kind), next(self._seq), payload))

    def run(self, trace: Sequence[PacketRecord]) -> Metrics:
        total = len(trace)
        delay = self.params.propagation_delay
        log.info(f"SIM | mode={self.mode.name} packets={total} slo_us={self.slo / NS_PER_US:g}")
        if total == 0:
            self._finish(0)
            return self.metrics

        self._push(trace[-1].arrival_time + delay + self.params.drain_timeout, EventKind.TRACE_END)
        self._push(self.params.usage_window, EventKind.USAGE_SAMPLE)
        if self.mode.placement == "rack":
            for srv in self.servers:
                if self.mode.core_mapper or self.mode.boost or self.mode.server_mapper:
                    self._push(self.epoch, EventKind.EPOCH_BOUNDARY, srv)
                if self.mode.server_mapper:
                    self._push(self.params.decision_interval, EventKind.SERVER_MAPPER_TICK, srv)

        i = 0
        arrival_kind = int(EventKind.PACKET_ARRIVAL)
        while not self._ended:
            arrival_t = trace[i].arrival_time + delay if i < total else None
            if self._heap and (arrival_t is None or self._heap[0][:2] < (arrival_t, arrival_kind)):
                time, kind, _, payload = heapq.heappop(self._heap)
                self.now = time
                self._dispatch(EventKind(kind), time, payload)
            elif arrival_t is not None:
                self.now = arrival_t
                self._on_arrival(trace[i], arrival_t)
                i += 1
            else:
                break
            if not self._ended and i >= total and self._outstanding == 0:
                self._finish(self.now)

        log.info(
            f"SIM | done mode={self.mode.name} completions={self.metrics.completions} "
            f"drops={self.metrics.dropped} in_flight={self.metrics.in_flight} end={self.metrics.end_time}"
        )
        return self.metrics

    def _finish(self, now: int) -> None:
        self._ended = True
        self.metrics.end_time = now
        self.metrics.in_flight = self._outstanding
        if self.ingress is not None:
            self.metrics.recruitments = list(self.ingress.recruitments)

    def _dispatch(self, kind: EventKind, now: int, payload: Any) -> None:
        if kind is EventKind.BATCH_COMPLETE:
            if payload[0] == "wake":
                worker = payload[1]
                worker.wake_pending = False
                self._kick(worker, now)
            else:
                self._on_batch_complete(now, *payload[1:])
        elif kind is EventKind.MAPPING_EFFECTIVE:
            srv = payload
            for mapping in srv.installer.pop_due(now):
                self._apply_mapping(srv, mapping, now)
        elif kind is EventKind.EPOCH_BOUNDARY:
            self._on_epoch(payload, now)
        elif kind is EventKind.SERVER_MAPPER_TICK:
            self._on_tick(payload, now)
        elif kind is EventKind.USAGE_SAMPLE:
            self._on_usage(now)
        elif kind is EventKind.TRACE_END:
            if self._outstanding:
                log.warning(f"SIM | drain timeout reached with {self._outstanding} packets in flight")
            self._finish(now)

    # ── Arrivals ──────────────────────────────────────────────────────────────

    def _bucket(self, flow: int) -> int:
        bucket = self._bucket_of.get(flow)
        if bucket is None:
            bucket = rss_bucket(flow, self.params.buckets)
            self._bucket_of[flow] = bucket
        return bucket

    def _on_arrival(self, rec: PacketRecord, now: int) -> None:
        self.metrics.arrivals += 1
        bucket = self._bucket(rec.flow)
        pkt = _Packet(now, rec.flow, self._arrival_seq, bucket)
        self._arrival_seq += 1
        placement = self.mode.placement

        if placement == "isolated":
            self._isolated.queue.push(pkt)
            self._outstanding += 1
            self._kick(self._isolated, now)
            return

        if placement == "rack":
            srv = self.servers[self.ingress.steer(rec.dst_addr, now)]
            srv.bucket_packets[bucket] += 1
            srv.epoch_packets[bucket] += 1
            srv.epoch_flows[bucket].add(rec.flow)
            core = srv.dedicated[srv.mapping.assignment[bucket]]
        elif placement == "hash":
            core = self._static[bucket % len(self._static)]
        else:
            core = self._per_flow.get(rec.flow)
            if core is None:
                core = DedicatedCore(len(self._per_flow), self.params.nic_capacity)
                self._per_flow[rec.flow] = core

        if not core.nic.push(pkt):
            self.metrics.drops[DROP_NIC] += 1
            return
        self._outstanding += 1
        self._kick(core.worker, now)

    # ── Service ───────────────────────────────────────────────────────────────

    def _kick(self, w: Worker, now: int) -> None:
        if w.in_service or w.retired or len(w.queue) == 0:
            return
        if w.not_before > now:
            if not w.wake_pending:
                w.wake_pending = True
                self._push(w.not_before, EventKind.BATCH_COMPLETE, ("wake", w))
            return
        if w.dispatches:
            self._run_dedicated_batch(w, now)
        else:
            self._run_pipeline_batch(w, now)

    def _charge(self, w: Worker, now: int, cost: int) -> int:
        """Occupy a worker for `cost` ns after whatever it is doing now."""
        end = max(now, w.busy_until, w.not_before) + cost
        w.busy_until = end
        w.not_before = end
        return end

    def _levels(self, n: int) -> Tuple[List[int], List[int]]:
        cached = self._stage_costs.get(n)
        if cached is None:
            scheme = None
            if self.family is not None and self.family.for_level(n) is not None:
                scheme = self.family.for_level(n).scheme
            if scheme is None or scheme.n != n:
                scheme = UNSPLIT if n == 1 else best_split(self.chain, n)
            if scheme is None:
                raise SimulationError(f"chain of {len(self.chain.stages)} stages cannot split into {n}")
            cached = (sub_chain_costs(self.chain, scheme), sub_chain_new_flow_costs(self.chain, scheme))
            self._stage_costs[n] = cached
        return cached

    def _audit_service(self, flow: int, w: Worker, start: int, end: int) -> None:
        last = self._last_service.get(flow)
        if last is not None and last[0] is not w and last[1] > start:
            self.metrics.affinity_violations += 1
        self._last_service[flow] = (w, end)

    def _run_dedicated_batch(self, w: Worker, now: int) -> None:
        core = w.owner
        batch = core.nic.pop_batch(self.chain.max_batch)
        total = self.chain.total_cost
        new_cost = self.chain.per_new_flow_cost
        t = now
        completions: List[Tuple[_Packet, int]] = []
        handoffs: List[Tuple[_Packet, int]] = []
        for pkt in batch:
            target = core.redirects.get(pkt.flow)
            if target is None and core.boost:
                target = core.boost_qid
                core.redirects[pkt.flow] = target
            if target is not None:
                t += self.params.dispatch_cost
                handoffs.append((pkt, target))
                continue
            start = t
            t += total
            if pkt.flow not in w.seen:
                w.seen.add(pkt.flow)
                t += new_cost
            self._audit_service(pkt.flow, w, start, t)
            completions.append((pkt, t))

        self._begin(w, now, t, completions)
        if handoffs:
            self._hand_off(core, handoffs, t, now)

    def _run_pipeline_batch(self, w: Worker, now: int) -> None:
        batch = w.queue.pop_batch(self.chain.max_batch)
        costs, new_costs = self._levels(w.level)
        free = [now] * len(costs)
        completions: List[Tuple[_Packet, int]] = []
        for pkt in batch:
            new = pkt.flow not in w.seen
            if new:
                w.seen.add(pkt.flow)
            ready = now
            first = now
            for k, cost in enumerate(costs):
                begin = max(ready, free[k])
                if k == 0:
                    first = begin
                ready = begin + cost + (new_costs[k] if new else 0)
                free[k] = ready
            self._audit_service(pkt.flow, w, first, ready)
            completions.append((pkt, ready))
        self._begin(w, now, free[-1], completions)

    def _begin(self, w: Worker, now: int, end: int, completions: List[Tuple[_Packet, int]]) -> None:
        w.in_service = True
        w.busy_until = max(w.busy_until, end)
        self._push(end, EventKind.BATCH_COMPLETE, ("batch", w, completions))

    def _hand_off(self, core: DedicatedCore, handoffs: List[Tuple[_Packet, int]], ready_at: int, now: int) -> None:
        """
        Dispatched packets enter their target queue immediately, in dispatch
        order, but the target may not start on them before the dispatching
        batch ends.
        """
        requeue: List[_Packet] = []
        touched: Dict[int, Worker] = {}
        for pkt, qid in handoffs:
            target = core.borrowed.get(qid)
            if target is None:
                core.redirects.pop(pkt.flow, None)
                requeue.append(pkt)
                continue
            if not target.queue.push(pkt):
                self.metrics.drops[DROP_SW] += 1
                self._outstanding -= 1
                continue
            target.not_before = max(target.not_before, ready_at)
            touched[qid] = target
        if requeue:
            core.nic.push_front(requeue)
        for qid in sorted(touched):
            self._kick(touched[qid], now)

    def _on_batch_complete(self, now: int, w: Worker, completions: List[Tuple[_Packet, int]]) -> None:
        w.in_service = False
        for pkt, done in completions:
            self._complete(pkt, done)
        if w.release_when_idle and len(w.queue) == 0:
            self._free_worker(w)
            return
        self._kick(w, now)

    def _complete(self, pkt: _Packet, done: int) -> None:
        self._outstanding -= 1
        self.metrics.latencies.append(done - pkt.arrival)
        last = self._last_done.get(pkt.flow)
        if last is not None:
            seq, at = last
            if (pkt.seq > seq and done < at) or (pkt.seq < seq and done > at):
                self.metrics.order_violations += 1
        if last is None or pkt.seq > last[0]:
            self._last_done[pkt.flow] = (pkt.seq, done)
        if self.on_complete is not None:
            self.on_complete(done, pkt.flow, done - pkt.arrival)

    def _free_worker(self, w: Worker) -> None:
        w.retired = True
        w.release_when_idle = False
        if w.owner is not None and w.owner.server is not None and not w.dispatches:
            w.owner.server.return_aux(w.cores)

    # ── Core mapper ───────────────────────────────────────────────────────────

    def _on_epoch(self, srv: ServerState, now: int) -> None:
        srv.roll_epoch()
        for slot in sorted(srv.dedicated):
            core = srv.dedicated[slot]
            self._flush_redirected(core, now)
            queues = [core.nic] + [core.borrowed[q].queue for q in sorted(core.borrowed)]
            stats = update_stats(queues, core.next_qid, self._in_service(core, now))
            if self.mode.core_mapper:
                plan = absorb_bursts(stats, self.family, srv, self.core_config.max_split, self.core_config.aux_request_budget)
                self._apply_plan(srv, core, plan, now)
            if self.mode.boost:
                self._boost(srv, core, now)
            elif self.mode.on_demand:
                self._maybe_on_demand(srv, core, now)
            self._release_idle(srv, core, now)
        if not self._ended:
            self._push(now + self.epoch, EventKind.EPOCH_BOUNDARY, srv)

    def _in_service(self, core: DedicatedCore, now: int) -> Dict[int, int]:
        """Packets each queue's cores still owe past `now`, at their bottleneck stage."""
        owed: Dict[int, int] = {}
        for w in core.workers():
            remaining = max(w.busy_until, w.not_before) - now
            if remaining <= 0:
                continue
            bottleneck = self.chain.total_cost if w.dispatches else max(self._levels(w.level)[0])
            owed[w.queue.queue_id] = -(-remaining // bottleneck)
        return owed

    def _flush_redirected(self, core: DedicatedCore, now: int) -> None:
        """NIC packets of redirected flows go to their queues before the stats are read."""
        if not core.redirects:
            return
        taken = core.nic.take_flows(set(core.redirects))
        if not taken:
            return
        handoffs = [(pkt, core.redirects[flow]) for flow, pkts in taken.items() for pkt in pkts]
        end = self._charge(core.worker, now, len(handoffs) * self.params.dispatch_cost)
        self._hand_off(core, handoffs, end, now)

    def _apply_plan(self, srv: ServerState, core: DedicatedCore, plan: MigrationPlan, now: int) -> None:
        for flow, reason in plan.alerts:
            self.metrics.alerts.append(Alert(now, srv.server_id, core.slot, flow, reason))
        if plan.at_risk:
            self.metrics.at_risk_epochs += 1
            log.warning(f"EPOCH | server={srv.server_id} core={core.slot} at risk: auxiliary pool exhausted")
        if plan.is_empty:
            return

        for nq in plan.new_queues:
            queue = SoftwareQueue(nq.queue_id, self.params.sw_capacity, nq.level)
            core.borrowed[nq.queue_id] = Worker(queue, srv.take_aux(nq.level), core, dispatches=False)
            core.next_qid = max(core.next_qid, nq.queue_id + 1)
        for qid, level in sorted(plan.level_changes.items()):
            worker = core.borrowed[qid]
            worker.cores.extend(srv.take_aux(level - worker.level))
            worker.queue.split = level

        planned = now
        if plan.moves:
            self._charge(core.worker, now, self.core_config.plan_overhead)
            planned = now + self.core_config.plan_overhead

        workers = {LOCAL_QUEUE: core.worker, **core.borrowed}
        by_src: Dict[int, List] = defaultdict(list)
        for move in plan.moves:
            by_src[move.src_queue].append(move)
        touched: Dict[int, Worker] = {}
        for src_id in sorted(by_src):
            src = workers[src_id]
            taken = src.queue.take_flows({m.flow for m in by_src[src_id]})
            for move in by_src[src_id]:
                dst = workers[move.dst_queue]
                dst.queue.push_many(taken.get(move.flow, ()))
                dst.not_before = max(dst.not_before, self._flow_barrier(move.flow, planned))
                if move.dst_queue == LOCAL_QUEUE:
                    core.redirects.pop(move.flow, None)
                else:
                    core.redirects[move.flow] = move.dst_queue
                touched[move.dst_queue] = dst
                self.metrics.migrations += 1
        log.debug(
            f"EPOCH | server={srv.server_id} core={core.slot} moves={len(plan.moves)} "
            f"new_queues={len(plan.new_queues)} aux_free={srv.available()}"
        )
        for qid in sorted(touched):
            self._kick(touched[qid], now)

    def _flow_barrier(self, flow: int, planned: int) -> int:
        """A moved flow may restart once the plan is made and its in-service packets are done."""
        last = self._last_service.get(flow)
        return planned if last is None else max(planned, last[1])

    def _boost(self, srv: ServerState, core: DedicatedCore, now: int) -> None:
        transition = boost_check(len(core.nic), core.boost, self.server_config.boost_threshold)
        if transition is BoostTransition.ENTER:
            if not srv.free_aux:
                if not srv.boost_starved_logged:
                    log.warning(f"BOOST | server={srv.server_id} no auxiliary core free; boost deferred")
                    srv.boost_starved_logged = True
                return
            qid = core.next_qid
            core.next_qid += 1
            queue = SoftwareQueue(qid, self.params.sw_capacity)
            core.borrowed[qid] = Worker(queue, srv.take_aux(1), core, dispatches=False)
            core.boost = True
            core.boost_qid = qid
            srv.boost_entries += 1
            self.metrics.boost_entries += 1
            log.info(f"BOOST | enter server={srv.server_id} core={core.slot} backlog={len(core.nic)} t={now}")
        elif transition is BoostTransition.EXIT:
            core.boost = False
            core.boost_qid = None
            srv.boost_exits += 1
            self.metrics.boost_exits += 1
            log.info(f"BOOST | exit server={srv.server_id} core={core.slot} t={now}")

    def _maybe_on_demand(self, srv: ServerState, core: DedicatedCore, now: int) -> None:
        if len(core.nic) <= self.server_config.boost_threshold:
            return
        if srv.last_on_demand is not None and now - srv.last_on_demand < self.server_config.on_demand_gap:
            return
        srv.last_on_demand = now
        stats = BucketStats.from_counts(srv.last_epoch_packets, srv.last_epoch_flows, 1, self.epoch)
        self._remap(srv, stats, now, on_demand=True)

    def _release_idle(self, srv: ServerState, core: DedicatedCore, now: int) -> None:
        for qid in sorted(core.borrowed):
            if core.boost and qid == core.boost_qid:
                continue
            worker = core.borrowed[qid]
            if len(worker.queue) or worker.in_service or worker.not_before > now:
                continue
            del core.borrowed[qid]
            self._free_worker(worker)
            for flow in [f for f, q in core.redirects.items() if q == qid]:
                del core.redirects[flow]

    # ── Server mapper ─────────────────────────────────────────────────────────

    def _on_tick(self, srv: ServerState, now: int) -> None:
        interval = max(now - srv.last_tick, 1)
        stats = BucketStats.from_counts(srv.bucket_packets, srv.flow_sums, srv.epochs, interval)
        self._remap(srv, stats, now)
        srv.bucket_packets = [0] * len(srv.bucket_packets)
        srv.flow_sums = [0.0] * len(srv.flow_sums)
        srv.epochs = 0
        srv.last_tick = now
        if not self._ended:
            self._push(now + self.server_config.decision_interval, EventKind.SERVER_MAPPER_TICK, srv)

    def _remap(self, srv: ServerState, stats: BucketStats, now: int, on_demand: bool = False) -> None:
        base = srv.installer.latest() or srv.mapping
        result = remap_greedy(stats, base, self.table)
        if result.migrated:
            effective_at = srv.installer.install_mapping(result.mapping, now)
            self._push(effective_at, EventKind.MAPPING_EFFECTIVE, srv)
            self.metrics.remaps += 1
        if not result.feasible:
            log.warning(f"REMAP | server={srv.server_id} no feasible packing; some cores stay over threshold")
        active = len(result.mapping.active_cores())
        self.ingress.report_cores(srv.server_id, active)
        self.metrics.intervals.append(IntervalRecord(
            time=now,
            server=srv.server_id,
            dedicated_cores=active,
            migrated_buckets=len(result.migrated),
            boost_entries=srv.boost_entries,
            boost_exits=srv.boost_exits,
            feasible=result.feasible,
            on_demand=on_demand,
        ))
        if not on_demand:
            srv.boost_entries = 0
            srv.boost_exits = 0

    def _apply_mapping(self, srv: ServerState, new: CoreMapping, now: int) -> None:
        old = srv.mapping
        moved = old.moved_buckets(new)
        srv.mapping = new
        for slot in new.active_cores():
            if slot not in srv.dedicated:
                srv.dedicated[slot] = DedicatedCore(slot, self.params.nic_capacity, srv)
        log.info(
            f"REMAP | effective server={srv.server_id} moved_buckets={len(moved)} "
            f"active={len(new.active_cores())} t={now}"
        )
        if moved:
            for slot in sorted(srv.dedicated):
                self._evict_moved(srv, srv.dedicated[slot], moved, now)

        active = set(new.active_cores())
        for slot in sorted(set(srv.dedicated) - active):
            self._retire(srv, srv.dedicated.pop(slot))
        for slot in sorted(srv.dedicated):
            for worker in srv.dedicated[slot].workers():
                self._kick(worker, now)

    def _evict_moved(self, srv: ServerState, core: DedicatedCore, moved: frozenset, now: int) -> None:
        """Send every queued packet of a moved bucket to its new core, oldest first."""
        def keep(pkt: _Packet) -> bool:
            return pkt.bucket not in moved

        barrier = max(w.busy_until for w in core.workers())
        per_flow: Dict[int, List[_Packet]] = {}
        for worker in core.workers()[1:] + [core.worker]:
            for flow, pkts in worker.queue.take(keep).items():
                per_flow.setdefault(flow, []).extend(pkts)
        for flow in [f for f in core.redirects if self._bucket(f) in moved]:
            del core.redirects[flow]
        for flow, pkts in sorted(per_flow.items(), key=lambda item: item[1][0].seq):
            dest = srv.dedicated[srv.mapping.assignment[pkts[0].bucket]]
            dest.nic.push_many(pkts)
            dest.worker.not_before = max(dest.worker.not_before, barrier)

    def _retire(self, srv: ServerState, core: DedicatedCore) -> None:
        for qid in sorted(core.borrowed):
            worker = core.borrowed.pop(qid)
            if worker.in_service:
                worker.release_when_idle = True
                srv.retiring.append(worker)
            else:
                self._free_worker(worker)
        core.worker.retired = True
        srv.retiring.append(core.worker)
        log.debug(f"REMAP | server={srv.server_id} core={core.slot} retired")

    # ── Usage ─────────────────────────────────────────────────────────────────

    def _workers(self) -> Iterable[Worker]:
        for srv in self.servers:
            for slot in sorted(srv.dedicated):
                yield from srv.dedicated[slot].workers()
            yield from srv.retiring
        for core in self._static:
            yield core.worker
        for core in self._per_flow.values():
            yield core.worker
        if self._isolated is not None:
            yield self._isolated

    def _on_usage(self, now: int) -> None:
        since = now - self.params.usage_window
        count = 0
        for w in self._workers():
            if w.busy_until > since or len(w.queue):
                count += w.level
        self.metrics.core_samples.append(count)
        for srv in self.servers:
            srv.retiring = [w for w in srv.retiring if w.busy_until > since or w.in_service]
        if not self._ended:
            self._push(now + self.params.usage_window, EventKind.USAGE_SAMPLE)


# ─── Entry points ─────────────────────────────────────────────────────────────

def _mode_predictors(profile: ModeProfile, predictors: Predictors, margin: float) -> Tuple[FrontierFamily, RateThresholdTable]:
    family = predictors.family
    if profile.frontier == "static_safe":
        family = static_safe(family)
    elif profile.frontier == "static_unsafe":
        family = static_unsafe(family)

    table = predictors.table
    if profile.thresholds != "trained":
        table = static_threshold(table, profile.thresholds.split("_", 1)[1])
    elif margin:
        table = table.scaled(1.0 - margin)
    return family, table


def run_mode(
    config: Any,
    trace: Sequence[PacketRecord],
    mode: str,
    predictors: Optional[Predictors] = None,
    slo: Optional[int] = None,
) -> Metrics:
    """Simulate one mode at one SLO (ns; defaults to the first configured SLO)."""
    profile = mode_profile(mode)
    chain = config.chain.to_chain()
    if slo is None:
        slo = int(config.slos_us[0] * NS_PER_US)
    params = SimParams.from_config(config)
    if not profile.needs_predictors:
        return Simulator(params, chain, slo, profile).run(trace)
    if predictors is None:
        predictors = analytic_predictors(chain, slo, params.max_split, config.training.flow_grid, params.plan_overhead)
    expected = chain_hash(chain)
    for name, got in (("frontier", predictors.family.chain_hash), ("thresholds", predictors.table.chain_hash)):
        if got != expected:
            raise PredictorMismatchError(f"{name} trained for chain {got[:12]}, config chain is {expected[:12]}")
    family, table = _mode_predictors(profile, predictors, params.safety_margin)
    return Simulator(params, chain, slo, profile, family, table).run(trace)


def run(
    config: Any,
    trace: Sequence[PacketRecord],
    predictors: Optional[Predictors] = None,
    slo: Optional[int] = None,
) -> Metrics:
    return run_mode(config, trace, "full", predictors, slo)


def profile_epochs(
    chain: ChainSpec,
    slo: int,
    scheme: SplitScheme,
    trace: Sequence[PacketRecord],
    params: Optional[SimParams] = None,
) -> List[EpochSample]:
    """
    Run a trace on one unbounded queue served at split `scheme`, every mapper
    off, and summarise completions per epoch: distinct flows, packets, and
    whether any exceeded the SLO.
    """
    epoch = epoch_length(slo)
    flows: Dict[int, Set[int]] = defaultdict(set)
    packets: Counter = Counter()
    violated: Set[int] = set()

    def record(done: int, flow: int, latency: int) -> None:
        idx = done // epoch
        flows[idx].add(flow)
        packets[idx] += 1
        if latency > slo:
            violated.add(idx)

    params = params or SimParams()
    Simulator(params, chain, slo, _ISOLATED, isolated_scheme=scheme, on_complete=record).run(trace)
    return [EpochSample(len(flows[idx]), packets[idx], idx in violated) for idx in sorted(packets)]


def probe_rate(
    chain: ChainSpec,
    slo: int,
    flows: int,
    rate: float,
    duration: float,
    seed: int,
    params: Optional[SimParams] = None,
) -> Optional[int]:
    """p99 latency in ns of one core fed `flows` paced flows at `rate` pkts/s; None on loss."""
    params = replace(params or SimParams(), hash_cores=1)
    metrics = Simulator(params, chain, slo, _PROBE).run(paced_flows(flows, rate, duration, seed))
    if metrics.dropped or metrics.in_flight or not metrics.latencies:
        return None
    return int(nearest_rank(metrics.latencies, 99))
