# Codes By Visionnn

"""
burstscale Traffic
Packet traces: CSV ingestion, seeded synthetic workloads with whales and
minnow storms, and aggregate trace statistics.

Trace format, one packet per line, UTF-8, LF endings:
    arrival_ns,flow_id,dst_addr,size
The header line is optional. dst_addr is a decimal integer or dotted quad.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from config import (
    ADDRESS_BASE,
    ADDRESS_POOL_SIZE,
    ADDRESS_STRIDE,
    DEFAULT_MEAN_PACKETS,
    DEFAULT_PACING_RATE,
    DEFAULT_PACKET_SIZE,
    DEFAULT_SEED,
    DEFAULT_WORKLOAD_DURATION_S,
    NS_PER_S,
    PARETO_SHAPE,
    STATS_WINDOW_NS,
)
from errors import ConfigError, TraceFormatError
from flow_id import generated_flow_id, ip_to_int
from logger import log

TRACE_HEADER = "arrival_ns,flow_id,dst_addr,size"
PACKET_COUNT_DISTRIBUTIONS = ("constant", "geometric", "pareto")


class PacketRecord(NamedTuple):
    arrival_time: int   # ns since experiment start
    flow: int           # FlowId
    dst_addr: int       # 32-bit destination
    size: int = DEFAULT_PACKET_SIZE


class TraceStats(NamedTuple):
    flow_count: int
    packet_count: int
    max_flow_rate: float      # pkts/s over the sliding window
    flow_arrival_rate: float  # flows/s
    duration_ns: int


@dataclass(frozen=True)
class WhaleSpec:
    start: float      # s
    duration: float   # s
    rate: float       # pkts/s


@dataclass(frozen=True)
class StormSpec:
    start: float      # s
    window: float     # s
    flows: int
    packets: int = 1
    rate: float = 0.0  # per-flow pacing; 0 uses the workload pacing rate


@dataclass(frozen=True)
class WorkloadSpec:
    flow_rate: float = 0.0
    packets_per_flow: str = "constant"
    mean_packets: float = DEFAULT_MEAN_PACKETS
    pacing_rate: float = DEFAULT_PACING_RATE
    persistent_flows: int = 0
    whales: Tuple[WhaleSpec, ...] = field(default_factory=tuple)
    storms: Tuple[StormSpec, ...] = field(default_factory=tuple)
    shape_flows: bool = True
    duration: float = DEFAULT_WORKLOAD_DURATION_S
    seed: int = DEFAULT_SEED
    address_pool: int = ADDRESS_POOL_SIZE
    address_base: int = ip_to_int(ADDRESS_BASE)
    address_stride: int = ADDRESS_STRIDE
    packet_size: int = DEFAULT_PACKET_SIZE

    def __post_init__(self) -> None:
        object.__setattr__(self, "whales", tuple(self.whales))
        object.__setattr__(self, "storms", tuple(self.storms))
        self.validate()

    def validate(self) -> None:
        if self.flow_rate < 0:
            raise ConfigError(f"workload.flow_rate must be >= 0, got {self.flow_rate}")
        if self.duration <= 0:
            raise ConfigError(f"workload.duration_s must be positive, got {self.duration}")
        if self.pacing_rate <= 0:
            raise ConfigError(f"workload.pacing_rate must be positive, got {self.pacing_rate}")
        if self.mean_packets < 1:
            raise ConfigError(f"workload.mean_packets must be >= 1, got {self.mean_packets}")
        if self.packets_per_flow not in PACKET_COUNT_DISTRIBUTIONS:
            raise ConfigError(
                f"workload.packets_per_flow must be one of {PACKET_COUNT_DISTRIBUTIONS}, "
                f"got '{self.packets_per_flow}'"
            )
        if self.persistent_flows < 0:
            raise ConfigError("workload.persistent_flows must be >= 0")
        if self.address_pool < 1 or self.address_stride < 1:
            raise ConfigError("workload address pool and stride must be positive")
        if self.address_base + (self.address_pool - 1) * self.address_stride > 0xFFFFFFFF:
            raise ConfigError("workload address pool overflows the 32-bit space")
        for whale in self.whales:
            if whale.start < 0 or whale.duration <= 0 or whale.rate <= 0:
                raise ConfigError(f"invalid whale entry: {whale}")
        for storm in self.storms:
            if storm.start < 0 or storm.window <= 0 or storm.flows < 1 or storm.packets < 1 or storm.rate < 0:
                raise ConfigError(f"invalid storm entry: {storm}")


# ─── Parsing ──────────────────────────────────────────────────────────────────

def parse_trace(path: Path) -> List[PacketRecord]:
    """
    Read a CSV trace. Out-of-order input is rejected rather than re-sorted.

    Raises:
        TraceFormatError: malformed line, decreasing timestamp or empty file.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").split("\n")
    except OSError as e:
        log.error(f"Failed to read trace '{path}': {e}")
        raise TraceFormatError(f"cannot read trace '{path}': {e}") from e

    records: List[PacketRecord] = []
    previous = -1
    first = True
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if first:
            first = False
            if not line[0].isdigit():
                continue  # header
        parts = line.split(",")
        if len(parts) != 4:
            raise TraceFormatError(f"expected 4 fields, got {len(parts)}", line=number)
        try:
            arrival = int(parts[0])
            flow = int(parts[1])
            dst = ip_to_int(parts[2])
            size = int(parts[3])
        except ValueError as e:
            raise TraceFormatError(f"malformed field ({e})", line=number) from e
        if arrival < 0 or flow < 0 or size < 0:
            raise TraceFormatError("negative value", line=number)
        if arrival < previous:
            raise TraceFormatError(
                f"timestamp {arrival} is earlier than the previous {previous} (trace out of order)",
                line=number,
            )
        previous = arrival
        records.append(PacketRecord(arrival, flow, dst, size))

    if not records:
        raise TraceFormatError(f"trace '{path.name}' is empty")

    log.info(f"TRACE | parsed file='{path.name}' packets={len(records)}")
    return records


def write_trace(records: Sequence[PacketRecord], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(TRACE_HEADER + "\n")
        for r in records:
            f.write(f"{r.arrival_time},{r.flow},{r.dst_addr},{r.size}\n")
    return path


# ─── Generation ───────────────────────────────────────────────────────────────

def _gap_ns(rate: float) -> int:
    # rounded up so a shaped flow never beats its pacing rate
    return max(1, math.ceil(NS_PER_S / rate))


def _flow_times(rng: np.random.Generator, start_ns: int, count: int, rate: float, shaped: bool) -> np.ndarray:
    gap = _gap_ns(rate)
    if count <= 0:
        return np.zeros(0, dtype=np.int64)
    if shaped:
        return start_ns + gap * np.arange(count, dtype=np.int64)
    gaps = np.ceil(rng.exponential(gap, size=count - 1)).astype(np.int64) if count > 1 else np.zeros(0, dtype=np.int64)
    return start_ns + np.concatenate(([0], np.cumsum(gaps))).astype(np.int64)


def _packet_count(rng: np.random.Generator, spec: WorkloadSpec) -> int:
    mean = spec.mean_packets
    if spec.packets_per_flow == "constant":
        return max(1, int(round(mean)))
    if spec.packets_per_flow == "geometric":
        return int(rng.geometric(1.0 / mean))
    # Pareto with shape a has mean a*xm/(a-1)
    xm = mean * (PARETO_SHAPE - 1) / PARETO_SHAPE
    return max(1, int((rng.pareto(PARETO_SHAPE) + 1.0) * xm))


def generate(spec: WorkloadSpec) -> List[PacketRecord]:
    """
    Synthesize a trace. Output depends only on the WorkloadSpec, seed included.

    Base flows arrive as a Poisson process and persistent flows run for the
    whole duration with random phases; both are cut at the duration. Whale
    and storm flows are always emitted whole.
    """
    rng = np.random.default_rng(spec.seed)
    duration_ns = int(round(spec.duration * NS_PER_S))
    times: List[np.ndarray] = []
    flows: List[np.ndarray] = []
    addrs: List[np.ndarray] = []
    next_index = 0

    def emit(arrivals: np.ndarray, truncate: bool) -> None:
        nonlocal next_index
        if truncate:
            arrivals = arrivals[arrivals <= duration_ns]
        next_index += 1
        if arrivals.size == 0:
            return
        slot = int(rng.integers(0, spec.address_pool))
        times.append(arrivals)
        flows.append(np.full(arrivals.size, generated_flow_id(spec.seed, next_index), dtype=np.uint64))
        addrs.append(np.full(arrivals.size, spec.address_base + slot * spec.address_stride, dtype=np.int64))

    # ── Persistent paced flows ────────────────────────────────────────────────
    for _ in range(spec.persistent_flows):
        gap = _gap_ns(spec.pacing_rate)
        phase = int(rng.integers(0, gap))
        count = (duration_ns - phase) // gap + 1
        emit(_flow_times(rng, phase, count, spec.pacing_rate, spec.shape_flows), truncate=True)

    # ── Poisson base flows ────────────────────────────────────────────────────
    if spec.flow_rate > 0:
        t = rng.exponential(1.0 / spec.flow_rate)
        while t <= spec.duration:
            start_ns = int(round(t * NS_PER_S))
            count = _packet_count(rng, spec)
            emit(_flow_times(rng, start_ns, count, spec.pacing_rate, spec.shape_flows), truncate=True)
            t += rng.exponential(1.0 / spec.flow_rate)

    # ── Whales ────────────────────────────────────────────────────────────────
    for whale in spec.whales:
        count = math.ceil(whale.rate * whale.duration - 1e-9)
        start_ns = int(round(whale.start * NS_PER_S))
        emit(_flow_times(rng, start_ns, count, whale.rate, shaped=True), truncate=False)

    # ── Minnow storms ─────────────────────────────────────────────────────────
    for storm in spec.storms:
        start_ns = int(round(storm.start * NS_PER_S))
        window_ns = int(round(storm.window * NS_PER_S))
        rate = storm.rate or spec.pacing_rate
        offsets = np.sort(rng.integers(0, window_ns + 1, size=storm.flows))
        for offset in offsets:
            emit(_flow_times(rng, start_ns + int(offset), storm.packets, rate, spec.shape_flows), truncate=False)

    if not times:
        return []

    all_times = np.concatenate(times)
    all_flows = np.concatenate(flows)
    all_addrs = np.concatenate(addrs)
    order = np.lexsort((all_flows, all_times))
    return [
        PacketRecord(int(t), int(f), int(a), spec.packet_size)
        for t, f, a in zip(all_times[order], all_flows[order], all_addrs[order])
    ]


def paced_flows(
    flows: int,
    rate: float,
    duration: float,
    seed: int,
    dst_addr: int = 0,
) -> List[PacketRecord]:
    """
    f shaped flows sharing an aggregate rate, each with a seeded random phase.
    Used by the long-term threshold probe.
    """
    spec = WorkloadSpec(
        pacing_rate=rate / flows,
        persistent_flows=flows,
        duration=duration,
        seed=seed,
        address_pool=1,
        address_base=dst_addr,
    )
    return generate(spec)


# ─── Statistics ───────────────────────────────────────────────────────────────

def compute_stats(trace: Sequence[PacketRecord], window_ns: int = STATS_WINDOW_NS) -> TraceStats:
    """
    Exact counts plus the peak per-flow rate over any [t, t+W) window and the
    flow arrival rate over the trace span.
    """
    if not trace:
        return TraceStats(0, 0, 0.0, 0.0, 0)

    times = np.fromiter((r.arrival_time for r in trace), dtype=np.int64, count=len(trace))
    flows = np.fromiter((r.flow for r in trace), dtype=np.uint64, count=len(trace))

    unique_flows = np.unique(flows)
    order = np.lexsort((times, flows))
    sorted_times = times[order]
    sorted_flows = flows[order]
    boundaries = np.flatnonzero(sorted_flows[1:] != sorted_flows[:-1]) + 1

    peak = 0
    for group in np.split(sorted_times, boundaries):
        ends = np.searchsorted(group, group + window_ns, side="left")
        peak = max(peak, int((ends - np.arange(group.size)).max()))

    span = int(times[-1] - times[0])
    span_s = (span if span > 0 else window_ns) / NS_PER_S
    return TraceStats(
        flow_count=int(unique_flows.size),
        packet_count=len(trace),
        max_flow_rate=peak * NS_PER_S / window_ns,
        flow_arrival_rate=unique_flows.size / span_s,
        duration_ns=span,
    )
