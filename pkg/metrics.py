# Codes By Visionnn

"""
burstscale Metrics
Accumulators filled by the simulator during a run, and the summary record
written for every experiment cell.
"""

from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import NS_PER_US

DROP_NIC = "nic_overflow"
DROP_SW = "sw_overflow"


@dataclass(frozen=True)
class Alert:
    time: int
    server: int
    core: int
    flow: int
    reason: str


@dataclass(frozen=True)
class IntervalRecord:
    time: int
    server: int
    dedicated_cores: int
    migrated_buckets: int
    boost_entries: int
    boost_exits: int
    feasible: bool
    on_demand: bool = False


def nearest_rank(values: Sequence[int], q: float) -> Optional[float]:
    """q-th percentile by the nearest-rank method; None for no samples."""
    if len(values) == 0:
        return None
    return float(np.percentile(np.asarray(values), q, method="inverted_cdf"))


@dataclass
class Metrics:
    latencies: List[int] = field(default_factory=list)
    arrivals: int = 0
    drops: Counter = field(default_factory=Counter)
    in_flight: int = 0
    core_samples: List[int] = field(default_factory=list)
    alerts: List[Alert] = field(default_factory=list)
    at_risk_epochs: int = 0
    intervals: List[IntervalRecord] = field(default_factory=list)
    recruitments: List[Tuple[int, int]] = field(default_factory=list)
    boost_entries: int = 0
    boost_exits: int = 0
    remaps: int = 0
    migrations: int = 0
    order_violations: int = 0
    affinity_violations: int = 0
    end_time: int = 0

    @property
    def completions(self) -> int:
        return len(self.latencies)

    @property
    def dropped(self) -> int:
        return sum(self.drops.values())

    def summary(self) -> Dict[str, object]:
        p50 = nearest_rank(self.latencies, 50)
        p99 = nearest_rank(self.latencies, 99)
        samples = len(self.core_samples)
        return {
            "p50_us": None if p50 is None else p50 / NS_PER_US,
            "p99_us": None if p99 is None else p99 / NS_PER_US,
            "avg_cores": sum(self.core_samples) / samples if samples else 0.0,
            "loss_rate": self.dropped / self.arrivals if self.arrivals else 0.0,
            "drops_by_cause": dict(sorted(self.drops.items())),
            "alerts": len(self.alerts),
            "arrivals": self.arrivals,
            "completions": self.completions,
            "in_flight": self.in_flight,
            "at_risk_epochs": self.at_risk_epochs,
            "boost_entries": self.boost_entries,
            "remaps": self.remaps,
            "migrations": self.migrations,
            "servers_recruited": len(self.recruitments),
        }

    def records(self, verbose: bool = False) -> Iterator[Dict[str, object]]:
        """JSON-ready records: the summary, then the raw streams when verbose."""
        yield {"type": "summary", **self.summary()}
        for alert in self.alerts:
            yield {"type": "alert", **asdict(alert)}
        if not verbose:
            return
        yield {"type": "latency_ns", "samples": list(self.latencies)}
        yield {"type": "core_samples", "samples": list(self.core_samples)}
        for interval in self.intervals:
            yield {"type": "interval", **asdict(interval)}
        for time, server in self.recruitments:
            yield {"type": "recruitment", "time": time, "server": server}
