# Codes By Visionnn

"""
burstscale NF Chain Model
An NF chain is an ordered list of stages with per-packet costs. A split
scheme cuts the chain at stage boundaries into contiguous sub-chains that
run as a pipeline on n cores.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from config import DEFAULT_MAX_BATCH, NEW_FLOW_COST_FACTOR, NS_PER_S
from errors import ConfigError, SplitSchemeError


@dataclass(frozen=True)
class Stage:
    name: str
    cost_ns: int


@dataclass(frozen=True)
class ChainSpec:
    stages: Tuple[Stage, ...]
    per_new_flow_cost: Optional[int] = None
    max_batch: int = DEFAULT_MAX_BATCH

    def __post_init__(self) -> None:
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ConfigError("chain needs at least one stage")
        for stage in self.stages:
            if stage.cost_ns <= 0:
                raise ConfigError(f"stage '{stage.name}' cost must be positive, got {stage.cost_ns}")
        if self.max_batch < 1:
            raise ConfigError(f"max_batch must be >= 1, got {self.max_batch}")
        if self.per_new_flow_cost is None:
            object.__setattr__(self, "per_new_flow_cost", NEW_FLOW_COST_FACTOR * self.total_cost)
        elif self.per_new_flow_cost < 0:
            raise ConfigError(f"per_new_flow_cost must be >= 0, got {self.per_new_flow_cost}")

    @classmethod
    def from_costs(
        cls,
        costs: Sequence[int],
        per_new_flow_cost: Optional[int] = None,
        max_batch: int = DEFAULT_MAX_BATCH,
    ) -> "ChainSpec":
        stages = tuple(Stage(f"nf{i}", int(cost)) for i, cost in enumerate(costs))
        return cls(stages, per_new_flow_cost, max_batch)

    @property
    def total_cost(self) -> int:
        return sum(stage.cost_ns for stage in self.stages)

    def to_dict(self) -> dict:
        return {
            "stages": [[s.name, s.cost_ns] for s in self.stages],
            "per_new_flow_cost": self.per_new_flow_cost,
            "max_batch": self.max_batch,
        }


@dataclass(frozen=True)
class SplitScheme:
    cut_points: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cut_points", tuple(self.cut_points))

    @property
    def n(self) -> int:
        return len(self.cut_points) + 1

    def bounds(self, num_stages: int) -> List[Tuple[int, int]]:
        """[start, end) stage ranges of each sub-chain."""
        edges = (0,) + self.cut_points + (num_stages,)
        return [(edges[i], edges[i + 1]) for i in range(self.n)]

    def label(self) -> str:
        return ",".join(str(c) for c in self.cut_points) or "-"


UNSPLIT = SplitScheme()


def validate_scheme(chain: ChainSpec, scheme: SplitScheme) -> None:
    previous = 0
    for cut in scheme.cut_points:
        if cut <= previous or cut >= len(chain.stages):
            raise SplitSchemeError(
                f"invalid cut points {scheme.cut_points} for a {len(chain.stages)}-stage chain"
            )
        previous = cut


def service_time(chain: ChainSpec, is_new_flow: bool) -> int:
    """Per-packet cost in ns, plus the state-creation cost for a new flow."""
    cost = chain.total_cost
    if is_new_flow:
        cost += chain.per_new_flow_cost
    return cost


def sub_chain_costs(chain: ChainSpec, scheme: SplitScheme) -> List[int]:
    validate_scheme(chain, scheme)
    return [
        sum(stage.cost_ns for stage in chain.stages[start:end])
        for start, end in scheme.bounds(len(chain.stages))
    ]


def sub_chain_new_flow_costs(chain: ChainSpec, scheme: SplitScheme) -> List[int]:
    """
    Split the per-new-flow cost across sub-chains in proportion to their
    per-packet cost. Integer shares; the remainder goes to the last sub-chain
    so the parts always sum to the whole.
    """
    costs = sub_chain_costs(chain, scheme)
    total = sum(costs)
    shares = [chain.per_new_flow_cost * c // total for c in costs]
    shares[-1] += chain.per_new_flow_cost - sum(shares)
    return shares


def split_throughput(chain: ChainSpec, scheme: SplitScheme) -> float:
    """Pipeline throughput in pkts/s, set by the slowest sub-chain."""
    return NS_PER_S / max(sub_chain_costs(chain, scheme))


def split_latency(chain: ChainSpec, scheme: SplitScheme) -> int:
    """Unloaded per-packet latency in ns; always the whole chain cost."""
    return sum(sub_chain_costs(chain, scheme))


def enumerate_splits(chain: ChainSpec, max_cores: int) -> List[SplitScheme]:
    """
    Every contiguous partition into at most max_cores sub-chains, ordered by
    core count and then by descending throughput (ties by cut tuple).
    """
    num_stages = len(chain.stages)
    schemes: List[SplitScheme] = []
    for n in range(1, min(max_cores, num_stages) + 1):
        level = [SplitScheme(cuts) for cuts in combinations(range(1, num_stages), n - 1)]
        level.sort(key=lambda s: (-split_throughput(chain, s), s.cut_points))
        schemes.extend(level)
    return schemes


def best_split(chain: ChainSpec, n: int) -> Optional[SplitScheme]:
    """Highest-throughput scheme with exactly n sub-chains, None if n exceeds the stage count."""
    if n < 1 or n > len(chain.stages):
        return None
    for scheme in enumerate_splits(chain, n):
        if scheme.n == n:
            return scheme
    return None
