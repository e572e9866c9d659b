# Codes By Visionnn

"""
burstscale Settings
Typed experiment configuration loaded from one YAML file, with
`section.key=value` overrides from the command line. Every default comes
from config.py.
"""

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml

from chain_model import ChainSpec, Stage
from config import (
    ADDRESS_BASE,
    ADDRESS_POOL_SIZE,
    ADDRESS_STRIDE,
    AUX_POOL_SIZE,
    BOOST_THRESHOLD,
    CORES_PER_SERVER,
    DECISION_INTERVAL_S,
    DEFAULT_MAX_BATCH,
    DEFAULT_MAX_SPLIT,
    DEFAULT_MEAN_PACKETS,
    DEFAULT_MODES,
    DEFAULT_PACING_RATE,
    DEFAULT_PACKET_SIZE,
    DEFAULT_PREDICTOR_SOURCE,
    DEFAULT_SEED,
    DEFAULT_SERVERS,
    DEFAULT_SLOS_US,
    DEFAULT_STAGE_COST_NS,
    DEFAULT_WORKLOAD_DURATION_S,
    DISPATCH_COST_NS,
    DRAIN_TIMEOUT_S,
    FLOW_GRID,
    HASH_CORES,
    INITIAL_DEDICATED_CORES,
    MAX_PROBE_FLOWS,
    NIC_QUEUE_CAPACITY,
    ON_DEMAND_GAP_S,
    PLAN_OVERHEAD_NS,
    PREDICTOR_DIR,
    PREFIX_LEN,
    PROBE_DURATION_S,
    PROPAGATION_DELAY_NS,
    REPORT_NAME,
    RESULTS_DIR,
    RSS_BUCKETS,
    RSS_UPDATE_DELAY_S,
    SAFETY_MARGIN,
    SEARCH_RESOLUTION,
    SW_QUEUE_CAPACITY,
    USAGE_WINDOW_US,
)
from errors import ConfigError
from fingerprint import config_hash as _hash_mapping
from flow_id import ip_to_int
from logger import log
from traffic import StormSpec, WhaleSpec, WorkloadSpec

PREDICTOR_SOURCES = ("analytic", "trained")


# ─── Sections ─────────────────────────────────────────────────────────────────

@dataclass
class StageSettings:
    name: str
    cost_ns: int


@dataclass
class ChainSettings:
    stages: List[StageSettings] = field(default_factory=lambda: [StageSettings("nf0", DEFAULT_STAGE_COST_NS)])
    per_new_flow_cost_ns: Optional[int] = None
    max_batch: int = DEFAULT_MAX_BATCH

    def __post_init__(self) -> None:
        stages = []
        for i, stage in enumerate(self.stages or []):
            if isinstance(stage, StageSettings):
                stages.append(stage)
            elif isinstance(stage, dict):
                _check_keys(stage, StageSettings, f"chain.stages[{i}]")
                stages.append(StageSettings(str(stage.get("name", f"nf{i}")), stage.get("cost_ns", 0)))
            else:
                stages.append(StageSettings(f"nf{i}", stage))
        self.stages = stages

    def to_chain(self) -> ChainSpec:
        return ChainSpec(
            tuple(Stage(s.name, int(s.cost_ns)) for s in self.stages),
            per_new_flow_cost=self.per_new_flow_cost_ns,
            max_batch=self.max_batch,
        )


@dataclass
class WhaleSettings:
    start_s: float
    duration_s: float
    rate: float


@dataclass
class StormSettings:
    start_s: float
    window_s: float
    flows: int
    packets: int = 1
    rate: float = 0.0


@dataclass
class WorkloadSettings:
    trace: Optional[str] = None
    flow_rate: float = 0.0
    packets_per_flow: str = "constant"
    mean_packets: float = DEFAULT_MEAN_PACKETS
    pacing_rate: float = DEFAULT_PACING_RATE
    persistent_flows: int = 0
    whales: List[WhaleSettings] = field(default_factory=list)
    storms: List[StormSettings] = field(default_factory=list)
    shape_flows: bool = True
    duration_s: float = DEFAULT_WORKLOAD_DURATION_S
    address_pool: int = ADDRESS_POOL_SIZE
    address_base: str = ADDRESS_BASE
    address_stride: int = ADDRESS_STRIDE
    packet_size: int = DEFAULT_PACKET_SIZE

    def __post_init__(self) -> None:
        self.whales = [_coerce(w, WhaleSettings, f"workload.whales[{i}]") for i, w in enumerate(self.whales or [])]
        self.storms = [_coerce(s, StormSettings, f"workload.storms[{i}]") for i, s in enumerate(self.storms or [])]

    def to_spec(self, seed: int) -> WorkloadSpec:
        try:
            base = ip_to_int(str(self.address_base))
        except ValueError as e:
            raise ConfigError(f"workload.address_base: {e}") from e
        return WorkloadSpec(
            flow_rate=self.flow_rate,
            packets_per_flow=self.packets_per_flow,
            mean_packets=self.mean_packets,
            pacing_rate=self.pacing_rate,
            persistent_flows=self.persistent_flows,
            whales=tuple(WhaleSpec(w.start_s, w.duration_s, w.rate) for w in self.whales),
            storms=tuple(StormSpec(s.start_s, s.window_s, s.flows, s.packets, s.rate) for s in self.storms),
            shape_flows=self.shape_flows,
            duration=self.duration_s,
            seed=seed,
            address_pool=self.address_pool,
            address_base=base,
            address_stride=self.address_stride,
            packet_size=self.packet_size,
        )


@dataclass
class RackSettings:
    servers: int = DEFAULT_SERVERS
    cores_per_server: int = CORES_PER_SERVER
    aux_pool_size: int = AUX_POOL_SIZE
    initial_dedicated: int = INITIAL_DEDICATED_CORES
    nic_queue_capacity: int = NIC_QUEUE_CAPACITY
    sw_queue_capacity: int = SW_QUEUE_CAPACITY


@dataclass
class CoreMapperSettings:
    max_split: int = DEFAULT_MAX_SPLIT
    plan_overhead_ns: int = PLAN_OVERHEAD_NS


@dataclass
class ServerMapperSettings:
    buckets: int = RSS_BUCKETS
    decision_interval_s: float = DECISION_INTERVAL_S
    rss_update_delay_s: float = RSS_UPDATE_DELAY_S
    boost_threshold: int = BOOST_THRESHOLD
    dispatch_cost_ns: int = DISPATCH_COST_NS
    safety_margin: float = SAFETY_MARGIN
    on_demand_gap_s: float = ON_DEMAND_GAP_S


@dataclass
class IngressSettings:
    prefix_len: int = PREFIX_LEN
    tau: Optional[int] = None
    propagation_delay_ns: int = PROPAGATION_DELAY_NS


@dataclass
class SimulatorSettings:
    hash_cores: int = HASH_CORES
    drain_timeout_s: float = DRAIN_TIMEOUT_S
    usage_window_us: int = USAGE_WINDOW_US


@dataclass
class TrainingSettings:
    probe_duration_s: float = PROBE_DURATION_S
    resolution: float = SEARCH_RESOLUTION
    flow_grid: List[int] = field(default_factory=lambda: list(FLOW_GRID))
    max_probe_flows: int = MAX_PROBE_FLOWS
    workload_duration_s: Optional[float] = None


@dataclass
class PredictorSettings:
    source: str = DEFAULT_PREDICTOR_SOURCE
    dir: str = str(PREDICTOR_DIR)


@dataclass
class OutputSettings:
    dir: str = str(RESULTS_DIR)
    name: str = REPORT_NAME
    verbose: bool = False
    jobs: int = 1


SECTIONS = {
    "chain": ChainSettings,
    "workload": WorkloadSettings,
    "rack": RackSettings,
    "core_mapper": CoreMapperSettings,
    "server_mapper": ServerMapperSettings,
    "ingress": IngressSettings,
    "simulator": SimulatorSettings,
    "training": TrainingSettings,
    "predictors": PredictorSettings,
    "output": OutputSettings,
}
TOP_LEVEL = ("seed", "slos_us", "modes")


@dataclass
class ExperimentConfig:
    seed: int = DEFAULT_SEED
    slos_us: List[float] = field(default_factory=lambda: list(DEFAULT_SLOS_US))
    modes: List[str] = field(default_factory=lambda: list(DEFAULT_MODES))
    chain: ChainSettings = field(default_factory=ChainSettings)
    workload: WorkloadSettings = field(default_factory=WorkloadSettings)
    rack: RackSettings = field(default_factory=RackSettings)
    core_mapper: CoreMapperSettings = field(default_factory=CoreMapperSettings)
    server_mapper: ServerMapperSettings = field(default_factory=ServerMapperSettings)
    ingress: IngressSettings = field(default_factory=IngressSettings)
    simulator: SimulatorSettings = field(default_factory=SimulatorSettings)
    training: TrainingSettings = field(default_factory=TrainingSettings)
    predictors: PredictorSettings = field(default_factory=PredictorSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    source: Optional[str] = None   # file the config came from, not hashed

    @property
    def slos_ns(self) -> List[int]:
        return [int(round(s * 1000)) for s in self.slos_us]

    def validate(self) -> "ExperimentConfig":
        """
        Check cross-field invariants. Raises ConfigError on the first problem.
        """
        from simulator import MODES

        if not self.slos_us or not self.modes:
            raise ConfigError("empty sweep: need at least one SLO and one mode")
        for slo in self.slos_us:
            if not isinstance(slo, (int, float)) or slo <= 0:
                raise ConfigError(f"slos_us must be positive, got {slo!r}")
        for mode in self.modes:
            if mode not in MODES:
                raise ConfigError(f"unknown mode '{mode}' (known: {', '.join(MODES)})")
        if not self.chain.stages:
            raise ConfigError("chain needs at least one stage")
        self.chain.to_chain()

        if self.workload.trace is not None and not Path(self.workload.trace).expanduser().is_file():
            raise ConfigError(f"workload.trace not found: {self.workload.trace}")
        if self.workload.trace is None:
            self.workload.to_spec(self.seed)

        rack = self.rack
        if rack.servers < 1 or rack.cores_per_server < 1:
            raise ConfigError("rack.servers and rack.cores_per_server must be positive")
        if not 0 <= rack.aux_pool_size < rack.cores_per_server:
            raise ConfigError("rack.aux_pool_size must leave at least one dedicated core")
        if not 1 <= rack.initial_dedicated <= rack.cores_per_server - rack.aux_pool_size:
            raise ConfigError("rack.initial_dedicated must be within the dedicated candidates")
        if rack.nic_queue_capacity < 1 or rack.sw_queue_capacity < 1:
            raise ConfigError("queue capacities must be positive")

        if self.core_mapper.max_split < 1 or self.core_mapper.plan_overhead_ns < 0:
            raise ConfigError("core_mapper.max_split must be >= 1 and plan_overhead_ns >= 0")
        sm = self.server_mapper
        if sm.buckets < 1 or sm.decision_interval_s <= 0 or sm.boost_threshold < 1:
            raise ConfigError("server_mapper buckets, decision interval and boost threshold must be positive")
        if sm.rss_update_delay_s < 0 or sm.dispatch_cost_ns < 0 or sm.on_demand_gap_s < 0:
            raise ConfigError("server_mapper delays and costs must be non-negative")
        if not 0.0 <= sm.safety_margin < 1.0:
            raise ConfigError(f"server_mapper.safety_margin must be in [0, 1), got {sm.safety_margin}")
        if not 0 <= self.ingress.prefix_len <= 32:
            raise ConfigError("ingress.prefix_len must be in 0..32")
        if self.simulator.hash_cores < 1 or self.simulator.drain_timeout_s < 0:
            raise ConfigError("simulator.hash_cores must be >= 1 and drain_timeout_s >= 0")

        grid = self.training.flow_grid
        if not grid or any(g < 1 for g in grid) or list(grid) != sorted(set(grid)):
            raise ConfigError(f"training.flow_grid must be positive and increasing, got {grid}")
        if self.training.probe_duration_s <= 0 or not 0 < self.training.resolution < 1:
            raise ConfigError("training.probe_duration_s must be positive and resolution in (0, 1)")
        if self.predictors.source not in PREDICTOR_SOURCES:
            raise ConfigError(f"predictors.source must be one of {PREDICTOR_SOURCES}, got '{self.predictors.source}'")
        if self.output.jobs < 1:
            raise ConfigError("output.jobs must be >= 1")
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop("source")
        return data

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ExperimentConfig":
        raw = dict(raw or {})
        unknown = sorted(set(raw) - set(SECTIONS) - set(TOP_LEVEL))
        if unknown:
            raise ConfigError(f"unknown config key '{unknown[0]}'")
        kwargs: Dict[str, Any] = {k: raw[k] for k in TOP_LEVEL if k in raw}
        if "slos_us" in kwargs:
            kwargs["slos_us"] = _as_list(kwargs["slos_us"])
        if "modes" in kwargs:
            kwargs["modes"] = [str(m) for m in _as_list(kwargs["modes"])]
        for name, section_cls in SECTIONS.items():
            if name in raw:
                kwargs[name] = _coerce(raw[name] or {}, section_cls, name)
        return cls(**kwargs)


# ─── Loading ──────────────────────────────────────────────────────────────────

def _as_list(value: Any) -> List[Any]:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _check_keys(data: Dict[str, Any], cls: type, where: str) -> None:
    allowed = {f.name for f in fields(cls)}
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown config key '{where}.{key}'")


def _coerce(value: Any, cls: type, where: str) -> Any:
    if isinstance(value, cls):
        return value
    if not isinstance(value, dict):
        raise ConfigError(f"'{where}' must be a mapping, got {type(value).__name__}")
    _check_keys(value, cls, where)
    try:
        return cls(**value)
    except TypeError as e:
        raise ConfigError(f"'{where}': {e}") from e


def _apply_override(raw: Dict[str, Any], override: str) -> None:
    key, sep, text = override.partition("=")
    key = key.strip().lstrip("-")
    if not sep or not key:
        raise ConfigError(f"override must look like section.key=value, got '{override}'")
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"override '{override}': {e}") from e

    section, dot, name = key.partition(".")
    if not dot:
        raw[section] = value
        return
    if "." in name:
        raise ConfigError(f"override key too deep: '{key}'")
    target = raw.setdefault(section, {})
    if not isinstance(target, dict):
        raise ConfigError(f"cannot override '{key}': '{section}' is not a section")
    target[name] = value


def load_config(path: Optional[Path] = None, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """
    Load and validate an experiment config. No path means all defaults.

    Raises:
        ConfigError: unreadable file, bad YAML, unknown key or failed invariant.
    """
    raw: Dict[str, Any] = {}
    if path is not None:
        path = Path(path).expanduser()
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            log.error(f"CONFIG | cannot read {path}: {e}")
            raise ConfigError(f"cannot read config {path}: {e}") from e
        try:
            raw = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"invalid YAML in {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a mapping at the top level")

    for override in overrides:
        _apply_override(raw, override)

    config = ExperimentConfig.from_dict(raw)
    config.source = str(path) if path is not None else None
    config.validate()
    log.info(f"CONFIG | loaded source={config.source or 'defaults'} hash={config_hash(config)[:12]}")
    return config


def config_hash(config: ExperimentConfig) -> str:
    return _hash_mapping(config.to_dict())


def sweep(config: ExperimentConfig) -> List[Tuple[float, str]]:
    """(slo_us, mode) cells in run order."""
    return [(slo, mode) for slo in config.slos_us for mode in config.modes]
