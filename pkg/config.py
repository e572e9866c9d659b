# Codes By Visionnn

from pathlib import Path

# ─── Storage Paths ────────────────────────────────────────────────────────────
BASE_DIR = Path.home() / ".burstscale"
RESULTS_DIR = BASE_DIR / "results"
PREDICTOR_DIR = BASE_DIR / "predictors"
LOG_FILE = BASE_DIR / "burstscale.log"

# ─── Time Units ───────────────────────────────────────────────────────────────
NS_PER_US = 1_000
NS_PER_MS = 1_000_000
NS_PER_S = 1_000_000_000

# ─── NF Chain ─────────────────────────────────────────────────────────────────
DEFAULT_STAGE_COST_NS = 5_000
DEFAULT_MAX_BATCH = 32
# per-new-flow setup cost as a multiple of the per-packet chain cost
NEW_FLOW_COST_FACTOR = 3

# ─── Workload ─────────────────────────────────────────────────────────────────
DEFAULT_PACKET_SIZE = 64
DEFAULT_PACING_RATE = 1_000.0          # pkts/s per flow
DEFAULT_MEAN_PACKETS = 10.0
DEFAULT_WORKLOAD_DURATION_S = 1.0
ADDRESS_BASE = "10.0.0.0"
ADDRESS_POOL_SIZE = 1 << 16
ADDRESS_STRIDE = 256                   # 2^16 addresses spread over 256 /16 prefixes
PARETO_SHAPE = 1.5
STATS_WINDOW_NS = 10 * NS_PER_MS

# ─── Rack ─────────────────────────────────────────────────────────────────────
DEFAULT_SERVERS = 1
CORES_PER_SERVER = 32
AUX_POOL_SIZE = 8
INITIAL_DEDICATED_CORES = 1
NIC_QUEUE_CAPACITY = 4096
SW_QUEUE_CAPACITY = 1024

# ─── Core Mapper ──────────────────────────────────────────────────────────────
DEFAULT_MAX_SPLIT = 2
PLAN_OVERHEAD_NS = 3_000

# ─── Server Mapper ────────────────────────────────────────────────────────────
RSS_BUCKETS = 512
DECISION_INTERVAL_S = 1.0
RSS_UPDATE_DELAY_S = 0.002
BOOST_THRESHOLD = 256
DISPATCH_COST_NS = 100
SAFETY_MARGIN = 0.0
ON_DEMAND_GAP_S = 0.005
ORACLE_MAX_BUCKETS = 12
ORACLE_MAX_CORES = 6

# ─── Ingress Mapper ───────────────────────────────────────────────────────────
PREFIX_LEN = 16
PROPAGATION_DELAY_NS = 0

# ─── Simulator ────────────────────────────────────────────────────────────────
HASH_CORES = 4
DRAIN_TIMEOUT_S = 0.1
USAGE_WINDOW_US = 100

# ─── Training ─────────────────────────────────────────────────────────────────
FLOW_GRID = tuple(1 << i for i in range(13))   # 1, 2, 4, ..., 4096
PROBE_DURATION_S = 30.0
SEARCH_RESOLUTION = 0.01
PROBE_HEADROOM = 1.05
PROBE_FLOOR_DIVISOR = 64
MAX_PROBE_FLOWS = 64
SATURATION_EPOCHS = 8

# ─── Experiment ───────────────────────────────────────────────────────────────
DEFAULT_SLOS_US = (200,)
DEFAULT_MODES = ("full",)
DEFAULT_SEED = 1
DEFAULT_PREDICTOR_SOURCE = "analytic"
REPORT_NAME = "results"

# ─── App Info ─────────────────────────────────────────────────────────────────
APP_NAME = "burstscale"
APP_VERSION = "1.0.0"
APP_AUTHOR = "Vision KC"
APP_TAGLINE = "Microsecond bursts. Second-scale packing. One rack."
