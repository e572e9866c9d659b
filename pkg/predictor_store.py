# Codes By Visionnn

"""
burstscale Predictor Store
Versioned text files for trained predictors.

Frontier file:
    #burstscale-frontier v1
    chain=<sha256 hex>
    epoch_ns=<int>
    slo_ns=<int>
    [n=<level> cuts=<c1,c2|->]
    f,p
    ...

Threshold file:
    #burstscale-thresholds v1
    chain=<sha256 hex>
    slo_ns=<int>
    f,T
    <f>,<rate>
"""

import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from chain_model import SplitScheme
from config import NS_PER_US, PREDICTOR_DIR
from errors import PredictorError, PredictorMismatchError
from logger import log
from predictor import CapacityFrontier, FrontierFamily, RateThresholdTable

FRONTIER_MAGIC = "#burstscale-frontier v1"
THRESHOLD_MAGIC = "#burstscale-thresholds v1"

# Thread lock for safe concurrent access
_lock = threading.Lock()


def _dir(directory: Optional[Path]) -> Path:
    return Path(directory) if directory is not None else PREDICTOR_DIR


def _slo_tag(slo_ns: int) -> str:
    us = slo_ns / NS_PER_US
    return f"{us:g}"


def frontier_path(slo_ns: int, directory: Optional[Path] = None) -> Path:
    return _dir(directory) / f"frontier-slo{_slo_tag(slo_ns)}.txt"


def threshold_path(slo_ns: int, directory: Optional[Path] = None) -> Path:
    return _dir(directory) / f"thresholds-slo{_slo_tag(slo_ns)}.txt"


def _write(path: Path, lines: List[str]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with _lock:
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        log.error(f"Failed to save predictor file {path}: {e}")
        raise PredictorError(f"cannot write {path}: {e}") from e
    log.debug(f"STORE | wrote {path}")
    return path


def _read(path: Path, magic: str) -> List[str]:
    try:
        with _lock:
            text = path.read_text(encoding="utf-8")
    except OSError as e:
        log.error(f"Failed to load predictor file {path}: {e}")
        raise PredictorError(f"cannot read {path}: {e}") from e
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != magic:
        found = lines[0] if lines else "<empty>"
        raise PredictorError(f"{path}: expected header '{magic}', found '{found}'")
    return lines[1:]


def _header(lines: List[str], keys: Tuple[str, ...], path: Path) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for key, line in zip(keys, lines):
        name, sep, value = line.partition("=")
        if not sep or name != key:
            raise PredictorError(f"{path}: expected '{key}=' line, found '{line}'")
        values[key] = value
    if len(values) != len(keys):
        raise PredictorError(f"{path}: truncated header")
    return values


def _check_chain(found: str, expected: Optional[str], path: Path) -> None:
    if expected is not None and found != expected:
        raise PredictorMismatchError(
            f"{path} was trained for chain {found[:12]}, current chain is {expected[:12]}; retrain"
        )


def _pair(line: str, path: Path) -> Tuple[int, str]:
    left, sep, right = line.partition(",")
    if not sep:
        raise PredictorError(f"{path}: malformed row '{line}'")
    try:
        return int(left), right
    except ValueError:
        raise PredictorError(f"{path}: malformed row '{line}'") from None


# ─── Frontiers ────────────────────────────────────────────────────────────────

def save_frontier(family: FrontierFamily, directory: Optional[Path] = None) -> Path:
    lines = [
        FRONTIER_MAGIC,
        f"chain={family.chain_hash}",
        f"epoch_ns={family.epoch_length}",
        f"slo_ns={family.slo}",
    ]
    for frontier in family.frontiers:
        lines.append(f"[n={frontier.level} cuts={frontier.scheme.label()}]")
        lines.append("f,p")
        lines.extend(f"{f},{p}" for f, p in frontier.points)
    return _write(frontier_path(family.slo, directory), lines)


def load_frontier(slo_ns: int, directory: Optional[Path] = None, expected_chain: Optional[str] = None) -> FrontierFamily:
    path = frontier_path(slo_ns, directory)
    lines = _read(path, FRONTIER_MAGIC)
    head = _header(lines, ("chain", "epoch_ns", "slo_ns"), path)
    _check_chain(head["chain"], expected_chain, path)
    epoch = int(head["epoch_ns"])

    sections: List[Tuple[SplitScheme, List[Tuple[int, int]]]] = []
    for line in lines[3:]:
        if line.startswith("["):
            body = line.strip("[]").split()
            try:
                fields = dict(item.split("=", 1) for item in body)
                cuts = () if fields["cuts"] == "-" else tuple(int(c) for c in fields["cuts"].split(","))
                scheme = SplitScheme(cuts)
                if scheme.n != int(fields["n"]):
                    raise ValueError("level does not match cuts")
            except (KeyError, ValueError) as e:
                raise PredictorError(f"{path}: bad section header '{line}': {e}") from e
            sections.append((scheme, []))
        elif line == "f,p":
            continue
        elif not sections:
            raise PredictorError(f"{path}: row before any section: '{line}'")
        else:
            f, p = _pair(line, path)
            try:
                sections[-1][1].append((f, int(p)))
            except ValueError:
                raise PredictorError(f"{path}: malformed row '{line}'") from None

    frontiers = tuple(CapacityFrontier(epoch, tuple(points), scheme) for scheme, points in sections)
    if not frontiers:
        raise PredictorError(f"{path}: no frontier sections")
    log.debug(f"STORE | loaded {path} levels={len(frontiers)}")
    return FrontierFamily(head["chain"], epoch, int(head["slo_ns"]), frontiers)


# ─── Thresholds ───────────────────────────────────────────────────────────────

def save_thresholds(table: RateThresholdTable, directory: Optional[Path] = None) -> Path:
    lines = [THRESHOLD_MAGIC, f"chain={table.chain_hash}", f"slo_ns={table.slo}", "f,T"]
    lines.extend(f"{f},{rate:.3f}" for f, rate in zip(table.grid, table.rates))
    return _write(threshold_path(table.slo, directory), lines)


def load_thresholds(slo_ns: int, directory: Optional[Path] = None, expected_chain: Optional[str] = None) -> RateThresholdTable:
    path = threshold_path(slo_ns, directory)
    lines = _read(path, THRESHOLD_MAGIC)
    head = _header(lines, ("chain", "slo_ns"), path)
    _check_chain(head["chain"], expected_chain, path)
    if len(lines) < 3 or lines[2] != "f,T":
        raise PredictorError(f"{path}: missing 'f,T' column header")

    grid: List[int] = []
    rates: List[float] = []
    for line in lines[3:]:
        f, rate = _pair(line, path)
        try:
            rates.append(float(rate))
        except ValueError:
            raise PredictorError(f"{path}: malformed row '{line}'") from None
        grid.append(f)
    log.debug(f"STORE | loaded {path} points={len(grid)}")
    return RateThresholdTable(head["chain"], int(head["slo_ns"]), tuple(grid), tuple(rates))
