# Codes By Visionnn

"""
burstscale Report Store
JSON Lines result files, one per sweep. An existing report is never
overwritten; the new one gets a numeric suffix instead.
"""

import json
import threading
from pathlib import Path
from typing import Dict, Iterable, Optional

from config import REPORT_NAME, RESULTS_DIR
from logger import log

# Thread lock for safe concurrent access
_lock = threading.Lock()


def _init_results(directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)


def unique_report_path(name: str = REPORT_NAME, directory: Optional[Path] = None) -> Path:
    """First free `<name>.jsonl`, then `<name>_1.jsonl`, `<name>_2.jsonl`, ..."""
    directory = Path(directory) if directory is not None else RESULTS_DIR
    _init_results(directory)
    dest = directory / f"{name}.jsonl"
    counter = 1
    while dest.exists():
        dest = directory / f"{name}_{counter}.jsonl"
        counter += 1
    return dest


def append_records(path: Path, records: Iterable[Dict[str, object]]) -> int:
    """Append records to a report, one JSON object per line. Returns the count."""
    count = 0
    try:
        with _lock, open(path, "a", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")
                count += 1
    except OSError as e:
        log.error(f"Failed to write report {path}: {e}")
        raise
    log.debug(f"REPORT | {count} records -> {path.name}")
    return count


def read_records(path: Path) -> list:
    with _lock, open(path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]
