# Codes By Visionnn

import json
from typing import Any, Mapping

from cryptography.hazmat.primitives import hashes


def sha256_hex(data: bytes) -> str:
    """Hex SHA-256 digest of a byte string."""
    digest = hashes.Hash(hashes.SHA256())
    digest.update(data)
    return digest.finalize().hex()


def canonical_json(obj: Any) -> str:
    """Key-sorted, whitespace-free JSON so equal values hash equally."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


def config_hash(mapping: Mapping[str, Any]) -> str:
    return sha256_hex(canonical_json(mapping).encode("utf-8"))


def chain_hash(chain: Any) -> str:
    """
    Fingerprint of a chain definition: stage names and costs, per-new-flow
    cost and batch size. Predictors trained for one chain refuse to load for
    another.
    """
    return config_hash(chain.to_dict())
