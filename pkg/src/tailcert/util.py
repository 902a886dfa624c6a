"""Canonical serialization, digests and grid helpers shared by all modules."""
from __future__ import annotations

import hashlib
import json
import math

import numpy as np

NEG_INF_SENTINEL = "-inf"


def canonical_json(obj) -> str:
    """Deterministic JSON encoding: sorted keys, no whitespace, floats via repr."""
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isinf(obj):
            return NEG_INF_SENTINEL if obj < 0 else "inf"
        if math.isnan(obj):
            return "nan"
        return obj
    return obj


def encode_float(x: float):
    """JSON-safe float: infinities map to string sentinels."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return NEG_INF_SENTINEL if x < 0 else "inf"
    return x


def decode_float(x) -> float:
    if x == NEG_INF_SENTINEL:
        return float("-inf")
    if x == "inf":
        return float("inf")
    return float(x)


def geomspace_int(lo: int, hi: int, num: int) -> np.ndarray:
    """Distinct integers roughly geometric between lo and hi inclusive."""
    vals = np.unique(np.rint(np.geomspace(lo, hi, num)).astype(int))
    return vals[(vals >= lo) & (vals <= hi)]


def as_float_array(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def scalar_or_array(result: np.ndarray, like):
    if np.isscalar(like) or (isinstance(like, np.ndarray) and like.ndim == 0):
        return float(result)
    return result
