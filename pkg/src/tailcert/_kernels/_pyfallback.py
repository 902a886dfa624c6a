"""Pure-numpy implementations of the hot kernels.

Same accept/reject semantics as the compiled module; distance arithmetic runs
through BLAS, so the last bits of individual distances can differ from the
sequential C accumulation.  Each backend is deterministic on its own; nets
from the two backends agree except on measure-zero borderline proposals."""
from __future__ import annotations

import numpy as np

_CHUNK = 4096


def backend_name():
    return "python"


def min_sqdist(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Per-query minimum squared distance to the point set, chunked matmul."""
    q = np.ascontiguousarray(queries, dtype=float)
    p = np.ascontiguousarray(points, dtype=float)
    qq = np.einsum("ij,ij->i", q, q)
    best = np.full(len(q), 1e300)
    for i in range(0, len(p), 16384):
        blk = p[i:i + 16384]
        pp = np.einsum("ij,ij->i", blk, blk)
        for j in range(0, len(q), _CHUNK):
            d2 = qq[j:j + _CHUNK, None] - 2.0 * (q[j:j + _CHUNK] @ blk.T) + pp[None, :]
            np.minimum(best[j:j + _CHUNK], d2.min(axis=1), out=best[j:j + _CHUNK])
    return np.maximum(best, 0.0)


def _accept_against(block: np.ndarray, pts: np.ndarray, eps2: float) -> np.ndarray:
    if len(pts) == 0:
        return np.ones(len(block), dtype=bool)
    return min_sqdist(pts, block) >= eps2


def greedy_filter(cands: np.ndarray, existing: np.ndarray, eps2: float) -> np.ndarray:
    """Sequential greedy acceptance; see the native twin for the contract."""
    keep = np.zeros(len(cands), dtype=bool)
    ok = _accept_against(cands, existing, eps2)
    accepted: list[int] = []
    for i in np.flatnonzero(ok):
        row = cands[i]
        if accepted:
            diffs = cands[accepted] - row
            if float(np.min(np.einsum("ij,ij->i", diffs, diffs))) < eps2:
                continue
        keep[i] = True
        accepted.append(int(i))
    return keep


def greedy_filter_indexed(cands: np.ndarray, buffer: np.ndarray,
                          blockers: np.ndarray, eps2: float) -> np.ndarray:
    existing = buffer[blockers] if len(blockers) else buffer[:0]
    return greedy_filter(cands, existing, eps2)


def covered_mask_indexed(queries: np.ndarray, buffer: np.ndarray,
                         blockers: np.ndarray, r2: float) -> np.ndarray:
    """mask[i] = 1 iff some listed point lies within squared distance r2."""
    if len(blockers) == 0:
        return np.zeros(len(queries), dtype=bool)
    # BLAS rounding: borderline queries count as covered so that an
    # uncovered verdict always implies a true distance of at least sqrt(r2)
    return min_sqdist(buffer[blockers], queries) < r2 * (1 + 1e-9)
