"""Replicate-level parallelism.

Work items are pure functions of (static args, replicate index) whose
randomness comes only from substreams keyed by the replicate index, so the
map below returns identical results for any worker count; workers buy
wall-clock time only.  Results are reassembled in index order.
"""
from __future__ import annotations

import multiprocessing as mp

_WORKER_FN = None
_WORKER_ARGS = None


def _init(fn, args):
    global _WORKER_FN, _WORKER_ARGS
    _WORKER_FN = fn
    _WORKER_ARGS = args


def _call(idx):
    return _WORKER_FN(_WORKER_ARGS, idx)


def replicate_map(fn, static_args, count: int, workers: int = 1) -> list:
    """[fn(static_args, i) for i in range(count)], optionally through a
    process pool; output order is by replicate index either way."""
    if workers <= 1 or count < 4:
        return [fn(static_args, i) for i in range(count)]
    with mp.get_context("fork").Pool(
            processes=workers, initializer=_init,
            initargs=(fn, static_args)) as pool:
        return pool.map(_call, range(count), chunksize=max(1, count // (4 * workers)))
