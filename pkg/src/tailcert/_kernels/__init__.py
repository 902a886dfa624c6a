"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; set
TAILCERT_FORCE_FALLBACK=1 to insist on the pure-numpy implementation (used by
the benchmark harness to compare both)."""
import os

from . import _pyfallback

if os.environ.get("TAILCERT_FORCE_FALLBACK", "0") == "1":
    _impl = _pyfallback
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pyfallback

backend_name = _impl.backend_name
min_sqdist = _impl.min_sqdist
greedy_filter = _impl.greedy_filter
greedy_filter_indexed = _impl.greedy_filter_indexed
covered_mask_indexed = _impl.covered_mask_indexed

py_fallback = _pyfallback
