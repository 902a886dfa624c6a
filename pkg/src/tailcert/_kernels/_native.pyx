# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Hot kernels for net construction and coverage verification: squared
Euclidean distances with early exit, written against C-contiguous float64
arrays.  Semantics mirror tailcert._kernels._pyfallback."""
import numpy as np

cimport numpy as cnp


def backend_name():
    return "native"


def min_sqdist(double[:, ::1] points, double[:, ::1] queries):
    """Per-query minimum squared distance to the point set."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef Py_ssize_t q = queries.shape[0]
    out = np.empty(q, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef Py_ssize_t i, j, k
    cdef double best, acc, diff
    for i in range(q):
        best = 1e300
        for j in range(n):
            acc = 0.0
            for k in range(d):
                diff = queries[i, k] - points[j, k]
                acc += diff * diff
                if acc >= best:
                    break
            if acc < best:
                best = acc
        out_v[i] = best
    return out


def greedy_filter(double[:, ::1] cands, double[:, ::1] existing, double eps2):
    """Sequential greedy acceptance of candidates against an existing point
    set: candidate i joins iff it is at squared distance >= eps2 from every
    existing point and every earlier accepted candidate."""
    cdef Py_ssize_t b = cands.shape[0]
    cdef Py_ssize_t d = cands.shape[1]
    cdef Py_ssize_t n = existing.shape[0]
    keep_arr = np.zeros(b, dtype=np.uint8)
    cdef unsigned char[::1] keep = keep_arr
    acc_arr = np.empty(b, dtype=np.intp)
    cdef Py_ssize_t[::1] aidx = acc_arr
    cdef Py_ssize_t n_acc = 0
    cdef Py_ssize_t i, j, k, a
    cdef double acc, diff
    cdef bint ok
    for i in range(b):
        ok = True
        for j in range(n):
            acc = 0.0
            for k in range(d):
                diff = cands[i, k] - existing[j, k]
                acc += diff * diff
            if acc < eps2:
                ok = False
                break
        if ok:
            for a in range(n_acc):
                j = aidx[a]
                acc = 0.0
                for k in range(d):
                    diff = cands[i, k] - cands[j, k]
                    acc += diff * diff
                if acc < eps2:
                    ok = False
                    break
        if ok:
            keep[i] = 1
            aidx[n_acc] = i
            n_acc += 1
    return keep_arr.astype(bool)


def covered_mask_indexed(double[:, ::1] queries, double[:, ::1] buffer,
                         cnp.int64_t[::1] blockers, double r2):
    """mask[i] = 1 iff some buffer[blockers[j]] lies within squared distance
    r2 of queries[i]; early exit on the first hit."""
    cdef Py_ssize_t q = queries.shape[0]
    cdef Py_ssize_t d = queries.shape[1]
    cdef Py_ssize_t n = blockers.shape[0]
    mask_arr = np.zeros(q, dtype=np.uint8)
    cdef unsigned char[::1] mask = mask_arr
    cdef Py_ssize_t i, j, k, row
    cdef double acc, diff
    for i in range(q):
        for j in range(n):
            row = <Py_ssize_t> blockers[j]
            acc = 0.0
            for k in range(d):
                diff = queries[i, k] - buffer[row, k]
                acc += diff * diff
                if acc >= r2:
                    break
            if acc < r2:
                mask[i] = 1
                break
    return mask_arr.astype(bool)


def greedy_filter_indexed(double[:, ::1] cands, double[:, ::1] buffer,
                          cnp.int64_t[::1] blockers, double eps2):
    """greedy_filter against the subset buffer[blockers] of a larger point
    buffer (cell-local blocker lists of the stratified builder)."""
    cdef Py_ssize_t b = cands.shape[0]
    cdef Py_ssize_t d = cands.shape[1]
    cdef Py_ssize_t n = blockers.shape[0]
    keep_arr = np.zeros(b, dtype=np.uint8)
    cdef unsigned char[::1] keep = keep_arr
    acc_arr = np.empty(b, dtype=np.intp)
    cdef Py_ssize_t[::1] aidx = acc_arr
    cdef Py_ssize_t n_acc = 0
    cdef Py_ssize_t i, j, k, a, row
    cdef double acc, diff
    cdef bint ok
    for i in range(b):
        ok = True
        for j in range(n):
            row = <Py_ssize_t> blockers[j]
            acc = 0.0
            for k in range(d):
                diff = cands[i, k] - buffer[row, k]
                acc += diff * diff
            if acc < eps2:
                ok = False
                break
        if ok:
            for a in range(n_acc):
                row = aidx[a]
                acc = 0.0
                for k in range(d):
                    diff = cands[i, k] - cands[row, k]
                    acc += diff * diff
                if acc < eps2:
                    ok = False
                    break
        if ok:
            keep[i] = 1
            aidx[n_acc] = i
            n_acc += 1
    return keep_arr.astype(bool)
