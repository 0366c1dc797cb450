# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels: Morton interleaving and proximity-graph beam search."""

import numpy as np

cimport numpy as cnp
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair

cnp.import_array()

BACKEND = "native"

cdef extern from *:
    """
    static inline unsigned long long spread21(unsigned long long v) {
        v &= 0x1FFFFFULL;
        v = (v | (v << 32)) & 0x1F00000000FFFFULL;
        v = (v | (v << 16)) & 0x1F0000FF0000FFULL;
        v = (v | (v << 8))  & 0x100F00F00F00F00FULL;
        v = (v | (v << 4))  & 0x10C30C30C30C30C3ULL;
        v = (v | (v << 2))  & 0x1249249249249249ULL;
        return v;
    }
    static inline unsigned long long compact21(unsigned long long v) {
        v &= 0x1249249249249249ULL;
        v = (v ^ (v >> 2))  & 0x10C30C30C30C30C3ULL;
        v = (v ^ (v >> 4))  & 0x100F00F00F00F00FULL;
        v = (v ^ (v >> 8))  & 0x1F0000FF0000FFULL;
        v = (v ^ (v >> 16)) & 0x1F00000000FFFFULL;
        v = (v ^ (v >> 32)) & 0x1FFFFFULL;
        return v;
    }
    """
    unsigned long long spread21(unsigned long long v) nogil
    unsigned long long compact21(unsigned long long v) nogil


cdef extern from *:
    """
    /* Dot product with four independent accumulators so the compiler can
       keep the loop in SIMD registers despite strict FP semantics. */
    static inline double dot_unrolled(const double* a, const double* b,
                                      long n) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        long i = 0;
        for (; i + 4 <= n; i += 4) {
            s0 += a[i] * b[i];
            s1 += a[i + 1] * b[i + 1];
            s2 += a[i + 2] * b[i + 2];
            s3 += a[i + 3] * b[i + 3];
        }
        for (; i < n; ++i) s0 += a[i] * b[i];
        return (s0 + s1) + (s2 + s3);
    }
    """
    double dot_unrolled(const double* a, const double* b, long n) nogil


def morton_encode(x, y, z):
    return int(spread21(<unsigned long long> x)
               | (spread21(<unsigned long long> y) << 1)
               | (spread21(<unsigned long long> z) << 2))


def morton_decode(key):
    cdef unsigned long long k = <unsigned long long> key
    return (int(compact21(k)), int(compact21(k >> 1)), int(compact21(k >> 2)))


def morton_encode_batch(xs, ys, zs):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ax = np.ascontiguousarray(xs, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ay = np.ascontiguousarray(ys, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] az = np.ascontiguousarray(zs, dtype=np.uint64)
    cdef Py_ssize_t n = ax.shape[0]
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(n, dtype=np.uint64)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = spread21(ax[i]) | (spread21(ay[i]) << 1) | (spread21(az[i]) << 2)
    return out


def morton_decode_batch(keys):
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ks = np.ascontiguousarray(keys, dtype=np.uint64)
    cdef Py_ssize_t n = ks.shape[0]
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] ox = np.empty(n, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] oy = np.empty(n, dtype=np.uint64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] oz = np.empty(n, dtype=np.uint64)
    cdef Py_ssize_t i
    for i in range(n):
        ox[i] = compact21(ks[i])
        oy[i] = compact21(ks[i] >> 1)
        oz[i] = compact21(ks[i] >> 2)
    return ox, oy, oz


def dots(cnp.ndarray[cnp.float64_t, ndim=2] matrix,
         cnp.ndarray[cnp.int64_t, ndim=1] ids,
         cnp.ndarray[cnp.float64_t, ndim=1] query):
    cdef Py_ssize_t n = ids.shape[0]
    cdef Py_ssize_t dim = matrix.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double acc
    cdef cnp.int64_t row
    for i in range(n):
        row = ids[i]
        out[i] = dot_unrolled(&matrix[row, 0], &query[0], dim)
    return out


ctypedef pair[double, long] DistId


def search_layer(cnp.ndarray[cnp.float64_t, ndim=2] vectors,
                 cnp.ndarray[cnp.int32_t, ndim=2] adj,
                 cnp.ndarray[cnp.int32_t, ndim=1] deg,
                 cnp.ndarray[cnp.float64_t, ndim=1] query,
                 entry_ids, entry_dists,
                 long ef,
                 cnp.ndarray[cnp.int64_t, ndim=1] visited,
                 long epoch):
    """Best-first beam search; same contract as the pure fallback."""
    cdef priority_queue[DistId] candidates  # max-heap; store negated dist
    cdef priority_queue[DistId] results     # max-heap by dist
    cdef Py_ssize_t dim = vectors.shape[1]
    cdef double dist_c, du, acc, worst
    cdef long c, u, eid
    cdef Py_ssize_t i, j, n
    cdef DistId top

    for i in range(len(entry_ids)):
        eid = <long> entry_ids[i]
        if visited[eid] == epoch:
            continue
        visited[eid] = epoch
        du = <double> entry_dists[i]
        candidates.push(DistId(-du, eid))
        results.push(DistId(du, eid))
        if <long> results.size() > ef:
            results.pop()

    while not candidates.empty():
        top = candidates.top()
        candidates.pop()
        dist_c = -top.first
        c = top.second
        if <long> results.size() >= ef and dist_c > results.top().first:
            break
        n = deg[c]
        for j in range(n):
            u = adj[c, j]
            if visited[u] == epoch:
                continue
            visited[u] = epoch
            du = 1.0 - dot_unrolled(&vectors[u, 0], &query[0], dim)
            if <long> results.size() < ef:
                candidates.push(DistId(-du, u))
                results.push(DistId(du, u))
            else:
                worst = results.top().first
                if du < worst:
                    candidates.push(DistId(-du, u))
                    results.push(DistId(du, u))
                    results.pop()

    cdef Py_ssize_t m = results.size()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_ids = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_dists = np.empty(m, dtype=np.float64)
    for i in range(m):
        top = results.top()
        results.pop()
        out_ids[m - 1 - i] = top.second
        out_dists[m - 1 - i] = top.first
    return out_ids, out_dists
