# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled collapsed Gibbs sampling kernels.

Behavioral twin of anflo._gibbs_py: same SplitMix64 stream, same IEEE-754
operation order, so count arrays come out bit-identical.  Keep both files
in sync; the equivalence test in test_kernels.py compares them directly.
"""

from libc.stdint cimport int32_t, int64_t, uint64_t

BACKEND = "cython"

cdef uint64_t _GAMMA = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t _MIX1 = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t _MIX2 = <uint64_t>0x94D049BB133111EB
cdef double _DOUBLE_UNIT = 1.0 / 9007199254740992.0  # 2**-53


cdef inline uint64_t _next(uint64_t *state) noexcept nogil:
    cdef uint64_t x
    state[0] = state[0] + _GAMMA
    x = state[0]
    x = (x ^ (x >> 30)) * _MIX1
    x = (x ^ (x >> 27)) * _MIX2
    x = x ^ (x >> 31)
    return x


cdef inline double _next_unit(uint64_t *state) noexcept nogil:
    return <double>(_next(state) >> 11) * _DOUBLE_UNIT


def train_lda(int32_t[::1] words, int32_t[::1] doc_ids, int32_t[::1] z,
              int32_t[:, ::1] nwt, int32_t[:, ::1] ndt, int64_t[::1] nt,
              double alpha, double beta, int sweeps, object seed):
    """See anflo._gibbs_py.train_lda."""
    cdef Py_ssize_t K = nwt.shape[0]
    cdef Py_ssize_t V = nwt.shape[1]
    cdef Py_ssize_t T = words.shape[0]
    cdef double vbeta = V * beta
    cdef uint64_t state = <uint64_t>(<unsigned long long>(seed & 0xFFFFFFFFFFFFFFFF))
    cdef double[::1] cum
    cdef Py_ssize_t t, kk, sweep
    cdef int32_t k, wt, dt
    cdef double total, u, r

    import numpy as np
    cum_arr = np.zeros(K, dtype=np.float64)
    cum = cum_arr

    for t in range(T):
        r = _next_unit(&state)
        k = <int32_t>(r * K)
        if k >= K:
            k = <int32_t>(K - 1)
        z[t] = k
        nwt[k, words[t]] += 1
        ndt[doc_ids[t], k] += 1
        nt[k] += 1

    for sweep in range(sweeps):
        for t in range(T):
            wt = words[t]
            dt = doc_ids[t]
            k = z[t]
            nwt[k, wt] -= 1
            ndt[dt, k] -= 1
            nt[k] -= 1
            total = 0.0
            for kk in range(K):
                total += (nwt[kk, wt] + beta) * (ndt[dt, kk] + alpha) / (nt[kk] + vbeta)
                cum[kk] = total
            u = _next_unit(&state) * total
            k = 0
            while k < K - 1 and cum[k] <= u:
                k += 1
            z[t] = k
            nwt[k, wt] += 1
            ndt[dt, k] += 1
            nt[k] += 1


def infer_lda(int32_t[::1] word_ids, int32_t[:, ::1] nwt, int64_t[::1] nt,
              double alpha, double beta, int sweeps, int burn_in,
              object seed, int64_t[::1] acc):
    """See anflo._gibbs_py.infer_lda."""
    cdef Py_ssize_t K = nwt.shape[0]
    cdef Py_ssize_t V = nwt.shape[1]
    cdef Py_ssize_t T = word_ids.shape[0]
    cdef double vbeta = V * beta
    cdef uint64_t state = <uint64_t>(<unsigned long long>(seed & 0xFFFFFFFFFFFFFFFF))
    cdef Py_ssize_t t, kk, sweep
    cdef int32_t k, wt
    cdef double total, u, r

    import numpy as np
    nd_arr = np.zeros(K, dtype=np.int64)
    zz_arr = np.zeros(T if T else 1, dtype=np.int32)
    cum_arr = np.zeros(K, dtype=np.float64)
    cdef int64_t[::1] nd = nd_arr
    cdef int32_t[::1] zz = zz_arr
    cdef double[::1] cum = cum_arr

    for t in range(T):
        r = _next_unit(&state)
        k = <int32_t>(r * K)
        if k >= K:
            k = <int32_t>(K - 1)
        zz[t] = k
        nd[k] += 1

    for sweep in range(sweeps):
        for t in range(T):
            wt = word_ids[t]
            k = zz[t]
            nd[k] -= 1
            total = 0.0
            for kk in range(K):
                total += (nwt[kk, wt] + beta) * (nd[kk] + alpha) / (nt[kk] + vbeta)
                cum[kk] = total
            u = _next_unit(&state) * total
            k = 0
            while k < K - 1 and cum[k] <= u:
                k += 1
            zz[t] = k
            nd[k] += 1
        if sweep >= burn_in:
            for kk in range(K):
                acc[kk] += nd[kk]
