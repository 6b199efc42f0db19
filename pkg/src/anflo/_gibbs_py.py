"""Pure-Python collapsed Gibbs sampling kernels.

Behavioral twin of the compiled extension anflo._gibbs: given the same
inputs both backends must produce bit-identical count arrays.  That works
because Python floats are C doubles and both kernels perform the identical
sequence of IEEE-754 operations, fed by the same SplitMix64 stream (the
extension is compiled without fast-math or FMA contraction).

Counts are carried and returned as integers; any normalization into
probabilities happens in shared Python code outside the kernels.
"""

from __future__ import annotations

__all__ = ["BACKEND", "train_lda", "infer_lda"]

BACKEND = "python"

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_DOUBLE_UNIT = 1.0 / 9007199254740992.0  # 2**-53


def train_lda(words, doc_ids, z, nwt, ndt, nt, alpha, beta, sweeps, seed):
    """Collapsed Gibbs sampling over all tokens, in place.

    words/doc_ids/z: int32 arrays of length T (z is overwritten)
    nwt: K x V int32, ndt: D x K int32, nt: K int64 count arrays, all
    zeroed by the caller; filled here from a fresh random assignment and
    updated across `sweeps` full passes.
    """
    K, V = nwt.shape
    w = words.tolist()
    d = doc_ids.tolist()
    zz = z.tolist()
    NWT = nwt.tolist()
    NDT = ndt.tolist()
    NT = nt.tolist()
    T = len(w)
    vbeta = V * beta
    state = seed & _MASK

    # random initial assignment
    for t in range(T):
        state = (state + _GAMMA) & _MASK
        x = state
        x = (x ^ (x >> 30)) * _MIX1 & _MASK
        x = (x ^ (x >> 27)) * _MIX2 & _MASK
        x ^= x >> 31
        r = (x >> 11) * _DOUBLE_UNIT
        k = int(r * K)
        if k >= K:
            k = K - 1
        zz[t] = k
        NWT[k][w[t]] += 1
        NDT[d[t]][k] += 1
        NT[k] += 1

    cum = [0.0] * K
    for _ in range(sweeps):
        for t in range(T):
            wt = w[t]
            dt = d[t]
            k = zz[t]
            NWT[k][wt] -= 1
            ndt_row = NDT[dt]
            ndt_row[k] -= 1
            NT[k] -= 1
            total = 0.0
            for kk in range(K):
                total += (NWT[kk][wt] + beta) * (ndt_row[kk] + alpha) / (NT[kk] + vbeta)
                cum[kk] = total
            state = (state + _GAMMA) & _MASK
            x = state
            x = (x ^ (x >> 30)) * _MIX1 & _MASK
            x = (x ^ (x >> 27)) * _MIX2 & _MASK
            x ^= x >> 31
            u = ((x >> 11) * _DOUBLE_UNIT) * total
            k = 0
            while k < K - 1 and cum[k] <= u:
                k += 1
            zz[t] = k
            NWT[k][wt] += 1
            ndt_row[k] += 1
            NT[k] += 1

    z[:] = zz
    nwt[:, :] = NWT
    ndt[:, :] = NDT
    nt[:] = NT


def infer_lda(word_ids, nwt, nt, alpha, beta, sweeps, burn_in, seed, acc):
    """Topic inference for one document against frozen model counts.

    word_ids: int32 token stream (model vocabulary indices); nwt/nt are the
    trained counts and are NOT modified.  After each sweep past burn_in the
    per-topic document counts are added into acc (int64, length K).
    """
    K, V = nwt.shape
    ids = word_ids.tolist()
    NWT = nwt.tolist()
    NT = nt.tolist()
    ACC = acc.tolist()
    T = len(ids)
    vbeta = V * beta
    state = seed & _MASK

    nd = [0] * K
    zz = [0] * T
    for t in range(T):
        state = (state + _GAMMA) & _MASK
        x = state
        x = (x ^ (x >> 30)) * _MIX1 & _MASK
        x = (x ^ (x >> 27)) * _MIX2 & _MASK
        x ^= x >> 31
        r = (x >> 11) * _DOUBLE_UNIT
        k = int(r * K)
        if k >= K:
            k = K - 1
        zz[t] = k
        nd[k] += 1

    cum = [0.0] * K
    for sweep in range(sweeps):
        for t in range(T):
            wt = ids[t]
            k = zz[t]
            nd[k] -= 1
            total = 0.0
            for kk in range(K):
                total += (NWT[kk][wt] + beta) * (nd[kk] + alpha) / (NT[kk] + vbeta)
                cum[kk] = total
            state = (state + _GAMMA) & _MASK
            x = state
            x = (x ^ (x >> 30)) * _MIX1 & _MASK
            x = (x ^ (x >> 27)) * _MIX2 & _MASK
            x ^= x >> 31
            u = ((x >> 11) * _DOUBLE_UNIT) * total
            k = 0
            while k < K - 1 and cum[k] <= u:
                k += 1
            zz[t] = k
            nd[k] += 1
        if sweep >= burn_in:
            for kk in range(K):
                ACC[kk] += nd[kk]

    acc[:] = ACC
