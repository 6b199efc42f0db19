#!/usr/bin/env python3
"""Benchmark the Gibbs kernels: compiled extension vs pure Python twin.

Runs train_lda and infer_lda on the same synthetic token stream under
every available backend, checks that the outputs are bit-identical, and
prints a timing table.

    python3 benchmarks/lda_backends.py            # full size
    python3 benchmarks/lda_backends.py --quick    # CI-sized
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from anflo import kernels


def synthetic_stream(n_docs: int, doc_len: int, vocab: int, seed: int):
    """Token stream with mild topical structure (3 vocabulary bands)."""
    rng = random.Random(seed)
    words, doc_ids = [], []
    band = vocab // 3 or 1
    for d in range(n_docs):
        lo = (d % 3) * band
        hi = min(lo + band, vocab)
        for _ in range(doc_len):
            # mostly in-band draws, some global noise
            if rng.random() < 0.8:
                words.append(rng.randrange(lo, hi))
            else:
                words.append(rng.randrange(vocab))
            doc_ids.append(d)
    return (
        np.asarray(words, dtype=np.int32),
        np.asarray(doc_ids, dtype=np.int32),
    )


def run_train(backend, words, doc_ids, k, vocab, n_docs, sweeps, seed):
    z = np.zeros(len(words), dtype=np.int32)
    nwt = np.zeros((k, vocab), dtype=np.int32)
    ndt = np.zeros((n_docs, k), dtype=np.int32)
    nt = np.zeros(k, dtype=np.int64)
    t0 = time.perf_counter()
    backend.train_lda(words, doc_ids, z, nwt, ndt, nt, 50.0 / k, 0.01, sweeps, seed)
    return time.perf_counter() - t0, (z, nwt, ndt, nt)


def run_infer(backend, doc, nwt, nt, k, sweeps, seed):
    acc = np.zeros(k, dtype=np.int64)
    t0 = time.perf_counter()
    backend.infer_lda(doc, nwt, nt, 50.0 / k, 0.01, sweeps, sweeps // 2, seed, acc)
    return time.perf_counter() - t0, acc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=400)
    parser.add_argument("--doc-len", type=int, default=120)
    parser.add_argument("--vocab", type=int, default=900)
    parser.add_argument("--k", type=int, default=12)
    parser.add_argument("--sweeps", type=int, default=150)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--quick", action="store_true",
                        help="small problem size for smoke runs")
    args = parser.parse_args(argv)
    if args.quick:
        args.docs, args.doc_len, args.vocab, args.k, args.sweeps = 60, 40, 150, 4, 30

    words, doc_ids = synthetic_stream(args.docs, args.doc_len, args.vocab, args.seed)
    print(f"corpus: {args.docs} docs x {args.doc_len} tokens, "
          f"V={args.vocab}, K={args.k}, {args.sweeps} sweeps, seed {args.seed}")

    backends = kernels.available_backends()
    print(f"backends: {', '.join(sorted(backends))} (active: {kernels.backend_name()})")

    train_times: dict[str, float] = {}
    infer_times: dict[str, float] = {}
    outputs = {}
    for name in sorted(backends):
        backend = backends[name]
        elapsed, arrays = run_train(
            backend, words, doc_ids, args.k, args.vocab, args.docs,
            args.sweeps, args.seed,
        )
        train_times[name] = elapsed
        outputs[name] = arrays
        doc = words[doc_ids == 0]
        infer_elapsed, acc = run_infer(
            backend, doc, arrays[1], arrays[3], args.k, args.sweeps, args.seed
        )
        infer_times[name] = infer_elapsed
        outputs[name] = (*arrays, acc)

    names = sorted(backends)
    if len(names) == 2:
        a, b = (outputs[n] for n in names)
        for left, right in zip(a, b):
            assert np.array_equal(left, right), "backends disagree"
        print("output check: all arrays bit-identical across backends")
    else:
        print("output check: single backend available, nothing to compare")

    print(f"{'backend':<10} {'train (s)':>10} {'infer (ms)':>11}")
    for name in names:
        print(f"{name:<10} {train_times[name]:>10.3f} {infer_times[name] * 1e3:>11.2f}")
    if len(names) == 2 and train_times["cython"] > 0:
        ratio = train_times["python"] / train_times["cython"]
        print(f"speedup: cython is {ratio:.1f}x faster on train")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
