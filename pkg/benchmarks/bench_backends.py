#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_backends.py [--tokens 2000000] [--folds 10]

Times each kernel on one shared synthetic corpus, then the user-facing hot
operations (profile build, cross-validated flagging, full diff), per backend.
The numba column includes JIT compilation on the first call; a warmup pass is
timed separately so steady-state numbers are comparable.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from neraudit import kernels
from neraudit.detector import build_profile, cross_validated_flags
from neraudit.diffstats import diff_corpora
from neraudit.encoding import encode_corpus
from neraudit.rules import decide, replay, scan
from neraudit.synth import synthetic_corpus


def timed(fn, *args, repeat: int = 3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--tokens", type=int, default=2_000_000)
    ap.add_argument("--docs", type=int, default=120)
    ap.add_argument("--folds", type=int, default=10)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    print(f"generating {args.tokens:,} tokens ...", flush=True)
    t0 = time.perf_counter()
    corpus = synthetic_corpus(args.tokens, n_docs=args.docs, seed=args.seed)
    print(f"  generated {corpus.n_tokens:,} tokens / {len(corpus):,} sentences "
          f"in {time.perf_counter() - t0:.1f}s")
    t0 = time.perf_counter()
    enc = encode_corpus(corpus)
    print(f"  encoded in {time.perf_counter() - t0:.1f}s "
          f"(vocab {len(enc.surfaces):,}, {len(enc.etype_names)} types)")

    labels = enc.labels()
    n_labels = len(enc.etype_names) + 1
    rng = np.random.default_rng(0)
    fold = rng.integers(0, args.folds, enc.n_tokens).astype(np.int16)

    kernel_cases = [
        ("bio_spans", lambda: kernels.bio_spans(enc.prefix, enc.token_etype, enc.sent_offsets)),
        ("label_counts", lambda: kernels.label_counts(
            enc.token_surface, labels, len(enc.surfaces), n_labels)),
        ("fold_label_counts", lambda: kernels.fold_label_counts(
            enc.token_surface, labels, fold, args.folds, len(enc.surfaces), n_labels)),
    ]

    backends = kernels.available_backends()
    print(f"\nbackends: {', '.join(backends)}")
    results: dict[tuple[str, str], float] = {}
    reference: dict[str, object] = {}
    for backend in backends:
        kernels.set_backend(backend)
        if backend == "numba":
            t0 = time.perf_counter()
            for _, fn in kernel_cases:
                fn()
            print(f"  numba warmup (JIT compile): {time.perf_counter() - t0:.1f}s")
        for name, fn in kernel_cases:
            best, result = timed(fn)
            results[(backend, name)] = best
            if name in reference:  # backends must agree bit for bit
                want = reference[name]
                got = result if isinstance(result, tuple) else (result,)
                ref = want if isinstance(want, tuple) else (want,)
                for a, b in zip(got, ref):
                    assert np.array_equal(a, b), f"{name} differs between backends"
            else:
                reference[name] = result

    print(f"\n{'kernel':<20}" + "".join(f"{b:>12}" for b in backends))
    for name, _ in kernel_cases:
        row = f"{name:<20}"
        for b in backends:
            row += f"{results[(b, name)] * 1000:>10.0f}ms"
        print(row)

    print("\nend-to-end hot operations per backend:")
    for backend in backends:
        kernels.set_backend(backend)
        t0 = time.perf_counter()
        build_profile(corpus)
        t_profile = time.perf_counter() - t0
        t0 = time.perf_counter()
        candidates = cross_validated_flags(corpus, k=args.folds, seed=args.seed)
        t_cv = time.perf_counter() - t0
        t0 = time.perf_counter()
        result = scan(corpus)
        t_scan = time.perf_counter() - t0
        log = [decide(p.id, "accept", actor="bench") for p in result.proposals]
        corrected, _ = replay(corpus, log, result.proposals)
        t0 = time.perf_counter()
        report = diff_corpora(corpus, corrected)
        t_diff = time.perf_counter() - t0
        print(
            f"  {backend:<7} profile {t_profile:5.1f}s | cv-detect {t_cv:5.1f}s "
            f"({len(candidates)} cands) | scan {t_scan:5.1f}s "
            f"({len(result.proposals)} props) | diff {t_diff:5.1f}s "
            f"({report.tokens_changed} changed)"
        )


if __name__ == "__main__":
    main()
