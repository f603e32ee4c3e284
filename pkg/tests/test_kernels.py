from __future__ import annotations

import random
import subprocess
import sys

import numpy as np
import pytest

from neraudit import kernels
from neraudit.corpus import extract_mentions
from neraudit.encoding import encode_corpus
from .helpers import random_corpus

BACKENDS = kernels.available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    previous = kernels.active_backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


def encoded(seed: int):
    rng = random.Random(seed)
    return encode_corpus(random_corpus(rng, n_docs=4, sents_per_doc=(1, 5)))


@pytest.mark.parametrize("seed", range(6))
def test_bio_spans_matches_extractor(backend, seed):
    enc = encoded(seed)
    starts, ends, types, sents = kernels.bio_spans(
        enc.prefix, enc.token_etype, enc.sent_offsets
    )
    got = [
        (int(s), int(e), enc.etype_names[int(t)], int(row))
        for s, e, t, row in zip(starts, ends, types, sents)
    ]
    want = []
    for row, sent in enumerate(enc.corpus.sentences):
        base = int(enc.sent_offsets[row])
        for m in extract_mentions(sent):
            want.append((base + m.start, base + m.end, m.etype, row))
    assert got == want


@pytest.mark.parametrize("seed", range(6))
def test_label_counts_matches_python_reduction(backend, seed):
    enc = encoded(seed)
    n_labels = len(enc.etype_names) + 1
    counts = kernels.label_counts(
        enc.token_surface, enc.labels(), len(enc.surfaces), n_labels
    )
    want = np.zeros((len(enc.surfaces), n_labels), np.int64)
    for sid, lab in zip(enc.token_surface.tolist(), enc.labels().tolist()):
        want[sid, lab] += 1
    assert np.array_equal(counts, want)


@pytest.mark.parametrize("seed", range(4))
def test_fold_counts_sum_to_totals(backend, seed):
    enc = encoded(seed)
    n_labels = len(enc.etype_names) + 1
    rng = random.Random(seed)
    fold = np.array([rng.randrange(3) for _ in range(enc.n_tokens)], np.int16)
    per_fold = kernels.fold_label_counts(
        enc.token_surface, enc.labels(), fold, 3, len(enc.surfaces), n_labels
    )
    totals = kernels.label_counts(
        enc.token_surface, enc.labels(), len(enc.surfaces), n_labels
    )
    assert np.array_equal(per_fold.sum(axis=0), totals)


@pytest.mark.parametrize("seed", range(4))
def test_classify_rows_python_reference(backend, seed):
    rng = np.random.default_rng(seed)
    counts = rng.integers(0, 5, size=(40, 5)).astype(np.int64)
    seen, majority_o, plurality = kernels.classify_rows(counts)
    for r in range(counts.shape[0]):
        row = counts[r]
        assert bool(seen[r]) == (row.sum() > 0)
        assert bool(majority_o[r]) == (row[0] > row[1:].sum())
        tc = row[1:]
        best = tc.max() if tc.size else 0
        winners = [i for i, v in enumerate(tc) if v == best and best > 0]
        want = winners[0] if len(winners) == 1 else -1
        assert int(plurality[r]) == want


def test_backends_agree_on_flag_codes():
    if len(BACKENDS) < 2:
        pytest.skip("single backend available")
    enc = encoded(99)
    n_labels = len(enc.etype_names) + 1
    counts = kernels.label_counts(
        enc.token_surface, enc.labels(), len(enc.surfaces), n_labels
    )
    results = {}
    previous = kernels.active_backend()
    try:
        for name in BACKENDS:
            kernels.set_backend(name)
            seen, majority_o, plurality = kernels.classify_rows(counts)
            results[name] = kernels.token_flag_codes(
                enc.token_surface, enc.token_etype, enc.prefix, seen, majority_o, plurality
            )
    finally:
        kernels.set_backend(previous)
    first, *rest = results.values()
    for other in rest:
        assert np.array_equal(first, other)


def test_empty_reference_marks_everything_unseen(backend):
    enc = encoded(5)
    seen = np.zeros(0, bool)
    majority_o = np.zeros(0, bool)
    plurality = np.zeros(0, np.int16)
    ref_surface = np.full(enc.n_tokens, -1, np.int32)
    ref_etype = np.full(enc.n_tokens, -1, np.int16)
    codes = kernels.token_flag_codes(
        ref_surface, ref_etype, enc.prefix, seen, majority_o, plurality
    )
    assert np.array_equal(codes != 0, enc.prefix != 0)


def test_env_flag_selects_backend():
    code = (
        "import neraudit.kernels as k; print(k.active_backend())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "NERAUDIT_BACKEND": "numpy"},
    )
    assert out.stdout.strip() == "numpy"


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")
