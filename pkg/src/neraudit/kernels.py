"""Integer-array kernels for the corpus-scale hot paths.

Two interchangeable backends compute identical results:

* "numba": @njit loops, JIT-compiled on first use (the default when numba is
  importable).
* "numpy": vectorized fallback with no compilation step.

Select with the NERAUDIT_BACKEND environment variable or set_backend(). All
kernels operate on the integer encoding produced by `neraudit.encoding`:
prefix codes (0=O, 1=B, 2=I), entity-type ids (-1 for O) and surface ids.
Tag sequences must already be BIO2-valid; kernels do not re-validate.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only where numba is absent
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


O, B, I = 0, 1, 2  # prefix codes


# ---------------------------------------------------------------------------
# numpy backend


def _bio_spans_np(prefix, etype, sent_offsets):
    n = prefix.shape[0]
    starts = np.flatnonzero(prefix == B)
    # a mention run ends at the next position whose prefix is not I; in valid
    # BIO2 an I token never opens a sentence, so runs cannot cross boundaries
    non_i = np.flatnonzero(prefix != I)
    idx = np.searchsorted(non_i, starts, side="right")
    ends = np.where(idx < non_i.size, non_i[np.minimum(idx, non_i.size - 1)], n)
    types = etype[starts]
    sents = np.searchsorted(sent_offsets, starts, side="right") - 1
    return (
        starts.astype(np.int64),
        ends.astype(np.int64),
        types.astype(np.int16),
        sents.astype(np.int64),
    )


def _label_counts_np(surface, label, n_surfaces, n_labels):
    flat = surface.astype(np.int64) * n_labels + label
    counts = np.bincount(flat, minlength=n_surfaces * n_labels)
    return counts.reshape(n_surfaces, n_labels)


def _fold_label_counts_np(surface, label, fold, n_folds, n_surfaces, n_labels):
    flat = (fold.astype(np.int64) * n_surfaces + surface) * n_labels + label
    counts = np.bincount(flat, minlength=n_folds * n_surfaces * n_labels)
    return counts.reshape(n_folds, n_surfaces, n_labels)


def _classify_rows_np(counts):
    total = counts.sum(axis=1)
    count_o = counts[:, 0]
    inside = total - count_o
    seen = total > 0
    majority_o = count_o > inside
    type_counts = counts[:, 1:]
    if type_counts.shape[1] == 0:
        plurality = np.full(counts.shape[0], -1, np.int16)
        return seen, majority_o, plurality
    best = type_counts.max(axis=1)
    plurality = type_counts.argmax(axis=1).astype(np.int16)
    tied = (type_counts == best[:, None]).sum(axis=1) > 1
    plurality[(best == 0) | tied] = -1
    return seen, majority_o, plurality


def _token_flag_codes_np(ref_surface, ref_etype, prefix, seen, majority_o, plurality):
    codes = np.zeros(prefix.shape[0], np.int8)
    inside = prefix != O
    if seen.size == 0:  # empty reference: everything inside a mention is unseen
        codes[inside] = 1
        return codes
    known = inside & (ref_surface >= 0)
    unseen = inside & ~known
    surf = np.where(known, ref_surface, 0)
    unseen |= known & ~seen[surf]
    known &= ~unseen
    codes[unseen] = 1
    diff_o = known & majority_o[surf]
    codes[diff_o] = 2
    rest = known & ~diff_o
    plur = plurality[surf]
    codes[rest & (plur >= 0) & (plur != ref_etype)] = 3
    return codes


# ---------------------------------------------------------------------------
# numba backend


@njit(cache=True)
def _bio_spans_nb(prefix, etype, sent_offsets):  # pragma: no cover - jitted
    n_spans = 0
    for i in range(prefix.shape[0]):
        if prefix[i] == 1:
            n_spans += 1
    starts = np.empty(n_spans, np.int64)
    ends = np.empty(n_spans, np.int64)
    types = np.empty(n_spans, np.int16)
    sents = np.empty(n_spans, np.int64)
    k = 0
    for s in range(sent_offsets.shape[0] - 1):
        i = sent_offsets[s]
        hi = sent_offsets[s + 1]
        while i < hi:
            if prefix[i] == 1:
                j = i + 1
                while j < hi and prefix[j] == 2:
                    j += 1
                starts[k] = i
                ends[k] = j
                types[k] = etype[i]
                sents[k] = s
                k += 1
                i = j
            else:
                i += 1
    return starts, ends, types, sents


@njit(cache=True)
def _label_counts_nb(surface, label, n_surfaces, n_labels):  # pragma: no cover
    counts = np.zeros((n_surfaces, n_labels), np.int64)
    for i in range(surface.shape[0]):
        counts[surface[i], label[i]] += 1
    return counts


@njit(cache=True)
def _fold_label_counts_nb(surface, label, fold, n_folds, n_surfaces, n_labels):  # pragma: no cover
    counts = np.zeros((n_folds, n_surfaces, n_labels), np.int64)
    for i in range(surface.shape[0]):
        counts[fold[i], surface[i], label[i]] += 1
    return counts


@njit(cache=True)
def _classify_rows_nb(counts):  # pragma: no cover - jitted
    n, n_labels = counts.shape
    seen = np.empty(n, np.bool_)
    majority_o = np.empty(n, np.bool_)
    plurality = np.empty(n, np.int16)
    for r in range(n):
        total = 0
        for c in range(n_labels):
            total += counts[r, c]
        count_o = counts[r, 0]
        inside = total - count_o
        seen[r] = total > 0
        majority_o[r] = count_o > inside
        best = 0
        arg = -1
        tied = False
        for c in range(1, n_labels):
            v = counts[r, c]
            if v > best:
                best = v
                arg = c - 1
                tied = False
            elif v == best and v > 0:
                tied = True
        plurality[r] = -1 if (best == 0 or tied) else arg
    return seen, majority_o, plurality


@njit(cache=True)
def _token_flag_codes_nb(ref_surface, ref_etype, prefix, seen, majority_o, plurality):  # pragma: no cover
    n = prefix.shape[0]
    codes = np.zeros(n, np.int8)
    for i in range(n):
        if prefix[i] == 0:
            continue
        s = ref_surface[i]
        if s < 0 or not seen[s]:
            codes[i] = 1
        elif majority_o[s]:
            codes[i] = 2
        elif plurality[s] >= 0 and plurality[s] != ref_etype[i]:
            codes[i] = 3
    return codes


# ---------------------------------------------------------------------------
# backend selection

_BACKENDS: dict[str, SimpleNamespace] = {
    "numpy": SimpleNamespace(
        bio_spans=_bio_spans_np,
        label_counts=_label_counts_np,
        fold_label_counts=_fold_label_counts_np,
        classify_rows=_classify_rows_np,
        token_flag_codes=_token_flag_codes_np,
    )
}
if HAVE_NUMBA:
    _BACKENDS["numba"] = SimpleNamespace(
        bio_spans=_bio_spans_nb,
        label_counts=_label_counts_nb,
        fold_label_counts=_fold_label_counts_nb,
        classify_rows=_classify_rows_nb,
        token_flag_codes=_token_flag_codes_nb,
    )


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def _default_backend() -> str:
    name = os.environ.get("NERAUDIT_BACKEND", "").strip().lower()
    if name:
        if name not in _BACKENDS:
            raise ValueError(
                f"NERAUDIT_BACKEND={name!r} unavailable; choose from {available_backends()}"
            )
        return name
    return "numba" if HAVE_NUMBA else "numpy"


_active = _default_backend()


def active_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    """Switch kernel implementations; raises on unknown/unavailable names."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; choose from {available_backends()}")
    _active = name


def bio_spans(prefix, etype, sent_offsets):
    """(starts, ends, etype_ids, sentence_rows) of all mention runs."""
    return _BACKENDS[_active].bio_spans(prefix, etype, sent_offsets)


def label_counts(surface, label, n_surfaces: int, n_labels: int):
    """(n_surfaces, n_labels) occurrence matrix; label 0 is O, 1+t a type."""
    return _BACKENDS[_active].label_counts(surface, label, n_surfaces, n_labels)


def fold_label_counts(surface, label, fold, n_folds: int, n_surfaces: int, n_labels: int):
    """Per-fold occurrence matrices, shape (n_folds, n_surfaces, n_labels)."""
    return _BACKENDS[_active].fold_label_counts(
        surface, label, fold, n_folds, n_surfaces, n_labels
    )


def classify_rows(counts):
    """Per-surface summary of a count matrix: (seen, majority_o, plurality).

    plurality is the unique most-frequent entity-type column (-1 when the
    surface never occurs inside a mention or the maximum is tied).
    """
    return _BACKENDS[_active].classify_rows(counts)


def token_flag_codes(ref_surface, ref_etype, prefix, seen, majority_o, plurality):
    """Flag code per token: 0 none, 1 unseen, 2 usually-O, 3 other-type.

    ref_surface/ref_etype are the token's surface and observed type translated
    into the reference profile's id spaces (-1 when absent there).
    """
    return _BACKENDS[_active].token_flag_codes(
        ref_surface, ref_etype, prefix, seen, majority_o, plurality
    )
