"""Frequency-divergence detection of suspicious mention tokens.

A profile built from a reference partition records, per exact surface form,
how often it occurs outside any mention (O) and inside mentions of each
entity type. Tokens inside mentions of a target partition are then flagged

* unseen-I     - the surface never occurs in the reference,
* diff-I       - the surface is majority-O in the reference,
* diff-etype   - its plurality reference mention type differs from the
                 observed type (ties are not flagged),

and mentions containing flagged tokens become review candidates. The training
partition audits itself with k-fold cross-validation: each document fold is
flagged against a profile built from the other folds only.
"""
from __future__ import annotations

import hashlib
import json
import random
from collections.abc import Mapping
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator

import numpy as np

from . import kernels
from .corpus import Corpus, Mention
from .encoding import EncodedCorpus, encode_corpus

__all__ = [
    "Candidate",
    "PairEntry",
    "ProfileTable",
    "TokenFlag",
    "TokenProfile",
    "build_profile",
    "classify_token",
    "cross_validated_flags",
    "flag_partition",
    "mention_type_pairs",
]


class TokenFlag(str, Enum):
    UNSEEN_I = "unseen-I"
    DIFF_I = "diff-I"
    DIFF_ETYPE = "diff-etype"


_FLAG_BY_CODE = {1: TokenFlag.UNSEEN_I, 2: TokenFlag.DIFF_I, 3: TokenFlag.DIFF_ETYPE}

CANDIDATE_STATUSES = ("pending", "confirmed_error", "dismissed", "ambiguous")


@dataclass(frozen=True, slots=True)
class TokenProfile:
    surface: str
    total: int
    count_o: int
    count_by_type: dict[str, int]


class ProfileTable(Mapping):
    """Mapping surface -> TokenProfile backed by a count matrix.

    Column 0 of `counts` is O, column 1+t the entity type with id t. Rows
    materialize lazily; the detector's hot paths read the arrays directly.
    """

    def __init__(self, vocab: dict[str, int], etype_names: list[str], counts: np.ndarray):
        self.vocab = vocab
        self.surfaces = [""] * len(vocab)
        for s, i in vocab.items():
            self.surfaces[i] = s
        self.etype_names = list(etype_names)
        self.etype_ids = {t: i for i, t in enumerate(self.etype_names)}
        self.counts = counts

    def __getitem__(self, surface: str) -> TokenProfile:
        row = self.counts[self.vocab[surface]]
        by_type = {
            t: int(row[i + 1]) for i, t in enumerate(self.etype_names) if row[i + 1]
        }
        return TokenProfile(surface, int(row.sum()), int(row[0]), by_type)

    def __iter__(self) -> Iterator[str]:
        return iter(self.vocab)

    def __len__(self) -> int:
        return len(self.vocab)


def build_profile(reference: Corpus) -> ProfileTable:
    """Count every token occurrence of the reference partition."""
    enc = encode_corpus(reference)
    return _profile_from_encoded(enc)


def _profile_from_encoded(enc: EncodedCorpus) -> ProfileTable:
    n_labels = len(enc.etype_names) + 1
    counts = kernels.label_counts(enc.token_surface, enc.labels(), len(enc.surfaces), n_labels)
    assert int(counts.sum()) == enc.n_tokens  # every occurrence counted once
    return ProfileTable(enc.vocab, enc.etype_names, counts)


def classify_token(
    profile: ProfileTable, surface: str, observed_type: str
) -> TokenFlag | None:
    """Classify one in-mention token occurrence against a reference profile.

    At most one flag is returned: unseen-I when the surface has no profile
    entry, else diff-I when it is majority-O, else diff-etype when a unique
    plurality mention type differs from the observed one.
    """
    sid = profile.vocab.get(surface)
    if sid is None:
        return TokenFlag.UNSEEN_I
    row = profile.counts[sid]
    count_o = int(row[0])
    inside = int(row[1:].sum())
    if count_o > inside:
        return TokenFlag.DIFF_I
    if inside == 0:
        return None  # unreachable for a materialized row, kept for safety
    best = int(row[1:].max())
    winners = np.flatnonzero(row[1:] == best)
    if winners.size != 1:
        return None
    plurality = profile.etype_names[int(winners[0])]
    return TokenFlag.DIFF_ETYPE if plurality != observed_type else None


@dataclass(frozen=True, slots=True)
class Candidate:
    """A unique suspicious mention queued for human review."""

    id: str
    mention: Mention  # representative (first) occurrence
    flags: tuple[tuple[int, TokenFlag], ...]  # (offset within mention, flag)
    source: str  # token-flags | pair-list | rule
    context: tuple[str, ...]  # representative sentence token texts
    occurrences: tuple[Mention, ...]
    status: str = "pending"
    rule_id: str | None = None
    note: str | None = None

    def with_status(self, status: str) -> "Candidate":
        if status not in CANDIDATE_STATUSES:
            raise ValueError(f"unknown candidate status {status!r}")
        return replace(self, status=status)

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "surface": self.mention.surface,
            "etype": self.mention.etype,
            "flags": [{"offset": o, "label": f.value} for o, f in self.flags],
            "occurrences": [
                {
                    "doc_id": m.doc_id,
                    "sent_index": m.sent_index,
                    "start": m.start,
                    "end": m.end,
                }
                for m in self.occurrences
            ],
            "context_sample": " ".join(self.context),
            "status": self.status,
            "source": self.source,
        }
        if self.rule_id:
            out["rule_id"] = self.rule_id
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Candidate":
        occurrences = tuple(
            Mention(
                o["doc_id"], o["sent_index"], o["start"], o["end"],
                obj["etype"], obj["surface"],
            )
            for o in obj["occurrences"]
        )
        return cls(
            id=obj["id"],
            mention=occurrences[0],
            flags=tuple(
                (f["offset"], TokenFlag(f["label"])) for f in obj.get("flags", [])
            ),
            source=obj.get("source", "token-flags"),
            context=tuple(obj.get("context_sample", "").split(" ")) if obj.get("context_sample") else (),
            occurrences=occurrences,
            status=obj.get("status", "pending"),
            rule_id=obj.get("rule_id"),
            note=obj.get("note"),
        )


def candidate_id(source: str, surface: str, etype: str, detail: object) -> str:
    payload = json.dumps([source, surface, etype, detail], ensure_ascii=False)
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()[:16]


def flag_partition(target: Corpus, profile: ProfileTable) -> list[Candidate]:
    """Flag each unique mention of the target whose span contains a flagged
    token; duplicates collapse into one candidate carrying all occurrences.
    """
    enc = encode_corpus(target)
    codes = _flag_codes(enc, profile)
    return _group_candidates(enc, codes)


def _flag_codes(enc: EncodedCorpus, profile: ProfileTable) -> np.ndarray:
    seen, majority_o, plurality = kernels.classify_rows(profile.counts)
    surf_trans = np.empty(len(enc.surfaces), np.int32)
    vget = profile.vocab.get
    for i, s in enumerate(enc.surfaces):
        surf_trans[i] = vget(s, -1)
    type_trans = np.full(max(len(enc.etype_names), 1), -1, np.int16)
    tget = profile.etype_ids.get
    for i, t in enumerate(enc.etype_names):
        type_trans[i] = tget(t, -1)
    ref_surface = surf_trans[enc.token_surface]
    ref_etype = np.where(
        enc.token_etype >= 0, type_trans[np.maximum(enc.token_etype, 0)], -1
    ).astype(np.int16)
    return kernels.token_flag_codes(
        ref_surface, ref_etype, enc.prefix, seen, majority_o, plurality
    )


def _group_candidates(
    enc: EncodedCorpus, codes: np.ndarray, source: str = "token-flags"
) -> list[Candidate]:
    starts, ends, span_types, span_sents = kernels.bio_spans(
        enc.prefix, enc.token_etype, enc.sent_offsets
    )
    flagged_cumsum = np.concatenate(([0], np.cumsum(codes != 0)))
    has_flag = flagged_cumsum[ends] > flagged_cumsum[starts]

    groups: dict[tuple, list] = {}
    order: list[tuple] = []
    sentences = enc.corpus.sentences
    offsets = enc.sent_offsets
    for k in np.flatnonzero(has_flag):
        start, end, row = int(starts[k]), int(ends[k]), int(span_sents[k])
        ids = tuple(int(i) for i in enc.token_surface[start:end])
        flags = tuple(
            (off, _FLAG_BY_CODE[int(codes[start + off])])
            for off in range(end - start)
            if codes[start + off]
        )
        key = (ids, int(span_types[k]), flags)
        sent = sentences[row]
        rel = start - int(offsets[row])
        mention = Mention(
            sent.doc_id,
            sent.sent_index,
            rel,
            rel + (end - start),
            enc.etype_names[int(span_types[k])],
            " ".join(enc.surfaces[i] for i in ids),
        )
        bucket = groups.get(key)
        if bucket is None:
            groups[key] = [mention, sent.texts(), [mention]]
            order.append(key)
        else:
            bucket[2].append(mention)

    candidates = []
    for key in order:
        mention, context, occurrences = groups[key]
        flags = key[2]
        cid = candidate_id(
            source,
            mention.surface,
            mention.etype,
            [[o, f.value] for o, f in flags],
        )
        candidates.append(
            Candidate(
                id=cid,
                mention=mention,
                flags=flags,
                source=source,
                context=context,
                occurrences=tuple(occurrences),
            )
        )
    candidates.sort(key=lambda c: (-len(c.occurrences), c.mention.surface, c.mention.etype))
    return candidates


def cross_validated_flags(train: Corpus, k: int = 10, seed: int = 0) -> list[Candidate]:
    """Flag the training partition against itself without self-reference.

    Documents are shuffled deterministically by `seed` and dealt round-robin
    into k folds; each fold's tokens are classified against a profile built
    from the remaining folds only.
    """
    if k < 2:
        raise ValueError(f"need at least 2 folds, got k={k}")
    doc_order: list[str] = []
    seen_docs: set[str] = set()
    for s in train.sentences:
        if s.doc_id not in seen_docs:
            seen_docs.add(s.doc_id)
            doc_order.append(s.doc_id)
    if len(doc_order) < k:
        raise ValueError(
            f"{len(doc_order)} document(s) cannot fill {k} folds; use a smaller k"
        )
    shuffled = list(doc_order)
    random.Random(seed).shuffle(shuffled)
    fold_of_doc = {doc: i % k for i, doc in enumerate(shuffled)}

    enc = encode_corpus(train)
    sent_fold = np.array(
        [fold_of_doc[s.doc_id] for s in train.sentences], np.int16
    )
    lengths = np.diff(enc.sent_offsets)
    token_fold = np.repeat(sent_fold, lengths)

    n_labels = len(enc.etype_names) + 1
    labels = enc.labels()
    per_fold = kernels.fold_label_counts(
        enc.token_surface, labels, token_fold, k, len(enc.surfaces), n_labels
    )
    totals = per_fold.sum(axis=0)

    # id spaces are shared between folds, so no translation tables here
    identity_surface = enc.token_surface
    identity_etype = enc.token_etype
    codes = np.zeros(enc.n_tokens, np.int8)
    for f in range(k):
        ref = totals - per_fold[f]
        seen, majority_o, plurality = kernels.classify_rows(ref)
        fold_codes = kernels.token_flag_codes(
            identity_surface, identity_etype, enc.prefix, seen, majority_o, plurality
        )
        mask = token_fold == f
        codes[mask] = fold_codes[mask]
    return _group_candidates(enc, codes)


@dataclass(frozen=True, slots=True)
class PairEntry:
    surface: str
    etype: str
    count: int


def mention_type_pairs(
    corpus: Corpus, types: set[str] | None = None
) -> list[PairEntry]:
    """Frequency-ranked (surface, entity type) mention pairs.

    Sorted by count descending, then surface, then type; `types` optionally
    restricts to a set of entity types.
    """
    counts: dict[tuple[str, str], int] = {}
    for m in corpus.mentions():
        if types is not None and m.etype not in types:
            continue
        key = (m.surface, m.etype)
        counts[key] = counts.get(key, 0) + 1
    entries = [PairEntry(s, t, c) for (s, t), c in counts.items()]
    entries.sort(key=lambda e: (-e.count, e.surface, e.etype))
    return entries
