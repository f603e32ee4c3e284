"""Integer encoding of corpora for the array kernels.

Surfaces and entity types are interned into dense id spaces per encoded
corpus; translation tables map one corpus's ids into another's (missing
entries become -1), which is how a target partition is classified against a
reference profile without sharing vocabularies up front.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus

PREFIX_CODE = {"O": 0, "B": 1, "I": 2}


@dataclass
class EncodedCorpus:
    corpus: Corpus
    surfaces: list[str]  # surface id -> string
    vocab: dict[str, int]
    etype_names: list[str]  # type id -> name
    etype_ids: dict[str, int]
    token_surface: np.ndarray  # int32 (n_tokens,)
    prefix: np.ndarray  # int8 (n_tokens,)
    token_etype: np.ndarray  # int16 (n_tokens,), -1 outside mentions
    sent_offsets: np.ndarray  # int64 (n_sentences + 1,)

    @property
    def n_tokens(self) -> int:
        return int(self.token_surface.shape[0])

    def labels(self) -> np.ndarray:
        """Label id per token: 0 for O, 1 + etype id inside a mention."""
        return np.where(self.prefix == 0, 0, self.token_etype.astype(np.int64) + 1).astype(
            np.int16
        )

    def surface_translation(self, other: "EncodedCorpus") -> np.ndarray:
        """Map this corpus's surface ids into `other`'s vocab (-1 if absent)."""
        out = np.empty(len(self.surfaces), np.int32)
        get = other.vocab.get
        for i, s in enumerate(self.surfaces):
            out[i] = get(s, -1)
        return out

    def etype_translation(self, other: "EncodedCorpus") -> np.ndarray:
        out = np.empty(len(self.etype_names), np.int16)
        get = other.etype_ids.get
        for i, t in enumerate(self.etype_names):
            out[i] = get(t, -1)
        return out


def encode_corpus(corpus: Corpus) -> EncodedCorpus:
    """Single-pass interning of a corpus into kernel-ready arrays.

    Assumes tags are structurally well-formed (parsed or validated); BIO
    sequence validity is the caller's contract, as for the kernels.
    """
    n = corpus.n_tokens
    token_surface = np.empty(n, np.int32)
    prefix = np.empty(n, np.int8)
    token_etype = np.empty(n, np.int16)
    sent_offsets = np.empty(len(corpus.sentences) + 1, np.int64)

    vocab: dict[str, int] = {}
    etype_ids: dict[str, int] = {}
    surfaces: list[str] = []
    etype_names: list[str] = []

    pos = 0
    sent_offsets[0] = 0
    for si, sent in enumerate(corpus.sentences):
        for tok in sent.tokens:
            sid = vocab.get(tok.text)
            if sid is None:
                sid = len(surfaces)
                vocab[tok.text] = sid
                surfaces.append(tok.text)
            token_surface[pos] = sid
            tag = tok.tag
            if tag == "O":
                prefix[pos] = 0
                token_etype[pos] = -1
            else:
                prefix[pos] = 1 if tag[0] == "B" else 2
                name = tag[2:]
                tid = etype_ids.get(name)
                if tid is None:
                    tid = len(etype_names)
                    etype_ids[name] = tid
                    etype_names.append(name)
                token_etype[pos] = tid
            pos += 1
        sent_offsets[si + 1] = pos

    return EncodedCorpus(
        corpus=corpus,
        surfaces=surfaces,
        vocab=vocab,
        etype_names=etype_names,
        etype_ids=etype_ids,
        token_surface=token_surface,
        prefix=prefix,
        token_etype=token_etype,
        sent_offsets=sent_offsets,
    )
