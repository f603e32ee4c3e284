"""Deterministic synthetic corpora for benchmarks and load tests.

Generated text is nonsense but statistically shaped like a real NER corpus:
mostly O tokens from a common vocabulary, typed mentions drawn from per-type
name pools, a few document-local rare tokens, and a seasoning of guideline
violations (leading determiners inside spans, trailing possessive markers,
quote-wrapped titles) so detection and rule scans have real work to do.
"""
from __future__ import annotations

import random

from .corpus import Corpus, LabeledToken, Sentence

ENTITY_TYPES = (
    "PERSON",
    "NORP",
    "FAC",
    "ORG",
    "GPE",
    "LOC",
    "PRODUCT",
    "EVENT",
    "WORK_OF_ART",
    "LAW",
    "LANGUAGE",
    "CARDINAL",
    "DATE",
    "MONEY",
    "ORDINAL",
    "PERCENT",
    "QUANTITY",
    "TIME",
)

_FUNCTION_WORDS = (
    "the a an of in on at to for with and or but is was were said says "
    "over under about after before it he she they we you this that"
).split()


def _name_pools(rng: random.Random, pool_size: int) -> dict[str, list[tuple[str, ...]]]:
    pools: dict[str, list[tuple[str, ...]]] = {}
    for t in ENTITY_TYPES:
        stem = t[:3].title()
        pool = []
        for i in range(pool_size):
            n_parts = rng.choice((1, 1, 1, 2, 2, 3))
            pool.append(
                tuple(f"{stem}{i:03d}{chr(97 + p)}" for p in range(n_parts))
            )
        pools[t] = pool
    return pools


def synthetic_corpus(
    n_tokens: int,
    n_docs: int = 100,
    seed: int = 0,
    partition: str = "train",
    noise: float = 0.08,
) -> Corpus:
    """Generate roughly n_tokens tokens spread over n_docs documents.

    `noise` is the fraction of mentions decorated with a guideline violation.
    Identical arguments always produce an identical corpus.
    """
    rng = random.Random(seed)
    common = [f"w{i:04d}" for i in range(1200)] + _FUNCTION_WORDS * 40
    pools = _name_pools(rng, pool_size=300)
    type_list = list(ENTITY_TYPES)

    sentences: list[Sentence] = []
    tokens_done = 0
    per_doc = max(1, n_tokens // max(n_docs, 1))
    doc_idx = 0
    sent_idx = 0
    doc_budget = per_doc
    rare_serial = 0

    while tokens_done < n_tokens:
        doc_id = f"doc{doc_idx:04d}"
        length = rng.randint(6, 30)
        toks: list[LabeledToken] = []
        i = 0
        while i < length:
            r = rng.random()
            if r < 0.055:
                etype = rng.choice(type_list)
                name = rng.choice(pools[etype])
                decorated = rng.random() < noise
                parts: list[str] = list(name)
                if decorated:
                    style = rng.random()
                    if style < 0.5 and etype not in ("DATE", "TIME"):
                        parts = ["the"] + parts
                    elif style < 0.75:
                        parts = parts + ["'s"]
                    else:
                        parts = ["``"] + parts + ["''"]
                toks.append(LabeledToken(parts[0], "B-" + etype))
                toks.extend(LabeledToken(p, "I-" + etype) for p in parts[1:])
                i += len(parts)
            elif r < 0.075:
                # document-local rare token: unseen from any other fold
                rare_serial += 1
                toks.append(LabeledToken(f"rare_{doc_id}_{rare_serial}", "O"))
                i += 1
            else:
                toks.append(LabeledToken(rng.choice(common), "O"))
                i += 1
        sentences.append(Sentence(doc_id, sent_idx, tuple(toks)))
        sent_idx += 1
        tokens_done += len(toks)
        doc_budget -= len(toks)
        if doc_budget <= 0 and doc_idx < n_docs - 1:
            doc_idx += 1
            sent_idx = 0
            doc_budget = per_doc
    return Corpus(partition, tuple(sentences))


def reannotate(corpus: Corpus, seed: int = 0, rate: float = 0.1) -> Corpus:
    """A plausible second version: a fraction of sentences get their tags
    redrawn (still valid BIO2), as if a reviewer re-annotated them.
    """
    rng = random.Random(seed)
    out = []
    for s in corpus.sentences:
        if rng.random() >= rate:
            out.append(s)
            continue
        tags: list[str] = []
        i = 0
        n = len(s.tokens)
        while i < n:
            if rng.random() < 0.3:
                etype = rng.choice(ENTITY_TYPES)
                run = min(rng.randint(1, 3), n - i)
                tags.append("B-" + etype)
                tags.extend("I-" + etype for _ in range(run - 1))
                i += run
            else:
                tags.append("O")
                i += 1
        out.append(
            Sentence(
                s.doc_id,
                s.sent_index,
                tuple(LabeledToken(t.text, tag) for t, tag in zip(s.tokens, tags)),
            )
        )
    return Corpus(corpus.partition, tuple(out), corpus.source_meta)
