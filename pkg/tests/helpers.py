"""Shared test oracles and generators.

Everything here is deliberately naive and independent of the package's
production code paths: oracle results are recomputed from first principles
(exhaustive span checks, raw Counter passes) so they can disagree with the
implementation when it is wrong.
"""
from __future__ import annotations

import random
from collections import Counter, defaultdict

from neraudit.corpus import Corpus, LabeledToken, Mention, Sentence

ETYPES = ["PERSON", "GPE", "ORG", "LOC", "DATE", "CARDINAL", "WORK_OF_ART", "FAC"]

WORDS = [
    "the", "a", "an", "US", "economy", "White", "House", "Boris", "Yelstin",
    "'s", "Paris", "rose", "Columbia", "first", "Sunday", "evening", "Lada",
    "Niva", "court", "union", "``", "''", "-", "NYC", "Provence", "coast",
    "in", "on", "of", "bank", "talks", "week", "now", "mom",
]


def oracle_spans(tags: list[str]) -> list[tuple[int, int, str]]:
    """Declarative mention recognizer: a span [s, e) of type t is a mention
    iff tags[s] == B-t, every interior tag is I-t, and the run is maximal.
    Quantified over all candidate spans; independent of the state-machine
    extractor under test.
    """
    n = len(tags)
    found = []
    for s in range(n):
        if not tags[s].startswith("B-"):
            continue
        t = tags[s][2:]
        for e in range(s + 1, n + 1):
            interior_ok = all(tags[i] == "I-" + t for i in range(s + 1, e))
            maximal = e == n or tags[e] != "I-" + t
            if interior_ok and maximal:
                found.append((s, e, t))
    return found


def bio_valid(tags: list[str]) -> bool:
    prev = "O"
    for tag in tags:
        if tag.startswith("I-") and (prev == "O" or prev[2:] != tag[2:]):
            return False
        prev = tag
    return True


def oracle_profile(reference: Corpus) -> dict[str, Counter]:
    """Raw per-surface label counts: counter keys are 'O' or the entity type."""
    table: dict[str, Counter] = defaultdict(Counter)
    for sent in reference.sentences:
        for tok in sent.tokens:
            table[tok.text]["O" if tok.tag == "O" else tok.tag[2:]] += 1
    return dict(table)


def oracle_classify(
    table: dict[str, Counter], surface: str, observed: str
) -> str | None:
    """Brute-force majority/plurality classification of one in-mention token."""
    counts = table.get(surface)
    if counts is None:
        return "unseen-I"
    count_o = counts.get("O", 0)
    inside = sum(v for k, v in counts.items() if k != "O")
    if count_o > inside:
        return "diff-I"
    type_counts = {k: v for k, v in counts.items() if k != "O" and v > 0}
    if not type_counts:
        return None
    best = max(type_counts.values())
    winners = [k for k, v in type_counts.items() if v == best]
    if len(winners) == 1 and winners[0] != observed:
        return "diff-etype"
    return None


def oracle_score(gold: Corpus, pred: Corpus) -> dict:
    """Exact-match mention-set matcher computed from the declarative spans."""
    per_type: dict[str, dict[str, int]] = defaultdict(lambda: {"tp": 0, "fp": 0, "fn": 0})
    for g, p in zip(gold.sentences, pred.sentences):
        g_set = set(oracle_spans(list(g.tags())))
        p_set = set(oracle_spans(list(p.tags())))
        for span in g_set & p_set:
            per_type[span[2]]["tp"] += 1
        for span in p_set - g_set:
            per_type[span[2]]["fp"] += 1
        for span in g_set - p_set:
            per_type[span[2]]["fn"] += 1

    def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
        p = 100.0 * tp / (tp + fp) if tp + fp else 0.0
        r = 100.0 * tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        return p, r, f

    out = {"per_type": {}, "overall": None}
    tp = fp = fn = 0
    for t, c in per_type.items():
        out["per_type"][t] = (c["tp"], c["fp"], c["fn"], *prf(c["tp"], c["fp"], c["fn"]))
        tp += c["tp"]
        fp += c["fp"]
        fn += c["fn"]
    out["overall"] = (tp, fp, fn, *prf(tp, fp, fn))
    return out


def random_tags(rng: random.Random, n: int, etypes: list[str] | None = None) -> list[str]:
    """A BIO2-valid tag sequence of length n."""
    etypes = etypes or ETYPES
    tags: list[str] = []
    i = 0
    while i < n:
        if rng.random() < 0.35:
            t = rng.choice(etypes)
            length = min(rng.randint(1, 3), n - i)
            tags.append("B-" + t)
            tags.extend("I-" + t for _ in range(length - 1))
            i += length
        else:
            tags.append("O")
            i += 1
    return tags


def random_corpus(
    rng: random.Random,
    n_docs: int = 3,
    sents_per_doc: tuple[int, int] = (1, 4),
    tokens_per_sent: tuple[int, int] = (1, 12),
    words: list[str] | None = None,
    etypes: list[str] | None = None,
    partition: str = "other",
) -> Corpus:
    words = words or WORDS
    sentences = []
    for d in range(n_docs):
        doc = f"doc{d:03d}"
        for si in range(rng.randint(*sents_per_doc)):
            n = rng.randint(*tokens_per_sent)
            tags = random_tags(rng, n, etypes)
            toks = tuple(
                LabeledToken(rng.choice(words), tag) for tag in tags
            )
            sentences.append(Sentence(doc, si, toks))
    return Corpus(partition, tuple(sentences))


def perturb_corpus(rng: random.Random, corpus: Corpus, rate: float = 0.4) -> Corpus:
    """Random re-annotation of a corpus: token texts stay fixed, tags of a
    fraction of sentences are redrawn. Produces valid BIO2 output including
    incidental splits/merges/retypes against the original.
    """
    new_sentences = []
    for s in corpus.sentences:
        if rng.random() < rate and s.tokens:
            tags = random_tags(rng, len(s.tokens))
            toks = tuple(LabeledToken(t.text, tag) for t, tag in zip(s.tokens, tags))
            new_sentences.append(Sentence(s.doc_id, s.sent_index, toks))
        else:
            new_sentences.append(s)
    return Corpus(corpus.partition, tuple(new_sentences))


def sentence(doc: str, idx: int, pairs: list[tuple[str, str]]) -> Sentence:
    return Sentence(doc, idx, tuple(LabeledToken(w, t) for w, t in pairs))


def mention_of(sent: Sentence, start: int, end: int, etype: str) -> Mention:
    surface = " ".join(t.text for t in sent.tokens[start:end])
    return Mention(sent.doc_id, sent.sent_index, start, end, etype, surface)
