"""Change statistics between two versions of the same corpus.

Both versions must tokenize identically; only tags may differ. Mentions of a
sentence pair are aligned by token-footprint overlap: each connected
component of the old/new overlap graph becomes one link, classified as

    deleted      old mention with no overlapping new mention
    added        new mention with no overlapping old mention
    one_to_one   exactly one on each side (further split into unchanged /
                 span_only / type_only / span_and_type)
    split        one old mention overlapping two or more new ones
    merged       two or more old mentions overlapping one new one
    complex      two-or-more against two-or-more; rare, reported separately
                 so split/merged counts are never double-counted

The aggregate report carries token/sentence change rates, the category
counts (unchanged links excluded), and per-entity-type frequency deltas with
percentages relative to the old version's counts.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .corpus import Corpus, Mention, Sentence, extract_mentions
from .encoding import encode_corpus

__all__ = [
    "AlignmentLink",
    "DiffReport",
    "MentionAlignment",
    "align_mentions",
    "classify_one_to_one",
    "diff_corpora",
    "render_tables",
]

CATEGORIES = (
    "deleted",
    "added",
    "span_only",
    "type_only",
    "span_and_type",
    "split",
    "merged",
    "complex",
)


@dataclass(frozen=True, slots=True)
class AlignmentLink:
    old: tuple[Mention, ...]
    new: tuple[Mention, ...]
    kind: str  # deleted | added | one_to_one | split | merged | complex


@dataclass(frozen=True, slots=True)
class MentionAlignment:
    links: tuple[AlignmentLink, ...]


def classify_one_to_one(old_m: Mention, new_m: Mention) -> str:
    span_same = (old_m.start, old_m.end) == (new_m.start, new_m.end)
    type_same = old_m.etype == new_m.etype
    if span_same and type_same:
        return "unchanged"
    if type_same:
        return "span_only"
    if span_same:
        return "type_only"
    return "span_and_type"


def align_mentions(old_s: Sentence, new_s: Sentence) -> MentionAlignment:
    """Connected-component alignment of one sentence pair's mentions."""
    if old_s.texts() != new_s.texts():
        raise ValueError(
            f"token texts differ at {old_s.doc_id}[{old_s.sent_index}]; "
            "re-tokenized corpora cannot be diffed"
        )
    old_mentions = extract_mentions(old_s)
    new_mentions = extract_mentions(new_s)
    n_tokens = len(old_s.tokens)

    old_at = [-1] * n_tokens
    for i, m in enumerate(old_mentions):
        for p in range(m.start, m.end):
            old_at[p] = i

    # union-find over old (0..) and new (offset by len(old_mentions)) nodes
    parent = list(range(len(old_mentions) + len(new_mentions)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for j, m in enumerate(new_mentions):
        for p in range(m.start, m.end):
            if old_at[p] >= 0:
                union(old_at[p], len(old_mentions) + j)

    components: dict[int, tuple[list[Mention], list[Mention]]] = {}
    order: list[int] = []
    for i, m in enumerate(old_mentions):
        root = find(i)
        if root not in components:
            components[root] = ([], [])
            order.append(root)
        components[root][0].append(m)
    for j, m in enumerate(new_mentions):
        root = find(len(old_mentions) + j)
        if root not in components:
            components[root] = ([], [])
            order.append(root)
        components[root][1].append(m)

    links = []
    for root in order:
        old_part, new_part = components[root]
        if not new_part:
            kind = "deleted"
        elif not old_part:
            kind = "added"
        elif len(old_part) == 1 and len(new_part) == 1:
            kind = "one_to_one"
        elif len(old_part) == 1:
            kind = "split"
        elif len(new_part) == 1:
            kind = "merged"
        else:
            kind = "complex"
        links.append(AlignmentLink(tuple(old_part), tuple(new_part), kind))
    return MentionAlignment(tuple(links))


@dataclass(frozen=True)
class DiffReport:
    tokens_changed: int
    tokens_total: int
    sentences_changed: int
    sentences_total: int
    mentions_before: int
    mentions_after: int
    categories: dict[str, int]
    per_type: dict[str, dict]  # type -> {before, after, delta, pct|None}

    @property
    def tokens_pct(self) -> float:
        return 100.0 * self.tokens_changed / self.tokens_total if self.tokens_total else 0.0

    @property
    def sentences_pct(self) -> float:
        return (
            100.0 * self.sentences_changed / self.sentences_total
            if self.sentences_total
            else 0.0
        )

    def to_json(self) -> dict:
        return {
            "tokens": {
                "changed": self.tokens_changed,
                "total": self.tokens_total,
                "pct": self.tokens_pct,
            },
            "sentences": {
                "changed": self.sentences_changed,
                "total": self.sentences_total,
                "pct": self.sentences_pct,
            },
            "mentions": {"before": self.mentions_before, "after": self.mentions_after},
            "categories": {k: self.categories.get(k, 0) for k in CATEGORIES},
            "per_type": [
                {
                    "type": t,
                    "delta": v["delta"],
                    "pct": v["pct"],
                    "before": v["before"],
                    "after": v["after"],
                }
                for t, v in sorted(self.per_type.items())
            ],
        }


def _type_counts(types: Iterable[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for t in types:
        out[t] = out.get(t, 0) + 1
    return out


def diff_corpora(old: Corpus, new: Corpus) -> DiffReport:
    """Aggregate alignment statistics over all sentence pairs.

    Sentences whose tags are identical are fast-pathed; only changed pairs
    are aligned. The mention-count conservation identity is asserted before
    returning.
    """
    if len(old.sentences) != len(new.sentences):
        raise ValueError(
            f"sentence count differs: {len(old.sentences)} vs {len(new.sentences)}"
        )
    enc_old = encode_corpus(old)
    enc_new = encode_corpus(new)
    if (
        not np.array_equal(enc_old.sent_offsets, enc_new.sent_offsets)
        or not np.array_equal(enc_old.token_surface, enc_new.token_surface)
        or enc_old.surfaces != enc_new.surfaces
    ):
        raise ValueError("token texts differ; re-tokenized corpora cannot be diffed")

    # translate new-side type ids into the old id space to compare tags
    trans = enc_new.etype_translation(enc_old)
    if trans.size:
        new_etype_in_old = np.where(
            enc_new.token_etype >= 0,
            trans[np.maximum(enc_new.token_etype, 0)],
            np.int16(-1),
        )
    else:  # the new version carries no mentions at all
        new_etype_in_old = np.full(enc_new.n_tokens, -1, np.int16)
    changed_mask = (enc_old.prefix != enc_new.prefix) | (
        enc_old.token_etype != new_etype_in_old
    )
    tokens_changed = int(changed_mask.sum())
    offsets = enc_old.sent_offsets
    lengths = np.diff(offsets)
    if len(old) and lengths.min() > 0:
        per_sentence = np.add.reduceat(changed_mask.astype(np.int32), offsets[:-1])
    else:  # empty corpus or hand-built empty sentences: slow exact path
        per_sentence = np.array(
            [int(changed_mask[offsets[i] : offsets[i + 1]].sum()) for i in range(len(old))]
        )
    changed_rows = np.flatnonzero(per_sentence > 0)

    _, _, old_span_types, _ = kernels.bio_spans(
        enc_old.prefix, enc_old.token_etype, enc_old.sent_offsets
    )
    _, _, new_span_types, _ = kernels.bio_spans(
        enc_new.prefix, enc_new.token_etype, enc_new.sent_offsets
    )
    before_counts = _type_counts(enc_old.etype_names[t] for t in old_span_types)
    after_counts = _type_counts(enc_new.etype_names[t] for t in new_span_types)

    categories = {k: 0 for k in CATEGORIES}
    for row in changed_rows:
        alignment = align_mentions(old.sentences[row], new.sentences[row])
        for link in alignment.links:
            if link.kind == "one_to_one":
                sub = classify_one_to_one(link.old[0], link.new[0])
                if sub != "unchanged":
                    categories[sub] += 1
            else:
                categories[link.kind] += 1
    mentions_before = int(old_span_types.shape[0])
    mentions_after = int(new_span_types.shape[0])

    per_type: dict[str, dict] = {}
    for t in sorted(set(before_counts) | set(after_counts)):
        b = before_counts.get(t, 0)
        a = after_counts.get(t, 0)
        per_type[t] = {
            "before": b,
            "after": a,
            "delta": a - b,
            "pct": (100.0 * (a - b) / b) if b else None,
        }

    report = DiffReport(
        tokens_changed=tokens_changed,
        tokens_total=enc_old.n_tokens,
        sentences_changed=int(changed_rows.shape[0]),
        sentences_total=len(old.sentences),
        mentions_before=mentions_before,
        mentions_after=mentions_after,
        categories=categories,
        per_type=per_type,
    )
    _assert_conserved(report, old, new, changed_rows)
    return report


def _assert_conserved(report: DiffReport, old: Corpus, new: Corpus, changed_rows) -> None:
    """Mention mass must be fully explained by the link categories."""
    gain = 0
    for row in changed_rows:
        for link in align_mentions(old.sentences[row], new.sentences[row]).links:
            gain += len(link.new) - len(link.old)
    assert report.mentions_after == report.mentions_before + gain, (
        f"alignment lost mentions: {report.mentions_before} + {gain} != "
        f"{report.mentions_after}"
    )


def render_tables(report: DiffReport) -> str:
    """Two aligned text tables: change statistics and per-type deltas."""
    j = report.to_json()
    rows1 = [
        ("changed tokens", f"{j['tokens']['changed']} ({j['tokens']['pct']:.2f}%)"),
        (
            "changed sentences",
            f"{j['sentences']['changed']} ({j['sentences']['pct']:.2f}%)",
        ),
        ("mentions before", str(j["mentions"]["before"])),
        ("mentions after", str(j["mentions"]["after"])),
        ("deleted mentions", str(j["categories"]["deleted"])),
        ("added mentions", str(j["categories"]["added"])),
        ("span changed, type kept", str(j["categories"]["span_only"])),
        ("type changed, span kept", str(j["categories"]["type_only"])),
        ("span and type changed", str(j["categories"]["span_and_type"])),
        ("split into 2 or more", str(j["categories"]["split"])),
        ("merged from 2 or more", str(j["categories"]["merged"])),
        ("complex realignments", str(j["categories"]["complex"])),
    ]
    width = max(len(a) for a, _ in rows1)
    lines = ["change statistics", "-" * 40]
    lines += [f"{a:<{width}}  {b}" for a, b in rows1]
    lines += ["", "entity type frequency deltas", "-" * 40]
    lines.append(f"{'type':<14} {'delta':>7} {'pct':>9}")
    for row in j["per_type"]:
        pct = f"{row['pct']:+.2f}%" if row["pct"] is not None else "n/a"
        lines.append(f"{row['type']:<14} {row['delta']:>+7d} {pct:>9}")
    return "\n".join(lines) + "\n"
