"""Guideline-derived correction rules, the decision log, and replay.

Rules scan mentions and either propose a concrete span edit (for a human to
accept or reject) or raise a review-only candidate when an automatic edit
would be unsafe. Human verdicts are appended to a JSON-lines decision log;
`replay` folds the log over a corpus deterministically, skipping (and
reporting) any proposal whose target has meanwhile changed.

The built-in rules:

* leading_determiner: mentions starting with "the"/"a"/"an" (any case) that
  are neither DATE nor TIME lose their first token.
* trailing_possessive: a final "'s" or lone apostrophe token is dropped;
  single-token possessive forms ("McDonald's") are review-only, since many
  names legitimately end that way.
* edge_punctuation: maximal runs of punctuation-only tokens are trimmed from
  both edges in one proposal; mentions that are nothing but punctuation are
  review-only (deleting is a human call).
"""
from __future__ import annotations

import hashlib
import json
import unicodedata
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, NamedTuple

from .corpus import (
    Corpus,
    EditError,
    EditOperation,
    LabeledToken,
    Mention,
    Sentence,
    edit_tags,
    extract_mentions,
)
from .detector import Candidate, candidate_id

__all__ = [
    "Decision",
    "EditProposal",
    "DEFAULT_RULES",
    "ReplayReport",
    "Rule",
    "ScanResult",
    "UnknownProposalError",
    "append_decision",
    "effective_decisions",
    "load_decisions",
    "load_proposals",
    "replay",
    "rule_edge_punctuation",
    "rule_leading_determiner",
    "rule_trailing_possessive",
    "save_proposals",
    "scan",
]

DETERMINERS = frozenset({"the", "a", "an"})
DETERMINER_EXEMPT_TYPES = frozenset({"DATE", "TIME"})
# ASCII and typographic apostrophe variants; corpora mix both
POSSESSIVE_MARKERS = frozenset({"'s", "’s", "'", "’"})

VERDICTS = ("accept", "reject", "modify", "ambiguous")


@dataclass(frozen=True, slots=True)
class EditProposal:
    id: str
    rule_id: str
    target: Mention
    operation: EditOperation

    def to_json(self) -> dict:
        t = self.target
        return {
            "id": self.id,
            "rule_id": self.rule_id,
            "target": {
                "doc_id": t.doc_id,
                "sent_index": t.sent_index,
                "start": t.start,
                "end": t.end,
                "etype": t.etype,
                "surface": t.surface,
            },
            "operation": self.operation.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EditProposal":
        t = obj["target"]
        return cls(
            id=obj["id"],
            rule_id=obj["rule_id"],
            target=Mention(
                t["doc_id"], t["sent_index"], t["start"], t["end"], t["etype"], t["surface"]
            ),
            operation=EditOperation.from_json(obj["operation"]),
        )


def proposal_id(rule_id: str, target: Mention, operation: EditOperation) -> str:
    payload = "|".join(
        [
            rule_id,
            target.doc_id,
            str(target.sent_index),
            str(target.start),
            str(target.end),
            target.etype,
            json.dumps(operation.to_json(), sort_keys=True),
        ]
    )
    return hashlib.sha1(payload.encode("utf-8")).hexdigest()[:16]


def make_proposal(rule_id: str, target: Mention, operation: EditOperation) -> EditProposal:
    return EditProposal(proposal_id(rule_id, target, operation), rule_id, target, operation)


# ---------------------------------------------------------------------------
# the rules


def rule_leading_determiner(m: Mention) -> EditProposal | None:
    tokens = m.surface.split(" ")
    if len(tokens) < 2:  # shrinking would empty the span
        return None
    if tokens[0].lower() in DETERMINERS and m.etype not in DETERMINER_EXEMPT_TYPES:
        return make_proposal("leading_determiner", m, EditOperation.shrink(left=1))
    return None


def rule_trailing_possessive(m: Mention) -> EditProposal | None:
    tokens = m.surface.split(" ")
    if len(tokens) >= 2 and tokens[-1] in POSSESSIVE_MARKERS:
        return make_proposal("trailing_possessive", m, EditOperation.shrink(right=1))
    return None


def _possessive_review(m: Mention) -> str | None:
    tokens = m.surface.split(" ")
    if len(tokens) == 1 and tokens[0] not in POSSESSIVE_MARKERS:
        if tokens[0].endswith(("'s", "’s")) and len(tokens[0]) > 2:
            return "single-token possessive form; shrink only if the marker is spurious"
    if len(tokens) == 1 and tokens[0] in POSSESSIVE_MARKERS:
        return "mention is only a possessive marker; consider deletion"
    return None


def _is_punct_token(text: str) -> bool:
    # Unicode punctuation plus the backtick quoting used in CoNLL-style text
    return bool(text) and all(
        unicodedata.category(ch).startswith("P") or ch in "`´" for ch in text
    )


def rule_edge_punctuation(m: Mention) -> EditProposal | None:
    tokens = m.surface.split(" ")
    n = len(tokens)
    left = 0
    while left < n and _is_punct_token(tokens[left]):
        left += 1
    right = 0
    while right < n - left and _is_punct_token(tokens[n - 1 - right]):
        right += 1
    if left + right == 0 or left + right >= n:
        return None
    return make_proposal("edge_punctuation", m, EditOperation.shrink(left=left, right=right))


def _punctuation_review(m: Mention) -> str | None:
    tokens = m.surface.split(" ")
    if all(_is_punct_token(t) for t in tokens):
        return "mention consists only of punctuation; consider deletion"
    return None


def _no_review(m: Mention) -> str | None:
    return None


@dataclass(frozen=True)
class Rule:
    """A named, independently toggleable correction rule.

    `propose` returns a concrete edit for human review; `review` returns a
    note for cases the rule recognizes but refuses to edit automatically.
    """

    rule_id: str
    propose: Callable[[Mention], EditProposal | None]
    review: Callable[[Mention], str | None] = _no_review


DEFAULT_RULES: dict[str, Rule] = {
    "leading_determiner": Rule("leading_determiner", rule_leading_determiner),
    "trailing_possessive": Rule(
        "trailing_possessive", rule_trailing_possessive, _possessive_review
    ),
    "edge_punctuation": Rule(
        "edge_punctuation", rule_edge_punctuation, _punctuation_review
    ),
}


class ScanResult(NamedTuple):
    proposals: list[EditProposal]
    review_candidates: list[Candidate]


def scan(corpus: Corpus, rules: Iterable[str] | None = None) -> ScanResult:
    """Run rules over every mention.

    Proposals come back ordered by (doc_id, sent_index, start, rule_id);
    review-only findings are deduplicated into candidates exactly like the
    detector's (one candidate per unique surface/type/rule with occurrences).
    """
    selected = [DEFAULT_RULES[name] for name in (rules or DEFAULT_RULES)]
    proposals: list[EditProposal] = []
    review: dict[tuple, list] = {}
    review_order: list[tuple] = []
    for sentence in corpus.sentences:
        mentions = extract_mentions(sentence)
        if not mentions:
            continue
        texts = None
        for m in mentions:
            for rule in selected:
                p = rule.propose(m)
                if p is not None:
                    proposals.append(p)
                    continue
                note = rule.review(m)
                if note is None:
                    continue
                key = (m.surface, m.etype, rule.rule_id)
                bucket = review.get(key)
                if bucket is None:
                    if texts is None:
                        texts = sentence.texts()
                    review[key] = [m, texts, [m], note]
                    review_order.append(key)
                else:
                    bucket[2].append(m)
    proposals.sort(key=lambda p: (p.target.doc_id, p.target.sent_index, p.target.start, p.rule_id))

    candidates = []
    for key in review_order:
        m, texts, occurrences, note = review[key]
        candidates.append(
            Candidate(
                id=candidate_id("rule", m.surface, m.etype, key[2]),
                mention=m,
                flags=(),
                source="rule",
                context=texts,
                occurrences=tuple(occurrences),
                rule_id=key[2],
                note=note,
            )
        )
    candidates.sort(key=lambda c: (-len(c.occurrences), c.mention.surface, c.mention.etype))
    return ScanResult(proposals, candidates)


# ---------------------------------------------------------------------------
# decisions and replay


@dataclass(frozen=True, slots=True)
class Decision:
    proposal_id: str
    verdict: str  # accept | reject | modify | ambiguous
    actor: str
    timestamp: str  # ISO-8601
    replacement: EditProposal | None = None

    def to_json(self) -> dict:
        out = {
            "proposal_id": self.proposal_id,
            "verdict": self.verdict,
            "actor": self.actor,
            "timestamp": self.timestamp,
        }
        if self.replacement is not None:
            out["replacement"] = self.replacement.to_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Decision":
        replacement = obj.get("replacement")
        return cls(
            proposal_id=obj["proposal_id"],
            verdict=obj["verdict"],
            actor=obj.get("actor", ""),
            timestamp=obj.get("timestamp", ""),
            replacement=EditProposal.from_json(replacement) if replacement else None,
        )


def decide(
    proposal_id: str,
    verdict: str,
    actor: str,
    replacement: EditProposal | None = None,
    timestamp: str | None = None,
) -> Decision:
    if verdict not in VERDICTS:
        raise ValueError(f"unknown verdict {verdict!r}")
    if verdict == "modify" and replacement is None:
        raise ValueError("modify requires a replacement proposal")
    ts = timestamp or datetime.now(timezone.utc).isoformat()
    return Decision(proposal_id, verdict, actor, ts, replacement)


def append_decision(path: str | Path, decision: Decision) -> None:
    """Append one decision line; the log is never rewritten."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(decision.to_json(), ensure_ascii=False) + "\n")


def load_decisions(path: str | Path) -> list[Decision]:
    p = Path(path)
    if not p.exists():
        return []
    out = []
    with open(p, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(Decision.from_json(json.loads(line)))
    return out


def effective_decisions(decisions: Iterable[Decision]) -> dict[str, Decision]:
    """Last decision per proposal id wins; earlier lines stay in the log."""
    out: dict[str, Decision] = {}
    for d in decisions:
        out[d.proposal_id] = d
    return out


def save_proposals(path: str | Path, proposals: Iterable[EditProposal]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in proposals:
            fh.write(json.dumps(p.to_json(), ensure_ascii=False) + "\n")


def load_proposals(path: str | Path) -> list[EditProposal]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(EditProposal.from_json(json.loads(line)))
    return out


class UnknownProposalError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class ReplayReport:
    applied: int
    skipped_stale: int
    rejected: int
    ambiguous: int
    pending: int
    applied_ids: tuple[str, ...]
    skipped_ids: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "applied": self.applied,
            "skipped_stale": self.skipped_stale,
            "rejected": self.rejected,
            "ambiguous": self.ambiguous,
            "pending": self.pending,
            "applied_ids": list(self.applied_ids),
            "skipped_ids": list(self.skipped_ids),
        }


class ReplayResult(NamedTuple):
    corpus: Corpus
    report: ReplayReport


def replay(
    corpus: Corpus,
    decisions: Iterable[Decision],
    proposals: Iterable[EditProposal],
) -> ReplayResult:
    """Fold accepted decisions over the corpus in scan order.

    Stale targets (the recorded mention no longer matches the working state)
    are skipped and reported, never applied. A decision whose id matches no
    proposal raises UnknownProposalError; `modify` verdicts carry their own
    replacement and are exempt from that check.
    """
    proposal_list = list(proposals)
    by_id = {p.id: p for p in proposal_list}
    effective = effective_decisions(decisions)
    for pid, d in effective.items():
        if pid not in by_id and d.verdict != "modify":
            raise UnknownProposalError(f"decision references unknown proposal {pid!r}")

    chosen: list[EditProposal] = []
    rejected = ambiguous = 0
    decided_ids = set()
    for pid, d in effective.items():
        decided_ids.add(pid)
        if d.verdict == "accept":
            chosen.append(by_id[pid])
        elif d.verdict == "modify":
            if d.replacement is None:
                raise ValueError(f"modify decision for {pid!r} lacks a replacement")
            chosen.append(d.replacement)
        elif d.verdict == "reject":
            rejected += 1
        else:
            ambiguous += 1
    pending = sum(1 for p in proposal_list if p.id not in decided_ids)
    chosen.sort(
        key=lambda p: (p.target.doc_id, p.target.sent_index, p.target.start, p.rule_id)
    )

    # working tag state per touched sentence; corpus rebuilt once at the end
    working: dict[tuple[str, int], list[str]] = {}
    applied_ids: list[str] = []
    skipped_ids: list[str] = []
    for p in chosen:
        t = p.target
        key = (t.doc_id, t.sent_index)
        sentence = corpus.locate(*key)
        if sentence is None:
            skipped_ids.append(p.id)
            continue
        tags = working.get(key)
        if tags is None:
            tags = [tok.tag for tok in sentence.tokens]
        probe = Sentence(t.doc_id, t.sent_index, tuple(
            LabeledToken(tok.text, tag) for tok, tag in zip(sentence.tokens, tags)
        ))
        if t not in extract_mentions(probe):
            skipped_ids.append(p.id)
            continue
        try:
            working[key] = edit_tags(tags, t.start, t.end, t.etype, p.operation)
        except EditError:
            skipped_ids.append(p.id)
            continue
        applied_ids.append(p.id)

    if working:
        new_sentences = []
        for s in corpus.sentences:
            tags = working.get((s.doc_id, s.sent_index))
            if tags is None:
                new_sentences.append(s)
            else:
                new_sentences.append(
                    Sentence(
                        s.doc_id,
                        s.sent_index,
                        tuple(LabeledToken(t.text, tag) for t, tag in zip(s.tokens, tags)),
                    )
                )
        out = Corpus(corpus.partition, tuple(new_sentences), corpus.source_meta)
    else:
        out = corpus

    report = ReplayReport(
        applied=len(applied_ids),
        skipped_stale=len(skipped_ids),
        rejected=rejected,
        ambiguous=ambiguous,
        pending=pending,
        applied_ids=tuple(applied_ids),
        skipped_ids=tuple(skipped_ids),
    )
    return ReplayResult(out, report)
