"""Exact-match span-level scoring and run-to-run comparison.

A predicted mention is a true positive iff the gold corpus contains a
mention with the same sentence, start, end, and entity type; everything
else is a false positive / false negative. Precision, recall, and F1 are
percentages, micro-aggregated overall and reported per type.

`compare` turns two scores into a delta plus the relative error reduction
100 * delta / (100 - old_f1): the share of the previously remaining error
that the new run removed. Values are computed at full precision and rounded
half-up to two decimals only for presentation.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .corpus import Corpus, extract_mentions

__all__ = [
    "DeltaReport",
    "ScoreReport",
    "TypeScore",
    "compare",
    "round2",
    "score",
]


def round2(x: float) -> float:
    """Half-up rounding to 2 decimals (presentation only)."""
    return float(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = 100.0 * tp / (tp + fp) if tp + fp else 0.0
    r = 100.0 * tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass(frozen=True, slots=True)
class TypeScore:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[0]

    @property
    def recall(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[1]

    @property
    def f1(self) -> float:
        return _prf(self.tp, self.fp, self.fn)[2]

    def to_json(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass(frozen=True)
class ScoreReport:
    per_type: dict[str, TypeScore]
    overall: TypeScore

    def to_json(self) -> dict:
        return {
            "overall": self.overall.to_json(),
            "per_type": {t: s.to_json() for t, s in sorted(self.per_type.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ScoreReport":
        per_type = {
            t: TypeScore(s["tp"], s["fp"], s["fn"]) for t, s in obj["per_type"].items()
        }
        o = obj["overall"]
        return cls(per_type, TypeScore(o["tp"], o["fp"], o["fn"]))


def score(gold: Corpus, pred: Corpus) -> ScoreReport:
    """Micro-averaged exact-match P/R/F1 of a prediction against gold."""
    if len(gold.sentences) != len(pred.sentences):
        raise ValueError(
            f"sentence count differs: gold {len(gold.sentences)}, pred {len(pred.sentences)}"
        )
    counts: dict[str, list[int]] = {}
    for g, p in zip(gold.sentences, pred.sentences):
        if g.texts() != p.texts():
            raise ValueError(
                f"token texts differ at {g.doc_id}[{g.sent_index}]; "
                "gold and prediction must share tokenization"
            )
        g_set = {(m.start, m.end, m.etype) for m in extract_mentions(g)}
        p_set = {(m.start, m.end, m.etype) for m in extract_mentions(p)}
        for _, _, t in g_set & p_set:
            counts.setdefault(t, [0, 0, 0])[0] += 1
        for _, _, t in p_set - g_set:
            counts.setdefault(t, [0, 0, 0])[1] += 1
        for _, _, t in g_set - p_set:
            counts.setdefault(t, [0, 0, 0])[2] += 1

    per_type = {t: TypeScore(*c) for t, c in counts.items()}
    overall = TypeScore(
        sum(s.tp for s in per_type.values()),
        sum(s.fp for s in per_type.values()),
        sum(s.fn for s in per_type.values()),
    )
    return ScoreReport(per_type, overall)


@dataclass(frozen=True, slots=True)
class DeltaReport:
    old_f1: float
    new_f1: float

    @property
    def delta(self) -> float:
        return self.new_f1 - self.old_f1

    @property
    def err_reduction(self) -> float | None:
        """Share of the remaining error removed; None when old_f1 is 100."""
        if self.old_f1 >= 100.0:
            return None
        return 100.0 * self.delta / (100.0 - self.old_f1)

    def to_json(self) -> dict:
        return {
            "old_f1": self.old_f1,
            "new_f1": self.new_f1,
            "delta": self.delta,
            "err_reduction": self.err_reduction,
        }


def compare(
    old: ScoreReport | float, new: ScoreReport | float
) -> DeltaReport:
    """Overall delta and relative error reduction between two runs."""
    old_f1 = old.overall.f1 if isinstance(old, ScoreReport) else float(old)
    new_f1 = new.overall.f1 if isinstance(new, ScoreReport) else float(new)
    for v in (old_f1, new_f1):
        if not 0.0 <= v <= 100.0:
            raise ValueError(f"F1 {v} outside [0, 100]")
    return DeltaReport(old_f1, new_f1)


def compare_per_type(old: ScoreReport, new: ScoreReport) -> dict[str, DeltaReport]:
    """One DeltaReport per entity type present in either report."""
    types = sorted(set(old.per_type) | set(new.per_type))
    zero = TypeScore(0, 0, 0)
    return {
        t: DeltaReport(old.per_type.get(t, zero).f1, new.per_type.get(t, zero).f1)
        for t in types
    }
