"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its runtime (visible under `pytest -s`).

Run with:  pytest tests/test_acceptance.py -v -s
"""
from __future__ import annotations

import math
import random
import time

import pytest

from neraudit.corpus import (
    Corpus,
    parse_corpus,
    serialize_corpus,
    validate_corpus,
)
from neraudit.detector import classify_token, build_profile, cross_validated_flags
from neraudit.diffstats import align_mentions, classify_one_to_one, diff_corpora
from neraudit.rules import decide, replay, scan
from neraudit.scorer import compare, round2, score
from neraudit.synth import synthetic_corpus
from .helpers import (
    oracle_classify,
    oracle_profile,
    oracle_score,
    perturb_corpus,
    random_corpus,
    sentence,
)


def report(name: str, started: float, budget: float | None = None) -> None:
    elapsed = time.perf_counter() - started
    line = f"ACCEPTANCE {name}: PASS ({elapsed:.2f}s"
    if budget is not None:
        line += f" / budget {budget:.0f}s"
        assert elapsed < budget, f"{name} exceeded runtime budget: {elapsed:.1f}s"
    print(line + ")")


def test_error_reduction_regression():
    t0 = time.perf_counter()
    rows = [
        (89.70, 90.97, 1.27, 12.33),
        (89.51, 90.54, 1.03, 9.82),
        (85.92, 87.52, 1.60, 11.36),
        (89.58, 90.59, 1.01, 9.69),
    ]
    for old, new, delta, err in rows:
        d = compare(old, new)
        assert abs(round2(d.delta) - delta) <= 0.01, (old, new)
        assert abs(round2(d.err_reduction) - err) <= 0.01, (old, new)
    report("error-reduction regression (4 published rows, +/-0.01pp)", t0)


def test_scorer_oracle_equivalence():
    t0 = time.perf_counter()
    checked = 0
    for seed in range(200):
        rng = random.Random(seed)
        gold = random_corpus(
            rng, n_docs=1, sents_per_doc=(1, 10), tokens_per_sent=(1, 15)
        )
        pred = perturb_corpus(rng, gold, rate=0.7)
        got = score(gold, pred)
        want = oracle_score(gold, pred)

        def close(a: float, b: float) -> bool:
            return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)

        wtp, wfp, wfn, wp, wr, wf = want["overall"]
        assert (got.overall.tp, got.overall.fp, got.overall.fn) == (wtp, wfp, wfn)
        assert close(got.overall.precision, wp) and close(got.overall.recall, wr)
        assert close(got.overall.f1, wf)
        assert set(got.per_type) == set(want["per_type"])
        for t, (tp, fp, fn, p, r, f) in want["per_type"].items():
            s = got.per_type[t]
            assert (s.tp, s.fp, s.fn) == (tp, fp, fn)
            assert close(s.precision, p) and close(s.recall, r) and close(s.f1, f)
            checked += 1
    assert checked > 200
    report("scorer vs brute-force matcher (200 random pairs, 1e-9 rel)", t0, budget=10)


def test_diff_conservation_and_symmetry():
    t0 = time.perf_counter()
    for seed in range(500):
        rng = random.Random(seed)
        a = random_corpus(rng, n_docs=2, sents_per_doc=(1, 3), tokens_per_sent=(1, 12))
        b = perturb_corpus(rng, a, rate=0.5)
        fwd = diff_corpora(a, b)

        # conservation, recomputed from an independent link enumeration
        split_gain = merged_loss = complex_gain = 0
        for old_s, new_s in zip(a.sentences, b.sentences):
            for link in align_mentions(old_s, new_s).links:
                if link.kind == "split":
                    split_gain += len(link.new) - 1
                elif link.kind == "merged":
                    merged_loss += len(link.old) - 1
                elif link.kind == "complex":
                    complex_gain += len(link.new) - len(link.old)
        assert fwd.mentions_after == (
            fwd.mentions_before
            + fwd.categories["added"]
            - fwd.categories["deleted"]
            + split_gain
            - merged_loss
            + complex_gain
        ), seed

        # diff(a, a) is the zero report
        same = diff_corpora(a, a)
        assert same.tokens_changed == 0 and same.sentences_changed == 0
        assert sum(same.categories.values()) == 0
        assert all(v["delta"] == 0 for v in same.per_type.values())

        # diff(b, a) mirrors diff(a, b)
        bwd = diff_corpora(b, a)
        assert bwd.categories["added"] == fwd.categories["deleted"]
        assert bwd.categories["deleted"] == fwd.categories["added"]
        assert bwd.categories["split"] == fwd.categories["merged"]
        assert bwd.categories["merged"] == fwd.categories["split"]
        for k in ("span_only", "type_only", "span_and_type", "complex"):
            assert bwd.categories[k] == fwd.categories[k]
        assert bwd.tokens_changed == fwd.tokens_changed
        for t, v in fwd.per_type.items():
            assert bwd.per_type.get(t, {"delta": 0})["delta"] == -v["delta"]
    report("diff conservation/zero/symmetry (500 random pairs)", t0, budget=30)


def test_diff_taxonomy_fixtures():
    t0 = time.perf_counter()
    # product name split into maker + product
    old = sentence("d", 0, [("Lada", "B-PRODUCT"), ("Niva", "I-PRODUCT")])
    new = sentence("d", 0, [("Lada", "B-ORG"), ("Niva", "B-PRODUCT")])
    assert [l.kind for l in align_mentions(old, new).links] == ["split"]

    # date + time merged into one time span
    old = sentence("d", 0, [("Sunday", "B-DATE"), ("evening", "B-TIME")])
    new = sentence("d", 0, [("Sunday", "B-TIME"), ("evening", "I-TIME")])
    assert [l.kind for l in align_mentions(old, new).links] == ["merged"]

    # determiner dropped from the span, type kept
    old = sentence("d", 0, [("the", "B-GPE"), ("US", "I-GPE")])
    new = sentence("d", 0, [("the", "O"), ("US", "B-GPE")])
    links = align_mentions(old, new).links
    assert [l.kind for l in links] == ["one_to_one"]
    assert classify_one_to_one(links[0].old[0], links[0].new[0]) == "span_only"

    # city retyped from LOC to GPE, span kept
    old = sentence("d", 0, [("NYC", "B-LOC")])
    new = sentence("d", 0, [("NYC", "B-GPE")])
    links = align_mentions(old, new).links
    assert [l.kind for l in links] == ["one_to_one"]
    assert classify_one_to_one(links[0].old[0], links[0].new[0]) == "type_only"

    # and the same four through the aggregate report
    olds = Corpus(
        "a",
        (
            sentence("d", 0, [("Lada", "B-PRODUCT"), ("Niva", "I-PRODUCT")]),
            sentence("d", 1, [("Sunday", "B-DATE"), ("evening", "B-TIME")]),
            sentence("d", 2, [("the", "B-GPE"), ("US", "I-GPE")]),
            sentence("d", 3, [("NYC", "B-LOC")]),
        ),
    )
    news = Corpus(
        "b",
        (
            sentence("d", 0, [("Lada", "B-ORG"), ("Niva", "B-PRODUCT")]),
            sentence("d", 1, [("Sunday", "B-TIME"), ("evening", "I-TIME")]),
            sentence("d", 2, [("the", "O"), ("US", "B-GPE")]),
            sentence("d", 3, [("NYC", "B-GPE")]),
        ),
    )
    r = diff_corpora(olds, news)
    assert r.categories["split"] == 1
    assert r.categories["merged"] == 1
    assert r.categories["span_only"] == 1
    assert r.categories["type_only"] == 1
    report("diff taxonomy fixtures (split/merge/span-only/type-only)", t0)


def test_detector_oracle_and_leakage():
    t0 = time.perf_counter()
    occurrences_checked = 0
    for seed in range(100):
        rng = random.Random(seed)
        reference = random_corpus(rng, n_docs=3, sents_per_doc=(1, 4))
        target = random_corpus(rng, n_docs=2, sents_per_doc=(1, 4))
        profile = build_profile(reference)
        table = oracle_profile(reference)
        for s in target.sentences:
            for tok in s.tokens:
                if tok.tag == "O":
                    continue
                got = classify_token(profile, tok.text, tok.tag[2:])
                want = oracle_classify(table, tok.text, tok.tag[2:])
                assert (got.value if got else None) == want, (seed, tok)
                occurrences_checked += 1
    assert occurrences_checked > 1000

    # zero cross-fold leakage for unseen flags under 10-fold CV
    for seed in range(5):
        rng = random.Random(1000 + seed)
        train = random_corpus(rng, n_docs=12, sents_per_doc=(1, 4))
        k = 10
        cands = cross_validated_flags(train, k=k, seed=seed)
        docs = []
        for s in train.sentences:
            if s.doc_id not in docs:
                docs.append(s.doc_id)
        shuffled = list(docs)
        random.Random(seed).shuffle(shuffled)
        fold_of = {d: i % k for i, d in enumerate(shuffled)}
        occ_folds: dict[str, set[int]] = {}
        for s in train.sentences:
            for tok in s.tokens:
                occ_folds.setdefault(tok.text, set()).add(fold_of[s.doc_id])
        for c in cands:
            for off, flag in c.flags:
                if flag.value != "unseen-I":
                    continue
                for m in c.occurrences:
                    text = train.locate(m.doc_id, m.sent_index).tokens[m.start + off].text
                    assert occ_folds[text] == {fold_of[m.doc_id]}, (seed, text)
    report("detector oracle (100 corpora) + CV leakage-freedom", t0, budget=20)


def test_rule_engine_determinism_and_idempotence():
    t0 = time.perf_counter()
    base = random_corpus(random.Random(0), n_docs=4)
    first = scan(base)
    second = scan(base)
    assert [p.to_json() for p in first.proposals] == [p.to_json() for p in second.proposals]
    assert [c.to_json() for c in first.review_candidates] == [
        c.to_json() for c in second.review_candidates
    ]

    for seed in range(200):
        rng = random.Random(seed)
        corpus = random_corpus(rng, n_docs=2, sents_per_doc=(1, 3))
        proposals = scan(corpus).proposals
        log = [
            decide(p.id, rng.choice(["accept", "accept", "reject"]), actor="acc")
            for p in proposals
            if rng.random() < 0.9
        ]
        once, _ = replay(corpus, log, proposals)
        twice, _ = replay(once, log, proposals)
        assert twice.sentences == once.sentences, seed
        assert validate_corpus(once) == [], seed
        assert [s.texts() for s in once] == [s.texts() for s in corpus], seed
    report("rule engine determinism + replay idempotence (200 pairs)", t0, budget=20)


ROUND_TRIP_FIXTURES = [
    "",
    "US B-GPE\neconomy O\n",
    "# bn/voa_0001\nUS B-GPE\neconomy O\n\nBoris B-PERSON\nYelstin I-PERSON\n\n# nw/wsj_0002\nthe O\n",
    "a O\n\nb B-ORG\nc I-ORG\n\nd O\n",
]


def _misaligned_section(seed: int) -> str:
    """Corpus whose middle section has tags shifted two rows off the tokens,
    like a column-misalignment corruption."""
    rng = random.Random(seed)
    c = random_corpus(rng, n_docs=2, sents_per_doc=(3, 5), tokens_per_sent=(4, 10))
    lines = serialize_corpus(c).splitlines()
    token_rows = [i for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    section = token_rows[len(token_rows) // 3 : 2 * len(token_rows) // 3]
    tags = [lines[i].split()[1] for i in section]
    shifted = tags[2:] + tags[:2]
    for i, tag in zip(section, shifted):
        lines[i] = f"{lines[i].split()[0]} {tag}"
    return "\n".join(lines) + "\n"


def test_round_trip_and_repair_idempotence():
    t0 = time.perf_counter()
    fixtures = list(ROUND_TRIP_FIXTURES)
    for seed in range(50):
        c = random_corpus(random.Random(seed), n_docs=2)
        fixtures.append(serialize_corpus(c))
    for fx in fixtures:
        corpus, violations = parse_corpus(fx)
        assert violations == []
        assert serialize_corpus(corpus) == fx

    for seed in range(30):
        corrupted = _misaligned_section(seed)
        repaired, violations = parse_corpus(corrupted, repair=True)
        again, violations2 = parse_corpus(serialize_corpus(repaired), repair=True)
        assert violations2 == [], seed  # repair is idempotent
        assert again.sentences == repaired.sentences, seed
        assert validate_corpus(repaired) == [], seed
    report("round-trip byte identity + repair idempotence", t0, budget=5)


@pytest.mark.slow
def test_paper_scale_throughput():
    corpus = synthetic_corpus(2_000_000, n_docs=120, seed=7)  # generation untimed
    assert corpus.n_tokens >= 2_000_000
    t0 = time.perf_counter()
    candidates = cross_validated_flags(corpus, k=10, seed=7)
    result = scan(corpus)
    log = [decide(p.id, "accept", actor="bench") for p in result.proposals]
    corrected, replay_report = replay(corpus, log, result.proposals)
    diff_report = diff_corpora(corpus, corrected)
    elapsed = time.perf_counter() - t0
    assert candidates and result.proposals
    assert replay_report.applied == len(result.proposals)
    assert diff_report.tokens_changed > 0
    assert elapsed < 60, f"2M-token pipeline took {elapsed:.1f}s"
    print(
        f"ACCEPTANCE 2M-token detect+scan+replay+diff: PASS ({elapsed:.2f}s / budget 60s; "
        f"{len(candidates)} candidates, {len(result.proposals)} proposals, "
        f"{diff_report.tokens_changed} changed tokens)"
    )
