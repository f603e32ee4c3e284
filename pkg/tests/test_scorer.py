from __future__ import annotations

import random

import pytest

from neraudit.corpus import Corpus, LabeledToken, Sentence
from neraudit.scorer import compare, compare_per_type, round2, score
from .helpers import oracle_score, perturb_corpus, random_corpus, sentence


class TestScore:
    def test_perfect_prediction(self):
        c = Corpus(
            "g",
            (
                sentence("d", 0, [("US", "B-GPE"), ("rose", "O")]),
                sentence("d", 1, [("Boris", "B-PERSON"), ("Yelstin", "I-PERSON")]),
            ),
        )
        r = score(c, c)
        assert r.overall.f1 == pytest.approx(100.0)
        assert all(s.f1 == pytest.approx(100.0) for s in r.per_type.values())

    def test_one_match_one_spurious(self):
        gold = Corpus(
            "g",
            (
                sentence(
                    "d", 0, [("US", "B-GPE"), ("met", "O"), ("Boris", "B-PERSON")]
                ),
            ),
        )
        pred = Corpus(
            "p",
            (
                sentence(
                    "d", 0, [("US", "B-GPE"), ("met", "B-ORG"), ("Boris", "O")]
                ),
            ),
        )
        r = score(gold, pred)
        # hand count: tp=1 (US/GPE), fp=1 (met/ORG), fn=1 (Boris/PERSON)
        assert (r.overall.tp, r.overall.fp, r.overall.fn) == (1, 1, 1)
        assert r.overall.precision == pytest.approx(50.0)
        assert r.overall.recall == pytest.approx(50.0)
        assert r.overall.f1 == pytest.approx(50.0)

    def test_wrong_type_is_fp_plus_fn(self):
        gold = Corpus("g", (sentence("d", 0, [("NYC", "B-LOC")]),))
        pred = Corpus("p", (sentence("d", 0, [("NYC", "B-GPE")]),))
        r = score(gold, pred)
        assert r.per_type["LOC"].fn == 1 and r.per_type["LOC"].f1 == 0.0
        assert r.per_type["GPE"].fp == 1 and r.per_type["GPE"].f1 == 0.0

    def test_micro_consistency(self):
        rng = random.Random(4)
        gold = random_corpus(rng, n_docs=3)
        pred = perturb_corpus(rng, gold, rate=0.5)
        r = score(gold, pred)
        assert r.overall.tp == sum(s.tp for s in r.per_type.values())
        assert r.overall.fp == sum(s.fp for s in r.per_type.values())
        assert r.overall.fn == sum(s.fn for s in r.per_type.values())

    def test_structural_mismatch(self):
        a = Corpus("g", (sentence("d", 0, [("x", "O")]),))
        b = Corpus("p", (sentence("d", 0, [("y", "O")]),))
        with pytest.raises(ValueError):
            score(a, b)

    def test_oracle_equivalence_randomized(self):
        for seed in range(40):
            rng = random.Random(seed)
            gold = random_corpus(rng, n_docs=2)
            pred = perturb_corpus(rng, gold, rate=0.6)
            got = score(gold, pred)
            want = oracle_score(gold, pred)
            wtp, wfp, wfn, wp, wr, wf = want["overall"]
            assert (got.overall.tp, got.overall.fp, got.overall.fn) == (wtp, wfp, wfn)
            assert got.overall.f1 == pytest.approx(wf, rel=1e-9)
            for t, (tp, fp, fn, p, r, f) in want["per_type"].items():
                s = got.per_type[t]
                assert (s.tp, s.fp, s.fn) == (tp, fp, fn)
                assert s.precision == pytest.approx(p, rel=1e-9)
                assert s.recall == pytest.approx(r, rel=1e-9)
                assert s.f1 == pytest.approx(f, rel=1e-9)

    def test_sentence_permutation_invariance(self):
        rng = random.Random(8)
        gold = random_corpus(rng, n_docs=2)
        pred = perturb_corpus(rng, gold, rate=0.5)
        order = list(range(len(gold.sentences)))
        rng.shuffle(order)
        gold2 = Corpus("g", tuple(gold.sentences[i] for i in order))
        pred2 = Corpus("p", tuple(pred.sentences[i] for i in order))
        a, b = score(gold, pred), score(gold2, pred2)
        assert a.overall == b.overall and a.per_type == b.per_type

    def test_extra_exact_match_never_lowers_f1(self):
        gold_sents = [sentence("d", 0, [("US", "B-GPE"), ("met", "O")])]
        pred_sents = [sentence("d", 0, [("US", "B-GPE"), ("met", "B-ORG")])]
        base = score(Corpus("g", tuple(gold_sents)), Corpus("p", tuple(pred_sents)))
        extra = sentence("d", 1, [("Putin", "B-PERSON")])
        grown = score(
            Corpus("g", tuple(gold_sents + [extra])),
            Corpus("p", tuple(pred_sents + [extra])),
        )
        assert grown.overall.f1 >= base.overall.f1


class TestCompare:
    # published overall rows, asserted to +/-0.01 after half-up rounding
    @pytest.mark.parametrize(
        "old,new,delta,err",
        [
            (89.70, 90.97, 1.27, 12.33),
            (89.51, 90.54, 1.03, 9.82),
            (85.92, 87.52, 1.60, 11.36),
            (89.58, 90.59, 1.01, 9.69),
        ],
    )
    def test_regression_rows(self, old, new, delta, err):
        d = compare(old, new)
        assert round2(d.delta) == pytest.approx(delta, abs=0.01)
        assert round2(d.err_reduction) == pytest.approx(err, abs=0.01)

    def test_no_change_zero(self):
        for x in (0.0, 42.5, 99.99):
            d = compare(x, x)
            assert d.delta == 0.0 and d.err_reduction == 0.0

    def test_perfect_old_not_applicable(self):
        assert compare(100.0, 100.0).err_reduction is None

    def test_sign_matches_delta(self):
        for old, new in [(80.0, 85.0), (85.0, 80.0), (50.0, 99.0)]:
            d = compare(old, new)
            assert (d.err_reduction > 0) == (d.delta > 0)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            compare(-1.0, 50.0)
        with pytest.raises(ValueError):
            compare(50.0, 101.0)

    def test_per_type_union(self):
        gold = Corpus("g", (sentence("d", 0, [("US", "B-GPE"), ("now", "B-TIME")]),))
        pred_a = Corpus("p", (sentence("d", 0, [("US", "B-GPE"), ("now", "O")]),))
        pred_b = Corpus("p", (sentence("d", 0, [("US", "O"), ("now", "B-TIME")]),))
        deltas = compare_per_type(score(gold, pred_a), score(gold, pred_b))
        assert set(deltas) == {"GPE", "TIME"}
        assert deltas["GPE"].delta == pytest.approx(-100.0)
        assert deltas["TIME"].delta == pytest.approx(100.0)


def test_round2_half_up():
    assert round2(1.005) == 1.01
    assert round2(12.334) == 12.33
    assert round2(-2.005) == -2.01
