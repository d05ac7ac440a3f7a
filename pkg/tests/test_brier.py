"""Brier estimator, Brier-n accumulation, BrierLM composite, corpus evaluation."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfree.brier import (
    BrierAccumulator,
    brier_sample_estimate,
    byte_tokenize,
    combine_brier_lm,
    evaluate_corpus,
    exact_brier,
    load_corpus,
)
from lfree.core import ExplicitCategorical, ExplicitSampler, make_rng, sample_categorical

from conftest import A, B, C, PerfectPredictor
from oracles import oracle_brier


class TestSampleEstimate:
    def test_all_equal(self):
        assert brier_sample_estimate(A, A, A) == 1  # 1 + 1 - 1

    def test_one_match(self):
        assert brier_sample_estimate(A, B, A) == 1  # 1 + 0 - 0

    def test_collision_without_match(self):
        assert brier_sample_estimate(A, A, B) == -1  # 0 + 0 - 1

    def test_no_match_no_collision(self):
        assert brier_sample_estimate(A, B, C) == 0

    def test_double_match_without_collision_impossible_value_two(self):
        # 2 happens only when x1 = y and x2 = y but x1 != x2 -- impossible;
        # the reachable values on real draws are {-1, 0, 1}; 2 would need
        # inconsistent indicators, so range-check the formula directly.
        assert brier_sample_estimate((0, 1), (0, 1), (0, 1)) == 1

    def test_order_mismatch(self):
        with pytest.raises(ValueError, match="ngram order mismatch"):
            brier_sample_estimate((0,), (0, 1), (0,))

    @given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
    @settings(max_examples=64, deadline=None)
    def test_matches_indicator_formula(self, a, b, y):
        x1, x2, yy = (a,), (b,), (y,)
        want = int(x1 == yy) + int(x2 == yy) - int(x1 == x2)
        assert brier_sample_estimate(x1, x2, yy) == want
        assert -1 <= want <= 2


class TestExactBrier:
    def test_perfect_deterministic_forecast(self, degenerate):
        assert exact_brier(degenerate, A) == pytest.approx(1.0)

    def test_uniform_two(self, two_atom_uniform):
        assert exact_brier(two_atom_uniform, A) == pytest.approx(0.5)

    def test_three_atom_tail(self, three_atom):
        assert exact_brier(three_atom, C) == pytest.approx(0.4 - 0.38, abs=1e-12)

    def test_outside_support(self, three_atom):
        assert exact_brier(three_atom, (9,)) == pytest.approx(-0.38, abs=1e-12)

    def test_matches_dict_oracle(self, three_atom):
        entries = dict(three_atom.items())
        for y in (A, B, C, (9,)):
            assert exact_brier(three_atom, y) == pytest.approx(
                oracle_brier(entries, y), abs=1e-12)


class TestEstimatorUnbiasedness:
    def test_mean_matches_exact_brier(self, three_atom):
        n = 10**5
        y = B
        x1 = sample_categorical(three_atom, n, 1001)
        x2 = sample_categorical(three_atom, n, 1002)
        values = np.array([brier_sample_estimate(a, b, y) for a, b in zip(x1, x2)])
        want = exact_brier(three_atom, y)
        se = values.std(ddof=1) / math.sqrt(n)
        assert abs(values.mean() - want) <= 3.0 * se


class TestCombineBrierLm:
    def test_perfect(self):
        assert combine_brier_lm({1: 1.0, 2: 1.0, 3: 1.0, 4: 1.0}) == pytest.approx(100.0)

    def test_published_row(self):
        got = combine_brier_lm({1: 0.2181, 2: 0.0688, 3: 0.0259, 4: 0.0125})
        assert got == pytest.approx(4.70, abs=0.01)

    def test_clamps_nonpositive(self):
        assert combine_brier_lm({1: 0.5, 2: 0.0, 3: 0.1, 4: 0.1}) == 0.0
        assert combine_brier_lm({1: 0.5, 2: -0.2, 3: 0.1, 4: 0.1}) == 0.0

    def test_missing_order(self):
        with pytest.raises(ValueError, match="missing"):
            combine_brier_lm({1: 0.5, 2: 0.5, 3: 0.5})

    def test_range(self):
        assert 0.0 <= combine_brier_lm({1: 0.9, 2: 0.5, 3: 0.2, 4: 0.01}) <= 100.0


class TestAccumulator:
    def test_decomposition_identity_exact(self):
        rng = make_rng(0)
        acc = BrierAccumulator(orders=(1, 2))
        for _ in range(500):
            x1 = (int(rng.integers(0, 3)), int(rng.integers(0, 3)))
            x2 = (int(rng.integers(0, 3)), int(rng.integers(0, 3)))
            y = (int(rng.integers(0, 3)), int(rng.integers(0, 3)))
            acc.update(2, x1, x2, y)
            acc.update(1, x1[:1], x2[:1], y[:1])
        for order in (1, 2):
            assert acc.brier_n(order) == 2 * acc.accuracy(order) - acc.collision(order)
            assert Fraction(-1) <= acc.brier_n(order) <= Fraction(1)

    def test_merge_is_order_independent(self):
        left, right = BrierAccumulator((1,)), BrierAccumulator((1,))
        left.update(1, A, A, A)
        right.update(1, A, B, B)
        merged = left.merge(right)
        assert merged.sum_match1[1] == 1
        assert merged.sum_match2[1] == 2
        assert merged.sum_collision[1] == 1
        assert merged.positions[1] == 2
        flipped = right.merge(left)
        assert flipped.brier_n(1) == merged.brier_n(1)

    def test_report_carries_sums(self):
        acc = BrierAccumulator((1, 2, 3, 4))
        for order in (1, 2, 3, 4):
            y = tuple(range(order))
            acc.update(order, y, y, y)
        report = acc.report()
        assert report.brier_lm == pytest.approx(100.0)
        assert report.sums[3] == (1, 1, 1, 1)


class TestEvaluateCorpus:
    def test_perfect_predictor_scores_one(self):
        corpus = byte_tokenize("the cat sat on the mat, the cat sat again")
        source = PerfectPredictor(corpus, chunk_len=4)
        report = evaluate_corpus(source, corpus, chunk_len=4, max_order=4, seed=5)
        for order in (1, 2, 3, 4):
            assert report.brier_n[order] == 1.0
            assert report.accuracy[order] == 1.0
            assert report.collision[order] == 1.0
        assert report.brier_lm == pytest.approx(100.0)
        assert report.positions == len(corpus)

    def test_uniform_source_brier1(self):
        # Uniform vocab of V=4: exact Brier-1 is 2/V - sum(1/V)^2 = 0.25.
        # Per-position estimator variance is 9/16, so 3 sigma at 1e5
        # positions is 3*0.75/sqrt(1e5) ~ 0.0071.
        v = 4
        uniform = ExplicitCategorical({(t,): 1.0 / v for t in range(v)})
        source = ExplicitSampler(uniform)
        rng = make_rng(99)
        corpus = [int(t) for t in rng.integers(0, v, size=10**5 + 1)]
        report = evaluate_corpus(source, corpus, chunk_len=1, max_order=1, seed=4)
        sigma3 = 3.0 * 0.75 / math.sqrt(report.positions)
        assert abs(report.brier_n[1] - 0.25) <= sigma3

    def test_multi_chunk_concatenation(self):
        # chunk_len 2 < max_order 4 forces two chunked draws per sample.
        corpus = byte_tokenize("abcdefgh" * 4)
        source = PerfectPredictor(corpus, chunk_len=2)
        report = evaluate_corpus(source, corpus, chunk_len=2, max_order=4, seed=1)
        assert report.brier_lm == pytest.approx(100.0)

    def test_per_order_position_skipping(self):
        corpus = [0, 1, 2, 3, 4, 5]
        source = PerfectPredictor(corpus, chunk_len=4)
        report = evaluate_corpus(source, corpus, chunk_len=4, max_order=4, seed=0)
        # order n evaluates len(corpus) - n + 1 positions at stride 1
        for order in (1, 2, 3, 4):
            assert report.sums[order][3] == len(corpus) - order + 1

    def test_stride(self):
        corpus = list(range(12))
        source = PerfectPredictor(corpus, chunk_len=4)
        report = evaluate_corpus(source, corpus, chunk_len=4, max_order=2,
                                 stride=3, seed=0)
        assert report.sums[1][3] == 4  # t in {0, 3, 6, 9}

    def test_corpus_too_short(self, three_atom):
        with pytest.raises(ValueError, match="shorter"):
            evaluate_corpus(ExplicitSampler(three_atom), [1, 2, 3], chunk_len=1,
                            max_order=4, seed=0)

    def test_deterministic(self):
        corpus = byte_tokenize("abznmabznm" * 5)
        uniform = ExplicitCategorical({(t,): 0.25 for t in (97, 98, 122, 110)})
        source = ExplicitSampler(uniform)
        r1 = evaluate_corpus(source, corpus, chunk_len=1, max_order=2, seed=11)
        r2 = evaluate_corpus(source, corpus, chunk_len=1, max_order=2, seed=11)
        assert r1.to_json() == r2.to_json()


class TestPropriety:
    def test_expected_brier_uniquely_maximized_at_truth(self, three_atom):
        # Exhaustive mesh over the 3-simplex with step 0.05; the truth lies
        # on the mesh and must be the unique maximizer of the expected score.
        step = 20  # 1 / 0.05
        truth = three_atom
        support = [A, B, C]
        best, best_p = None, None
        ties = 0
        truth_score = sum(truth.prob(y) * exact_brier(truth, y) for y in support)
        for i, j in product(range(step + 1), repeat=2):
            k = step - i - j
            if k < 0:
                continue
            entries = {o: t / step for o, t in zip(support, (i, j, k)) if t > 0}
            cand = ExplicitCategorical(entries)
            score = sum(truth.prob(y) * exact_brier(cand, y) for y in support)
            if best is None or score > best:
                best, best_p = score, entries
            if cand != truth and score >= truth_score - 1e-12:
                ties += 1
        assert best == pytest.approx(truth_score, abs=1e-12)
        assert best_p == {A: 0.5, B: 0.3, C: 0.2}
        assert ties == 0


class TestCorpusIO:
    def test_byte_tokenizer(self):
        assert byte_tokenize("ab") == [97, 98]
        assert byte_tokenize(b"\x00\xff") == [0, 255]

    def test_text_corpus(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text("hello")
        assert load_corpus(str(path)) == [104, 101, 108, 108, 111]

    def test_jsonl_corpus(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('[1, 2, 3]\n[4, 5]\n')
        assert load_corpus(str(path)) == [1, 2, 3, 4, 5]

    def test_auto_detection(self, tmp_path):
        jsonl = tmp_path / "a.dat"
        jsonl.write_text('[7]\n')
        assert load_corpus(str(jsonl)) == [7]
        text = tmp_path / "b.dat"
        text.write_text('plain words\n')
        assert load_corpus(str(text)) == byte_tokenize("plain words\n")

    def test_explicit_format_overrides(self, tmp_path):
        path = tmp_path / "c.txt"
        path.write_text('[1]')
        assert load_corpus(str(path), fmt="text") == byte_tokenize("[1]")
