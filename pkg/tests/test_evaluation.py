import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pairwise_auc
from nextcmd.evaluation import (MetricsReport, accuracy, aggregate_auc, format_table,
                                group_kfold_split, kfold_split, roc_auc_binary)


class TestFolds:
    def test_even(self):
        f = kfold_split(10, 5, seed=0)
        assert sorted(f.sizes().tolist()) == [2] * 5

    def test_uneven(self):
        assert sorted(kfold_split(11, 5, seed=0).sizes().tolist()) == [2, 2, 2, 2, 3]

    def test_deterministic(self):
        assert np.array_equal(kfold_split(50, 5, 3).assignment, kfold_split(50, 5, 3).assignment)
        assert not np.array_equal(kfold_split(50, 5, 3).assignment, kfold_split(50, 5, 4).assignment)

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            kfold_split(4, 5)

    @given(st.integers(5, 200), st.integers(2, 5), st.integers(0, 10))
    def test_balance(self, n, k, seed):
        f = kfold_split(n, k, seed)
        sizes = f.sizes()
        assert sizes.sum() == n and sizes.max() - sizes.min() <= 1

    def test_group_split_keeps_groups_together(self):
        groups = [f"s{i % 7}" for i in range(60)]
        f = group_kfold_split(groups, 3, seed=1)
        for g in set(groups):
            assert len({f.assignment[i] for i, h in enumerate(groups) if h == g}) == 1


class TestAccuracy:
    def test_all_correct(self):
        assert accuracy(np.eye(3), [0, 1, 2]) == 1.0

    def test_ties_go_to_class_zero(self):
        labels = np.array([0, 1, 1, 0, 2])
        assert accuracy(np.full((5, 3), 1 / 3), labels) == pytest.approx(2 / 5)

    def test_three_of_five(self):
        scores = np.array([[0.9, 0.1], [0.2, 0.8], [0.6, 0.4], [0.3, 0.7], [0.5, 0.4]])
        assert accuracy(scores, [0, 1, 1, 0, 0]) == pytest.approx(0.6)

    def test_empty(self):
        with pytest.raises(ValueError):
            accuracy(np.zeros((0, 2)), [])

    @given(st.integers(0, 1000))
    def test_monotone_row_transform(self, seed):
        rng = np.random.default_rng(seed)
        s = rng.random((20, 4))
        y = rng.integers(0, 4, 20)
        assert accuracy(np.exp(3 * s) + 1, y) == accuracy(s, y)


class TestAuc:
    def test_perfect(self):
        assert roc_auc_binary([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_all_equal(self):
        assert roc_auc_binary([0.5] * 6, [0, 1, 0, 1, 1, 0]) == 0.5

    def test_single_class_absent(self):
        assert roc_auc_binary([0.1, 0.2], [1, 1]) is None

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([3, 10, 1000]))
    def test_matches_pairwise_oracle(self, seed, levels):
        rng = np.random.default_rng(seed)
        s = rng.integers(0, levels, 200) / levels
        y = rng.random(200) < 0.3
        if y.all() or not y.any():
            return
        assert abs(roc_auc_binary(s, y) - pairwise_auc(s, y)) < 1e-9

    @given(st.integers(0, 10_000))
    def test_complement_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        s = rng.integers(0, 5, 50).astype(float)
        y = rng.random(50) < 0.5
        if y.all() or not y.any():
            return
        assert roc_auc_binary(-s, y) == pytest.approx(1 - roc_auc_binary(s, y), abs=1e-12)


class TestAggregate:
    def test_two_class_symmetric(self):
        # every row (p, 1-p) labelled 0 has a mirror (1-p, p) labelled 1
        rng = np.random.default_rng(0)
        p = np.round(rng.random(15), 1)
        s = np.vstack([np.column_stack([p, 1 - p]), np.column_stack([1 - p, p])])
        y = np.array([0] * 15 + [1] * 15)
        out = aggregate_auc(s, y)
        auc0 = pairwise_auc(s[:, 0], y == 0)
        assert out.per_class[0][0] == pytest.approx(auc0, abs=1e-12)
        assert out.per_class[1][0] == pytest.approx(auc0, abs=1e-12)
        assert out.weighted == pytest.approx(auc0, abs=1e-12)
        assert out.micro == pytest.approx(pairwise_auc(s.ravel(), np.eye(2)[y].ravel()), abs=1e-12)
        assert out.micro == pytest.approx(auc0, abs=1e-12)

    def test_absent_class(self):
        s = np.array([[0.7, 0.2, 0.1], [0.2, 0.7, 0.1], [0.6, 0.3, 0.1]])
        out = aggregate_auc(s, [0, 1, 0])
        assert out.absent == [2]
        assert set(out.per_class) == {0, 1}
        assert sum(sup for _, sup in out.per_class.values()) == 3

    def test_perfect(self):
        out = aggregate_auc(np.eye(4), [0, 1, 2, 3])
        assert out.micro == out.weighted == out.mean == out.min == out.max == 1.0

    def test_micro_monotone_invariance(self):
        rng = np.random.default_rng(4)
        s = rng.random((100, 5))
        y = rng.integers(0, 5, 100)
        assert aggregate_auc(np.log(s) * 2 + 7, y).micro == aggregate_auc(s, y).micro


class TestReport:
    def make(self):
        rng = np.random.default_rng(1)
        s = rng.random((40, 3))
        s /= s.sum(axis=1, keepdims=True)
        cfg = {"model": {"kind": "logreg"}, "features": {"ngram_range": [1, 2]}, "eval": {"k": 5}}
        return MetricsReport.from_scores(s, rng.integers(0, 3, 40), ("a", "b", "c"), cfg)

    def test_bounds_and_round_trip(self):
        r = self.make()
        for v in (r.accuracy, r.micro_auc, r.weighted_auc, r.auc_mean, r.auc_min, r.auc_max):
            assert 0.0 <= v <= 1.0
        assert sum(v["support"] for v in r.per_class_auc.values()) == r.n_rows
        back = MetricsReport.from_json(r.to_json())
        assert back == r
        assert back.to_json() == r.to_json()

    def test_table(self):
        r = self.make()
        text = format_table([r])
        assert "Logistic Regression" in text and "[1,2]" in text
        assert f"{100 * r.accuracy:.2f}%" in text
        nn = MetricsReport.from_json(r.to_json())
        nn.config = {"model": {"kind": "nn"}}
        assert "---" in format_table([nn])

    def test_comparable_drops_timestamp(self):
        r = self.make()
        assert "generated_at" in json.loads(r.to_json())
        assert "generated_at" not in r.comparable()
