import csv

import numpy as np
import pytest

from idsfx.errors import DomainError, SchemaError
from idsfx.matrix import FeatureMatrix
from idsfx.select import (apply_selection, chi2_scores, report_to_csv,
                          select_k_best)


def brute_force_chi2(x, y):
    """Independent implementation of the O/E formula, plain loops."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    classes = sorted(set(y.tolist()))
    p = x.shape[0]
    out = np.zeros(x.shape[1])
    for j in range(x.shape[1]):
        total = sum(x[i, j] for i in range(p))
        score = 0.0
        for c in classes:
            members = [i for i in range(p) if y[i] == c]
            observed = sum(x[i, j] for i in members)
            expected = total * len(members) / p
            if expected > 0:
                score += (observed - expected) ** 2 / expected
        out[j] = score
    return out


class TestChi2Scores:
    def test_constant_feature_scores_zero(self):
        x = np.ones((6, 1))
        y = np.array([0, 0, 1, 1, 2, 2])
        assert chi2_scores(x, y)[0] == 0.0

    def test_hand_computed_two_rows(self):
        # O = [1, 0], E = [0.5, 0.5] -> 0.5 + 0.5 = 1.0
        x = np.array([[1.0], [0.0]])
        y = np.array([0, 1])
        assert chi2_scores(x, y)[0] == pytest.approx(1.0, abs=1e-12)

    def test_brute_force_oracle_50_fixtures(self):
        rng = np.random.default_rng(123)
        for _ in range(50):
            p = int(rng.integers(4, 21))
            q = int(rng.integers(1, 9))
            k = int(rng.integers(2, 5))
            x = rng.random((p, q)) * 5
            x[rng.random((p, q)) < 0.2] = 0.0
            y = rng.integers(0, k, p)
            while np.unique(y).size < 2:
                y = rng.integers(0, k, p)
            got = chi2_scores(x, y)
            want = brute_force_chi2(x, y)
            assert np.allclose(got, want, atol=1e-9)

    def test_negative_entry_rejected(self):
        with pytest.raises(DomainError):
            chi2_scores(np.array([[1.0], [-1.0]]), np.array([0, 1]))

    def test_single_class_rejected(self):
        with pytest.raises(DomainError):
            chi2_scores(np.ones((3, 2)), np.array([1, 1, 1]))

    def test_permutation_invariance(self):
        rng = np.random.default_rng(7)
        x = rng.random((30, 4))
        y = rng.integers(0, 3, 30)
        perm = rng.permutation(30)
        a = chi2_scores(x, y)
        b = chi2_scores(x[perm], y[perm])
        assert np.allclose(a, b, atol=1e-9)

    def test_column_scaling_linearity(self):
        rng = np.random.default_rng(9)
        x = rng.random((25, 3))
        y = rng.integers(0, 2, 25)
        base = chi2_scores(x, y)
        scaled = x.copy()
        scaled[:, 1] *= 4.5
        got = chi2_scores(scaled, y)
        assert got[1] == pytest.approx(4.5 * base[1], rel=1e-10)
        assert got[0] == pytest.approx(base[0], rel=1e-12)


class TestSelectKBest:
    def test_top2(self):
        rep = select_k_best(np.array([3.0, 1.0, 2.0]), 2)
        assert list(rep.selected) == [0, 2]

    def test_tie_break_lowest_index(self):
        rep = select_k_best(np.array([5.0, 5.0, 1.0]), 1)
        assert list(rep.selected) == [0]

    def test_k_exceeds_count_selects_all(self, caplog):
        rep = select_k_best(np.array([1.0, 2.0]), 5)
        assert list(rep.selected) == [1, 0]
        assert rep.k == 2

    def test_ranking_is_permutation(self):
        rng = np.random.default_rng(2)
        scores = rng.random(15)
        rep = select_k_best(scores, 4)
        assert sorted(rep.ranking.tolist()) == list(range(15))

    def test_full_sort_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(30):
            q = int(rng.integers(1, 12))
            scores = np.round(rng.random(q) * 4, 1)  # force ties
            k = int(rng.integers(1, q + 1))
            rep = select_k_best(scores, k)
            oracle = sorted(range(q), key=lambda j: (-scores[j], j))[:k]
            assert rep.selected.tolist() == oracle

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(5)
        scores = rng.random(10)
        a = select_k_best(scores, 4).selected
        b = select_k_best(scores * 10 + 3, 4).selected
        assert np.array_equal(a, b)

    def test_k_below_one(self):
        with pytest.raises(DomainError):
            select_k_best(np.array([1.0]), 0)


class TestApplySelection:
    def _fm(self):
        return FeatureMatrix(np.arange(12.0).reshape(3, 4), ["a", "b", "c", "d"])

    def test_selected_columns_in_ranking_order(self):
        rep = select_k_best(np.array([1.0, 0.0, 5.0, 2.0]), 2)
        out = apply_selection(rep, self._fm())
        assert out.names == ["c", "d"]
        assert np.array_equal(out.values, self._fm().values[:, [2, 3]])

    def test_identity_selection_with_equal_scores(self):
        rep = select_k_best(np.zeros(4), 4)
        out = apply_selection(rep, self._fm())
        assert out.names == ["a", "b", "c", "d"]

    def test_out_of_range(self):
        rep = select_k_best(np.array([1.0, 2.0, 3.0, 4.0, 9.0]), 5)
        with pytest.raises(SchemaError):
            apply_selection(rep, self._fm())

    def test_name_index_cross_check(self):
        rng = np.random.default_rng(1)
        fm = FeatureMatrix(rng.random((10, 6)), [f"f{j}" for j in range(6)])
        y = rng.integers(0, 2, 10)
        scores = chi2_scores(fm, y)
        rep = select_k_best(scores, 3, names=fm.names)
        out = apply_selection(rep, fm)
        assert out.names == [f"f{j}" for j in rep.selected]


class TestReportCsv:
    def test_table_shape(self, tmp_path):
        rep = select_k_best(np.array([2.0, 7.0, 1.0]), 2, names=["x", "y", "z"])
        path = tmp_path / "scores.csv"
        report_to_csv(rep, path)
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["feature_name", "score"]
        assert [r[0] for r in rows[1:]] == ["y", "x", "z"]
        assert float(rows[1][1]) == 7.0
