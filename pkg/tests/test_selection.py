import itertools

import numpy as np
import pytest

from timesense.classifiers import ClassifierConfig
from timesense.errors import InfeasibleFolds, UnsupportedClassifier
from timesense.model import Dataset
from timesense.selection import (
    BACKWARD,
    FORWARD,
    cv_accuracy,
    rfecv,
    sfs,
    stratified_kfold,
)
from tests.conftest import planted_dataset

LR = ClassifierConfig("lr", seed=0)


def single_informative_dataset(informative=3, d=8, n=60, seed=0):
    rng = np.random.default_rng(seed)
    y = np.tile([0, 1], n // 2)
    X = rng.normal(size=(n, d))
    X[:, informative] += 3.0 * y
    names = tuple(f"f{j}" for j in range(d))
    pids = np.arange(n) % 6 + 1
    return Dataset(X, y, pids, names)


class TestStratifiedKfold:
    def test_partition_properties(self):
        y = np.array([0] * 13 + [1] * 17)
        folds = stratified_kfold(y, 5, seed=1)
        all_idx = np.concatenate(folds)
        assert sorted(all_idx) == list(range(30))
        for f in folds:
            # each fold keeps roughly the global class balance
            assert 2 <= np.sum(y[f] == 1) <= 4

    def test_deterministic(self):
        y = np.tile([0, 1], 15)
        a = stratified_kfold(y, 5, seed=3)
        b = stratified_kfold(y, 5, seed=3)
        assert all(np.array_equal(x, z) for x, z in zip(a, b))

    def test_single_class_folds_raise_in_cv(self):
        y = np.array([0] * 9 + [1])
        X = np.random.default_rng(0).normal(size=(10, 2))
        folds = stratified_kfold(y, 5, seed=0)
        with pytest.raises(InfeasibleFolds):
            cv_accuracy(LR, X, y, folds)


class TestSfs:
    def test_informative_feature_selected_first(self):
        ds = single_informative_dataset(informative=7)
        res = sfs(ds, LR, n_features=1)
        assert res.selected == ("f7",)

    def test_n_features_equal_d_selects_everything(self):
        ds = single_informative_dataset(d=5)
        res = sfs(ds, LR, n_features=5)
        assert set(res.selected) == set(ds.feature_names)

    def test_backward_keeps_informative(self):
        ds = single_informative_dataset(informative=2, d=6)
        res = sfs(ds, LR, n_features=2, direction=BACKWARD)
        assert "f2" in res.selected

    def test_duplicate_column_tie_breaks_canonical(self):
        rng = np.random.default_rng(0)
        y = np.tile([0, 1], 20)
        signal = rng.normal(size=40) + 2.0 * y
        X = np.column_stack([signal, signal, rng.normal(size=40)])
        ds = Dataset(X, y, np.arange(40) % 4 + 1, ("a", "b", "c"))
        res = sfs(ds, LR, n_features=1)
        assert res.selected == ("a",)

    def test_trace_shape_forward(self):
        ds = single_informative_dataset(d=5)
        res = sfs(ds, LR, n_features=3)
        assert len(res.trace) == 3
        sizes = [len(f) for f, _ in res.trace]
        assert sizes == [1, 2, 3]
        assert res.cv_folds == 5

    def test_deterministic(self):
        ds = single_informative_dataset()
        a = sfs(ds, LR, n_features=3, seed=4)
        b = sfs(ds, LR, n_features=3, seed=4)
        assert a == b

    def test_matches_brute_force_greedy_oracle(self):
        """Re-implement one forward step naively and compare."""
        ds = single_informative_dataset(d=4, n=40, seed=5)
        folds = stratified_kfold(ds.y, 5, seed=0)
        best, best_j = -1.0, None
        for j in range(4):
            s = cv_accuracy(LR, ds.X[:, [j]], ds.y, folds)
            if s > best:
                best, best_j = s, j
        res = sfs(ds, LR, n_features=1, seed=0)
        assert res.selected == (ds.feature_names[best_j],)
        assert res.trace[0][1] == pytest.approx(best)

    def test_bad_arguments(self):
        ds = single_informative_dataset(d=4)
        with pytest.raises(ValueError):
            sfs(ds, LR, n_features=0)
        with pytest.raises(ValueError):
            sfs(ds, LR, n_features=5)
        with pytest.raises(ValueError):
            sfs(ds, LR, n_features=2, direction="sideways")


class TestRfecv:
    def test_planted_recovery(self, planted):
        res = rfecv(planted, LR)
        informative = set(planted.feature_names[:5])
        assert len(informative & set(res.selected)) >= 4

    def test_unsupported_classifier(self, planted):
        for kind in ("knn", "gnb", "qda"):
            with pytest.raises(UnsupportedClassifier):
                rfecv(planted, ClassifierConfig(kind))
        with pytest.raises(UnsupportedClassifier):
            rfecv(planted, ClassifierConfig("svc", {"kernel": "rbf"}))

    def test_linear_svc_is_supported(self):
        ds = single_informative_dataset()
        res = rfecv(ds, ClassifierConfig("svc", {"kernel": "linear"}))
        assert "f3" in res.selected

    def test_min_features_d_keeps_everything(self):
        ds = single_informative_dataset(d=5)
        res = rfecv(ds, LR, min_features=5)
        assert set(res.selected) == set(ds.feature_names)
        assert len(res.trace) == 1

    def test_trace_cardinalities_decrease(self):
        ds = single_informative_dataset(d=6)
        res = rfecv(ds, LR)
        sizes = [len(f) for f, _ in res.trace]
        assert sizes == list(range(6, 0, -1))

    def test_deterministic(self, planted):
        a = rfecv(planted, LR, seed=2)
        b = rfecv(planted, LR, seed=2)
        assert a == b

    def test_cardinality_tie_prefers_smaller_set(self):
        # one perfectly informative feature: every surviving superset of it
        # scores 1.0, so the winner must be the smallest such set
        rng = np.random.default_rng(1)
        y = np.tile([0, 1], 20)
        X = rng.normal(size=(40, 4))
        X[:, 0] = 4.0 * y - 2.0
        ds = Dataset(X, y, np.arange(40) % 4 + 1, ("a", "b", "c", "d"))
        res = rfecv(ds, LR)
        assert res.selected == ("a",)

    def test_bad_arguments(self):
        ds = single_informative_dataset(d=4)
        with pytest.raises(ValueError):
            rfecv(ds, LR, min_features=0)
        with pytest.raises(ValueError):
            rfecv(ds, LR, step=0)
