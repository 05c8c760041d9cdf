import numpy as np
import pytest

from timesense.classifiers import base
from timesense.classifiers.base import (
    KINDS,
    ClassifierConfig,
    decision_scores,
    importance,
    load_model,
    predict,
    save_model,
    train,
)
from timesense.classifiers.linear import (
    logistic_gradient,
    logistic_loss,
)
from timesense.errors import (
    ConfigInvalid,
    DimensionMismatch,
    NonFinite,
    SingleClass,
    UnsupportedImportance,
)

ALL_CONFIGS = [ClassifierConfig(k, seed=0) for k in KINDS] + [
    ClassifierConfig("svc", {"kernel": "linear"}, seed=0),
]


def blobs(n_per=20, d=4, gap=6.0, seed=0):
    """Two well-separated Gaussian clusters."""
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, 1.0, (n_per, d))
    b = rng.normal(gap, 1.0, (n_per, d))
    X = np.vstack([a, b])
    y = np.array([0] * n_per + [1] * n_per)
    return X, y


def xor_data(n=120, seed=1):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, (n, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0)).astype(int)
    X += rng.normal(0, 0.02, X.shape)
    return X, y


class TestSeparableBlobs:
    @pytest.mark.parametrize("config", ALL_CONFIGS, ids=lambda c: c.kind + str(c.params))
    def test_perfect_training_accuracy(self, config):
        X, y = blobs()
        model = train(config, X, y)
        assert np.array_equal(predict(model, X), y)

    @pytest.mark.parametrize("config", ALL_CONFIGS, ids=lambda c: c.kind + str(c.params))
    def test_generalizes_to_fresh_draw(self, config):
        X, y = blobs(seed=0)
        X2, y2 = blobs(seed=9)
        model = train(config, X, y)
        acc = np.mean(predict(model, X2) == y2)
        assert acc == 1.0


class TestXor:
    """XOR separates the linear family from the nonlinear one."""

    @pytest.mark.parametrize("kind", ["lr", "lda"])
    def test_linear_models_fail(self, kind):
        X, y = xor_data()
        model = train(ClassifierConfig(kind, seed=0), X, y)
        assert np.mean(predict(model, X) == y) <= 0.65

    @pytest.mark.parametrize("config", [
        ClassifierConfig("dtc", seed=0),
        ClassifierConfig("rf", seed=0),
        ClassifierConfig("knn", {"k": 1}, seed=0),
        ClassifierConfig("svc", {"kernel": "rbf", "C": 10.0}, seed=0),
        ClassifierConfig("gb", seed=0),
        ClassifierConfig("xgb", seed=0),
    ], ids=lambda c: c.kind)
    def test_nonlinear_models_succeed(self, config):
        X, y = xor_data()
        model = train(config, X, y)
        assert np.mean(predict(model, X) == y) >= 0.95


class TestTrainValidation:
    def test_single_class_rejected(self):
        X = np.random.default_rng(0).normal(size=(10, 3))
        with pytest.raises(SingleClass):
            train(ClassifierConfig("lr"), X, np.zeros(10, dtype=int))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            train(ClassifierConfig("lr"), np.ones((4, 2)), np.array([0, 1]))

    def test_nonfinite_rejected(self):
        X = np.ones((4, 2)); X[0, 0] = np.nan
        with pytest.raises(NonFinite):
            train(ClassifierConfig("lr"), X, np.array([0, 1, 0, 1]))

    def test_unknown_kind_and_params(self):
        with pytest.raises(ConfigInvalid):
            ClassifierConfig("mlp")
        with pytest.raises(ConfigInvalid):
            ClassifierConfig("knn", {"neighbors": 3})

    def test_predict_dimension_check(self):
        X, y = blobs(d=3)
        model = train(ClassifierConfig("lr"), X, y)
        with pytest.raises(DimensionMismatch):
            predict(model, np.ones((2, 5)))


class TestDeterminismAndInvariance:
    @pytest.mark.parametrize("config", ALL_CONFIGS, ids=lambda c: c.kind + str(c.params))
    def test_same_seed_same_scores(self, config):
        X, y = blobs(gap=2.0)
        s1 = decision_scores(train(config, X, y), X)
        s2 = decision_scores(train(config, X, y), X)
        assert np.array_equal(s1, s2)

    @pytest.mark.parametrize("config", ALL_CONFIGS, ids=lambda c: c.kind + str(c.params))
    def test_row_permutation_invariance(self, config):
        X, y = blobs(gap=2.0, seed=3)
        perm = np.random.default_rng(5).permutation(len(y))
        s1 = decision_scores(train(config, X, y), X)
        s2 = decision_scores(train(config, X[perm], y[perm]), X)
        assert np.allclose(s1, s2, atol=1e-10)


class TestScoresAndTies:
    def test_zero_score_predicts_slow(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([0, 1])
        model = train(ClassifierConfig("knn", {"k": 2}), X, y)
        # both neighbours vote once each -> tied score 0 -> slow
        scores = decision_scores(model, np.array([[0.5]]))
        assert scores[0] == 0.0
        assert predict(model, np.array([[0.5]]))[0] == 0

    def test_knn_memorizes_training_points_k1(self):
        X, y = blobs(gap=0.5, seed=2)
        model = train(ClassifierConfig("knn", {"k": 1}), X, y)
        assert np.array_equal(predict(model, X), y)

    def test_scores_monotone_with_confidence(self):
        X, y = blobs(d=1, gap=4.0)
        model = train(ClassifierConfig("lr"), X, y)
        grid = np.linspace(-2, 6, 20).reshape(-1, 1)
        s = decision_scores(model, grid)
        assert np.all(np.diff(s) > 0)


class TestLogisticRegression:
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(30, 4))
        y = rng.integers(0, 2, 30)
        w = rng.normal(size=4)
        b = rng.normal()
        grad_w, grad_b = logistic_gradient(w, b, X, y, l2=0.7)
        eps = 1e-6
        for j in range(4):
            e = np.zeros(4); e[j] = eps
            num = (logistic_loss(w + e, b, X, y, l2=0.7)
                   - logistic_loss(w - e, b, X, y, l2=0.7)) / (2 * eps)
            assert grad_w[j] == pytest.approx(num, abs=1e-5)
        num_b = (logistic_loss(w, b + eps, X, y, l2=0.7)
                 - logistic_loss(w, b - eps, X, y, l2=0.7)) / (2 * eps)
        assert grad_b == pytest.approx(num_b, abs=1e-5)

    def test_l2_shrinks_weights(self):
        X, y = blobs(d=2, gap=3.0)
        w_small = train(ClassifierConfig("lr", {"l2": 0.01}), X, y)
        w_large = train(ClassifierConfig("lr", {"l2": 100.0}), X, y)
        n_small = np.linalg.norm(w_small.estimator.w)
        n_large = np.linalg.norm(w_large.estimator.w)
        assert n_large < n_small


class TestGenerativeModels:
    def test_gnb_recovers_parameters(self):
        rng = np.random.default_rng(7)
        mu0, mu1 = np.array([0.0, 1.0]), np.array([2.0, -1.0])
        X0 = rng.normal(mu0, 1.0, (4000, 2))
        X1 = rng.normal(mu1, 1.5, (4000, 2))
        X = np.vstack([X0, X1]); y = np.array([0] * 4000 + [1] * 4000)
        model = train(ClassifierConfig("gnb"), X, y)
        est = model.estimator
        assert np.allclose(est.means_[0], mu0, atol=0.05)
        assert np.allclose(est.means_[1], mu1, atol=0.06)
        assert np.allclose(np.sqrt(est.vars_[1]), 1.5, atol=0.075)

    def test_lda_direction_for_shared_covariance(self):
        rng = np.random.default_rng(1)
        X0 = rng.normal([0, 0], [1.0, 1.0], (3000, 2))
        X1 = rng.normal([2, 0], [1.0, 1.0], (3000, 2))
        X = np.vstack([X0, X1]); y = np.array([0] * 3000 + [1] * 3000)
        model = train(ClassifierConfig("lda"), X, y)
        w = model.estimator.w / np.linalg.norm(model.estimator.w)
        assert abs(w[0]) > 0.99  # separating direction is the x-axis

    def test_label_flip_negates_lda_scores(self):
        X, y = blobs(d=3, gap=2.0)
        s1 = decision_scores(train(ClassifierConfig("lda"), X, y), X)
        s2 = decision_scores(train(ClassifierConfig("lda"), X, 1 - y), X)
        assert np.allclose(s1, -s2, atol=1e-8)


class TestImportance:
    CAPABLE = [
        ClassifierConfig("svc", {"kernel": "linear"}),
        ClassifierConfig("dtc"),
        ClassifierConfig("lr"),
        ClassifierConfig("lda"),
        ClassifierConfig("rf"),
        ClassifierConfig("gb"),
        ClassifierConfig("ab"),
        ClassifierConfig("xgb"),
    ]
    INCAPABLE = [
        ClassifierConfig("svc", {"kernel": "rbf"}),
        ClassifierConfig("knn"),
        ClassifierConfig("gnb"),
        ClassifierConfig("qda"),
    ]

    @pytest.mark.parametrize("config", CAPABLE, ids=lambda c: c.kind + str(c.params))
    def test_informative_feature_dominates(self, config):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(80, 5))
        y = (X[:, 2] > 0).astype(int)
        model = train(config, X, y)
        imp = importance(model)
        assert config.supports_importance()
        assert len(imp) == 5
        assert np.all(imp >= 0)
        assert np.argmax(imp) == 2

    @pytest.mark.parametrize("config", INCAPABLE, ids=lambda c: c.kind + str(c.params))
    def test_unsupported_importance_raises(self, config):
        X, y = blobs(d=3)
        model = train(config, X, y)
        assert not config.supports_importance()
        with pytest.raises(UnsupportedImportance):
            importance(model)


class TestEnsembles:
    def test_adaboost_alphas_positive(self):
        X, y = blobs(d=3, gap=2.0)
        model = train(ClassifierConfig("ab"), X, y)
        assert len(model.estimator.alphas_) >= 1
        assert all(a > 0 for a in model.estimator.alphas_)

    def test_rf_seed_changes_model(self):
        X, y = blobs(gap=1.0, seed=4)
        s1 = decision_scores(train(ClassifierConfig("rf", seed=0), X, y), X)
        s2 = decision_scores(train(ClassifierConfig("rf", seed=1), X, y), X)
        assert not np.array_equal(s1, s2)

    def test_gb_improves_with_rounds(self):
        X, y = xor_data(seed=3)
        weak = train(ClassifierConfig("gb", {"n_estimators": 2}), X, y)
        strong = train(ClassifierConfig("gb", {"n_estimators": 100}), X, y)
        acc_weak = np.mean(predict(weak, X) == y)
        acc_strong = np.mean(predict(strong, X) == y)
        assert acc_strong >= acc_weak
        assert acc_strong >= 0.95


class TestSaveLoad:
    @pytest.mark.parametrize("config", ALL_CONFIGS, ids=lambda c: c.kind + str(c.params))
    def test_round_trip_preserves_scores(self, config, tmp_path):
        X, y = blobs(gap=2.0)
        model = train(config, X, y)
        path = tmp_path / "model.json"
        save_model(model, path)
        back = load_model(path)
        assert np.allclose(decision_scores(back, X), decision_scores(model, X),
                           atol=1e-12)
