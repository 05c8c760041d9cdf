"""Uniform train / predict / importance interface over the eleven kinds."""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    ConfigInvalid,
    DimensionMismatch,
    NonFinite,
    SingleClass,
    UnsupportedImportance,
)
from .ensemble import AdaBoost, GradientBoosting, RandomForest, XGBoost
from .knn import KNN
from .linear import LDA, QDA, GaussianNB, LogisticRegressionNewton
from .svm import SMOSVC
from .tree import ClassificationTree

KINDS = ("svc", "dtc", "knn", "lr", "gnb", "lda", "qda", "rf", "gb", "ab", "xgb")

# Kinds whose trained models expose a feature-importance measure. The SVC
# qualifies only with the linear kernel; the RBF kernel reports unsupported.
IMPORTANCE_CAPABLE = ("svc-linear", "dtc", "lr", "lda", "rf", "gb", "ab", "xgb")

MODEL_SCHEMA_VERSION = 1

_DEFAULTS = {
    "svc": {"kernel": "rbf", "C": 1.0, "gamma": None},
    "dtc": {"max_depth": None, "min_samples_leaf": 1},
    "knn": {"k": 5},
    "lr": {"l2": 1.0},
    "gnb": {"var_smoothing": 1e-9},
    "lda": {"ridge": 1e-6},
    "qda": {"ridge": 1e-6},
    "rf": {"n_estimators": 100, "max_depth": None, "min_samples_leaf": 1},
    "gb": {"n_estimators": 100, "learning_rate": 0.1, "max_depth": 3},
    "ab": {"n_estimators": 50},
    "xgb": {"n_estimators": 100, "learning_rate": 0.1, "max_depth": 3, "reg_lambda": 1.0},
}


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigInvalid(f"unknown classifier kind {self.kind!r}")
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ConfigInvalid(f"unknown params for {self.kind}: {sorted(unknown)}")

    def resolved_params(self):
        out = dict(_DEFAULTS[self.kind])
        out.update(self.params)
        return out

    def supports_importance(self) -> bool:
        if self.kind == "svc":
            return self.resolved_params()["kernel"] == "linear"
        return self.kind in IMPORTANCE_CAPABLE


@dataclass
class TrainedModel:
    kind: str
    config: ClassifierConfig
    estimator: object
    feature_count: int


def _build(config: ClassifierConfig):
    p = config.resolved_params()
    kind = config.kind
    if kind == "svc":
        return SMOSVC(C=p["C"], kernel=p["kernel"], gamma=p["gamma"])
    if kind == "dtc":
        return ClassificationTree(max_depth=p["max_depth"], min_samples_leaf=p["min_samples_leaf"])
    if kind == "knn":
        return KNN(k=p["k"])
    if kind == "lr":
        return LogisticRegressionNewton(l2=p["l2"])
    if kind == "gnb":
        return GaussianNB(var_smoothing=p["var_smoothing"])
    if kind == "lda":
        return LDA(ridge=p["ridge"])
    if kind == "qda":
        return QDA(ridge=p["ridge"])
    if kind == "rf":
        return RandomForest(n_estimators=p["n_estimators"], max_depth=p["max_depth"],
                            min_samples_leaf=p["min_samples_leaf"], seed=config.seed)
    if kind == "gb":
        return GradientBoosting(n_estimators=p["n_estimators"],
                                learning_rate=p["learning_rate"], max_depth=p["max_depth"])
    if kind == "ab":
        return AdaBoost(n_estimators=p["n_estimators"])
    if kind == "xgb":
        return XGBoost(n_estimators=p["n_estimators"], learning_rate=p["learning_rate"],
                       max_depth=p["max_depth"], reg_lambda=p["reg_lambda"])
    raise ConfigInvalid(kind)


def canonical_order(X, y):
    """Row permutation sorting lexicographically by features then label.

    Training on canonically sorted rows makes every kind invariant to the
    input row order (bootstrap draws, SMO sweeps and distance ties all see
    the same sequence).
    """
    keys = [np.asarray(y)] + [X[:, j] for j in range(X.shape[1] - 1, -1, -1)]
    return np.lexsort(keys)


def train(config: ClassifierConfig, X, y) -> TrainedModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or len(X) != len(y):
        raise DimensionMismatch("X and y shapes disagree")
    if len(y) < 2:
        raise SingleClass("need at least 2 training rows")
    if not (np.any(y == 0) and np.any(y == 1)):
        raise SingleClass("training data must contain both classes")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NonFinite("training data must be finite")
    order = canonical_order(X, y)
    Xs, ys = X[order], y[order]
    est = _build(config)
    rng = np.random.default_rng(config.seed)
    est.fit(Xs, ys, rng=rng)
    return TrainedModel(config.kind, config, est, X.shape[1])


def decision_scores(model: TrainedModel, X) -> np.ndarray:
    """Real-valued scores, monotone in fast-class confidence (0 = tie)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise DimensionMismatch(
            f"expected {model.feature_count} features, got {X.shape}")
    return np.asarray(model.estimator.decision_function(X), dtype=float)


def predict(model: TrainedModel, X) -> np.ndarray:
    """Hard labels: 1 (fast) when the score is positive, else 0 (slow)."""
    return (decision_scores(model, X) > 0).astype(int)


def importance(model: TrainedModel) -> np.ndarray:
    """Non-negative per-feature weights, or UnsupportedImportance."""
    imp = model.estimator.importance()
    if imp is None:
        raise UnsupportedImportance(
            f"{model.kind} exposes no feature-importance measure")
    imp = np.asarray(imp, dtype=float)
    if len(imp) < model.feature_count:
        imp = np.concatenate([imp, np.zeros(model.feature_count - len(imp))])
    return imp


def save_model(model: TrainedModel, path):
    doc = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": model.kind,
        "params": model.config.params,
        "seed": model.config.seed,
        "feature_count": model.feature_count,
        "estimator": model.estimator.to_jsonable(),
    }
    tmp = str(path) + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
    os.replace(tmp, path)


_CLASSES = {
    "svc": SMOSVC, "dtc": None, "knn": KNN, "lr": LogisticRegressionNewton,
    "gnb": GaussianNB, "lda": LDA, "qda": QDA, "rf": RandomForest,
    "gb": GradientBoosting, "ab": AdaBoost, "xgb": XGBoost,
}


def load_model(path) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    kind = doc["kind"]
    config = ClassifierConfig(kind, doc["params"], doc["seed"])
    if kind == "dtc":
        from .tree import TreeNodes
        est = ClassificationTree()
        est.nodes = TreeNodes.from_jsonable(doc["estimator"]["nodes"])
        est.feature_importance_ = np.asarray(doc["estimator"]["importance"], dtype=float)
    else:
        est = _CLASSES[kind].from_jsonable(doc["estimator"])
    return TrainedModel(kind, config, est, doc["feature_count"])
