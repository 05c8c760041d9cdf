"""Tree ensembles: bagged random forest, logistic-loss gradient boosting,
AdaBoost (SAMME with stumps), and second-order L2-regularized boosting."""

import numpy as np

from .linear import sigmoid
from .tree import ClassificationTree, GradientTree, WeightedStump


class RandomForest:
    """Bagged CART trees with sqrt(d) feature subsampling per node."""

    def __init__(self, n_estimators=100, max_depth=None, min_samples_leaf=1, seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n, d = X.shape
        mtry = max(1, int(np.sqrt(d)))
        self.trees_ = []
        for t in range(self.n_estimators):
            tree_rng = np.random.default_rng([self.seed, t])
            idx = tree_rng.integers(0, n, size=n)
            tree = ClassificationTree(max_depth=self.max_depth,
                                      min_samples_leaf=self.min_samples_leaf,
                                      max_features=mtry)
            # bootstrap can lose a class; fall back to the full sample
            if len(np.unique(y[idx])) < 2:
                idx = np.arange(n)
            tree.fit(X[idx], y[idx], feature_rng=tree_rng)
            self.trees_.append(tree)
        return self

    def decision_function(self, X):
        return np.mean([t.decision_function(X) for t in self.trees_], axis=0)

    def importance(self):
        imp = np.mean([t.feature_importance_ for t in self.trees_], axis=0)
        s = imp.sum()
        return imp / s if s > 0 else imp

    def to_jsonable(self):
        return {"n_estimators": self.n_estimators, "seed": self.seed,
                "trees": [t.nodes.to_jsonable() for t in self.trees_],
                "importances": [t.feature_importance_.tolist() for t in self.trees_]}

    @classmethod
    def from_jsonable(cls, doc):
        from .tree import TreeNodes
        m = cls(n_estimators=doc["n_estimators"], seed=doc["seed"])
        m.trees_ = []
        for nodes_doc, imp in zip(doc["trees"], doc["importances"]):
            t = ClassificationTree()
            t.nodes = TreeNodes.from_jsonable(nodes_doc)
            t.feature_importance_ = np.asarray(imp, dtype=float)
            m.trees_.append(t)
        return m


class GradientBoosting:
    """Stage-wise regression trees fit to logistic-loss gradients.

    Trees split on squared error against the residual; leaf values are the
    Newton step sum(residual) / sum(p(1-p)).
    """

    def __init__(self, n_estimators=100, learning_rate=0.1, max_depth=3):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        p0 = np.clip(y.mean(), 1e-12, 1 - 1e-12)
        self.f0_ = float(np.log(p0 / (1 - p0)))
        F = np.full(len(y), self.f0_)
        self.trees_ = []
        for _ in range(self.n_estimators):
            p = sigmoid(F)
            residual = y - p
            hess = np.maximum(p * (1 - p), 1e-12)
            tree = GradientTree(max_depth=self.max_depth, reg_lambda=0.0)
            # variance-reduction splits (unit hessian), Newton leaves
            tree.fit(X, -residual, np.ones(len(y)), leaf_grad=-residual, leaf_hess=hess)
            F = F + self.learning_rate * tree.predict(X)
            self.trees_.append(tree)
        return self

    def decision_function(self, X):
        F = np.full(len(np.asarray(X)), self.f0_)
        for tree in self.trees_:
            F = F + self.learning_rate * tree.predict(X)
        return F

    def importance(self):
        imp = np.sum([t.gain_importance_ for t in self.trees_], axis=0)
        s = imp.sum()
        return imp / s if s > 0 else imp

    def to_jsonable(self):
        return {"f0": self.f0_, "learning_rate": self.learning_rate,
                "trees": [t.nodes.to_jsonable() for t in self.trees_],
                "importances": [t.gain_importance_.tolist() for t in self.trees_]}

    @classmethod
    def from_jsonable(cls, doc):
        from .tree import TreeNodes
        m = cls(learning_rate=doc["learning_rate"])
        m.f0_ = doc["f0"]
        m.trees_ = []
        for nodes_doc, imp in zip(doc["trees"], doc["importances"]):
            t = GradientTree()
            t.nodes = TreeNodes.from_jsonable(nodes_doc)
            t.gain_importance_ = np.asarray(imp, dtype=float)
            m.trees_.append(t)
        return m


class AdaBoost:
    """Discrete AdaBoost (SAMME) over depth-1 stumps.

    Training halts when a stump's weighted error reaches 0.5 (no better than
    chance) or 0 (perfect).
    """

    def __init__(self, n_estimators=50):
        self.n_estimators = n_estimators

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        ypm = np.where(np.asarray(y) == 1, 1.0, -1.0)
        n = len(ypm)
        w = np.full(n, 1.0 / n)
        self.stumps_ = []
        self.alphas_ = []
        for _ in range(self.n_estimators):
            stump = WeightedStump().fit(X, (ypm > 0).astype(int), w)
            pred = stump.predict_pm(X)
            err = float(np.sum(w[pred != ypm]))
            if err >= 0.5:
                break
            if err <= 1e-12:
                self.stumps_.append(stump)
                self.alphas_.append(np.log((1 - 1e-12) / 1e-12) / 2)
                break
            alpha = 0.5 * np.log((1 - err) / err)
            self.stumps_.append(stump)
            self.alphas_.append(alpha)
            w = w * np.exp(-alpha * ypm * pred)
            w = w / w.sum()
        if not self.stumps_:
            # degenerate: no stump beats chance; constant zero score
            self.stumps_ = []
            self.alphas_ = []
        return self

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        out = np.zeros(len(X))
        for alpha, stump in zip(self.alphas_, self.stumps_):
            out += alpha * stump.predict_pm(X)
        return out

    def importance(self):
        if not self.stumps_:
            return None
        d = max(s.feature for s in self.stumps_) + 1
        imp = np.zeros(d)
        for alpha, stump in zip(self.alphas_, self.stumps_):
            imp[stump.feature] += alpha
        s = imp.sum()
        return imp / s if s > 0 else imp

    def to_jsonable(self):
        return {"alphas": [float(a) for a in self.alphas_],
                "stumps": [s.to_jsonable() for s in self.stumps_]}

    @classmethod
    def from_jsonable(cls, doc):
        m = cls()
        m.alphas_ = doc["alphas"]
        m.stumps_ = [WeightedStump.from_jsonable(s) for s in doc["stumps"]]
        return m


class XGBoost:
    """Second-order boosted trees: splits and leaves use gradient and hessian
    statistics with an L2 penalty on leaf weights (the defining difference
    from classic gradient boosting)."""

    def __init__(self, n_estimators=100, learning_rate=0.1, max_depth=3,
                 reg_lambda=1.0, min_child_weight=1e-3):
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.min_child_weight = min_child_weight

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        F = np.zeros(len(y))  # base score 0.5 in probability space
        self.trees_ = []
        for _ in range(self.n_estimators):
            p = sigmoid(F)
            grad = p - y
            hess = np.maximum(p * (1 - p), 1e-12)
            tree = GradientTree(max_depth=self.max_depth, reg_lambda=self.reg_lambda,
                                min_child_weight=self.min_child_weight)
            tree.fit(X, grad, hess)
            F = F + self.learning_rate * tree.predict(X)
            self.trees_.append(tree)
        return self

    def decision_function(self, X):
        F = np.zeros(len(np.asarray(X)))
        for tree in self.trees_:
            F = F + self.learning_rate * tree.predict(X)
        return F

    def importance(self):
        imp = np.sum([t.gain_importance_ for t in self.trees_], axis=0)
        s = imp.sum()
        return imp / s if s > 0 else imp

    def to_jsonable(self):
        return {"learning_rate": self.learning_rate, "reg_lambda": self.reg_lambda,
                "trees": [t.nodes.to_jsonable() for t in self.trees_],
                "importances": [t.gain_importance_.tolist() for t in self.trees_]}

    @classmethod
    def from_jsonable(cls, doc):
        from .tree import TreeNodes
        m = cls(learning_rate=doc["learning_rate"], reg_lambda=doc["reg_lambda"])
        m.trees_ = []
        for nodes_doc, imp in zip(doc["trees"], doc["importances"]):
            t = GradientTree()
            t.nodes = TreeNodes.from_jsonable(nodes_doc)
            t.gain_importance_ = np.asarray(imp, dtype=float)
            m.trees_.append(t)
        return m
