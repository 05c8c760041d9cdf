"""Array-backed decision trees: CART classification trees, gradient trees for
boosting, and weighted stumps. All tie-breaks are deterministic (lowest
feature index, then lowest threshold)."""

import numpy as np

NO_CHILD = -1


class TreeNodes:
    """Flat node storage; predict is vectorized level by level."""

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []  # leaf decision value; internal nodes carry one too

    def add(self, feature=NO_CHILD, threshold=0.0, value=0.0):
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(NO_CHILD)
        self.right.append(NO_CHILD)
        self.value.append(value)
        return len(self.feature) - 1

    def finalize(self):
        self.feature = np.asarray(self.feature, dtype=int)
        self.threshold = np.asarray(self.threshold, dtype=float)
        self.left = np.asarray(self.left, dtype=int)
        self.right = np.asarray(self.right, dtype=int)
        self.value = np.asarray(self.value, dtype=float)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        idx = np.zeros(len(X), dtype=int)
        while True:
            internal = self.feature[idx] != NO_CHILD
            if not internal.any():
                break
            rows = np.flatnonzero(internal)
            node = idx[rows]
            go_left = X[rows, self.feature[node]] <= self.threshold[node]
            idx[rows] = np.where(go_left, self.left[node], self.right[node])
        return self.value[idx]

    def to_jsonable(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_jsonable(cls, doc):
        t = cls()
        t.feature = doc["feature"]
        t.threshold = doc["threshold"]
        t.left = doc["left"]
        t.right = doc["right"]
        t.value = doc["value"]
        return t.finalize()


def _gini(counts):
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return 1.0 - float(np.sum(p * p))


def _best_gini_split(X, y, w, feature_indices):
    """Best weighted-Gini split over the given features; None if no gain."""
    n = len(y)
    total_w = w.sum()
    wy = w * y
    parent_counts = np.array([total_w - wy.sum(), wy.sum()])
    parent_impurity = _gini(parent_counts)
    best = None  # (neg_gain, feature, threshold, mask)
    for j in feature_indices:
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ws = w[order]
        wys = wy[order]
        cw = np.cumsum(ws)
        cwy = np.cumsum(wys)
        # candidate cuts between distinct consecutive values
        cuts = np.flatnonzero(xs[1:] > xs[:-1])
        for c in cuts:
            wl = cw[c]
            wr = total_w - wl
            l_fast = cwy[c]
            r_fast = cwy[-1] - l_fast
            gl = _gini(np.array([wl - l_fast, l_fast]))
            gr = _gini(np.array([wr - r_fast, r_fast]))
            child = (wl * gl + wr * gr) / total_w
            gain = parent_impurity - child
            thr = 0.5 * (xs[c] + xs[c + 1])
            key = (-gain, j, thr)
            if gain > 1e-12 and (best is None or key < best[:3]):
                best = (-gain, j, thr, gain)
    return best


class ClassificationTree:
    """CART with Gini impurity and best-split strategy.

    When ``feature_rng`` is set, each node considers a random subset of
    ``max_features`` features (random-forest style).
    """

    def __init__(self, max_depth=None, min_samples_leaf=1, min_samples_split=2,
                 max_features=None):
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.nodes = None
        self.feature_importance_ = None

    def fit(self, X, y, sample_weight=None, feature_rng=None, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        d = X.shape[1]
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, float)
        self.nodes = TreeNodes()
        self._importance = np.zeros(d)
        self._total_weight = w.sum()
        self._grow(X, y, w, depth=0, feature_rng=feature_rng)
        self.nodes.finalize()
        s = self._importance.sum()
        self.feature_importance_ = self._importance / s if s > 0 else self._importance
        return self

    def _leaf_value(self, y, w):
        fast = float(np.sum(w * y))
        slow = float(w.sum() - fast)
        total = fast + slow
        return (fast - slow) / total if total > 0 else 0.0

    def _grow(self, X, y, w, depth, feature_rng):
        node = self.nodes.add(value=self._leaf_value(y, w))
        if (len(y) < self.min_samples_split
                or (self.max_depth is not None and depth >= self.max_depth)
                or len(np.unique(y)) < 2):
            return node
        d = X.shape[1]
        if feature_rng is not None and self.max_features is not None and self.max_features < d:
            feats = np.sort(feature_rng.choice(d, size=self.max_features, replace=False))
        else:
            feats = np.arange(d)
        best = _best_gini_split(X, y, w, feats)
        if best is None:
            return node
        _, j, thr, gain = best
        mask = X[:, j] <= thr
        if mask.sum() < self.min_samples_leaf or (~mask).sum() < self.min_samples_leaf:
            return node
        self._importance[j] += w.sum() / self._total_weight * gain
        self.nodes.feature[node] = j
        self.nodes.threshold[node] = thr
        self.nodes.left[node] = self._grow(X[mask], y[mask], w[mask], depth + 1, feature_rng)
        self.nodes.right[node] = self._grow(X[~mask], y[~mask], w[~mask], depth + 1, feature_rng)
        return node

    def decision_function(self, X):
        return self.nodes.predict(X)

    def importance(self):
        return self.feature_importance_

    def to_jsonable(self):
        return {"nodes": self.nodes.to_jsonable(),
                "importance": self.feature_importance_.tolist()}


class GradientTree:
    """Regression tree for boosting, grown on gradient/hessian statistics.

    Split gain is the second-order objective reduction
    0.5 * (GL^2/(HL+reg) + GR^2/(HR+reg) - G^2/(H+reg)); leaf values are
    -G/(H+reg). Classic gradient boosting passes unit hessians for splitting
    and refits leaves with its own Newton step.
    """

    def __init__(self, max_depth=3, reg_lambda=0.0, min_child_weight=1e-6,
                 min_samples_leaf=1):
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.min_child_weight = min_child_weight
        self.min_samples_leaf = min_samples_leaf
        self.nodes = None
        self.gain_importance_ = None

    def fit(self, X, grad, hess, leaf_grad=None, leaf_hess=None):
        X = np.asarray(X, dtype=float)
        grad = np.asarray(grad, dtype=float)
        hess = np.asarray(hess, dtype=float)
        self._leaf_grad = grad if leaf_grad is None else np.asarray(leaf_grad, float)
        self._leaf_hess = hess if leaf_hess is None else np.asarray(leaf_hess, float)
        self.nodes = TreeNodes()
        self.gain_importance_ = np.zeros(X.shape[1])
        idx = np.arange(len(grad))
        self._grow(X, grad, hess, idx, depth=0)
        self.nodes.finalize()
        return self

    def _leaf_value(self, idx):
        g = self._leaf_grad[idx].sum()
        h = self._leaf_hess[idx].sum()
        return -g / (h + self.reg_lambda + 1e-12)

    def _score(self, g, h):
        return g * g / (h + self.reg_lambda + 1e-12)

    def _grow(self, X, grad, hess, idx, depth):
        node = self.nodes.add(value=self._leaf_value(idx))
        if depth >= self.max_depth or len(idx) < 2:
            return node
        G, H = grad[idx].sum(), hess[idx].sum()
        parent = self._score(G, H)
        best = None
        for j in range(X.shape[1]):
            order = idx[np.argsort(X[idx, j], kind="stable")]
            xs = X[order, j]
            cg = np.cumsum(grad[order])
            ch = np.cumsum(hess[order])
            cuts = np.flatnonzero(xs[1:] > xs[:-1])
            for c in cuts:
                if c + 1 < self.min_samples_leaf or len(idx) - c - 1 < self.min_samples_leaf:
                    continue
                hl, hr = ch[c], H - ch[c]
                if hl < self.min_child_weight or hr < self.min_child_weight:
                    continue
                gain = 0.5 * (self._score(cg[c], hl) + self._score(G - cg[c], hr) - parent)
                thr = 0.5 * (xs[c] + xs[c + 1])
                key = (-gain, j, thr)
                if gain > 1e-12 and (best is None or key < best[:3]):
                    best = (-gain, j, thr, gain)
        if best is None:
            return node
        _, j, thr, gain = best
        self.gain_importance_[j] += gain
        mask = X[idx, j] <= thr
        self.nodes.feature[node] = j
        self.nodes.threshold[node] = thr
        self.nodes.left[node] = self._grow(X, grad, hess, idx[mask], depth + 1)
        self.nodes.right[node] = self._grow(X, grad, hess, idx[~mask], depth + 1)
        return node

    def predict(self, X):
        return self.nodes.predict(X)


class WeightedStump:
    """Depth-1 classifier minimizing weighted 0/1 error (AdaBoost base)."""

    def __init__(self):
        self.feature = 0
        self.threshold = 0.0
        self.polarity = 1  # +1: x > thr predicts fast

    def fit(self, X, y, w):
        X = np.asarray(X, dtype=float)
        ypm = np.where(np.asarray(y) == 1, 1.0, -1.0)
        w = np.asarray(w, dtype=float)
        best = None  # (error, feature, threshold, polarity)
        total_pos = np.sum(w[ypm > 0])
        for j in range(X.shape[1]):
            order = np.argsort(X[:, j], kind="stable")
            xs = X[order, j]
            ws = w[order]
            ys = ypm[order]
            # error of rule "x > thr -> fast" with everything on the left slow:
            # start with thr below all values: all predicted fast
            cum_pos = np.cumsum(np.where(ys > 0, ws, 0.0))
            cum_neg = np.cumsum(np.where(ys < 0, ws, 0.0))
            cuts = np.concatenate([[-1], np.flatnonzero(xs[1:] > xs[:-1])])
            for c in cuts:
                left_pos = cum_pos[c] if c >= 0 else 0.0
                left_neg = cum_neg[c] if c >= 0 else 0.0
                thr = (0.5 * (xs[c] + xs[c + 1]) if c >= 0 else xs[0] - 1.0)
                # polarity +1: left slow, right fast
                err_pos = left_pos + (cum_neg[-1] - left_neg)
                # polarity -1: left fast, right slow
                err_neg = left_neg + (cum_pos[-1] - left_pos)
                for err, pol in ((err_pos, 1), (err_neg, -1)):
                    key = (err, j, thr, pol)
                    if best is None or key < best:
                        best = key
        self.error_, self.feature, self.threshold, self.polarity = best
        return self

    def predict_pm(self, X):
        X = np.asarray(X, dtype=float)
        right = X[:, self.feature] > self.threshold
        out = np.where(right, 1.0, -1.0) * self.polarity
        return out

    def to_jsonable(self):
        return {"feature": int(self.feature), "threshold": float(self.threshold),
                "polarity": int(self.polarity)}

    @classmethod
    def from_jsonable(cls, doc):
        s = cls()
        s.feature = doc["feature"]
        s.threshold = doc["threshold"]
        s.polarity = doc["polarity"]
        return s
