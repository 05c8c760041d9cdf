"""Linear and Gaussian generative classifiers: logistic regression (damped
Newton), Gaussian naive Bayes, and linear / quadratic discriminant analysis."""

import numpy as np


def sigmoid(z):
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(w, b, X, y, l2):
    """Mean negative log-likelihood plus an L2 penalty on the weights."""
    z = X @ w + b
    # log(1 + exp(-m)) with m = z for y=1, -z for y=0, computed stably
    m = np.where(y == 1, z, -z)
    nll = np.mean(np.logaddexp(0.0, -m))
    return nll + 0.5 * l2 * float(w @ w)


def logistic_gradient(w, b, X, y, l2):
    p = sigmoid(X @ w + b)
    r = (p - y) / len(y)
    return X.T @ r + l2 * w, float(np.sum(r))


class LogisticRegressionNewton:
    """L2-regularized maximum likelihood via damped Newton iterations.

    Converges to gradient infinity-norm below ``tol``; the bias is not
    penalized.
    """

    def __init__(self, l2=1.0, tol=1e-8, max_iter=200):
        self.l2 = l2
        self.tol = tol
        self.max_iter = max_iter
        self.w = None
        self.b = 0.0

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n, d = X.shape
        w = np.zeros(d)
        b = 0.0
        loss = logistic_loss(w, b, X, y, self.l2)
        for _ in range(self.max_iter):
            gw, gb = logistic_gradient(w, b, X, y, self.l2)
            if max(np.max(np.abs(gw)), abs(gb)) < self.tol:
                break
            p = sigmoid(X @ w + b)
            s = p * (1.0 - p) / n
            Xa = np.hstack([X, np.ones((n, 1))])
            H = Xa.T @ (Xa * s[:, None])
            H[:d, :d] += self.l2 * np.eye(d)
            H += 1e-10 * np.eye(d + 1)
            g = np.concatenate([gw, [gb]])
            step = np.linalg.solve(H, g)
            # damping: halve until the loss decreases
            t = 1.0
            for _ in range(40):
                w_new, b_new = w - t * step[:d], b - t * step[d]
                new_loss = logistic_loss(w_new, b_new, X, y, self.l2)
                if new_loss <= loss + 1e-15:
                    break
                t *= 0.5
            w, b, loss = w_new, b_new, new_loss
        self.w, self.b = w, b
        return self

    def decision_function(self, X):
        return np.asarray(X, dtype=float) @ self.w + self.b

    def importance(self):
        return np.abs(self.w)

    def to_jsonable(self):
        return {"w": self.w.tolist(), "b": float(self.b), "l2": self.l2}

    @classmethod
    def from_jsonable(cls, doc):
        m = cls(l2=doc["l2"])
        m.w = np.asarray(doc["w"], dtype=float)
        m.b = doc["b"]
        return m


class GaussianNB:
    """Per-class independent Gaussians with variance smoothing."""

    def __init__(self, var_smoothing=1e-9):
        self.var_smoothing = var_smoothing

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        eps = self.var_smoothing * max(X.var(axis=0).max(), 1e-30)
        self.means_ = np.stack([X[y == c].mean(axis=0) for c in (0, 1)])
        self.vars_ = np.stack([X[y == c].var(axis=0) + eps for c in (0, 1)])
        self.log_priors_ = np.log(np.array([(y == 0).mean(), (y == 1).mean()]))
        return self

    def _log_likelihood(self, X, c):
        diff = X - self.means_[c]
        return -0.5 * np.sum(np.log(2 * np.pi * self.vars_[c]) + diff**2 / self.vars_[c], axis=1)

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        return (self._log_likelihood(X, 1) + self.log_priors_[1]
                - self._log_likelihood(X, 0) - self.log_priors_[0])

    def importance(self):
        return None

    def to_jsonable(self):
        return {"means": self.means_.tolist(), "vars": self.vars_.tolist(),
                "log_priors": self.log_priors_.tolist(),
                "var_smoothing": self.var_smoothing}

    @classmethod
    def from_jsonable(cls, doc):
        m = cls(var_smoothing=doc["var_smoothing"])
        m.means_ = np.asarray(doc["means"], dtype=float)
        m.vars_ = np.asarray(doc["vars"], dtype=float)
        m.log_priors_ = np.asarray(doc["log_priors"], dtype=float)
        return m


class LDA:
    """Pooled-covariance discriminant with a small ridge on the covariance."""

    def __init__(self, ridge=1e-6):
        self.ridge = ridge

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n, d = X.shape
        mu0 = X[y == 0].mean(axis=0)
        mu1 = X[y == 1].mean(axis=0)
        centered = X - np.where(y[:, None] == 1, mu1, mu0)
        cov = centered.T @ centered / n
        cov += self.ridge * np.eye(d)
        self.w = np.linalg.solve(cov, mu1 - mu0)
        pi1 = (y == 1).mean()
        self.b = float(-0.5 * (mu0 + mu1) @ self.w + np.log(pi1 / (1 - pi1)))
        self.means_ = np.stack([mu0, mu1])
        return self

    def decision_function(self, X):
        return np.asarray(X, dtype=float) @ self.w + self.b

    def importance(self):
        return np.abs(self.w)

    def to_jsonable(self):
        return {"w": self.w.tolist(), "b": self.b, "ridge": self.ridge,
                "means": self.means_.tolist()}

    @classmethod
    def from_jsonable(cls, doc):
        m = cls(ridge=doc["ridge"])
        m.w = np.asarray(doc["w"], dtype=float)
        m.b = doc["b"]
        m.means_ = np.asarray(doc["means"], dtype=float)
        return m


class QDA:
    """Per-class covariance Gaussians with the same ridge as LDA."""

    def __init__(self, ridge=1e-6):
        self.ridge = ridge

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        d = X.shape[1]
        self.means_, self.inv_covs_, self.logdets_ = [], [], []
        for c in (0, 1):
            Xc = X[y == c]
            mu = Xc.mean(axis=0)
            cov = (Xc - mu).T @ (Xc - mu) / len(Xc) + self.ridge * np.eye(d)
            sign, logdet = np.linalg.slogdet(cov)
            self.means_.append(mu)
            self.inv_covs_.append(np.linalg.inv(cov))
            self.logdets_.append(logdet)
        self.log_priors_ = np.log(np.array([(y == 0).mean(), (y == 1).mean()]))
        return self

    def _score_class(self, X, c):
        diff = X - self.means_[c]
        maha = np.einsum("ij,jk,ik->i", diff, self.inv_covs_[c], diff)
        return -0.5 * (maha + self.logdets_[c]) + self.log_priors_[c]

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        return self._score_class(X, 1) - self._score_class(X, 0)

    def importance(self):
        return None

    def to_jsonable(self):
        return {
            "ridge": self.ridge,
            "means": [m.tolist() for m in self.means_],
            "inv_covs": [m.tolist() for m in self.inv_covs_],
            "logdets": [float(v) for v in self.logdets_],
            "log_priors": self.log_priors_.tolist(),
        }

    @classmethod
    def from_jsonable(cls, doc):
        m = cls(ridge=doc["ridge"])
        m.means_ = [np.asarray(v, dtype=float) for v in doc["means"]]
        m.inv_covs_ = [np.asarray(v, dtype=float) for v in doc["inv_covs"]]
        m.logdets_ = doc["logdets"]
        m.log_priors_ = np.asarray(doc["log_priors"], dtype=float)
        return m
