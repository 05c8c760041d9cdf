"""Support vector classifier trained with a deterministic SMO dual solver
(Platt-style pair selection, index-ordered sweeps)."""

import numpy as np


def linear_kernel(A, B):
    return A @ B.T


def rbf_kernel(A, B, gamma):
    a2 = np.sum(A * A, axis=1)[:, None]
    b2 = np.sum(B * B, axis=1)[None, :]
    return np.exp(-gamma * np.maximum(a2 + b2 - 2.0 * (A @ B.T), 0.0))


class SMOSVC:
    """Soft-margin SVC; ``kernel`` is 'linear' or 'rbf'.

    gamma=None selects 1 / (d * var(X)) at fit time.
    """

    def __init__(self, C=1.0, kernel="rbf", gamma=None, tol=1e-3, max_passes=200):
        if kernel not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {kernel!r}")
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.tol = tol
        self.max_passes = max_passes

    def _kernel(self, A, B):
        if self.kernel == "linear":
            return linear_kernel(A, B)
        return rbf_kernel(A, B, self.gamma_)

    def fit(self, X, y, rng=None):
        X = np.asarray(X, dtype=float)
        ypm = np.where(np.asarray(y) == 1, 1.0, -1.0)
        n = len(ypm)
        if self.kernel == "rbf":
            var = X.var()
            self.gamma_ = self.gamma if self.gamma is not None else 1.0 / (X.shape[1] * var) if var > 0 else 1.0
        self.X_ = X
        self.y_ = ypm
        K = self._kernel(X, X)
        alpha = np.zeros(n)
        b = 0.0
        C, tol = self.C, self.tol

        def f(i):
            return float((alpha * ypm) @ K[:, i] + b)

        passes = 0
        examine_all = True
        while passes < self.max_passes:
            changed = 0
            for i in range(n):
                Ei = f(i) - ypm[i]
                if not ((ypm[i] * Ei < -tol and alpha[i] < C)
                        or (ypm[i] * Ei > tol and alpha[i] > 0)):
                    continue
                if not examine_all and not (0 < alpha[i] < C):
                    continue
                # second-choice heuristic: maximize |Ei - Ej|, index tie-break
                errors = (alpha * ypm) @ K + b - ypm
                j = int(np.argmax(np.abs(Ei - errors) - np.where(np.arange(n) == i, np.inf, 0.0)))
                if j == i:
                    continue
                if self._take_step(i, j, alpha, K, ypm, Ei, errors[j]):
                    changed += 1
                    b = self._b
                else:
                    # fall back to an index-ordered scan
                    for j in range(n):
                        if j == i:
                            continue
                        if self._take_step(i, j, alpha, K, ypm, Ei, f(j) - ypm[j]):
                            changed += 1
                            b = self._b
                            break
            if changed == 0:
                if examine_all:
                    break
                examine_all = True
            else:
                examine_all = False
            passes += 1

        self.alpha_ = alpha
        self.b_ = b
        sv = alpha > 1e-12
        self.support_X_ = X[sv]
        self.support_coef_ = (alpha * ypm)[sv]
        return self

    def _take_step(self, i, j, alpha, K, ypm, Ei, Ej):
        C = self.C
        ai_old, aj_old = alpha[i], alpha[j]
        if ypm[i] != ypm[j]:
            L = max(0.0, aj_old - ai_old)
            H = min(C, C + aj_old - ai_old)
        else:
            L = max(0.0, ai_old + aj_old - C)
            H = min(C, ai_old + aj_old)
        if H - L < 1e-12:
            return False
        eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
        if eta >= -1e-12:
            return False
        aj = aj_old - ypm[j] * (Ei - Ej) / eta
        aj = min(max(aj, L), H)
        if abs(aj - aj_old) < 1e-7 * (aj + aj_old + 1e-7):
            return False
        ai = ai_old + ypm[i] * ypm[j] * (aj_old - aj)
        b_old = getattr(self, "_b", 0.0)
        b1 = b_old - Ei - ypm[i] * (ai - ai_old) * K[i, i] - ypm[j] * (aj - aj_old) * K[i, j]
        b2 = b_old - Ej - ypm[i] * (ai - ai_old) * K[i, j] - ypm[j] * (aj - aj_old) * K[j, j]
        if 0 < ai < C:
            self._b = b1
        elif 0 < aj < C:
            self._b = b2
        else:
            self._b = 0.5 * (b1 + b2)
        alpha[i], alpha[j] = ai, aj
        return True

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        if len(self.support_X_) == 0:
            return np.full(len(X), self.b_)
        return self._kernel(X, self.support_X_) @ self.support_coef_ + self.b_

    def importance(self):
        if self.kernel != "linear":
            return None
        w = self.support_coef_ @ self.support_X_ if len(self.support_X_) else np.zeros(self.X_.shape[1])
        return np.abs(w)

    def to_jsonable(self):
        doc = {"C": self.C, "kernel": self.kernel, "b": float(self.b_),
               "support_X": self.support_X_.tolist(),
               "support_coef": self.support_coef_.tolist(),
               "n_features": int(self.X_.shape[1])}
        if self.kernel == "rbf":
            doc["gamma"] = float(self.gamma_)
        return doc

    @classmethod
    def from_jsonable(cls, doc):
        m = cls(C=doc["C"], kernel=doc["kernel"], gamma=doc.get("gamma"))
        m.b_ = doc["b"]
        m.support_X_ = np.asarray(doc["support_X"], dtype=float).reshape(-1, doc["n_features"])
        m.support_coef_ = np.asarray(doc["support_coef"], dtype=float)
        m.X_ = np.zeros((0, doc["n_features"]))
        if doc["kernel"] == "rbf":
            m.gamma_ = doc["gamma"]
        return m
