"""Multinomial (softmax) logistic regression with a ridge penalty."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

from ..errors import DivergenceError
from .base import check_labels, softmax


def _design(X):
    return sp.csr_matrix(X, dtype=np.float64) if sp.issparse(X) else np.asarray(X, dtype=np.float64)


def objective(W, b, X, Y, l2):
    """Loss and gradients of the training objective.

    loss = (1/n) * [ sum_i CE(softmax(x_i W + b), y_i) + (l2 / 2) * ||W||^2 ]

    which is the scikit-learn ``C = 1 / l2`` formulation rescaled by 1/n.  The
    bias is not penalized.  ``Y`` is one-hot, shape ``(n, K)``.
    """
    n = X.shape[0]
    Z = np.asarray(X @ W) + b
    Z = Z - Z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(Z).sum(axis=1, keepdims=True))
    log_P = Z - log_norm
    loss = (-(Y * log_P).sum() + 0.5 * l2 * np.sum(W * W)) / n
    G = (np.exp(log_P) - Y) / n
    dW = np.asarray(X.T @ G) + (l2 / n) * W
    db = G.sum(axis=0)
    return loss, dW, db


class LogisticRegression:
    kind = "logreg"

    def __init__(self, n_classes, l2=1.0, solver="lbfgs", max_iter=200, tol=1e-6,
                 learning_rate=0.5):
        if n_classes < 2:
            raise ValueError("logistic regression needs at least 2 classes")
        self.n_classes = n_classes
        self.l2 = l2
        self.solver = solver
        self.max_iter = max_iter
        self.tol = tol
        self.learning_rate = learning_rate
        self.W_ = None
        self.b_ = None
        self.loss_history_ = []

    def init_params(self, n_features):
        self.W_ = np.zeros((n_features, self.n_classes))
        self.b_ = np.zeros(self.n_classes)

    def fit(self, X, y):
        X = _design(X)
        y = check_labels(y, self.n_classes)
        Y = np.zeros((len(y), self.n_classes))
        Y[np.arange(len(y)), y] = 1.0
        d, K = X.shape[1], self.n_classes
        self.init_params(d)
        self.loss_history_ = []

        if self.solver == "gd":
            self._fit_gd(X, Y)
        else:
            self._fit_lbfgs(X, Y, d, K)
        return self

    def _fit_gd(self, X, Y):
        prev = np.inf
        for epoch in range(1, self.max_iter + 1):
            loss, dW, db = objective(self.W_, self.b_, X, Y, self.l2)
            if not np.isfinite(loss):
                raise DivergenceError("non-finite logistic regression loss", epoch)
            self.loss_history_.append(loss)
            if prev - loss < self.tol:
                break
            prev = loss
            self.W_ -= self.learning_rate * dW
            self.b_ -= self.learning_rate * db

    def _fit_lbfgs(self, X, Y, d, K):
        calls = [0]

        def fun(theta):
            calls[0] += 1
            W = theta[: d * K].reshape(d, K)
            b = theta[d * K:]
            loss, dW, db = objective(W, b, X, Y, self.l2)
            if not np.isfinite(loss):
                raise DivergenceError("non-finite logistic regression loss", calls[0])
            self.loss_history_.append(loss)
            return loss, np.concatenate([dW.ravel(), db])

        theta0 = np.zeros(d * K + K)
        res = minimize(fun, theta0, jac=True, method="L-BFGS-B",
                       options={"maxiter": self.max_iter, "ftol": self.tol, "gtol": 1e-8})
        self.W_ = res.x[: d * K].reshape(d, K).copy()
        self.b_ = res.x[d * K:].copy()

    def decision_function(self, X):
        return np.asarray(_design(X) @ self.W_) + self.b_

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def predict(self, X):
        return np.argmax(self.decision_function(X), axis=1)

    def params(self):
        return {"W": self.W_, "b": self.b_}

    def load_params(self, params):
        self.W_ = params["W"]
        self.b_ = params["b"]
