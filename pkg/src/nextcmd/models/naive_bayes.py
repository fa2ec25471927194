"""Bernoulli and multinomial naive Bayes over sparse n-gram counts.

All scoring happens in log space and is normalized with log-sum-exp.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .base import check_labels, normalize_log


def _as_csr(X):
    return sp.csr_matrix(X, dtype=np.float64)


def _class_log_prior(y, n_classes, alpha):
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    if np.all(counts > 0):
        return np.log(counts / counts.sum())
    # classes missing from this training set still get smoothed mass
    return np.log((counts + alpha) / (counts.sum() + alpha * n_classes))


class _NaiveBayes:
    kind = None

    def __init__(self, n_classes, alpha=1.0):
        if n_classes < 1:
            raise ValueError("n_classes must be >= 1")
        if alpha <= 0:
            raise ValueError("alpha must be > 0")
        self.n_classes = n_classes
        self.alpha = alpha
        self.class_log_prior_ = None

    def _class_feature_counts(self, X, y):
        Y = sp.csr_matrix(
            (np.ones(len(y)), (np.arange(len(y)), y)), shape=(len(y), self.n_classes)
        )
        counts = np.ascontiguousarray((X.T @ Y).todense())      # (n_features, n_classes)
        return counts, np.bincount(y, minlength=self.n_classes).astype(np.float64)

    def predict_log_joint(self, X):
        raise NotImplementedError

    def predict_proba(self, X):
        return normalize_log(self.predict_log_joint(X))

    def predict(self, X):
        return np.argmax(self.predict_log_joint(X), axis=1)


class BernoulliNB(_NaiveBayes):
    """Binary presence features; a count of 7 scores exactly like a count of 1.

    P(feature=1 | c) = (n_c(feature) + alpha) / (n_c + 2 alpha)
    """

    kind = "nb-bernoulli"

    def fit(self, X, y):
        X = (_as_csr(X) > 0).astype(np.float64)
        y = check_labels(y, self.n_classes)
        counts, n_c = self._class_feature_counts(X, y)
        p = (counts + self.alpha) / (n_c + 2.0 * self.alpha)
        self.class_log_prior_ = _class_log_prior(y, self.n_classes, self.alpha)
        self.log_p_ = np.log(p)
        self.log_not_p_ = np.log1p(-p)
        return self

    def predict_log_joint(self, X):
        X = (_as_csr(X) > 0).astype(np.float64)
        base = self.class_log_prior_ + self.log_not_p_.sum(axis=0)
        return np.asarray(X @ (self.log_p_ - self.log_not_p_)) + base

    def params(self):
        return {"class_log_prior": self.class_log_prior_, "log_p": self.log_p_,
                "log_not_p": self.log_not_p_}

    def load_params(self, params):
        self.class_log_prior_ = params["class_log_prior"]
        self.log_p_ = params["log_p"]
        self.log_not_p_ = params["log_not_p"]


class MultinomialNB(_NaiveBayes):
    """Count features; P(feature | c) = (count + alpha) / (total_c + alpha V)."""

    kind = "nb-multinomial"

    def fit(self, X, y):
        X = _as_csr(X)
        y = check_labels(y, self.n_classes)
        counts, _ = self._class_feature_counts(X, y)
        V = counts.shape[0]
        theta = (counts + self.alpha) / (counts.sum(axis=0) + self.alpha * V)
        self.class_log_prior_ = _class_log_prior(y, self.n_classes, self.alpha)
        self.log_theta_ = np.log(theta)
        return self

    def predict_log_joint(self, X):
        return np.asarray(_as_csr(X) @ self.log_theta_) + self.class_log_prior_

    def params(self):
        return {"class_log_prior": self.class_log_prior_, "log_theta": self.log_theta_}

    def load_params(self, params):
        self.class_log_prior_ = params["class_log_prior"]
        self.log_theta_ = params["log_theta"]
