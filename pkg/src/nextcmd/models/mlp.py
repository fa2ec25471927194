"""Feed-forward softmax network: input -> ReLU -> dropout -> ReLU -> softmax.

Trained with mini-batch Adam on mean cross-entropy.  Dropout is inverted
(surviving units are scaled by 1/(1-p) during training) and is only applied
between the first and second hidden layers.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..errors import DivergenceError
from .base import check_labels, softmax

PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")


def _design(X):
    return sp.csr_matrix(X, dtype=np.float64) if sp.issparse(X) else np.asarray(X, dtype=np.float64)


def init_params(n_inputs, hidden, n_classes, rng):
    """He-normal weights for ReLU layers, Glorot-uniform output layer, zero biases."""
    h1, h2 = hidden
    limit = np.sqrt(6.0 / (h2 + n_classes))
    return {
        "W1": rng.standard_normal((n_inputs, h1)) * np.sqrt(2.0 / n_inputs),
        "b1": np.zeros(h1),
        "W2": rng.standard_normal((h1, h2)) * np.sqrt(2.0 / h1),
        "b2": np.zeros(h2),
        "W3": rng.uniform(-limit, limit, size=(h2, n_classes)),
        "b3": np.zeros(n_classes),
    }


def forward(params, X, mask=None):
    """Class probabilities plus the activations backprop needs.

    ``mask`` is an already-scaled dropout mask for the first hidden layer
    (entries 0 or 1/(1-p)); ``None`` disables dropout.
    """
    Z1 = np.asarray(X @ params["W1"]) + params["b1"]
    H1 = np.maximum(Z1, 0.0)
    D1 = H1 * mask if mask is not None else H1
    Z2 = D1 @ params["W2"] + params["b2"]
    H2 = np.maximum(Z2, 0.0)
    Z3 = H2 @ params["W3"] + params["b3"]
    return softmax(Z3), (Z1, D1, Z2, H2, Z3)


def loss_and_grads(params, X, Y, mask=None):
    """Mean cross-entropy of one-hot targets ``Y`` and its gradients."""
    n = X.shape[0]
    P, (Z1, D1, Z2, H2, Z3) = forward(params, X, mask)
    Zs = Z3 - Z3.max(axis=1, keepdims=True)
    log_P = Zs - np.log(np.exp(Zs).sum(axis=1, keepdims=True))
    loss = -(Y * log_P).sum() / n

    dZ3 = (P - Y) / n
    grads = {"W3": H2.T @ dZ3, "b3": dZ3.sum(axis=0)}
    dZ2 = (dZ3 @ params["W3"].T) * (Z2 > 0)
    grads["W2"] = D1.T @ dZ2
    grads["b2"] = dZ2.sum(axis=0)
    dD1 = dZ2 @ params["W2"].T
    dH1 = dD1 * mask if mask is not None else dD1
    dZ1 = dH1 * (Z1 > 0)
    grads["W1"] = np.asarray(X.T @ dZ1)
    grads["b1"] = dZ1.sum(axis=0)
    return loss, grads


class Adam:
    """Adam with the bias corrections folded into the step size.

    Uses the equivalent update ``p -= lr_t * m / (sqrt(v) + eps_t)`` with
    ``lr_t = lr * sqrt(1 - beta2^t) / (1 - beta1^t)`` and
    ``eps_t = eps * sqrt(1 - beta2^t)``, computed in preallocated buffers.
    """

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self._buf = {k: np.empty_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        root_c2 = np.sqrt(1.0 - self.beta2 ** self.t)
        lr_t = self.lr * root_c2 / (1.0 - self.beta1 ** self.t)
        eps_t = self.eps * root_c2
        for k in params:
            g, m, v, buf = grads[k], self.m[k], self.v[k], self._buf[k]
            m *= self.beta1
            np.multiply(g, 1.0 - self.beta1, out=buf)
            m += buf
            v *= self.beta2
            np.multiply(g, g, out=buf)
            buf *= 1.0 - self.beta2
            v += buf
            np.sqrt(v, out=buf)
            buf += eps_t
            np.divide(m, buf, out=buf)
            buf *= lr_t
            params[k] -= buf


class MLPClassifier:
    kind = "nn"

    def __init__(self, n_classes, hidden=(500, 100), dropout=0.5, learning_rate=1e-3,
                 epochs=10, batch_size=128, seed=0):
        if len(hidden) != 2:
            raise ValueError("the network has exactly two hidden layers")
        self.n_classes = n_classes
        self.hidden = tuple(hidden)
        self.dropout = dropout
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.params_ = None
        self.loss_history_ = []

    def init_params(self, n_inputs):
        rng = np.random.default_rng(self.seed)
        self.params_ = init_params(n_inputs, self.hidden, self.n_classes, rng)
        return rng

    def fit(self, X, y):
        X = _design(X)
        y = check_labels(y, self.n_classes)
        n = X.shape[0]
        Y = np.zeros((n, self.n_classes))
        Y[np.arange(n), y] = 1.0

        rng = self.init_params(X.shape[1])
        opt = Adam(self.params_, lr=self.learning_rate)
        keep = 1.0 - self.dropout
        self.loss_history_ = []
        for epoch in range(1, self.epochs + 1):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, self.batch_size):
                idx = order[start:start + self.batch_size]
                mask = None
                if self.dropout > 0:
                    mask = (rng.random((len(idx), self.hidden[0])) < keep) / keep
                loss, grads = loss_and_grads(self.params_, X[idx], Y[idx], mask)
                if not np.isfinite(loss):
                    raise DivergenceError("non-finite network loss", epoch)
                opt.step(self.params_, grads)
                total += loss * len(idx)
            self.loss_history_.append(total / n)
        return self

    def predict_proba(self, X, batch_size=4096):
        X = _design(X)
        if X.shape[1] != self.params_["W1"].shape[0]:
            raise ValueError(
                f"input has {X.shape[1]} features, network expects {self.params_['W1'].shape[0]}"
            )
        out = [forward(self.params_, X[i:i + batch_size])[0]
               for i in range(0, X.shape[0], batch_size)]
        return np.vstack(out) if out else np.zeros((0, self.n_classes))

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def params(self):
        return dict(self.params_)

    def load_params(self, params):
        self.params_ = {k: params[k] for k in PARAM_NAMES}
