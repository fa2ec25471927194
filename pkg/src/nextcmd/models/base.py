from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy.special import logsumexp

from ..errors import ConfigError

KINDS = ("nb-bernoulli", "nb-multinomial", "logreg", "nn")


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str = "nb-bernoulli"
    alpha: float = 1.0          # NB additive smoothing
    l2: float = 1.0             # logistic regression ridge strength
    solver: str = "lbfgs"       # logistic regression: "lbfgs" or "gd"
    max_iter: int = 200         # logistic regression iterations
    gd_step: float = 0.5        # logistic regression step size for solver="gd"
    tol: float = 1e-6           # stop once the loss improves by less than this
    learning_rate: float = 1e-3
    epochs: int = 10
    batch_size: int = 128
    dropout: float = 0.5
    hidden: tuple = (500, 100)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.kind not in KINDS:
            raise ConfigError(f"model kind must be one of {KINDS}, got {self.kind!r}")
        if self.alpha <= 0:
            raise ConfigError("alpha must be > 0")
        if self.l2 < 0:
            raise ConfigError("l2 must be >= 0")
        if self.solver not in ("lbfgs", "gd"):
            raise ConfigError("solver must be 'lbfgs' or 'gd'")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must lie in [0, 1)")
        if not self.hidden or any(h < 1 for h in self.hidden):
            raise ConfigError("hidden layer sizes must be >= 1")
        if self.epochs < 1 or self.batch_size < 1 or self.max_iter < 1:
            raise ConfigError("epochs, batch_size and max_iter must be >= 1")
        if self.learning_rate <= 0 or self.gd_step <= 0:
            raise ConfigError("learning_rate and gd_step must be > 0")

    def to_dict(self):
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    @classmethod
    def from_dict(cls, obj):
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown model config key(s): {sorted(unknown)}")
        return cls(**obj)


def softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def normalize_log(log_joint):
    return np.exp(log_joint - logsumexp(log_joint, axis=1, keepdims=True))


def check_labels(y, n_classes):
    y = np.asarray(y, dtype=np.int64)
    if y.ndim != 1:
        raise ValueError("labels must be a 1-D array of class indices")
    if len(y) == 0:
        raise ValueError("cannot fit on an empty training set")
    if y.min() < 0 or y.max() >= n_classes:
        raise ValueError(f"labels must lie in [0, {n_classes})")
    return y
