"""K-fold cross-validation, pooled accuracy and ROC AUC aggregation."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import FoldError
from .models import ClassifierConfig
from .pipeline import FeatureConfig, TrainedModel, make_featurizer

log = logging.getLogger(__name__)


# -- folds -----------------------------------------------------------------

@dataclass(frozen=True)
class FoldAssignment:
    k: int
    assignment: np.ndarray      # fold id per row
    seed: int

    def test_indices(self, fold):
        return np.flatnonzero(self.assignment == fold)

    def train_indices(self, fold):
        return np.flatnonzero(self.assignment != fold)

    def sizes(self):
        return np.bincount(self.assignment, minlength=self.k)


def kfold_split(n_rows: int, k: int = 5, seed: int = 0) -> FoldAssignment:
    """Seeded shuffle, then contiguous partition into ``k`` near-equal folds."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if n_rows < k:
        raise ValueError(f"need at least k={k} rows, got {n_rows}")
    perm = np.random.default_rng(seed).permutation(n_rows)
    assignment = np.empty(n_rows, dtype=np.int64)
    for fold, chunk in enumerate(np.array_split(perm, k)):
        assignment[chunk] = fold
    return FoldAssignment(k, assignment, seed)


def group_kfold_split(groups: Sequence, k: int = 5, seed: int = 0) -> FoldAssignment:
    """Folds that never split a group; shuffled groups go to the lightest fold."""
    groups = list(groups)
    uniq = list(dict.fromkeys(groups))
    if len(uniq) < k:
        raise ValueError(f"need at least k={k} groups, got {len(uniq)}")
    sizes = {g: 0 for g in uniq}
    for g in groups:
        sizes[g] += 1
    order = np.random.default_rng(seed).permutation(len(uniq))
    load = np.zeros(k, dtype=np.int64)
    fold_of = {}
    for i in order:
        g = uniq[i]
        f = int(np.argmin(load))
        fold_of[g] = f
        load[f] += sizes[g]
    return FoldAssignment(k, np.array([fold_of[g] for g in groups], dtype=np.int64), seed)


# -- metrics ---------------------------------------------------------------

def accuracy(scores, labels) -> float:
    """Fraction of rows whose argmax matches; ties go to the lowest class index."""
    scores = np.asarray(scores)
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("accuracy of an empty prediction set is undefined")
    if scores.shape[0] != labels.shape[0]:
        raise ValueError("scores and labels disagree on the number of rows")
    return float(np.mean(np.argmax(scores, axis=1) == labels))


def roc_auc_binary(scores, labels) -> Optional[float]:
    """Mann-Whitney AUC with average ranks; ``None`` when only one class is present."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels, dtype=bool).ravel()
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores, method="average")
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass
class AucSummary:
    per_class: dict             # class index -> (auc, support)
    absent: list                # class indices with no defined AUC
    micro: Optional[float]
    weighted: Optional[float]
    mean: Optional[float]
    std: Optional[float]
    min: Optional[float]
    max: Optional[float]


def aggregate_auc(scores, labels) -> AucSummary:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n, K = scores.shape
    truth = np.zeros((n, K), dtype=bool)
    truth[np.arange(n), labels] = True

    per_class, absent = {}, []
    for c in range(K):
        auc = roc_auc_binary(scores[:, c], truth[:, c])
        if auc is None:
            absent.append(c)
        else:
            per_class[c] = (auc, int(truth[:, c].sum()))
    micro = roc_auc_binary(scores.ravel(), truth.ravel())
    if not per_class:
        return AucSummary(per_class, absent, micro, None, None, None, None, None)
    aucs = np.array([a for a, _ in per_class.values()])
    support = np.array([s for _, s in per_class.values()], dtype=np.float64)
    return AucSummary(
        per_class, absent, micro,
        weighted=float(np.dot(aucs, support) / support.sum()),
        mean=float(aucs.mean()), std=float(aucs.std()),
        min=float(aucs.min()), max=float(aucs.max()),
    )


def majority_baseline(labels) -> float:
    labels = np.asarray(labels, dtype=np.int64)
    return float(np.bincount(labels).max() / len(labels))


# -- cross-validation ------------------------------------------------------

@dataclass
class CVResult:
    scores: np.ndarray          # (n_rows, n_classes) pooled held-out probabilities
    labels: np.ndarray
    folds: FoldAssignment


def cross_validate(rows, model_config: ClassifierConfig, features: FeatureConfig,
                   classes, k=5, seed=0, fit_scope="fold", group_by_session=False) -> CVResult:
    """Pooled held-out class probabilities for every row.

    With ``fit_scope="fold"`` the vocabulary (or token index) is refit on
    each fold's training rows only; ``"global"`` fits it once on all rows.
    """
    if fit_scope not in ("fold", "global"):
        raise ValueError("fit_scope must be 'fold' or 'global'")
    rows = list(rows)
    prefixes = [r.prefix for r in rows]
    labels = np.array([r.label for r in rows], dtype=np.int64)
    if group_by_session:
        folds = group_kfold_split([r.session_id for r in rows], k, seed)
    else:
        folds = kfold_split(len(rows), k, seed)

    shared = None
    if fit_scope == "global":
        shared = make_featurizer(model_config.kind, features).fit(prefixes)

    scores = np.zeros((len(rows), len(classes)))
    for fold in range(k):
        train, test = folds.train_indices(fold), folds.test_indices(fold)
        try:
            model = TrainedModel.fit([prefixes[i] for i in train], labels[train],
                                     model_config, features, classes, featurizer=shared)
            scores[test] = model.predict_proba([prefixes[i] for i in test])
        except Exception as exc:
            raise FoldError(fold, exc) from exc
        log.info("fold %d/%d done (%d train, %d test)", fold + 1, k, len(train), len(test))
    return CVResult(scores, labels, folds)


def holdout_accuracy(rows, model_config, features, classes, test_fraction=0.2, seed=0):
    """Accuracy on a single seeded train/test split."""
    rows = list(rows)
    n_test = max(1, int(round(test_fraction * len(rows))))
    perm = np.random.default_rng(seed).permutation(len(rows))
    test, train = perm[:n_test], perm[n_test:]
    model = TrainedModel.fit([rows[i].prefix for i in train], [rows[i].label for i in train],
                             model_config, features, classes)
    scores = model.predict_proba([rows[i].prefix for i in test])
    return accuracy(scores, [rows[i].label for i in test])


# -- reports ---------------------------------------------------------------

@dataclass
class MetricsReport:
    accuracy: float
    per_class_auc: dict = field(default_factory=dict)   # class name -> {auc, support}
    micro_auc: Optional[float] = None
    weighted_auc: Optional[float] = None
    auc_mean: Optional[float] = None
    auc_std: Optional[float] = None
    auc_min: Optional[float] = None
    auc_max: Optional[float] = None
    absent_classes: list = field(default_factory=list)
    n_rows: int = 0
    majority_baseline: Optional[float] = None
    config: dict = field(default_factory=dict)
    generated_at: Optional[str] = None

    TIMESTAMP_FIELD = "generated_at"

    @classmethod
    def from_scores(cls, scores, labels, classes, config=None, timestamp=True):
        summary = aggregate_auc(scores, labels)
        return cls(
            accuracy=accuracy(scores, labels),
            per_class_auc={classes[c]: {"auc": a, "support": s}
                           for c, (a, s) in summary.per_class.items()},
            micro_auc=summary.micro, weighted_auc=summary.weighted,
            auc_mean=summary.mean, auc_std=summary.std,
            auc_min=summary.min, auc_max=summary.max,
            absent_classes=[classes[c] for c in summary.absent],
            n_rows=int(len(labels)),
            majority_baseline=majority_baseline(labels),
            config=dict(config or {}),
            generated_at=(datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
                          if timestamp else None),
        )

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, obj):
        return cls(**obj)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def comparable(self):
        """Dict form without the timestamp, for rerun comparisons."""
        d = self.to_dict()
        d.pop(self.TIMESTAMP_FIELD, None)
        return d


def _model_label(config):
    names = {"nb-bernoulli": "Bernoulli Naive Bayes", "nb-multinomial": "Multinomial Naive Bayes",
             "logreg": "Logistic Regression", "nn": "Neural Network"}
    kind = config.get("model", {}).get("kind", "?")
    return names.get(kind, kind)


def format_table(reports) -> str:
    """Aligned text table: model, n-gram range, pooled accuracy, micro AUC."""
    header = ("Model", "N-Gram Range", "Accuracy (5-fold)", "Micro AUC")
    body = []
    for r in reports:
        cfg = r.config
        kind = cfg.get("model", {}).get("kind")
        lo, hi = cfg.get("features", {}).get("ngram_range", [None, None])
        ngram = "---" if kind == "nn" else f"[{lo},{hi}]"
        k = cfg.get("eval", {}).get("k")
        acc = f"{100 * r.accuracy:.2f}%"
        micro = "n/a" if r.micro_auc is None else f"{r.micro_auc:.2f}"
        body.append((_model_label(cfg), ngram, acc, micro))
        if k is not None and k != 5:
            header = ("Model", "N-Gram Range", f"Accuracy ({k}-fold)", "Micro AUC")
    widths = [max(len(row[i]) for row in [header] + body) for i in range(4)]
    sep = "-+-".join("-" * w for w in widths)

    def line(row):
        return " | ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()

    return "\n".join([line(header), sep] + [line(row) for row in body]) + "\n"
