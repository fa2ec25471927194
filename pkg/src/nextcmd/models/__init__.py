"""Probabilistic classifiers sharing ``fit(X, y)`` / ``predict_proba(X)``."""

from .base import KINDS, ClassifierConfig, softmax
from .logistic import LogisticRegression
from .mlp import MLPClassifier
from .naive_bayes import BernoulliNB, MultinomialNB
from .persist import model_from_dict, model_to_dict


def make_classifier(config: ClassifierConfig, n_classes: int):
    if config.kind == "nb-bernoulli":
        return BernoulliNB(n_classes, alpha=config.alpha)
    if config.kind == "nb-multinomial":
        return MultinomialNB(n_classes, alpha=config.alpha)
    if config.kind == "logreg":
        return LogisticRegression(n_classes, l2=config.l2, solver=config.solver,
                                  max_iter=config.max_iter, tol=config.tol,
                                  learning_rate=config.gd_step)
    return MLPClassifier(n_classes, hidden=config.hidden, dropout=config.dropout,
                         learning_rate=config.learning_rate, epochs=config.epochs,
                         batch_size=config.batch_size, seed=config.seed)


__all__ = [
    "KINDS", "ClassifierConfig", "softmax", "LogisticRegression", "MLPClassifier",
    "BernoulliNB", "MultinomialNB", "make_classifier", "model_from_dict", "model_to_dict",
]
