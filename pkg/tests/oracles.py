"""Slow, independent reference computations the tests compare against.

Nothing here imports the code under test.
"""

import itertools
from collections import Counter
from fractions import Fraction

import numpy as np


def stable_sort_by_time(events):
    return [e for _, e in sorted(enumerate(events), key=lambda p: (p[1].triggered_at, p[0]))]


def maximal_runs(keys):
    """[(key, run_length)] via itertools.groupby."""
    return [(k, len(list(g))) for k, g in itertools.groupby(keys)]


def ngram_count(L, lo, hi):
    return sum(max(0, L - n + 1) for n in range(lo, hi + 1))


def bernoulli_posterior(X, y, x, n_classes, alpha):
    """Exact Bayes rule with Laplace-style per-feature Beta(alpha, alpha) smoothing."""
    alpha = Fraction(alpha)
    n = len(y)
    counts = Counter(y)
    present = all(counts[c] > 0 for c in range(n_classes))
    joint = []
    for c in range(n_classes):
        nc = counts[c]
        prior = (Fraction(nc, n) if present
                 else (nc + alpha) / (n + alpha * n_classes))
        lik = Fraction(1)
        for f in range(len(x)):
            on = sum(1 for row, lab in zip(X, y) if lab == c and row[f] > 0)
            p = (on + alpha) / (nc + 2 * alpha)
            lik *= p if x[f] > 0 else (1 - p)
        joint.append(prior * lik)
    z = sum(joint)
    return [float(j / z) for j in joint]


def multinomial_posterior(X, y, x, n_classes, alpha):
    """Exact Bayes rule under a smoothed multinomial; the coefficient cancels."""
    alpha = Fraction(alpha)
    n = len(y)
    V = len(x)
    counts = Counter(y)
    present = all(counts[c] > 0 for c in range(n_classes))
    joint = []
    for c in range(n_classes):
        nc = counts[c]
        prior = (Fraction(nc, n) if present
                 else (nc + alpha) / (n + alpha * n_classes))
        per_feat = [sum(row[f] for row, lab in zip(X, y) if lab == c) for f in range(V)]
        total = sum(per_feat)
        lik = Fraction(1)
        for f in range(V):
            theta = (per_feat[f] + alpha) / (total + alpha * V)
            lik *= theta ** int(x[f])
        joint.append(prior * lik)
    z = sum(joint)
    return [float(j / z) for j in joint]


def pairwise_auc(scores, labels):
    """P(random positive outranks random negative), ties counted 1/2."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    pos, neg = scores[labels], scores[~labels]
    wins = 0.0
    for p in pos:
        wins += np.sum(p > neg) + 0.5 * np.sum(p == neg)
    return wins / (len(pos) * len(neg))


def central_difference(f, theta, eps=1e-6):
    theta = np.array(theta, dtype=float)
    grad = np.zeros_like(theta)
    it = np.nditer(theta, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        old = theta[i]
        theta[i] = old + eps
        up = f(theta)
        theta[i] = old - eps
        down = f(theta)
        theta[i] = old
        grad[i] = (up - down) / (2 * eps)
    return grad


def relative_error(a, b):
    a, b = np.ravel(a), np.ravel(b)
    return np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12)


def chain_bayes_by_enumeration(initial, transitions, order, lengths, targets):
    """Bayes-optimal accuracy by enumerating every session.

    ``lengths`` is a list of equiprobable session lengths.  The predictor sees
    the complete prefix (not only the Markov context), so agreement with a
    context-based oracle also confirms the Markov reduction.
    """
    S = len(initial)
    joint = {}           # prefix -> Counter(next target -> prob mass)
    for L in lengths:
        pL = Fraction(1, len(lengths))
        for seq in itertools.product(range(S), repeat=L):
            p = pL * Fraction(initial[seq[0]])
            for t in range(1, L):
                if order == 1:
                    p *= Fraction(transitions[seq[t - 1]][seq[t]])
                else:
                    a = seq[t - 2] if t >= 2 else S
                    p *= Fraction(transitions[a][seq[t - 1]][seq[t]])
                if p == 0:
                    break
            if p == 0:
                continue
            for t in range(L):
                if seq[t] in targets:
                    joint.setdefault(seq[:t], Counter())[seq[t]] += p
    total = sum(sum(c.values()) for c in joint.values())
    best = sum(max(c.values()) for c in joint.values())
    return float(best / total)
