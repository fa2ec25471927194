"""N-gram count vectors and fixed-window categorical encodings of prefixes."""

from __future__ import annotations

import json
from collections import Counter
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

PAD_ID = 0
UNK_TOKEN = "<UNK>"


def _check_range(ngram_range):
    lo, hi = ngram_range
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid ngram_range {ngram_range!r}: need 1 <= lo <= hi")
    return int(lo), int(hi)


def extract_ngrams(prefix: Sequence[str], ngram_range=(1, 1)) -> list:
    """All contiguous n-grams for n = lo..hi, grouped by n, each group in order."""
    lo, hi = _check_range(ngram_range)
    prefix = tuple(prefix)
    grams = []
    for n in range(lo, hi + 1):
        grams.extend(prefix[i:i + n] for i in range(len(prefix) - n + 1))
    return grams


def _grams_by_position(prefix, lo, hi):
    # start position first, then n; this fixes first-seen index order
    L = len(prefix)
    for i in range(L):
        for n in range(lo, min(hi, L - i) + 1):
            yield prefix[i:i + n]


class Vocabulary:
    """Maps n-gram tuples to dense feature indices."""

    def __init__(self, ngram_range=(1, 1), entries=None):
        self.ngram_range = _check_range(ngram_range)
        self.entries = dict(entries or {})

    @property
    def size(self):
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, gram):
        return tuple(gram) in self.entries

    def __eq__(self, other):
        return (isinstance(other, Vocabulary) and self.ngram_range == other.ngram_range
                and list(self.entries.items()) == list(other.entries.items()))

    def to_dict(self) -> dict:
        return {
            "ngram_range": list(self.ngram_range),
            "entries": [{"gram": list(g), "index": i} for g, i in self.entries.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj) -> "Vocabulary":
        entries = {tuple(e["gram"]): int(e["index"]) for e in obj["entries"]}
        return cls(tuple(obj["ngram_range"]), entries)

    @classmethod
    def from_json(cls, text) -> "Vocabulary":
        return cls.from_dict(json.loads(text))


def fit_vocabulary(prefixes: Iterable[Sequence[str]], ngram_range=(1, 1), min_df=1) -> Vocabulary:
    """Index every n-gram occurring in at least ``min_df`` training prefixes.

    Indices follow first-seen order, scanning prefixes in order and each prefix
    by start position and then by n.
    """
    lo, hi = _check_range(ngram_range)
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    order = {}
    df = Counter()
    n_rows = 0
    for prefix in prefixes:
        n_rows += 1
        grams = list(_grams_by_position(tuple(prefix), lo, hi))
        for g in grams:
            if g not in order:
                order[g] = len(order)
        if min_df > 1:
            df.update(set(grams))
    if n_rows == 0:
        raise ValueError("cannot fit a vocabulary on zero rows")
    kept = order if min_df == 1 else [g for g in order if df[g] >= min_df]
    return Vocabulary((lo, hi), {g: i for i, g in enumerate(kept)})


def vectorize(prefix: Sequence[str], vocab: Vocabulary) -> dict:
    """Sparse count vector ``{index: count}``; unseen n-grams are dropped."""
    counts = Counter()
    lo, hi = vocab.ngram_range
    entries = vocab.entries
    for g in _grams_by_position(tuple(prefix), lo, hi):
        idx = entries.get(g)
        if idx is not None:
            counts[idx] += 1
    return dict(counts)


def vectorize_many(prefixes: Iterable[Sequence[str]], vocab: Vocabulary) -> sp.csr_matrix:
    indptr = [0]
    indices = []
    data = []
    for prefix in prefixes:
        vec = vectorize(prefix, vocab)
        for idx in sorted(vec):
            indices.append(idx)
            data.append(vec[idx])
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(indptr) - 1, vocab.size),
    )


def fit_token_index(prefixes: Iterable[Sequence[str]]) -> dict:
    """Token ids for window encoding: PAD is 0, UNK is 1, real tokens from 2."""
    index = {UNK_TOKEN: 1}
    for prefix in prefixes:
        for tok in prefix:
            if tok not in index:
                index[tok] = len(index) + 1
    return index


def _vocab_size(token_index: Mapping[str, int]) -> int:
    return max(token_index.values(), default=0)


def window_ids(prefix: Sequence[str], W: int, token_index: Mapping[str, int]) -> np.ndarray:
    """Ids of the last ``W`` tokens, right-aligned and left-padded with PAD."""
    if W < 1:
        raise ValueError("window size must be >= 1")
    tail = list(prefix)[-W:]
    unk = token_index.get(UNK_TOKEN)
    ids = np.full(W, PAD_ID, dtype=np.int64)
    for j, tok in enumerate(tail, start=W - len(tail)):
        tid = token_index.get(tok, unk)
        if tid is None:
            raise KeyError(f"token {tok!r} not in index and no {UNK_TOKEN} entry")
        ids[j] = tid
    return ids


class WindowEncoding:
    __slots__ = ("window", "n_ids")

    def __init__(self, window, n_ids):
        self.window = window
        self.n_ids = n_ids

    @property
    def one_hot(self) -> np.ndarray:
        W = len(self.window)
        dense = np.zeros(W * self.n_ids)
        dense[np.arange(W) * self.n_ids + self.window] = 1.0
        return dense


def encode_window(prefix, W, token_index) -> WindowEncoding:
    return WindowEncoding(window_ids(prefix, W, token_index), _vocab_size(token_index) + 1)


def encode_windows(prefixes, W, token_index) -> sp.csr_matrix:
    """Stacked one-hot window encodings as a sparse ``(n, W * (V + 1))`` matrix."""
    n_ids = _vocab_size(token_index) + 1
    ids = [window_ids(p, W, token_index) for p in prefixes]
    n = len(ids)
    cols = (np.vstack(ids) + np.arange(W) * n_ids).ravel() if n else np.zeros(0, np.int64)
    return sp.csr_matrix(
        (np.ones(n * W), cols, np.arange(0, n * W + 1, W)), shape=(n, W * n_ids)
    )


def one_hot_label(label: int, n_classes: int) -> np.ndarray:
    if not 0 <= label < n_classes:
        raise ValueError(f"label {label} out of range for {n_classes} classes")
    out = np.zeros(n_classes)
    out[label] = 1.0
    return out


def one_hot_labels(labels, n_classes) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros((len(labels), n_classes))
    out[np.arange(len(labels)), labels] = 1.0
    return out


class NgramFeaturizer:
    """Count-vectorizer front end for the naive Bayes and logistic models."""

    kind = "ngram"

    def __init__(self, ngram_range=(1, 1), min_df=1):
        self.ngram_range = _check_range(ngram_range)
        self.min_df = min_df
        self.vocabulary = None

    def fit(self, prefixes):
        self.vocabulary = fit_vocabulary(prefixes, self.ngram_range, self.min_df)
        return self

    def transform(self, prefixes):
        return vectorize_many(prefixes, self.vocabulary)

    @property
    def n_features(self):
        return self.vocabulary.size

    def to_dict(self):
        return {"kind": self.kind, "min_df": self.min_df,
                "vocabulary": self.vocabulary.to_dict()}

    @classmethod
    def from_dict(cls, obj):
        vocab = Vocabulary.from_dict(obj["vocabulary"])
        f = cls(vocab.ngram_range, obj.get("min_df", 1))
        f.vocabulary = vocab
        return f


class WindowFeaturizer:
    """One-hot window encoder for the neural network."""

    kind = "window"

    def __init__(self, window=10):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self.token_index = None

    def fit(self, prefixes):
        self.token_index = fit_token_index(prefixes)
        return self

    def transform(self, prefixes):
        return encode_windows(prefixes, self.window, self.token_index)

    @property
    def n_features(self):
        return self.window * (_vocab_size(self.token_index) + 1)

    def to_dict(self):
        return {"kind": self.kind, "window": self.window, "token_index": self.token_index}

    @classmethod
    def from_dict(cls, obj):
        f = cls(obj["window"])
        f.token_index = {k: int(v) for k, v in obj["token_index"].items()}
        return f


def featurizer_from_dict(obj):
    kinds = {NgramFeaturizer.kind: NgramFeaturizer, WindowFeaturizer.kind: WindowFeaturizer}
    return kinds[obj["kind"]].from_dict(obj)
