"""Featurizer + classifier bundles that operate directly on token prefixes."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import ConfigError
from .featurize import NgramFeaturizer, WindowFeaturizer, featurizer_from_dict
from .models import ClassifierConfig, make_classifier, model_from_dict, model_to_dict

ENVELOPE_VERSION = 1


@dataclass(frozen=True)
class FeatureConfig:
    ngram_range: tuple = (1, 1)
    min_df: int = 1
    window: int = 10            # neural network input window

    def __post_init__(self):
        object.__setattr__(self, "ngram_range", tuple(int(v) for v in self.ngram_range))
        if len(self.ngram_range) != 2 or not 1 <= self.ngram_range[0] <= self.ngram_range[1]:
            raise ConfigError(f"ngram_range must satisfy 1 <= lo <= hi, got {self.ngram_range}")
        if self.min_df < 1 or self.window < 1:
            raise ConfigError("min_df and window must be >= 1")

    def to_dict(self):
        d = asdict(self)
        d["ngram_range"] = list(self.ngram_range)
        return d

    @classmethod
    def from_dict(cls, obj):
        unknown = set(obj) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigError(f"unknown feature config key(s): {sorted(unknown)}")
        return cls(**obj)


def make_featurizer(model_kind, features: FeatureConfig):
    if model_kind == "nn":
        return WindowFeaturizer(features.window)
    return NgramFeaturizer(features.ngram_range, features.min_df)


class TrainedModel:
    """A fitted featurizer and classifier plus the target class names."""

    def __init__(self, featurizer, classifier, config, classes):
        self.featurizer = featurizer
        self.classifier = classifier
        self.config = config
        self.classes = tuple(classes)

    @classmethod
    def fit(cls, prefixes, labels, config: ClassifierConfig, features: FeatureConfig, classes,
            featurizer=None):
        """Fit on training prefixes; pass a pre-fitted ``featurizer`` to skip refitting it."""
        prefixes = list(prefixes)
        if featurizer is None:
            featurizer = make_featurizer(config.kind, features).fit(prefixes)
        clf = make_classifier(config, len(classes))
        clf.fit(featurizer.transform(prefixes), np.asarray(labels))
        return cls(featurizer, clf, config, classes)

    def predict_proba(self, prefixes):
        return self.classifier.predict_proba(self.featurizer.transform(list(prefixes)))

    def top_k(self, prefix, k=5):
        p = self.predict_proba([prefix])[0]
        order = np.argsort(-p, kind="stable")[:k]
        return [(self.classes[i], float(p[i])) for i in order]

    def to_dict(self):
        return {
            "envelope_version": ENVELOPE_VERSION,
            "classes": list(self.classes),
            "featurizer": self.featurizer.to_dict(),
            "model": model_to_dict(self.classifier, self.config),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj):
        if obj.get("envelope_version") != ENVELOPE_VERSION:
            raise ValueError(f"unsupported envelope version {obj.get('envelope_version')!r}")
        clf, config = model_from_dict(obj["model"])
        return cls(featurizer_from_dict(obj["featurizer"]), clf, config, obj["classes"])

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
