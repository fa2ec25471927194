"""JSON envelopes for fitted classifiers."""

import numpy as np

FORMAT_VERSION = 1


def encode_array(a):
    a = np.asarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "data": a.ravel().tolist()}


def decode_array(obj):
    return np.asarray(obj["data"], dtype=np.float64).reshape(obj["shape"])


def model_to_dict(clf, config):
    return {
        "format_version": FORMAT_VERSION,
        "kind": clf.kind,
        "n_classes": clf.n_classes,
        "config": config.to_dict(),
        "parameters": {k: encode_array(v) for k, v in clf.params().items()},
    }


def model_from_dict(obj):
    from . import ClassifierConfig, make_classifier

    if obj.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {obj.get('format_version')!r}")
    config = ClassifierConfig.from_dict(obj["config"])
    clf = make_classifier(config, obj["n_classes"])
    clf.load_params({k: decode_array(v) for k, v in obj["parameters"].items()})
    return clf, config
