"""Run configuration: one JSON document with strictly validated sections.

Example::

    {
      "paths":    {"corpus": "corpus.jsonl", "report": "report.json"},
      "synth":    {"preset": "order1", "session_count": 5000},
      "pipeline": {"run_key": "full", "fit_scope": "fold", "group_by_session": false},
      "extract":  {"top_k": 61, "max_prefix_window": null},
      "features": {"ngram_range": [1, 3], "min_df": 1, "window": 10},
      "model":    {"kind": "nb-bernoulli"},
      "eval":     {"k": 5, "seed": 0, "sample_size": null}
    }

Every section and key is optional; unknown keys are rejected.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from typing import Optional

from .cleanse import RUN_KEYS
from .errors import ConfigError
from .extract import Coverage, TopK
from .models import ClassifierConfig
from .pipeline import FeatureConfig

PATH_KEYS = ("corpus", "streams", "rows", "targets", "model", "report", "stats")


def _strict(section, obj, allowed):
    if not isinstance(obj, dict):
        raise ConfigError(f"section {section!r} must be a JSON object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {section!r}: {sorted(unknown)}")


@dataclass
class RunConfig:
    paths: dict = field(default_factory=dict)
    synth: dict = field(default_factory=lambda: {"preset": "order1"})
    run_key: str = "full"
    fit_scope: str = "fold"
    group_by_session: bool = False
    selection: object = field(default_factory=lambda: TopK(61))
    max_prefix_window: Optional[int] = None
    features: FeatureConfig = field(default_factory=FeatureConfig)
    model: ClassifierConfig = field(default_factory=ClassifierConfig)
    k: int = 5
    seed: int = 0
    sample_size: Optional[int] = None

    def __post_init__(self):
        if self.run_key not in RUN_KEYS:
            raise ConfigError(f"run_key must be one of {RUN_KEYS}")
        if self.fit_scope not in ("fold", "global"):
            raise ConfigError("fit_scope must be 'fold' or 'global'")
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        if self.max_prefix_window is not None and self.max_prefix_window < 1:
            raise ConfigError("max_prefix_window must be >= 1")
        if self.sample_size is not None and self.sample_size < 1:
            raise ConfigError("sample_size must be >= 1")

    @classmethod
    def from_dict(cls, obj) -> "RunConfig":
        _strict("config", obj, ("paths", "synth", "pipeline", "extract", "features", "model", "eval"))
        paths = obj.get("paths", {})
        _strict("paths", paths, PATH_KEYS)
        pipeline = obj.get("pipeline", {})
        _strict("pipeline", pipeline, ("run_key", "fit_scope", "group_by_session"))
        ext = obj.get("extract", {})
        _strict("extract", ext, ("top_k", "coverage", "max_prefix_window"))
        ev = obj.get("eval", {})
        _strict("eval", ev, ("k", "seed", "sample_size"))
        synth = obj.get("synth", {"preset": "order1"})
        if not isinstance(synth, dict):
            raise ConfigError("section 'synth' must be a JSON object")

        if "top_k" in ext and "coverage" in ext:
            raise ConfigError("extract: give either top_k or coverage, not both")
        try:
            selection = Coverage(ext["coverage"]) if "coverage" in ext else TopK(ext.get("top_k", 61))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"extract: {exc}") from exc
        try:
            return cls(
                paths=dict(paths),
                synth=copy.deepcopy(synth),
                run_key=pipeline.get("run_key", "full"),
                fit_scope=pipeline.get("fit_scope", "fold"),
                group_by_session=bool(pipeline.get("group_by_session", False)),
                selection=selection,
                max_prefix_window=ext.get("max_prefix_window"),
                features=FeatureConfig.from_dict(obj.get("features", {})),
                model=ClassifierConfig.from_dict(obj.get("model", {})),
                k=ev.get("k", 5),
                seed=ev.get("seed", 0),
                sample_size=ev.get("sample_size"),
            )
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        ext = ({"top_k": self.selection.k} if isinstance(self.selection, TopK)
               else {"coverage": self.selection.fraction})
        ext["max_prefix_window"] = self.max_prefix_window
        return {
            "paths": dict(self.paths),
            "synth": copy.deepcopy(self.synth),
            "pipeline": {"run_key": self.run_key, "fit_scope": self.fit_scope,
                         "group_by_session": self.group_by_session},
            "extract": ext,
            "features": self.features.to_dict(),
            "model": self.model.to_dict(),
            "eval": {"k": self.k, "seed": self.seed, "sample_size": self.sample_size},
        }
