"""Target-class selection and (prefix, label) row extraction."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Union

from .errors import CorpusFormatError, NoCommandEventsError


@dataclass(frozen=True)
class TopK:
    k: int = 61

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("TopK needs k >= 1")


@dataclass(frozen=True)
class Coverage:
    fraction: float = 0.9

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError("Coverage fraction must lie in (0, 1]")


DEFAULT_MODE = TopK(61)


@dataclass(frozen=True)
class TargetClassSet:
    classes: tuple
    coverage: float
    mode: Union[TopK, Coverage] = DEFAULT_MODE

    def __post_init__(self):
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.classes)})

    def __len__(self):
        return len(self.classes)

    def index(self, descriptor: str) -> Optional[int]:
        return self._index.get(descriptor)

    def to_dict(self) -> dict:
        mode = ({"top_k": self.mode.k} if isinstance(self.mode, TopK)
                else {"coverage": self.mode.fraction})
        return {"classes": list(self.classes), "coverage": self.coverage, "mode": mode}

    @classmethod
    def from_dict(cls, obj) -> "TargetClassSet":
        m = obj["mode"]
        mode = TopK(m["top_k"]) if "top_k" in m else Coverage(m["coverage"])
        return cls(tuple(obj["classes"]), obj["coverage"], mode)


def command_counts(streams) -> Counter:
    """Occurrences of each command descriptor; ``X+`` counts once."""
    counts = Counter()
    for ts in streams:
        for tok in ts.tokens:
            if tok.is_command and tok.descriptor is not None:
                counts[tok.descriptor] += 1
    return counts


def select_targets(streams, mode: Union[TopK, Coverage] = DEFAULT_MODE) -> TargetClassSet:
    counts = command_counts(streams)
    if not counts:
        raise NoCommandEventsError("no command events")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    total = sum(counts.values())

    if isinstance(mode, TopK):
        chosen = ranked[: mode.k]
    elif isinstance(mode, Coverage):
        chosen = []
        cum = 0
        for desc, n in ranked:
            chosen.append((desc, n))
            cum += n
            # tolerance absorbs float error at exact boundaries such as 80/100 >= 0.8
            if cum >= mode.fraction * total - 1e-9 * total:
                break
    else:
        raise TypeError(f"unsupported selection mode {mode!r}")

    covered = sum(n for _, n in chosen)
    return TargetClassSet(tuple(d for d, _ in chosen), covered / total, mode)


@dataclass(frozen=True)
class LabeledRow:
    prefix: tuple
    label: int
    session_id: str


def extract_rows(stream, targets: TargetClassSet,
                 max_prefix_window: Optional[int] = None) -> list:
    """One row per in-target command position in ``stream``.

    The prefix is every rendered token strictly before that position,
    truncated to the last ``max_prefix_window`` tokens when given.
    """
    if max_prefix_window is not None and max_prefix_window < 1:
        raise ValueError("max_prefix_window must be >= 1")
    rendered = tuple(t.render() for t in stream.tokens)
    rows = []
    for pos, tok in enumerate(stream.tokens):
        if not tok.is_command or tok.descriptor is None:
            continue
        label = targets.index(tok.descriptor)
        if label is None:
            continue
        start = 0 if max_prefix_window is None else max(0, pos - max_prefix_window)
        rows.append(LabeledRow(rendered[start:pos], label, stream.session_id))
    return rows


def extract_all(streams, targets, max_prefix_window=None) -> list:
    rows = []
    for ts in streams:
        rows.extend(extract_rows(ts, targets, max_prefix_window))
    return rows


def write_rows(rows: Iterable[LabeledRow], targets: TargetClassSet, fh: IO[str]) -> None:
    for r in rows:
        fh.write(json.dumps({"session_id": r.session_id, "prefix": list(r.prefix),
                             "label": targets.classes[r.label]}, separators=(",", ":")))
        fh.write("\n")


def read_rows(fh, targets: TargetClassSet) -> list:
    rows = []
    for lineno, line in enumerate(fh, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            label = targets.index(obj["label"])
            if label is None:
                raise ValueError(f"label {obj['label']!r} is not a target class")
            rows.append(LabeledRow(tuple(obj["prefix"]), label, obj["session_id"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusFormatError(str(exc), line=lineno) from exc
    return rows
