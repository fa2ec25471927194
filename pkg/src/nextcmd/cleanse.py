"""Event-type filtering, de-duplication, tokenization and run compression.

The stages always run in this order::

    filter_event_types -> deduplicate -> tokenize -> compress_runs
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import IO, Iterable

from .events import (
    EventCategory,
    Session,
    Token,
    classify_event_type,
    make_token,
    parse_token,
)
from .errors import CorpusFormatError

RUN_KEYS = ("full", "type_only")

_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class TokenStream:
    session_id: str
    tokens: tuple = ()

    def rendered(self) -> list:
        return [t.render() for t in self.tokens]

    def __len__(self):
        return len(self.tokens)


def filter_event_types(s: Session) -> Session:
    """Keep only developer-induced events; excluded and unknown types are dropped."""
    kept = tuple(
        e for e in s.events
        if classify_event_type(e.event_type) is EventCategory.DEVELOPER_INDUCED
    )
    return Session(s.session_id, kept)


def deduplicate(s: Session) -> Session:
    """Drop events repeating an earlier ``(session_id, triggered_at, event_type)``.

    The descriptor is not part of the key, so of two same-millisecond
    CommandEvents with different descriptors the first one survives.
    """
    seen = set()
    kept = []
    for e in s.events:
        key = (e.session_id, e.triggered_at, e.event_type)
        if key in seen:
            continue
        seen.add(key)
        kept.append(e)
    return Session(s.session_id, tuple(kept))


def tokenize(s: Session) -> TokenStream:
    """Map each event to ``Type`` or ``Type-Descriptor``.

    Whitespace inside descriptors is replaced by ``_`` so rendered tokens can
    be space-separated.
    """
    tokens = []
    for e in s.events:
        desc = _WS.sub("_", e.descriptor.strip()) if e.descriptor else None
        tokens.append(make_token(e.event_type, desc))
    return TokenStream(s.session_id, tuple(tokens))


def _run_key(token: Token, run_key: str):
    if run_key == "full":
        return token.base
    if run_key == "type_only":
        return token.event_type
    raise ValueError(f"run_key must be one of {RUN_KEYS}, got {run_key!r}")


def compress_runs(ts: TokenStream, run_key: str = "full") -> TokenStream:
    """Collapse each maximal run of equal tokens into one token.

    Runs of length >= 2 become a single repeated token (rendered ``X+``); the
    first token of the run provides the base.  A token that is already
    repeated counts as part of a run, which makes the operation idempotent.
    """
    out = []
    prev_key = None
    for tok in ts.tokens:
        key = _run_key(tok, run_key)
        if out and key == prev_key:
            if not out[-1].repeated:
                out[-1] = Token(out[-1].base, True)
            continue
        out.append(tok)
        prev_key = key
    return TokenStream(ts.session_id, tuple(out))


@dataclass
class CleansedCorpus:
    streams: list = field(default_factory=list)
    removed_by_filter: int = 0
    removed_unknown: int = 0
    removed_by_dedup: int = 0
    removed_by_compression: int = 0


def cleanse_session(s: Session, run_key: str = "full") -> TokenStream:
    return compress_runs(tokenize(deduplicate(filter_event_types(s))), run_key)


def cleanse_sessions(sessions: Iterable[Session], run_key: str = "full") -> CleansedCorpus:
    """Run the four stages over every session and keep removal bookkeeping.

    ``removed_by_filter`` counts every non-developer-induced event (excluded
    and unknown alike); ``removed_unknown`` is the unknown-type share of it.
    """
    result = CleansedCorpus()
    for s in sessions:
        filtered = filter_event_types(s)
        result.removed_by_filter += len(s) - len(filtered)
        result.removed_unknown += sum(
            classify_event_type(e.event_type) is EventCategory.UNKNOWN for e in s.events
        )
        deduped = deduplicate(filtered)
        result.removed_by_dedup += len(filtered) - len(deduped)
        raw = tokenize(deduped)
        compressed = compress_runs(raw, run_key)
        result.removed_by_compression += len(raw) - len(compressed)
        result.streams.append(compressed)
    return result


def write_streams(streams: Iterable[TokenStream], fh: IO[str]) -> None:
    for ts in streams:
        fh.write(json.dumps({"session_id": ts.session_id, "tokens": ts.rendered()},
                            separators=(",", ":")))
        fh.write("\n")


def read_streams(fh: Iterable) -> list:
    streams = []
    for lineno, line in enumerate(fh, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            tokens = tuple(parse_token(t) for t in obj["tokens"])
            streams.append(TokenStream(obj["session_id"], tokens))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusFormatError(str(exc), line=lineno) from exc
    return streams
