"""Reading JSON-lines event logs into sessions, and corpus bookkeeping."""

from __future__ import annotations

import io
import json
import logging
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, NamedTuple, Union

from .errors import CorpusFormatError
from .events import RawEvent, Session

log = logging.getLogger(__name__)

_TIMESTAMP_RE = re.compile(
    r"^(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2})\.(\d{3})Z$"
)


def parse_timestamp(text: str) -> datetime:
    """Parse ``YYYY-MM-DDTHH:MM:SS.mmmZ`` into an aware UTC datetime."""
    m = _TIMESTAMP_RE.match(text)
    if m is None:
        raise ValueError(f"timestamp must look like 2017-03-01T10:00:00.000Z, got {text!r}")
    whole = datetime.strptime(m.group(1), "%Y-%m-%dT%H:%M:%S")
    return whole.replace(microsecond=int(m.group(2)) * 1000, tzinfo=timezone.utc)


def format_timestamp(ts: datetime) -> str:
    ts = ts.astimezone(timezone.utc)
    return ts.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ts.microsecond // 1000:03d}Z"


class ParseResult(NamedTuple):
    events: list
    malformed: int


def _event_from_obj(obj) -> RawEvent:
    if not isinstance(obj, dict):
        raise ValueError("expected a JSON object")
    for key in ("session_id", "triggered_at", "event_type"):
        if key not in obj:
            raise ValueError(f"missing key {key!r}")
        if not isinstance(obj[key], str):
            raise ValueError(f"{key!r} must be a string")
    descriptor = obj.get("descriptor")
    if descriptor is not None and not isinstance(descriptor, str):
        raise ValueError("'descriptor' must be a string or null")
    return RawEvent(
        session_id=obj["session_id"],
        triggered_at=parse_timestamp(obj["triggered_at"]),
        event_type=obj["event_type"],
        descriptor=descriptor or None,
    )


def parse_corpus(
    source: Union[IO, bytes, str, Iterable], lenient: bool = True
) -> ParseResult:
    """Parse a JSON-lines event log.

    ``source`` may be a binary or text stream, raw bytes, or an iterable of
    lines.  Blank lines are ignored.  With ``lenient=False`` the first bad line
    raises :class:`CorpusFormatError` carrying its 1-based line number;
    otherwise bad lines are skipped and counted in ``ParseResult.malformed``.
    """
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    elif isinstance(source, str):
        source = io.StringIO(source)

    events = []
    malformed = 0
    for lineno, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            events.append(_event_from_obj(json.loads(line)))
        except (ValueError, json.JSONDecodeError) as exc:
            if not lenient:
                raise CorpusFormatError(str(exc), line=lineno) from exc
            malformed += 1
    if malformed:
        log.warning("skipped %d malformed line(s)", malformed)
    return ParseResult(events, malformed)


def read_corpus(path, lenient: bool = True) -> ParseResult:
    with open(path, "rb") as fh:
        return parse_corpus(fh, lenient=lenient)


def event_to_json(event: RawEvent) -> str:
    obj = {
        "session_id": event.session_id,
        "triggered_at": format_timestamp(event.triggered_at),
        "event_type": event.event_type,
    }
    if event.descriptor is not None:
        obj["descriptor"] = event.descriptor
    return json.dumps(obj, separators=(",", ":"))


def write_corpus(events: Iterable[RawEvent], fh: IO[str]) -> int:
    n = 0
    for event in events:
        fh.write(event_to_json(event))
        fh.write("\n")
        n += 1
    return n


def group_sessions(events: Iterable[RawEvent]) -> list:
    """One session per distinct id, in first-appearance order, stably time-sorted."""
    buckets = {}
    for event in events:
        buckets.setdefault(event.session_id, []).append(event)
    # list.sort is stable, so equal timestamps keep input order
    return [
        Session(sid, tuple(sorted(evs, key=lambda e: e.triggered_at)))
        for sid, evs in buckets.items()
    ]


@dataclass
class CorpusStats:
    total_events: int = 0
    events_per_type: dict = field(default_factory=dict)
    session_count: int = 0
    removed_by_filter: int = 0
    removed_by_dedup: int = 0
    removed_by_compression: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CorpusStats":
        return cls(**json.loads(text))


def corpus_stats(sessions, cleansed=None) -> CorpusStats:
    """Aggregate raw counts over ``sessions`` plus removal counts.

    ``cleansed`` is the :class:`~nextcmd.cleanse.CleansedCorpus` produced from
    the same sessions; without it the removal counts are left at zero.
    """
    per_type = Counter()
    total = 0
    for s in sessions:
        for e in s.events:
            per_type[e.event_type] += 1
            total += 1
    stats = CorpusStats(
        total_events=total,
        events_per_type=dict(sorted(per_type.items())),
        session_count=len(sessions),
    )
    if cleansed is not None:
        stats.removed_by_filter = cleansed.removed_by_filter
        stats.removed_by_dedup = cleansed.removed_by_dedup
        stats.removed_by_compression = cleansed.removed_by_compression
    return stats
