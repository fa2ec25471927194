"""Domain types shared by every stage: event taxonomy, raw events, tokens, sessions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from .errors import CorpusFormatError

DEVELOPER_INDUCED = frozenset(
    {
        "CommandEvent",
        "CompletionEvent",
        "BuildEvent",
        "DebuggerEvent",
        "DocumentEvent",
        "EditEvent",
        "FindEvent",
        "IDEStateEvent",
        "NavigationEvent",
        "SolutionEvent",
        "TestRunEvent",
        "VersionControlEvent",
        "WindowEvent",
    }
)

EXCLUDED = frozenset(
    {"SystemEvent", "InfoEvent", "ErrorEvent", "ActivityEvent", "UserProfileEvent"}
)

KNOWN_EVENT_TYPES = tuple(sorted(DEVELOPER_INDUCED | EXCLUDED))

COMMAND_EVENT = "CommandEvent"
DESCRIPTOR_SEP = "-"
REPEAT_MARK = "+"


class EventCategory(enum.Enum):
    DEVELOPER_INDUCED = "developer_induced"
    EXCLUDED = "excluded"
    UNKNOWN = "unknown"


def classify_event_type(name: str) -> EventCategory:
    """Exact, case-sensitive lookup of an event type name in the taxonomy."""
    if name in DEVELOPER_INDUCED:
        return EventCategory.DEVELOPER_INDUCED
    if name in EXCLUDED:
        return EventCategory.EXCLUDED
    return EventCategory.UNKNOWN


@dataclass(frozen=True)
class RawEvent:
    """One logged IDE event.

    ``triggered_at`` must be timezone-aware; only millisecond precision is
    meaningful (the JSON-lines reader and writer both truncate to ms).
    """

    session_id: str
    triggered_at: datetime
    event_type: str
    descriptor: Optional[str] = None

    def __post_init__(self):
        if not self.session_id:
            raise ValueError("session_id must be non-empty")
        if self.triggered_at.tzinfo is None:
            raise ValueError("triggered_at must be timezone-aware")
        if not math.isfinite(self.triggered_at.timestamp()):
            raise ValueError("triggered_at must be finite")


@dataclass(frozen=True)
class Token:
    """A canonical event token: ``EventType`` or ``EventType-Descriptor``.

    The repeated flag stays out of ``base`` and is only flattened to a
    trailing ``+`` by :meth:`render`.
    """

    base: str
    repeated: bool = False

    def __post_init__(self):
        if not self.base:
            raise ValueError("token base must be non-empty")
        if any(ch.isspace() for ch in self.base):
            raise ValueError(f"token base contains whitespace: {self.base!r}")

    @property
    def event_type(self) -> str:
        return self.base.split(DESCRIPTOR_SEP, 1)[0]

    @property
    def descriptor(self) -> Optional[str]:
        parts = self.base.split(DESCRIPTOR_SEP, 1)
        return parts[1] if len(parts) == 2 else None

    @property
    def is_command(self) -> bool:
        return self.event_type == COMMAND_EVENT

    def render(self) -> str:
        return self.base + REPEAT_MARK if self.repeated else self.base

    def __str__(self):
        return self.render()


def render_token(t: Token) -> str:
    return t.render()


def parse_token(s: str) -> Token:
    """Inverse of :func:`render_token`. A single trailing ``+`` sets ``repeated``."""
    if not s:
        raise CorpusFormatError("empty token")
    if s.endswith(REPEAT_MARK):
        base = s[: -len(REPEAT_MARK)]
        if not base:
            raise CorpusFormatError(f"token has no base: {s!r}")
        return Token(base, True)
    return Token(s, False)


def make_token(event_type: str, descriptor: Optional[str] = None) -> Token:
    if descriptor:
        return Token(f"{event_type}{DESCRIPTOR_SEP}{descriptor}")
    return Token(event_type)


@dataclass(frozen=True)
class Session:
    """A session's events, sorted by ``triggered_at`` (stable on ties)."""

    session_id: str
    events: tuple = ()

    def __len__(self):
        return len(self.events)
