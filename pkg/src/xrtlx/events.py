"""Interaction events and their newline-delimited wire format.

One event per line: a click (instantaneous) or a gaze interval on a scene
object. The parser is strict: canonical field set only, UTC timestamps with
millisecond precision, and every type invariant checked. Serialization is
canonical (fixed key order), so parse(serialize(e)) == e and a second
serialize of a parsed line is byte-identical.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import ParseError, ValidationError

EVENTS_FILE_SUFFIX = ".events.ndjson"

_TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}\.\d{3}Z$")
_FIELDS = ("session_id", "kind", "object_id", "start", "end")


class EventKind(str, enum.Enum):
    CLICK = "click"
    GAZE = "gaze"


class BatchSource(str, enum.Enum):
    FILE = "file"
    NETWORK = "network"


def parse_timestamp(text: str, field: str = "timestamp") -> datetime:
    """Strict UTC ISO-8601 with exactly millisecond precision, 'Z' suffix."""
    if not isinstance(text, str) or not _TIMESTAMP_RE.match(text):
        raise ValidationError(
            f"field {field!r}: expected UTC timestamp like 2024-03-01T10:15:00.250Z, "
            f"got {text!r}"
        )
    try:
        naive = datetime.strptime(text[:-1], "%Y-%m-%dT%H:%M:%S.%f")
    except ValueError as exc:
        raise ValidationError(f"field {field!r}: {exc}") from None
    return naive.replace(tzinfo=timezone.utc)


def format_timestamp(moment: datetime) -> str:
    return f"{moment:%Y-%m-%dT%H:%M:%S}.{moment.microsecond // 1000:03d}Z"


@dataclass(frozen=True)
class InteractionEvent:
    """One captured click or gaze; end is present exactly for gazes."""

    session_id: str
    kind: EventKind
    object_id: str
    start: datetime
    end: datetime | None = None

    def __post_init__(self):
        if not self.session_id:
            raise ValidationError("field 'session_id': must be non-empty")
        if not self.object_id:
            raise ValidationError("field 'object_id': must be non-empty")
        _check_instant(self.start, "start")
        if self.kind is EventKind.CLICK:
            if self.end is not None:
                raise ValidationError("field 'end': click events carry no end time")
        else:
            if self.end is None:
                raise ValidationError("field 'end': gaze events require an end time")
            _check_instant(self.end, "end")
            if self.end < self.start:
                raise ValidationError("field 'end': gaze end precedes start")

    @property
    def duration_ms(self) -> int:
        """Gaze dwell in milliseconds; 0 for clicks."""
        if self.end is None:
            return 0
        delta = self.end - self.start
        return (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000

    @property
    def effective_end(self) -> datetime:
        return self.start if self.end is None else self.end


def _check_instant(moment: datetime, field: str) -> None:
    if moment.tzinfo is None or moment.utcoffset() != timezone.utc.utcoffset(None):
        raise ValidationError(f"field {field!r}: timestamp must be UTC-aware")
    if moment.microsecond % 1000 != 0:
        raise ValidationError(f"field {field!r}: precision beyond milliseconds")


def _reject_duplicate_keys(pairs):
    keys = [k for k, _ in pairs]
    if len(set(keys)) != len(keys):
        raise ValidationError("duplicate keys in event record")
    return dict(pairs)


def parse_event_line(line: str) -> InteractionEvent:
    """Parse one wire line into a validated event.

    Raises ParseError (with byte offset) for malformed text and
    ValidationError (naming the field) for schema violations.
    """
    if "\n" in line or "\r" in line:
        raise ParseError("event line contains an embedded newline", byte_offset=0)
    try:
        record = json.loads(line, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        offset = len(line[: exc.pos].encode("utf-8"))
        raise ParseError(f"malformed event line: {exc.msg}", byte_offset=offset) from None
    if not isinstance(record, dict):
        raise ValidationError("event record must be a JSON object")

    unknown = sorted(set(record) - set(_FIELDS))
    if unknown:
        raise ValidationError("unknown field(s): " + ", ".join(repr(f) for f in unknown))
    for field in ("session_id", "kind", "object_id", "start"):
        if field not in record:
            raise ValidationError(f"field {field!r}: required but missing")
    for field in ("session_id", "kind", "object_id"):
        if not isinstance(record[field], str):
            raise ValidationError(f"field {field!r}: must be a string")
    try:
        kind = EventKind(record["kind"])
    except ValueError:
        raise ValidationError(
            f"field 'kind': expected 'click' or 'gaze', got {record['kind']!r}"
        ) from None

    start = parse_timestamp(record["start"], "start")
    end = None
    if "end" in record:
        end = parse_timestamp(record["end"], "end")
    return InteractionEvent(
        session_id=record["session_id"],
        kind=kind,
        object_id=record["object_id"],
        start=start,
        end=end,
    )


def serialize_event(event: InteractionEvent) -> str:
    """Canonical wire line: fixed key order, compact separators, no newline."""
    record = {
        "session_id": event.session_id,
        "kind": event.kind.value,
        "object_id": event.object_id,
        "start": format_timestamp(event.start),
    }
    if event.end is not None:
        record["end"] = format_timestamp(event.end)
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class EventBatch:
    """Events from one ingest call; must all belong to one session."""

    events: tuple[InteractionEvent, ...]
    source: BatchSource

    def __post_init__(self):
        sessions = {e.session_id for e in self.events}
        if len(sessions) > 1:
            raise ValidationError(
                "cross-session batch rejected: "
                + ", ".join(sorted(sessions))
            )

    @property
    def session_id(self) -> str | None:
        return self.events[0].session_id if self.events else None


def parse_batch(text: str, source: BatchSource = BatchSource.NETWORK) -> EventBatch:
    """Parse newline-delimited event lines, all-or-nothing.

    Blank lines are ignored. Any bad line rejects the whole batch; the
    error's details name every offending line number.
    """
    events: list[InteractionEvent] = []
    problems: list[str] = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(parse_event_line(line))
        except ValidationError as exc:
            problems.append(f"line {number}: {exc.message}")
    if problems:
        raise ValidationError(
            f"invalid event batch: {len(problems)} bad line(s)", details=problems
        )
    return EventBatch(events=tuple(events), source=source)


def read_events_file(path) -> list[InteractionEvent]:
    """Load a .events.ndjson file; errors carry line numbers."""
    with open(path, "r", encoding="utf-8") as handle:
        return list(parse_batch(handle.read(), source=BatchSource.FILE).events)
