"""Session-level usage indicators derived from an event log.

Five indicators per session: total interactions (split into clicks and
gazes), application usage time, clicks per minute, gazes per minute, and
the number of objects focused on. An object counts as focused when at
least one single continuous gaze interval on it reaches the threshold
(default 1 second, inclusive); cumulative dwell is reported alongside but
does not trigger focus on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptySessionError, ValidationError
from .events import EventKind, InteractionEvent

FOCUS_THRESHOLD_MS = 1000


@dataclass(frozen=True)
class SessionMetrics:
    total_interactions: int
    clicks: int
    gazes: int
    usage_time_ms: int
    clicks_per_minute: float
    gazes_per_minute: float
    focused_objects: int

    def to_wire(self) -> dict:
        return {
            "total_interactions": self.total_interactions,
            "clicks": self.clicks,
            "gazes": self.gazes,
            "usage_time_ms": self.usage_time_ms,
            "clicks_per_minute": self.clicks_per_minute,
            "gazes_per_minute": self.gazes_per_minute,
            "focused_objects": self.focused_objects,
        }


@dataclass(frozen=True)
class ObjectGazeSummary:
    object_id: str
    gaze_count: int
    total_dwell_ms: int
    longest_dwell_ms: int
    focused: bool

    def to_wire(self) -> dict:
        return {
            "object_id": self.object_id,
            "gaze_count": self.gaze_count,
            "total_dwell_ms": self.total_dwell_ms,
            "longest_dwell_ms": self.longest_dwell_ms,
            "focused": self.focused,
        }


def _checked(events: Iterable[InteractionEvent]) -> list[InteractionEvent]:
    events = list(events)
    if not events:
        raise EmptySessionError()
    sessions = {e.session_id for e in events}
    if len(sessions) > 1:
        raise ValidationError(
            "events span multiple sessions: " + ", ".join(sorted(sessions))
        )
    return events


def compute_focused_objects(
    events: Iterable[InteractionEvent],
    threshold_ms: int = FOCUS_THRESHOLD_MS,
) -> list[ObjectGazeSummary]:
    """Per-object gaze summaries, sorted by object id.

    Only gazed objects appear; clicks never contribute. focused is true
    when some single gaze interval lasts >= threshold_ms.
    """
    if threshold_ms <= 0:
        raise ValidationError("focus threshold must be positive")
    events = _checked(events)
    by_object: dict[str, list[int]] = {}
    for event in events:
        if event.kind is EventKind.GAZE:
            by_object.setdefault(event.object_id, []).append(event.duration_ms)
    summaries = []
    for object_id in sorted(by_object):
        dwells = by_object[object_id]
        longest = max(dwells)
        summaries.append(
            ObjectGazeSummary(
                object_id=object_id,
                gaze_count=len(dwells),
                total_dwell_ms=sum(dwells),
                longest_dwell_ms=longest,
                focused=longest >= threshold_ms,
            )
        )
    return summaries


def compute_session_metrics(
    events: Iterable[InteractionEvent],
    focus_threshold_ms: int = FOCUS_THRESHOLD_MS,
) -> SessionMetrics:
    """The five usage indicators for one session's events, any input order.

    Usage time spans from the earliest start to the latest effective end
    (a click ends at its own start). Rates use exact fractional minutes
    and are 0 for zero-duration sessions. Raises EmptySessionError for an
    empty list: an absent session is not a zero-activity session.
    """
    events = _checked(events)
    clicks = sum(1 for e in events if e.kind is EventKind.CLICK)
    gazes = len(events) - clicks
    first = min(e.start for e in events)
    last = max(e.effective_end for e in events)
    delta = last - first
    usage_ms = (delta.days * 86_400 + delta.seconds) * 1000 + delta.microseconds // 1000

    if usage_ms > 0:
        minutes = usage_ms / 60_000
        clicks_per_minute = clicks / minutes
        gazes_per_minute = gazes / minutes
    else:
        clicks_per_minute = 0.0
        gazes_per_minute = 0.0

    focused = compute_focused_objects(events, focus_threshold_ms)
    return SessionMetrics(
        total_interactions=clicks + gazes,
        clicks=clicks,
        gazes=gazes,
        usage_time_ms=usage_ms,
        clicks_per_minute=clicks_per_minute,
        gazes_per_minute=gazes_per_minute,
        focused_objects=sum(1 for s in focused if s.focused),
    )


def format_metrics_table(
    session_id: str,
    metrics: SessionMetrics,
    summaries: Sequence[ObjectGazeSummary],
) -> str:
    """Human-readable indicator block plus a per-object table."""
    lines = [
        f"session:            {session_id}",
        f"total interactions: {metrics.total_interactions} "
        f"(clicks {metrics.clicks}, gazes {metrics.gazes})",
        f"usage time:         {metrics.usage_time_ms} ms",
        f"clicks per minute:  {metrics.clicks_per_minute:.2f}",
        f"gazes per minute:   {metrics.gazes_per_minute:.2f}",
        f"focused objects:    {metrics.focused_objects}",
    ]
    if summaries:
        lines.append("")
        lines.append("object_id             gazes  total_ms  longest_ms  focused")
        for s in summaries:
            lines.append(
                f"{s.object_id:<20} {s.gaze_count:>6} {s.total_dwell_ms:>9} "
                f"{s.longest_dwell_ms:>11}  {'yes' if s.focused else 'no'}"
            )
    return "\n".join(lines)
