"""Cohort report over a study's sessions, shared by the CLI and the service.

One row per session that has recorded events, carrying the user attributes
and the five usage indicators. Rows are grouped by a cohort attribute in
its documented display order (app knowledge high, medium, low; device
experience high, low_none) and sorted by session id within a group, so
identical stores always produce byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .errors import EmptySessionError, ValidationError
from .metrics import SessionMetrics, compute_session_metrics
from .store import Session, StudyStore

CSV_HEADER = (
    "session_id,user_id,app_knowledge,device_experience,total_interactions,"
    "clicks,gazes,usage_time_ms,clicks_per_minute,gazes_per_minute,focused_objects"
)

GROUP_ORDERS = {
    "app_knowledge": ("high", "medium", "low"),
    "device_experience": ("high", "low_none"),
}


@dataclass(frozen=True)
class ReportRow:
    session: Session
    metrics: SessionMetrics

    def cells(self) -> list[str]:
        m = self.metrics
        return [
            self.session.session_id,
            self.session.user_id,
            self.session.profile.app_knowledge.value,
            self.session.profile.device_experience.value,
            str(m.total_interactions),
            str(m.clicks),
            str(m.gazes),
            str(m.usage_time_ms),
            f"{m.clicks_per_minute:.2f}",
            f"{m.gazes_per_minute:.2f}",
            str(m.focused_objects),
        ]

    def as_dict(self) -> dict:
        keys = CSV_HEADER.split(",")
        return dict(zip(keys, self.cells()))


def collect_rows(store: StudyStore, study_id: str) -> list[ReportRow]:
    """One row per session with at least one recorded event."""
    rows = []
    for session in store.sessions_for_study(study_id):
        try:
            metrics = compute_session_metrics(store.read_events(session.session_id))
        except EmptySessionError:
            continue
        rows.append(ReportRow(session=session, metrics=metrics))
    return rows


def group_rows(rows: list[ReportRow], group_by: str) -> list[tuple[str, list[ReportRow]]]:
    if group_by not in GROUP_ORDERS:
        raise ValidationError(
            f"unknown group key {group_by!r}; expected one of: "
            + ", ".join(sorted(GROUP_ORDERS))
        )
    grouped = []
    for key in GROUP_ORDERS[group_by]:
        members = [
            row
            for row in rows
            if getattr(row.session.profile, group_by).value == key
        ]
        members.sort(key=lambda row: row.session.session_id)
        grouped.append((key, members))
    return grouped


def render_csv(rows: list[ReportRow], group_by: str) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for _, members in group_rows(rows, group_by):
        for row in members:
            writer.writerow(row.cells())
    return buffer.getvalue()


def render_json(rows: list[ReportRow], group_by: str, study_id: str) -> str:
    groups = [
        {"key": key, "sessions": [row.as_dict() for row in members]}
        for key, members in group_rows(rows, group_by)
    ]
    doc = {"study_id": study_id, "group_by": group_by, "groups": groups}
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def cohort_report(
    store: StudyStore, study_id: str, group_by: str, fmt: str = "csv"
) -> str:
    """Render the study's cohort table; fmt is 'csv' or 'json'."""
    if fmt not in ("csv", "json"):
        raise ValidationError(f"unknown report format {fmt!r}; expected csv or json")
    rows = collect_rows(store, study_id)
    if fmt == "csv":
        return render_csv(rows, group_by)
    return render_json(rows, group_by, study_id)
