"""File-backed persistence for studies, sessions, responses and event logs.

Layout under one root directory:

    studies/<study_id>/study.json
    sessions/<session_id>/session.json
    sessions/<session_id>/response.json
    sessions/<session_id>/events.ndjson
    sessions/<session_id>/events.commit

JSON documents are written atomically (temp file + rename). Event logs are
append-only; a batch becomes visible only once the side-car commit marker
records its byte length, so readers never observe a partially written
batch. Mutations on one session are serialized in-process; different
sessions proceed in parallel.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import os
import random
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping

from . import scoring
from .dimensions import (
    DimensionSet,
    Variant,
    WeightingMode,
    check_mode_compatible,
    dimension_set,
    to_mode,
    to_variant,
)
from .errors import (
    ConflictError,
    NotFoundError,
    StateError,
    StorageError,
    ValidationError,
)
from .events import (
    EventBatch,
    InteractionEvent,
    format_timestamp,
    parse_event_line,
    parse_timestamp,
    serialize_event,
)

_TOKEN_ALPHABET = "abcdefghijklmnopqrstuvwxyz234567"
_TOKEN_LENGTH = 8


class AppKnowledge(str, enum.Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


class DeviceExperience(str, enum.Enum):
    HIGH = "high"
    LOW_NONE = "low_none"


class TaskExperience(str, enum.Enum):
    HIGH = "high"
    LOW = "low"


class SessionState(str, enum.Enum):
    CREATED = "created"
    WEIGHTING_DONE = "weighting_done"
    RATING_DONE = "rating_done"
    SCORED = "scored"


@dataclass(frozen=True)
class UserProfile:
    app_knowledge: AppKnowledge
    device_experience: DeviceExperience
    task_experience: TaskExperience | None = None

    def to_wire(self) -> dict:
        doc = {
            "app_knowledge": self.app_knowledge.value,
            "device_experience": self.device_experience.value,
        }
        if self.task_experience is not None:
            doc["task_experience"] = self.task_experience.value
        return doc

    @classmethod
    def from_wire(cls, doc: Mapping) -> "UserProfile":
        try:
            task = doc.get("task_experience")
            return cls(
                app_knowledge=AppKnowledge(doc["app_knowledge"]),
                device_experience=DeviceExperience(doc["device_experience"]),
                task_experience=None if task is None else TaskExperience(task),
            )
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"invalid user profile: {exc}") from None


@dataclass(frozen=True)
class Study:
    study_id: str
    name: str
    dimension_set: Variant
    weighting_mode: WeightingMode
    created_at: datetime

    @property
    def dimensions(self) -> DimensionSet:
        return dimension_set(self.dimension_set)

    def to_wire(self) -> dict:
        return {
            "study_id": self.study_id,
            "name": self.name,
            "dimension_set": self.dimension_set.value,
            "weighting_mode": self.weighting_mode.value,
            "created_at": format_timestamp(self.created_at),
        }

    @classmethod
    def from_wire(cls, doc: Mapping) -> "Study":
        return cls(
            study_id=doc["study_id"],
            name=doc["name"],
            dimension_set=Variant(doc["dimension_set"]),
            weighting_mode=WeightingMode(doc["weighting_mode"]),
            created_at=parse_timestamp(doc["created_at"], "created_at"),
        )


@dataclass(frozen=True)
class Session:
    session_id: str
    study_id: str
    user_id: str
    profile: UserProfile
    state: SessionState
    created_at: datetime

    def to_wire(self) -> dict:
        return {
            "session_id": self.session_id,
            "study_id": self.study_id,
            "user_id": self.user_id,
            "profile": self.profile.to_wire(),
            "state": self.state.value,
            "created_at": format_timestamp(self.created_at),
        }

    @classmethod
    def from_wire(cls, doc: Mapping) -> "Session":
        return cls(
            session_id=doc["session_id"],
            study_id=doc["study_id"],
            user_id=doc["user_id"],
            profile=UserProfile.from_wire(doc["profile"]),
            state=SessionState(doc["state"]),
            created_at=parse_timestamp(doc["created_at"], "created_at"),
        )


@dataclass(frozen=True)
class AppendResult:
    appended: int
    deduplicated: int


def _utc_now_ms() -> datetime:
    now = datetime.now(timezone.utc)
    return now.replace(microsecond=now.microsecond - now.microsecond % 1000)


class StudyStore:
    """Single-directory store; safe to share across threads.

    rng and now_fn exist so tools (e.g. the simulator) can make identifier
    and timestamp generation deterministic; production use leaves both unset.
    """

    def __init__(
        self,
        root: str | os.PathLike,
        rng: random.Random | None = None,
        now_fn: Callable[[], datetime] | None = None,
    ):
        self.root = Path(root)
        self._rng = rng
        self._now = now_fn or _utc_now_ms
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        try:
            (self.root / "studies").mkdir(parents=True, exist_ok=True)
            (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot initialize store at {self.root}: {exc}") from exc

    # -- identifiers and paths ------------------------------------------------

    def _new_token(self) -> str:
        if self._rng is not None:
            return "".join(self._rng.choice(_TOKEN_ALPHABET) for _ in range(_TOKEN_LENGTH))
        return "".join(secrets.choice(_TOKEN_ALPHABET) for _ in range(_TOKEN_LENGTH))

    def _study_dir(self, study_id: str) -> Path:
        return self.root / "studies" / study_id

    def _session_dir(self, session_id: str) -> Path:
        return self.root / "sessions" / session_id

    def _session_lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- studies ---------------------------------------------------------------

    def create_study(
        self,
        name: str,
        dimension_variant: Variant | str,
        weighting_mode: WeightingMode | str,
    ) -> Study:
        if not name:
            raise ValidationError("study name must be non-empty")
        variant = to_variant(dimension_variant)
        mode = to_mode(weighting_mode)
        check_mode_compatible(variant, mode)
        for _ in range(64):
            study_id = self._new_token()
            directory = self._study_dir(study_id)
            try:
                directory.mkdir(parents=True, exist_ok=False)
                break
            except FileExistsError:
                continue
            except OSError as exc:
                raise StorageError(f"cannot create {directory}: {exc}") from exc
        else:
            raise StorageError("could not allocate a fresh study id")
        study = Study(
            study_id=study_id,
            name=name,
            dimension_set=variant,
            weighting_mode=mode,
            created_at=self._now(),
        )
        self._write_json(directory / "study.json", study.to_wire())
        return study

    def get_study(self, study_id: str) -> Study:
        doc = self._read_json(
            self._study_dir(study_id) / "study.json", f"study {study_id!r}"
        )
        return Study.from_wire(doc)

    def list_studies(self) -> list[Study]:
        base = self.root / "studies"
        return [self.get_study(p.name) for p in sorted(base.iterdir()) if p.is_dir()]

    # -- sessions ----------------------------------------------------------------

    def create_session(self, study_id: str, user_id: str, profile: UserProfile) -> Session:
        study = self.get_study(study_id)
        if not user_id:
            raise ValidationError("user_id must be non-empty")
        for _ in range(64):
            session_id = self._new_token()
            directory = self._session_dir(session_id)
            try:
                directory.mkdir(parents=True, exist_ok=False)
                break
            except FileExistsError:
                continue
            except OSError as exc:
                raise StorageError(f"cannot create {directory}: {exc}") from exc
        else:
            raise StorageError("could not allocate a fresh session id")
        session = Session(
            session_id=session_id,
            study_id=study.study_id,
            user_id=user_id,
            profile=profile,
            state=SessionState.CREATED,
            created_at=self._now(),
        )
        self._write_json(directory / "session.json", session.to_wire())
        self._write_bytes(directory / "events.ndjson", b"")
        self._write_bytes(directory / "events.commit", b"0")
        return session

    def get_session(self, session_id: str) -> Session:
        doc = self._read_json(
            self._session_dir(session_id) / "session.json", f"session {session_id!r}"
        )
        return Session.from_wire(doc)

    def sessions_for_study(self, study_id: str) -> list[Session]:
        self.get_study(study_id)
        base = self.root / "sessions"
        sessions = []
        for path in sorted(base.iterdir()):
            if not (path / "session.json").exists():
                continue
            session = self.get_session(path.name)
            if session.study_id == study_id:
                sessions.append(session)
        return sessions

    def pairs_for_session(self, session_id: str, seed: int | None = None) -> list[scoring.Pair]:
        session = self.get_session(session_id)
        study = self.get_study(session.study_id)
        return scoring.generate_pairs(study.dimensions, study.weighting_mode, seed)

    # -- questionnaire phases ---------------------------------------------------

    def record_choices(
        self, session_id: str, choices: Iterable[scoring.PairwiseChoice]
    ) -> Session:
        choices = list(choices)
        with self._session_lock(session_id):
            session = self.get_session(session_id)
            if session.state is not SessionState.CREATED:
                stored = self._choice_set(self.get_choices(session_id))
                if stored == self._choice_set(choices):
                    return session
                raise ConflictError(
                    "choices already recorded for this session differ from the resubmission"
                )
            study = self.get_study(session.study_id)
            scoring.tally_weights(choices, study.dimensions, study.weighting_mode)
            self._update_response(session_id, choices=_choices_to_wire(choices))
            return self._set_state(session, SessionState.WEIGHTING_DONE)

    def record_ratings(self, session_id: str, ratings: Mapping[str, int]) -> Session:
        ratings = dict(ratings)
        with self._session_lock(session_id):
            session = self.get_session(session_id)
            if session.state is SessionState.CREATED:
                raise StateError("ratings submitted before choices were recorded")
            if session.state is not SessionState.WEIGHTING_DONE:
                if self.get_ratings(session_id) == ratings:
                    return session
                raise ConflictError(
                    "ratings already recorded for this session differ from the resubmission"
                )
            study = self.get_study(session.study_id)
            scoring.validate_ratings(ratings, study.dimensions)
            self._update_response(session_id, ratings=ratings)
            return self._set_state(session, SessionState.RATING_DONE)

    def score_and_persist(self, session_id: str) -> scoring.WorkloadScore:
        with self._session_lock(session_id):
            session = self.get_session(session_id)
            if session.state is SessionState.SCORED:
                return self._stored_score(session_id)
            if session.state is not SessionState.RATING_DONE:
                raise StateError(
                    f"cannot score a session in state {session.state.value!r}"
                )
            study = self.get_study(session.study_id)
            score = scoring.score_session(
                self.get_choices(session_id),
                self.get_ratings(session_id),
                study.dimensions,
                study.weighting_mode,
            )
            score_doc = score.to_wire()
            score_doc["exact"] = score.to_exact()
            self._update_response(session_id, score=score_doc)
            self._set_state(session, SessionState.SCORED)
            return score

    def get_choices(self, session_id: str) -> list[scoring.PairwiseChoice]:
        doc = self._response_doc(session_id)
        if "choices" not in doc:
            raise StateError(f"session {session_id!r} has no recorded choices")
        return [
            scoring.PairwiseChoice(pair=(c["pair"][0], c["pair"][1]), chosen=c["chosen"])
            for c in doc["choices"]
        ]

    def get_ratings(self, session_id: str) -> dict[str, int]:
        doc = self._response_doc(session_id)
        if "ratings" not in doc:
            raise StateError(f"session {session_id!r} has no recorded ratings")
        return dict(doc["ratings"])

    def get_score(self, session_id: str) -> scoring.WorkloadScore:
        return self._stored_score(session_id)

    def _stored_score(self, session_id: str) -> scoring.WorkloadScore:
        doc = self._response_doc(session_id)
        if "score" not in doc:
            raise StateError(f"session {session_id!r} has not been scored")
        return scoring.WorkloadScore.from_exact(doc["score"]["exact"])

    @staticmethod
    def _choice_set(choices: Iterable[scoring.PairwiseChoice]) -> set:
        return {(frozenset(c.pair), c.chosen) for c in choices}

    def _set_state(self, session: Session, state: SessionState) -> Session:
        updated = dataclasses.replace(session, state=state)
        self._write_json(
            self._session_dir(session.session_id) / "session.json", updated.to_wire()
        )
        return updated

    def _response_doc(self, session_id: str) -> dict:
        self.get_session(session_id)
        path = self._session_dir(session_id) / "response.json"
        if not path.exists():
            return {}
        return self._read_json(path, f"response for session {session_id!r}")

    def _update_response(self, session_id: str, **parts) -> None:
        doc = self._response_doc(session_id)
        doc.update(parts)
        self._write_json(self._session_dir(session_id) / "response.json", doc)

    # -- event log -----------------------------------------------------------------

    def append_events(
        self, session_id: str, batch: EventBatch | Iterable[InteractionEvent]
    ) -> AppendResult:
        """Append a batch atomically, dropping byte-identical replays.

        A line is deduplicated when its exact bytes already exist in the
        committed log (or earlier in the same batch), which makes resending
        a previously accepted batch a no-op. All-or-nothing: the commit
        marker advances only after every new line is physically appended.
        """
        events = tuple(batch.events if isinstance(batch, EventBatch) else batch)
        with self._session_lock(session_id):
            self.get_session(session_id)
            mismatched = sorted({e.session_id for e in events} - {session_id})
            if mismatched:
                raise ValidationError(
                    f"batch events belong to session(s) {', '.join(mismatched)}, "
                    f"not {session_id}"
                )
            existing = self._committed_lines(session_id)
            seen = set(existing)
            fresh: list[bytes] = []
            deduplicated = 0
            for event in events:
                line = serialize_event(event).encode("utf-8")
                if line in seen:
                    deduplicated += 1
                    continue
                seen.add(line)
                fresh.append(line)
            if fresh:
                self._discard_uncommitted_tail(session_id)
                payload = b"".join(line + b"\n" for line in fresh)
                self._append_log_bytes(session_id, payload)
                self._commit_log_length(session_id)
            return AppendResult(appended=len(fresh), deduplicated=deduplicated)

    def read_events(self, session_id: str) -> list[InteractionEvent]:
        self.get_session(session_id)
        return [
            parse_event_line(line.decode("utf-8"))
            for line in self._committed_lines(session_id)
        ]

    def _log_paths(self, session_id: str) -> tuple[Path, Path]:
        directory = self._session_dir(session_id)
        return directory / "events.ndjson", directory / "events.commit"

    def _committed_length(self, session_id: str) -> int:
        log_path, commit_path = self._log_paths(session_id)
        size = log_path.stat().st_size if log_path.exists() else 0
        if not commit_path.exists():
            return size
        try:
            committed = int(commit_path.read_text() or "0")
        except ValueError as exc:
            raise StorageError(f"corrupt commit marker {commit_path}: {exc}") from exc
        return min(committed, size)

    def _committed_lines(self, session_id: str) -> list[bytes]:
        log_path, _ = self._log_paths(session_id)
        length = self._committed_length(session_id)
        if length == 0 or not log_path.exists():
            return []
        with open(log_path, "rb") as handle:
            data = handle.read(length)
        return [line for line in data.split(b"\n") if line]

    def _discard_uncommitted_tail(self, session_id: str) -> None:
        """Drop bytes a crashed append left beyond the commit marker."""
        log_path, commit_path = self._log_paths(session_id)
        if not log_path.exists() or not commit_path.exists():
            return
        committed = self._committed_length(session_id)
        if log_path.stat().st_size <= committed:
            return
        try:
            with open(log_path, "r+b") as handle:
                handle.truncate(committed)
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageError(f"cannot recover {log_path}: {exc}") from exc

    def _append_log_bytes(self, session_id: str, payload: bytes) -> None:
        log_path, _ = self._log_paths(session_id)
        try:
            with open(log_path, "ab") as handle:
                handle.write(payload)
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageError(f"cannot append to {log_path}: {exc}") from exc

    def _commit_log_length(self, session_id: str) -> None:
        log_path, commit_path = self._log_paths(session_id)
        self._write_bytes(commit_path, str(log_path.stat().st_size).encode("ascii"))

    # -- low-level files -----------------------------------------------------------

    def _write_json(self, path: Path, doc: dict) -> None:
        payload = (json.dumps(doc, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
        self._write_bytes(path, payload)

    def _write_bytes(self, path: Path, payload: bytes) -> None:
        tmp = path.with_name(f".tmp-{path.name}")
        try:
            with open(tmp, "wb") as handle:
                handle.write(payload)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp, path)
            directory_fd = os.open(path.parent, os.O_RDONLY)
            try:
                os.fsync(directory_fd)
            finally:
                os.close(directory_fd)
        except OSError as exc:
            raise StorageError(f"cannot write {path}: {exc}") from exc

    def _read_json(self, path: Path, what: str) -> dict:
        if not path.exists():
            raise NotFoundError(f"{what} not found")
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return json.load(handle)
        except OSError as exc:
            raise StorageError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise StorageError(f"corrupt document {path}: {exc}") from exc


def _choices_to_wire(choices: Iterable[scoring.PairwiseChoice]) -> list[dict]:
    normalized = []
    for choice in choices:
        a, b = sorted(choice.pair)
        normalized.append({"pair": [a, b], "chosen": choice.chosen})
    normalized.sort(key=lambda c: c["pair"])
    return normalized
