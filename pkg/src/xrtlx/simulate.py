"""Synthetic session generator.

Real questionnaire and telemetry data come from human studies that cannot
be rerun, so cohort tooling is exercised against generated stores instead:
each simulated user gets a session with a profile, a completed
questionnaire response and an event log whose rates scale with the
profile's behavior parameters. Everything (ids, timestamps, events)
derives from the seed, so one spec+seed always produces a byte-identical
store tree.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .dimensions import Variant, WeightingMode, check_mode_compatible, dimension_set
from .errors import ValidationError
from .events import EventKind, InteractionEvent
from .scoring import PairwiseChoice, generate_pairs
from .store import AppKnowledge, DeviceExperience, StudyStore, UserProfile

_EPOCH = datetime(2024, 3, 1, 9, 0, 0, tzinfo=timezone.utc)

_OBJECT_POOL = tuple(
    [f"support_{k:02d}" for k in range(1, 13)]
    + [f"bolt_{k:02d}" for k in range(1, 7)]
    + ["menu_root", "menu_tools", "panel_info", "panel_help"]
)


@dataclass(frozen=True)
class ProfileBehavior:
    """One cohort slice: its share of users and its interaction rates."""

    proportion: float
    profile: UserProfile
    clicks_rate: float
    gazes_rate: float
    focus_probability: float


@dataclass(frozen=True)
class SimulationSpec:
    users: int
    seed: int
    duration_min_minutes: float
    duration_max_minutes: float
    profiles: tuple[ProfileBehavior, ...]
    study_name: str = "simulated"
    dimension_variant: Variant = Variant.XR11
    weighting_mode: WeightingMode = WeightingMode.XR_GROUPED

    def __post_init__(self):
        problems = []
        if self.users < 1:
            problems.append("users must be at least 1")
        if not self.profiles:
            problems.append("at least one profile entry required")
        total = sum(p.proportion for p in self.profiles)
        if abs(total - 1.0) > 1e-9:
            problems.append(f"profile proportions sum to {total}, expected 1")
        for index, entry in enumerate(self.profiles):
            if entry.proportion < 0:
                problems.append(f"profile {index}: proportion is negative")
            if entry.clicks_rate < 0 or entry.gazes_rate < 0:
                problems.append(f"profile {index}: rates must be non-negative")
            if not 0 <= entry.focus_probability <= 1:
                problems.append(f"profile {index}: focus_probability outside [0, 1]")
        if self.duration_min_minutes <= 0:
            problems.append("duration min must be positive")
        if self.duration_min_minutes > self.duration_max_minutes:
            problems.append("duration min exceeds max")
        if problems:
            raise ValidationError(
                f"invalid simulation spec: {len(problems)} problem(s)", details=problems
            )
        check_mode_compatible(self.dimension_variant, self.weighting_mode)

    @classmethod
    def from_json_doc(cls, doc: dict) -> "SimulationSpec":
        try:
            duration = doc.get("duration_minutes", {})
            study = doc.get("study", {})
            profiles = tuple(
                ProfileBehavior(
                    proportion=float(entry["proportion"]),
                    profile=UserProfile.from_wire(entry),
                    clicks_rate=float(entry["clicks_rate"]),
                    gazes_rate=float(entry["gazes_rate"]),
                    focus_probability=float(entry["focus_probability"]),
                )
                for entry in doc["profiles"]
            )
            return cls(
                users=int(doc["users"]),
                seed=int(doc["seed"]),
                duration_min_minutes=float(duration.get("min", 2.0)),
                duration_max_minutes=float(duration.get("max", 8.0)),
                profiles=profiles,
                study_name=study.get("name", "simulated"),
                dimension_variant=Variant(study.get("dimension_set", "xr11")),
                weighting_mode=WeightingMode(study.get("weighting_mode", "xr_grouped")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"invalid simulation spec: {exc}") from None


def default_spec(users: int = 23, seed: int = 42) -> SimulationSpec:
    """Mixed-cohort default: knowledge level drives interaction volume."""
    slices = (
        (0.35, AppKnowledge.HIGH, DeviceExperience.HIGH, 4.0, 12.0, 0.7),
        (0.35, AppKnowledge.MEDIUM, DeviceExperience.HIGH, 2.5, 9.0, 0.5),
        (0.30, AppKnowledge.LOW, DeviceExperience.LOW_NONE, 1.5, 6.0, 0.3),
    )
    return SimulationSpec(
        users=users,
        seed=seed,
        duration_min_minutes=2.0,
        duration_max_minutes=8.0,
        profiles=tuple(
            ProfileBehavior(
                proportion=share,
                profile=UserProfile(app_knowledge=knowledge, device_experience=device),
                clicks_rate=clicks,
                gazes_rate=gazes,
                focus_probability=focus,
            )
            for share, knowledge, device, clicks, gazes, focus in slices
        ),
    )


class _TickClock:
    """Deterministic store clock: strictly increasing, millisecond aligned."""

    def __init__(self, start: datetime = _EPOCH):
        self._current = start

    def __call__(self) -> datetime:
        self._current += timedelta(seconds=1)
        return self._current


def _poisson(rng: random.Random, mean: float) -> int:
    if mean <= 0:
        return 0
    threshold = math.exp(-mean)
    count = 0
    product = rng.random()
    while product > threshold:
        count += 1
        product *= rng.random()
    return count


def _apportion(total: int, proportions: list[float]) -> list[int]:
    raw = [p * total for p in proportions]
    counts = [math.floor(r) for r in raw]
    leftover = total - sum(counts)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def _session_events(
    rng: random.Random,
    session_id: str,
    behavior: ProfileBehavior,
    window_start: datetime,
    duration_ms: int,
) -> list[InteractionEvent]:
    minutes = duration_ms / 60_000
    events = []
    for _ in range(_poisson(rng, behavior.clicks_rate * minutes)):
        offset = rng.randrange(duration_ms + 1)
        events.append(
            InteractionEvent(
                session_id=session_id,
                kind=EventKind.CLICK,
                object_id=rng.choice(_OBJECT_POOL),
                start=window_start + timedelta(milliseconds=offset),
            )
        )
    gaze_count = _poisson(rng, behavior.gazes_rate * minutes)
    if not events and gaze_count == 0:
        gaze_count = 1
    for _ in range(gaze_count):
        offset = rng.randrange(duration_ms + 1)
        if rng.random() < behavior.focus_probability:
            dwell = rng.randint(1000, 5000)
        else:
            dwell = rng.randint(50, 999)
        start = window_start + timedelta(milliseconds=offset)
        events.append(
            InteractionEvent(
                session_id=session_id,
                kind=EventKind.GAZE,
                object_id=rng.choice(_OBJECT_POOL),
                start=start,
                end=start + timedelta(milliseconds=dwell),
            )
        )
    events.sort(key=lambda e: (e.start, e.kind.value, e.object_id))
    return events


def run_simulation(spec: SimulationSpec, out_dir: str | Path) -> StudyStore:
    """Generate a complete store (study, sessions, responses, event logs)."""
    rng = random.Random(spec.seed)
    store = StudyStore(out_dir, rng=rng, now_fn=_TickClock())
    study = store.create_study(
        spec.study_name, spec.dimension_variant, spec.weighting_mode
    )
    dims = dimension_set(spec.dimension_variant)
    pairs = generate_pairs(dims, spec.weighting_mode)
    counts = _apportion(spec.users, [p.proportion for p in spec.profiles])

    user_number = 0
    for behavior, count in zip(spec.profiles, counts):
        for _ in range(count):
            user_number += 1
            session = store.create_session(
                study.study_id, f"user_{user_number:02d}", behavior.profile
            )
            choices = [PairwiseChoice(pair=p, chosen=rng.choice(p)) for p in pairs]
            store.record_choices(session.session_id, choices)
            ratings = {d: rng.randrange(0, 21) * 5 for d in dims.ids}
            store.record_ratings(session.session_id, ratings)
            store.score_and_persist(session.session_id)

            duration_ms = rng.randint(
                int(spec.duration_min_minutes * 60_000),
                int(spec.duration_max_minutes * 60_000),
            )
            window_start = _EPOCH + timedelta(hours=user_number)
            events = _session_events(
                rng, session.session_id, behavior, window_start, duration_ms
            )
            store.append_events(session.session_id, events)
    return store
