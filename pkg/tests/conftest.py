import random
from datetime import datetime, timedelta, timezone

import pytest

from xrtlx.events import EventKind, InteractionEvent
from xrtlx.scoring import PairwiseChoice

BASE = datetime(2024, 3, 1, 10, 0, 0, tzinfo=timezone.utc)


def at_ms(offset_ms: int) -> datetime:
    return BASE + timedelta(milliseconds=offset_ms)


def click(offset_ms: int, obj: str = "support_A12", session: str = "s1") -> InteractionEvent:
    return InteractionEvent(
        session_id=session, kind=EventKind.CLICK, object_id=obj, start=at_ms(offset_ms)
    )


def gaze(
    offset_ms: int, duration_ms: int, obj: str = "menu_root", session: str = "s1"
) -> InteractionEvent:
    return InteractionEvent(
        session_id=session,
        kind=EventKind.GAZE,
        object_id=obj,
        start=at_ms(offset_ms),
        end=at_ms(offset_ms + duration_ms),
    )


def winners_to_choices(pairs, winners) -> list[PairwiseChoice]:
    """Map a boolean per pair (True = first member wins) onto choices."""
    return [
        PairwiseChoice(pair=pair, chosen=pair[0] if first_wins else pair[1])
        for pair, first_wins in zip(pairs, winners)
    ]


def dominance_choices(pairs, ranking) -> list[PairwiseChoice]:
    """Every pair won by the member ranked earlier in `ranking`."""
    position = {dim: index for index, dim in enumerate(ranking)}
    return [
        PairwiseChoice(pair=pair, chosen=min(pair, key=position.__getitem__))
        for pair in pairs
    ]


def random_choices(rng: random.Random, pairs) -> list[PairwiseChoice]:
    return [PairwiseChoice(pair=pair, chosen=rng.choice(pair)) for pair in pairs]


def random_ratings(rng: random.Random, ids) -> dict[str, int]:
    return {dim: rng.randrange(0, 21) * 5 for dim in ids}


def random_session_events(
    rng: random.Random,
    count: int,
    object_count: int = 50,
    session: str = "s1",
) -> list[InteractionEvent]:
    """Unordered log of clicks and gazes over a shared object pool."""
    objects = [f"obj_{k:03d}" for k in range(1, object_count + 1)]
    events = []
    for _ in range(count):
        offset = rng.randrange(0, 3_600_000)
        obj = rng.choice(objects)
        if rng.random() < 0.4:
            events.append(click(offset, obj, session))
        else:
            events.append(gaze(offset, rng.randrange(0, 8_000), obj, session))
    return events


@pytest.fixture
def two_minute_session() -> list[InteractionEvent]:
    """3 clicks + 2 gazes spanning exactly two minutes."""
    return [
        click(0, "support_A12"),
        gaze(30_000, 1_500, "menu_root"),
        click(60_000, "support_B03"),
        gaze(90_000, 29_000, "panel_info"),
        click(120_000, "support_A12"),
    ]
