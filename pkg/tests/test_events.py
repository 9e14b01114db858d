import random
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrtlx.errors import ParseError, ValidationError
from xrtlx.events import (
    BatchSource,
    EventKind,
    InteractionEvent,
    format_timestamp,
    parse_batch,
    parse_event_line,
    parse_timestamp,
    serialize_event,
)

CLICK_LINE = (
    '{"session_id":"s1","kind":"click","object_id":"support_A12",'
    '"start":"2024-03-01T10:15:00.250Z"}'
)
GAZE_LINE = (
    '{"session_id":"s1","kind":"gaze","object_id":"menu_root",'
    '"start":"2024-03-01T10:15:01.000Z","end":"2024-03-01T10:15:02.500Z"}'
)


def test_parse_click_line():
    event = parse_event_line(CLICK_LINE)
    assert event.kind is EventKind.CLICK
    assert event.object_id == "support_A12"
    assert event.session_id == "s1"
    assert event.end is None
    assert event.start == datetime(2024, 3, 1, 10, 15, 0, 250_000, tzinfo=timezone.utc)


def test_parse_gaze_line_duration():
    event = parse_event_line(GAZE_LINE)
    # independent timestamp arithmetic: 10:15:02.500 - 10:15:01.000
    expected_ms = (
        datetime(2024, 3, 1, 10, 15, 2, 500_000, tzinfo=timezone.utc)
        - datetime(2024, 3, 1, 10, 15, 1, 0, tzinfo=timezone.utc)
    ) // timedelta(milliseconds=1)
    assert expected_ms == 1500
    assert event.duration_ms == expected_ms


def test_gaze_end_before_start_rejected():
    line = GAZE_LINE.replace("10:15:02.500", "10:15:00.500")
    with pytest.raises(ValidationError) as excinfo:
        parse_event_line(line)
    assert "end" in excinfo.value.message


def test_round_trip_of_examples():
    for line in (CLICK_LINE, GAZE_LINE):
        event = parse_event_line(line)
        assert serialize_event(event) == line
        assert parse_event_line(serialize_event(event)) == event


def test_click_serialization_has_no_end_key():
    event = parse_event_line(CLICK_LINE)
    assert '"end"' not in serialize_event(event)


def test_serialize_normalizes_key_order_and_spacing():
    scrambled = (
        '{ "start": "2024-03-01T10:15:00.250Z", "object_id": "support_A12",'
        ' "kind": "click", "session_id": "s1" }'
    )
    once = serialize_event(parse_event_line(scrambled))
    assert once == CLICK_LINE
    assert serialize_event(parse_event_line(once)) == once


@pytest.mark.parametrize(
    "timestamp",
    [
        "2024-03-01T10:15:00Z",            # no milliseconds
        "2024-03-01T10:15:00.2Z",          # partial milliseconds
        "2024-03-01T10:15:00.250000Z",     # microseconds
        "2024-03-01T10:15:00.250+00:00",   # offset instead of Z
        "2024-03-01 10:15:00.250Z",        # space separator
        "2024-13-01T10:15:00.250Z",        # impossible month
        "garbage",
    ],
)
def test_strict_timestamps_rejected(timestamp):
    with pytest.raises(ValidationError):
        parse_timestamp(timestamp)


def test_format_timestamp_is_millisecond_utc():
    moment = datetime(2024, 3, 1, 10, 15, 0, 250_000, tzinfo=timezone.utc)
    assert format_timestamp(moment) == "2024-03-01T10:15:00.250Z"


@pytest.mark.parametrize(
    "line,needle",
    [
        ('{"session_id":"s1","kind":"click","object_id":"x",'
         '"start":"2024-03-01T10:15:00.250Z","extra":1}', "unknown field"),
        ('{"session_id":"s1","kind":"click",'
         '"start":"2024-03-01T10:15:00.250Z"}', "object_id"),
        ('{"session_id":"s1","kind":"hover","object_id":"x",'
         '"start":"2024-03-01T10:15:00.250Z"}', "kind"),
        ('{"session_id":"s1","kind":"click","object_id":"",'
         '"start":"2024-03-01T10:15:00.250Z"}', "object_id"),
        ('{"session_id":"s1","kind":"click","object_id":"x",'
         '"start":"2024-03-01T10:15:00.250Z","end":"2024-03-01T10:15:01.000Z"}', "end"),
        ('{"session_id":"s1","kind":"gaze","object_id":"x",'
         '"start":"2024-03-01T10:15:00.250Z"}', "end"),
        ('["not","an","object"]', "object"),
        ('{"session_id":"s1","session_id":"s1","kind":"click","object_id":"x",'
         '"start":"2024-03-01T10:15:00.250Z"}', "duplicate"),
    ],
)
def test_schema_violations_name_the_problem(line, needle):
    with pytest.raises(ValidationError) as excinfo:
        parse_event_line(line)
    assert needle in excinfo.value.message


def test_parse_error_reports_byte_offset():
    # multibyte char before the syntax error shifts bytes past chars
    line = '{"object_idé": }'
    with pytest.raises(ParseError) as excinfo:
        parse_event_line(line)
    char_pos = line.index("}")
    assert excinfo.value.byte_offset == len(line[:char_pos].encode("utf-8"))


def test_embedded_newline_rejected():
    with pytest.raises(ParseError):
        parse_event_line(CLICK_LINE + "\n" + GAZE_LINE)


def test_event_invariants_at_construction():
    base = datetime(2024, 3, 1, tzinfo=timezone.utc)
    with pytest.raises(ValidationError):
        InteractionEvent("s1", EventKind.CLICK, "obj", base, base)
    with pytest.raises(ValidationError):
        InteractionEvent("s1", EventKind.GAZE, "obj", base, None)
    with pytest.raises(ValidationError):
        InteractionEvent("s1", EventKind.GAZE, "obj", base, base - timedelta(seconds=1))
    with pytest.raises(ValidationError):
        InteractionEvent("s1", EventKind.CLICK, "", base)
    with pytest.raises(ValidationError):
        InteractionEvent("s1", EventKind.CLICK, "obj", base.replace(tzinfo=None))
    with pytest.raises(ValidationError):
        InteractionEvent("s1", EventKind.CLICK, "obj", base.replace(microsecond=1))


# --- batches -------------------------------------------------------------------


def test_parse_batch_reports_line_numbers():
    text = "\n".join([CLICK_LINE, "not json", GAZE_LINE, '{"kind":"click"}'])
    with pytest.raises(ValidationError) as excinfo:
        parse_batch(text)
    details = excinfo.value.details
    assert any(d.startswith("line 2:") for d in details)
    assert any(d.startswith("line 4:") for d in details)
    assert len(details) == 2


def test_parse_batch_skips_blank_lines():
    text = CLICK_LINE + "\n\n" + GAZE_LINE + "\n"
    batch = parse_batch(text, source=BatchSource.FILE)
    assert len(batch.events) == 2
    assert batch.session_id == "s1"


def test_cross_session_batch_rejected():
    other = GAZE_LINE.replace('"s1"', '"s2"')
    with pytest.raises(ValidationError) as excinfo:
        parse_batch(CLICK_LINE + "\n" + other)
    assert "cross-session" in excinfo.value.message


# --- randomized round-trip and fuzz ----------------------------------------------


def random_event(rng: random.Random, session: str | None = None) -> InteractionEvent:
    base = datetime(2024, 1, 1, tzinfo=timezone.utc)
    start = base + timedelta(milliseconds=rng.randrange(0, 10_000_000_000))
    kind = EventKind.CLICK if rng.random() < 0.5 else EventKind.GAZE
    end = None
    if kind is EventKind.GAZE:
        end = start + timedelta(milliseconds=rng.randrange(0, 60_000))
    return InteractionEvent(
        session_id=session or f"s{rng.randrange(100)}",
        kind=kind,
        object_id=rng.choice(["support_A12", "menu_root", "bolt_3", "panel/ü", "x"]),
        start=start,
        end=end,
    )


def test_random_round_trip():
    rng = random.Random(7)
    for _ in range(2000):
        event = random_event(rng)
        assert parse_event_line(serialize_event(event)) == event


text_ids = st.text(
    st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=40
)


@settings(max_examples=300)
@given(
    session=text_ids,
    obj=text_ids,
    start_ms=st.integers(0, 2_000_000_000_000),
    dwell=st.none() | st.integers(0, 10_000_000),
)
def test_round_trip_any_unicode_ids(session, obj, start_ms, dwell):
    start = datetime(2000, 1, 1, tzinfo=timezone.utc) + timedelta(milliseconds=start_ms)
    event = InteractionEvent(
        session_id=session,
        kind=EventKind.CLICK if dwell is None else EventKind.GAZE,
        object_id=obj,
        start=start,
        end=None if dwell is None else start + timedelta(milliseconds=dwell),
    )
    line = serialize_event(event)
    assert "\n" not in line
    assert parse_event_line(line) == event


@settings(max_examples=500)
@given(st.text(max_size=200))
def test_fuzz_never_crashes(text):
    if "\n" in text or "\r" in text:
        text = text.replace("\n", " ").replace("\r", " ")
    try:
        parse_event_line(text)
    except ValidationError:
        pass  # ParseError included


@settings(max_examples=200)
@given(st.binary(max_size=120))
def test_fuzz_bytes_never_crash(blob):
    text = blob.decode("utf-8", errors="replace").replace("\n", " ").replace("\r", " ")
    try:
        parse_event_line(text)
    except ValidationError:
        pass
