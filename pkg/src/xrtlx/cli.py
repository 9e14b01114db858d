"""Operator command line: run the service, score responses offline, inspect
event logs, generate synthetic stores and emit cohort reports.

Tables go to stdout, diagnostics to stderr. Exit codes: 0 success,
1 validation or user error, 2 I/O error.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import reports, simulate as sim
from .errors import StorageError, TlxError, ValidationError
from .events import read_events_file
from .metrics import compute_focused_objects, compute_session_metrics, format_metrics_table
from .scoring import choices_from_wire, score_session
from .dimensions import dimension_set
from .service import serve as run_service
from .store import StudyStore


def _fail(message: str, details: list[str], code: int):
    click.echo(f"error: {message}", err=True)
    for line in details:
        click.echo(f"  - {line}", err=True)
    sys.exit(code)


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except StorageError as exc:
            _fail(exc.message, exc.details, 2)
        except TlxError as exc:
            _fail(exc.message, exc.details, 1)
        except OSError as exc:
            _fail(str(exc), [], 2)

    return wrapper


@click.group()
def main():
    """Workload assessment toolkit (questionnaire scoring + usage telemetry)."""


@main.command()
@click.option("--store", "store_path", required=True, envvar="TLX_STORE",
              help="Store directory (TLX_STORE env var also works).")
@click.option("--bind", default="127.0.0.1:8000", show_default=True,
              help="Listen address as host:port.")
@guarded
def serve(store_path: str, bind: str):
    """Run the HTTP service."""
    run_service(bind, store_path)


@main.command()
@click.argument("response_file")
@guarded
def score(response_file: str):
    """Score a questionnaire response file and print the result as JSON.

    The file carries dimension_set, weighting_mode, choices and ratings.
    """
    doc = _load_json(response_file)
    try:
        dims = dimension_set(doc["dimension_set"])
        mode = doc["weighting_mode"]
        choice_items = doc["choices"]
        ratings = doc["ratings"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed response file: {exc}") from None
    result = score_session(choices_from_wire(choice_items), ratings, dims, mode)
    click.echo(json.dumps(result.to_wire(), indent=2))


@main.command()
@click.argument("events_file")
@guarded
def metrics(events_file: str):
    """Print the session indicators and per-object gaze summaries for a log."""
    events = read_events_file(events_file)
    session_metrics = compute_session_metrics(events)
    summaries = compute_focused_objects(events)
    session_id = events[0].session_id
    click.echo(format_metrics_table(session_id, session_metrics, summaries))


@main.command()
@click.option("--out", "out_dir", required=True, help="Target store directory.")
@click.option("--spec", "spec_file", default=None,
              help="Simulation spec JSON; defaults to a built-in mixed cohort.")
@click.option("--users", type=int, default=None, help="Override user count.")
@click.option("--seed", type=int, default=None, help="Override random seed.")
@guarded
def simulate(out_dir: str, spec_file: str | None, users: int | None, seed: int | None):
    """Generate a synthetic store of sessions, responses and event logs."""
    if spec_file is not None:
        spec = sim.SimulationSpec.from_json_doc(_load_json(spec_file))
        if users is not None or seed is not None:
            doc = _load_json(spec_file)
            doc["users"] = users if users is not None else doc["users"]
            doc["seed"] = seed if seed is not None else doc["seed"]
            spec = sim.SimulationSpec.from_json_doc(doc)
    else:
        spec = sim.default_spec(
            users=users if users is not None else 23,
            seed=seed if seed is not None else 42,
        )
    target = Path(out_dir)
    if target.exists() and any(target.iterdir()):
        raise ValidationError(f"output directory {out_dir!r} is not empty")
    sim.run_simulation(spec, target)
    click.echo(f"generated {spec.users} session(s) in {out_dir}", err=True)


@main.command()
@click.option("--store", "store_path", required=True, envvar="TLX_STORE",
              help="Store directory (TLX_STORE env var also works).")
@click.option("--study", "study_id", default=None,
              help="Study id; defaults to the store's only study.")
@click.option("--group-by", "group_by", required=True,
              help="Cohort attribute: app_knowledge or device_experience.")
@click.option("--format", "fmt", default="csv", show_default=True,
              help="Output format: csv or json.")
@guarded
def report(store_path: str, study_id: str | None, group_by: str, fmt: str):
    """Emit the cohort report for a study to stdout."""
    store = StudyStore(store_path)
    if study_id is None:
        studies = store.list_studies()
        if not studies:
            raise ValidationError(f"store {store_path!r} contains no studies")
        if len(studies) > 1:
            raise ValidationError(
                "store contains several studies; pass --study",
                details=[s.study_id for s in studies],
            )
        study_id = studies[0].study_id
    if fmt not in ("csv", "json"):
        raise ValidationError(f"unknown report format {fmt!r}; expected csv or json")
    rows = reports.collect_rows(store, study_id)
    if not rows:
        raise ValidationError(f"study {study_id!r} has no sessions with events")
    if fmt == "csv":
        rendered = reports.render_csv(rows, group_by)
    else:
        rendered = reports.render_json(rows, group_by, study_id)
    sys.stdout.write(rendered)


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc}") from None


if __name__ == "__main__":
    main()
