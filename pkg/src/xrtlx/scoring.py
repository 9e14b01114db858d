"""Weights and scores for the classic and XR workload questionnaires.

Phase 1 produces forced binary choices over dimension pairs; each win
increments that dimension's weight. Phase 2 produces 0-100 ratings on a
twenty-segment scale (multiples of 5). The overall score is the weighted
average sum(weight * rating) / pair_count, kept as an exact rational
internally and rendered to two decimal places on every output surface.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .dimensions import DimensionSet, WeightingMode, check_mode_compatible, to_mode
from .errors import InconsistentWeightsError, ValidationError

Pair = tuple[str, str]
WeightVector = dict[str, int]


@dataclass(frozen=True)
class PairwiseChoice:
    """One forced choice: which member of the pair loads more."""

    pair: Pair
    chosen: str

    def __post_init__(self):
        a, b = self.pair
        if a == b:
            raise ValidationError(f"self-pair ({a}, {b}) is not a valid comparison")
        if self.chosen not in self.pair:
            raise ValidationError(
                f"chosen dimension {self.chosen!r} is not a member of pair ({a}, {b})"
            )


@dataclass(frozen=True)
class WorkloadScore:
    """Raw and weighted scores for one completed session.

    Values are exact rationals; use to_wire() for the rendered form.
    weighted_technology is present for the xr modes only.
    """

    mode: WeightingMode
    raw_task: Fraction
    weighted_task: Fraction
    weighted_technology: Fraction | None = None

    def __post_init__(self):
        present = [self.raw_task, self.weighted_task]
        if self.mode is WeightingMode.CLASSIC:
            if self.weighted_technology is not None:
                raise ValidationError("classic score carries no technology sub-score")
        else:
            if self.weighted_technology is None:
                raise ValidationError(f"{self.mode.value} score requires a technology sub-score")
            present.append(self.weighted_technology)
        for value in present:
            if not 0 <= value <= 100:
                raise ValidationError(f"score {value} outside [0, 100]")

    def to_wire(self) -> dict:
        """Rendered form: two-decimal strings, canonical key order."""
        doc = {
            "mode": self.mode.value,
            "raw_task": format_score(self.raw_task),
            "weighted_task": format_score(self.weighted_task),
        }
        if self.weighted_technology is not None:
            doc["weighted_technology"] = format_score(self.weighted_technology)
        return doc

    def to_exact(self) -> dict:
        """Lossless form used by the store so reads round-trip exactly."""
        doc = {
            "mode": self.mode.value,
            "raw_task": str(self.raw_task),
            "weighted_task": str(self.weighted_task),
        }
        if self.weighted_technology is not None:
            doc["weighted_technology"] = str(self.weighted_technology)
        return doc

    @classmethod
    def from_exact(cls, doc: Mapping) -> "WorkloadScore":
        tech = doc.get("weighted_technology")
        return cls(
            mode=WeightingMode(doc["mode"]),
            raw_task=Fraction(doc["raw_task"]),
            weighted_task=Fraction(doc["weighted_task"]),
            weighted_technology=None if tech is None else Fraction(tech),
        )


def format_score(value: Fraction | int) -> str:
    """Render an exact score with exactly two decimal places."""
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = 50
        quantized = (Decimal(value.numerator) / Decimal(value.denominator)).quantize(
            Decimal("0.01")
        )
    return str(quantized)


def choices_from_wire(items: Iterable[Mapping]) -> list[PairwiseChoice]:
    """Build choices from wire dicts, collecting every malformed item."""
    choices = []
    problems = []
    for index, item in enumerate(items):
        try:
            pair = item["pair"]
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ValidationError("pair must have exactly two members")
            choices.append(PairwiseChoice(pair=(pair[0], pair[1]), chosen=item["chosen"]))
        except (KeyError, TypeError) as exc:
            problems.append(f"choice {index}: malformed ({exc})")
        except ValidationError as exc:
            problems.append(f"choice {index}: {exc.message}")
    if problems:
        raise ValidationError(
            f"invalid choices: {len(problems)} problem(s)", details=problems
        )
    return choices


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def all_pairs(ids: Sequence[str]) -> list[Pair]:
    """Every unordered pair of ids, canonically ordered.

    Pairs are emitted with members in ascending order and the list sorted
    lexicographically, so the sequence is independent of the input order.
    """
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate ids in pairing scope")
    return sorted(tuple(sorted(p)) for p in combinations(ids, 2))


def _pair_blocks(dims: DimensionSet, mode: WeightingMode) -> list[list[Pair]]:
    check_mode_compatible(dims.variant, mode)
    if mode is WeightingMode.CLASSIC:
        return [all_pairs(dims.task_ids)]
    if mode is WeightingMode.XR_GROUPED:
        return [all_pairs(dims.task_ids), all_pairs(dims.technology_ids)]
    return [all_pairs(dims.ids)]


def generate_pairs(
    dims: DimensionSet,
    mode: WeightingMode | str,
    seed: int | None = None,
) -> list[Pair]:
    """Phase 1 comparison sequence for a dimension set.

    Unseeded calls return canonical lexicographic order. A seed applies a
    deterministic shuffle; in grouped mode the shuffle stays within each
    block so task comparisons still precede technology comparisons.
    """
    mode = to_mode(mode)
    blocks = _pair_blocks(dims, mode)
    if seed is not None:
        rng = random.Random(seed)
        for block in blocks:
            rng.shuffle(block)
    return [pair for block in blocks for pair in block]


def expected_pair_sets(dims: DimensionSet, mode: WeightingMode) -> list[set[frozenset]]:
    """Unordered pair sets per weighting block (task/technology or combined)."""
    return [{frozenset(p) for p in block} for block in _pair_blocks(dims, mode)]


def tally_weights(
    choices: Iterable[PairwiseChoice],
    dims: DimensionSet,
    mode: WeightingMode | str,
) -> WeightVector:
    """Count Phase 1 wins per dimension.

    The choice list must cover the mode's pair set exactly once each, in any
    order. Validation collects every offending pair before raising.
    """
    mode = to_mode(mode)
    expected: set[frozenset] = set()
    for block in expected_pair_sets(dims, mode):
        expected |= block

    problems: list[str] = []
    seen: set[frozenset] = set()
    wins: dict[str, int] = {}
    for choice in choices:
        key = frozenset(choice.pair)
        if key not in expected:
            problems.append(f"unknown pair ({choice.pair[0]}, {choice.pair[1]})")
            continue
        if key in seen:
            problems.append(f"duplicate pair ({choice.pair[0]}, {choice.pair[1]})")
            continue
        seen.add(key)
        wins[choice.chosen] = wins.get(choice.chosen, 0) + 1
    for key in sorted(expected - seen, key=sorted):
        a, b = sorted(key)
        problems.append(f"missing pair ({a}, {b})")
    if problems:
        raise ValidationError(
            f"invalid choice set: {len(problems)} problem(s)", details=sorted(problems)
        )

    scope = dims.task_ids if mode is WeightingMode.CLASSIC else dims.ids
    return {d: wins.get(d, 0) for d in scope}


def compute_weighted_score(
    weights: Mapping[str, int],
    ratings: Mapping[str, int],
    ids: Sequence[str],
) -> Fraction:
    """Weighted average over a fully weighted group: sum(w*r) / C(n, 2)."""
    divisor = pair_count(len(ids))
    if divisor == 0:
        raise ValidationError("group too small for pairwise weighting")
    _require_coverage(ratings, ids, "rating")
    _require_coverage(weights, ids, "weight")
    total_weight = sum(weights[d] for d in ids)
    if total_weight != divisor:
        raise InconsistentWeightsError(
            f"weights sum to {total_weight}, expected {divisor} for {len(ids)} dimensions"
        )
    return Fraction(sum(weights[d] * ratings[d] for d in ids), divisor)


def weighted_mean(
    weights: Mapping[str, int],
    ratings: Mapping[str, int],
    ids: Sequence[str],
) -> Fraction:
    """sum(w*r) / sum(w) over ids; 0 when every weight is zero."""
    total = sum(weights.get(d, 0) for d in ids)
    if total == 0:
        return Fraction(0)
    return Fraction(sum(weights.get(d, 0) * ratings[d] for d in ids), total)


def compute_raw_score(ratings: Mapping[str, int], ids: Sequence[str]) -> Fraction:
    """Unweighted mean of the group's ratings."""
    if not ids:
        raise ValidationError("cannot average an empty dimension group")
    _require_coverage(ratings, ids, "rating")
    return Fraction(sum(ratings[d] for d in ids), len(ids))


def validate_ratings(ratings: Mapping[str, int], dims: DimensionSet) -> None:
    """Ratings must cover every dimension exactly, each a multiple of 5 in [0, 100]."""
    problems = []
    known = set(dims.ids)
    for d in sorted(set(ratings) - known):
        problems.append(f"unknown dimension {d!r}")
    for d in sorted(known - set(ratings)):
        problems.append(f"missing rating for {d!r}")
    for d in dims.ids:
        if d not in ratings:
            continue
        value = ratings[d]
        if not isinstance(value, int) or isinstance(value, bool):
            problems.append(f"rating for {d!r} is not an integer")
        elif not 0 <= value <= 100:
            problems.append(f"rating {value} for {d!r} outside [0, 100]")
        elif value % 5 != 0:
            problems.append(f"rating {value} for {d!r} is not a multiple of 5")
    if problems:
        raise ValidationError(
            f"invalid ratings: {len(problems)} problem(s)", details=problems
        )


def score_session(
    choices: Iterable[PairwiseChoice],
    ratings: Mapping[str, int],
    dims: DimensionSet,
    mode: WeightingMode | str,
) -> WorkloadScore:
    """Run both questionnaire phases to a WorkloadScore.

    classic: one weighted task score (divisor 15).
    xr_grouped: weighted task score (divisor 15) plus weighted technology
    score (divisor 10), each from its own comparison block.
    xr_full: one all-dimension score (divisor 55) reported as weighted_task;
    the technology sub-score renormalizes the technology dimensions' weights
    by their own sum (0 when they won no comparisons).
    raw_task is always the unweighted mean of the task-group ratings.
    """
    mode = to_mode(mode)
    validate_ratings(ratings, dims)
    weights = tally_weights(choices, dims, mode)
    raw_task = compute_raw_score(ratings, dims.task_ids)

    if mode is WeightingMode.CLASSIC:
        return WorkloadScore(
            mode=mode,
            raw_task=raw_task,
            weighted_task=compute_weighted_score(weights, ratings, dims.task_ids),
        )
    if mode is WeightingMode.XR_GROUPED:
        return WorkloadScore(
            mode=mode,
            raw_task=raw_task,
            weighted_task=compute_weighted_score(weights, ratings, dims.task_ids),
            weighted_technology=compute_weighted_score(
                weights, ratings, dims.technology_ids
            ),
        )
    return WorkloadScore(
        mode=mode,
        raw_task=raw_task,
        weighted_task=compute_weighted_score(weights, ratings, dims.ids),
        weighted_technology=weighted_mean(weights, ratings, dims.technology_ids),
    )


def _require_coverage(values: Mapping[str, int], ids: Sequence[str], what: str) -> None:
    missing = [d for d in ids if d not in values]
    if missing:
        raise ValidationError(
            f"missing {what} for: " + ", ".join(missing), details=missing
        )
