"""Workload dimensions and the two questionnaire variants.

The classic instrument rates six task dimensions; the XR variant appends
five technology dimensions covering headset comfort and application
usability. Dimension ids are stable wire identifiers and must never change.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InvalidModeError, ValidationError


class DimensionGroup(str, enum.Enum):
    TASK = "task"
    TECHNOLOGY = "technology"


class Variant(str, enum.Enum):
    CLASSIC6 = "classic6"
    XR11 = "xr11"


class WeightingMode(str, enum.Enum):
    """Phase 1 comparison scope.

    classic     pairs among the six task dimensions only
    xr_grouped  task pairs followed by technology pairs (two sub-scores)
    xr_full     every dimension against every other (one combined score)
    """

    CLASSIC = "classic"
    XR_GROUPED = "xr_grouped"
    XR_FULL = "xr_full"


@dataclass(frozen=True)
class Dimension:
    id: str
    label: str
    prompt: str
    group: DimensionGroup


TASK_DIMENSIONS = (
    Dimension(
        "mental_demand",
        "Mental demand",
        "How much mental activity was necessary? (e.g.: thinking, deciding, "
        "calculating, remembering, etc.)",
        DimensionGroup.TASK,
    ),
    Dimension(
        "physical_demand",
        "Physical demand",
        "How much physical activity was required? (e.g. pushing, pulling, "
        "turning, etc.)",
        DimensionGroup.TASK,
    ),
    Dimension(
        "temporal_demand",
        "Temporal demand",
        "How much time pressure did you feel? Was the pace slow and leisurely "
        "or fast and frantic?",
        DimensionGroup.TASK,
    ),
    Dimension(
        "effort",
        "Effort",
        "To what extent did you have to work (physically or mentally) to "
        "achieve your level of results?",
        DimensionGroup.TASK,
    ),
    Dimension(
        "performance",
        "Performance",
        "To what extent do you think you have succeeded in the objectives "
        "established by the researchers (or by yourself)?",
        DimensionGroup.TASK,
    ),
    Dimension(
        "frustration",
        "Frustration level",
        "During the task, to what extent did you feel insecure, discouraged, "
        "irritated, tense or worried or, on the contrary, did you feel "
        "secure, content, relaxed and satisfied?",
        DimensionGroup.TASK,
    ),
)

TECHNOLOGY_DIMENSIONS = (
    Dimension(
        "physical_comfort",
        "Physical comfort",
        "Are the glasses comfortable to wear or do you experience any "
        "physical discomfort? (e.g. headache, excessive weight, etc.)",
        DimensionGroup.TECHNOLOGY,
    ),
    Dimension(
        "visual_comfort",
        "Visual comfort",
        "Is it comfortable to see the objects projected by the glasses or do "
        "you experience any discomfort? (e.g., eye discomfort or irritation, "
        "field of view, image sharpness, etc.)",
        DimensionGroup.TECHNOLOGY,
    ),
    Dimension(
        "general_comfort",
        "General comfort",
        "Overall, are the glasses comfortable to wear or do you experience "
        "any discomfort? (e.g., dizziness, disorientation, loss of balance, "
        "etc.)",
        DimensionGroup.TECHNOLOGY,
    ),
    Dimension(
        "ease_of_use",
        "Ease of use",
        "Is the application easy to use? Is it intuitive? Are the menus well "
        "understood? Are the necessary items found quickly?",
        DimensionGroup.TECHNOLOGY,
    ),
    Dimension(
        "app_usability",
        "Application usability",
        "Do you consider that the application is useful as a substitute for "
        "paper blueprints?",
        DimensionGroup.TECHNOLOGY,
    ),
)


@dataclass(frozen=True)
class DimensionSet:
    variant: Variant
    dimensions: tuple[Dimension, ...]

    def __post_init__(self):
        ids = [d.id for d in self.dimensions]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate dimension ids in set")
        task = [d for d in self.dimensions if d.group is DimensionGroup.TASK]
        tech = [d for d in self.dimensions if d.group is DimensionGroup.TECHNOLOGY]
        if self.variant is Variant.CLASSIC6:
            if len(task) != 6 or tech:
                raise ValidationError("classic6 requires exactly the 6 task dimensions")
        else:
            if len(task) != 6 or len(tech) != 5:
                raise ValidationError("xr11 requires 6 task + 5 technology dimensions")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.dimensions)

    def group_ids(self, group: DimensionGroup) -> tuple[str, ...]:
        return tuple(d.id for d in self.dimensions if d.group is group)

    @property
    def task_ids(self) -> tuple[str, ...]:
        return self.group_ids(DimensionGroup.TASK)

    @property
    def technology_ids(self) -> tuple[str, ...]:
        return self.group_ids(DimensionGroup.TECHNOLOGY)


CLASSIC6 = DimensionSet(Variant.CLASSIC6, TASK_DIMENSIONS)
XR11 = DimensionSet(Variant.XR11, TASK_DIMENSIONS + TECHNOLOGY_DIMENSIONS)

_SETS = {Variant.CLASSIC6: CLASSIC6, Variant.XR11: XR11}


def to_variant(value: Variant | str) -> Variant:
    try:
        return Variant(value)
    except ValueError:
        raise ValidationError(
            f"unknown dimension set {value!r}; expected classic6 or xr11"
        ) from None


def to_mode(value: WeightingMode | str) -> WeightingMode:
    try:
        return WeightingMode(value)
    except ValueError:
        raise ValidationError(
            f"unknown weighting mode {value!r}; expected classic, xr_grouped or xr_full"
        ) from None


def dimension_set(variant: Variant | str) -> DimensionSet:
    """Return the canonical DimensionSet for a variant name."""
    return _SETS[to_variant(variant)]


def check_mode_compatible(variant: Variant | str, mode: WeightingMode | str) -> None:
    """Reject mode/variant pairings that would leave dimensions unweighted
    or reference dimensions the variant does not have."""
    variant = to_variant(variant)
    mode = to_mode(mode)
    if variant is Variant.CLASSIC6 and mode is not WeightingMode.CLASSIC:
        raise InvalidModeError(f"mode {mode.value} requires the xr11 variant")
    if variant is Variant.XR11 and mode is WeightingMode.CLASSIC:
        raise InvalidModeError("mode classic requires the classic6 variant")
