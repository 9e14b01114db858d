"""Workload assessment toolkit: classic and XR questionnaire scoring plus
interaction-telemetry metrics for headset applications."""

__version__ = "0.1.0"

from .dimensions import (  # noqa: F401
    CLASSIC6,
    XR11,
    Dimension,
    DimensionGroup,
    DimensionSet,
    Variant,
    WeightingMode,
    dimension_set,
)
from .errors import (  # noqa: F401
    ConflictError,
    EmptySessionError,
    InconsistentWeightsError,
    InvalidModeError,
    NotFoundError,
    ParseError,
    StateError,
    StorageError,
    TlxError,
    ValidationError,
)
from .events import (  # noqa: F401
    EventBatch,
    EventKind,
    InteractionEvent,
    parse_event_line,
    serialize_event,
)
from .metrics import (  # noqa: F401
    ObjectGazeSummary,
    SessionMetrics,
    compute_focused_objects,
    compute_session_metrics,
)
from .scoring import (  # noqa: F401
    PairwiseChoice,
    WorkloadScore,
    compute_raw_score,
    compute_weighted_score,
    generate_pairs,
    score_session,
    tally_weights,
)
from .store import StudyStore, UserProfile  # noqa: F401
