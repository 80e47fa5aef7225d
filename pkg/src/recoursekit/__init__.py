"""Incremental recourse planning: exact Shapley attributions, projection-ranked
candidate targets, human-steerable paths with undo, and an HTTP session API."""

from .attribution import (
    AttributionVector,
    BackgroundSet,
    Segment,
    assign_display_ranks,
    global_importance,
    group_others,
    shapley_exact,
    stack_top,
    stacked_segments,
)
from .dataset import (
    Dataset,
    FeatureSchema,
    NormalizedVector,
    SubjectRecord,
    clamp_values,
    dataset_mean_normalized,
    denormalize,
    load_csv,
    normalize,
)
from .model import (
    LogisticModel,
    Scorer,
    TrainConfig,
    load_model,
    save_model,
    score,
    score_batch,
    sigmoid,
    train_logistic,
)
from .recourse import (
    BUDGET,
    STUCK,
    TARGET_REACHED,
    CandidateTarget,
    ConstraintSet,
    RecourseEngine,
    RecoursePath,
    RecourseState,
    deviation_stats,
    trajectory_slope,
    undo,
)

__version__ = "0.1.0"
