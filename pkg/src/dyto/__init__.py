"""Budget-bounded video token compression toolkit.

Converts per-frame visual token embeddings into a compact representation by
clustering frames into temporal events, keeping one keyframe per event, and
merging each keyframe's patch tokens down to a fixed budget with provenance
tracking. Ships a synthetic benchmark harness, brute-force oracles, and the
DYT1 binary interchange format.
"""

from .clustering import (
    KeyframeSet,
    Partition,
    PartitionHierarchy,
    build_hierarchy,
    connected_components,
    one_nn_graph,
    select_keyframes,
    select_partition,
    temporal_distance_matrix,
)
from .errors import (
    ConfigError,
    DytoError,
    FormatError,
    InputError,
    ScheduleError,
    StorageError,
    ValidationError,
)
from .merging import (
    MergedFrame,
    MergeSchedule,
    TokenSet,
    bipartite_match,
    compress_frame,
    head_similarity,
    merge_matched,
    plan_budget,
)
from .metrics import (
    event_coverage,
    hungarian_match,
    partition_accuracy,
    reconstruction_error,
)
from .oracles import exhaustive_match_oracle, mean_pool_tokens
from .pipeline import (
    CompressedVideo,
    PipelineConfig,
    build_sidecar,
    run_baseline_uniform_pool,
    run_dyto,
)
from .rng import CounterRng
from .store import (
    ClsSequence,
    VideoTokens,
    extract_cls_sequence,
    load_array,
    load_tokens,
    save_array,
    save_tokens,
)
from .synth import GroundTruth, SyntheticSpec, generate_synthetic_video

__version__ = "0.1.0"

__all__ = [
    "ClsSequence",
    "CompressedVideo",
    "ConfigError",
    "CounterRng",
    "DytoError",
    "FormatError",
    "GroundTruth",
    "InputError",
    "KeyframeSet",
    "MergeSchedule",
    "MergedFrame",
    "Partition",
    "PartitionHierarchy",
    "PipelineConfig",
    "ScheduleError",
    "StorageError",
    "SyntheticSpec",
    "TokenSet",
    "ValidationError",
    "VideoTokens",
    "bipartite_match",
    "build_hierarchy",
    "build_sidecar",
    "compress_frame",
    "connected_components",
    "event_coverage",
    "exhaustive_match_oracle",
    "extract_cls_sequence",
    "generate_synthetic_video",
    "head_similarity",
    "hungarian_match",
    "load_array",
    "load_tokens",
    "mean_pool_tokens",
    "merge_matched",
    "one_nn_graph",
    "partition_accuracy",
    "plan_budget",
    "reconstruction_error",
    "run_baseline_uniform_pool",
    "run_dyto",
    "save_array",
    "save_tokens",
    "select_keyframes",
    "select_partition",
    "temporal_distance_matrix",
]
