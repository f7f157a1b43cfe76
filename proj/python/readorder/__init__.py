"""Reading-order engine for visually-rich documents.

Converts eye-tracking trajectories into gold reading orders over OCR boxes,
generates machine orders (rule-based and comparator-driven), and scores any
order against gold with rank-correlation and answer-similarity metrics.
"""

from ._core import (  # noqa: F401
    MISSING,
    AlignmentConfig,
    BoundingBox,
    Centroid,
    ComparatorModel,
    Document,
    ExternalComparator,
    FeatureConfig,
    FeatureRegime,
    GazePoint,
    GazeTrajectory,
    GoldResult,
    PatternThresholds,
    PreorderOptions,
    PreorderResult,
    PreorderTrace,
    ProtocolError,
    QaPair,
    RankCorrelation,
    RawAssignment,
    ReadingSequence,
    RenderStyle,
    ScanPattern,
    ScanpathStats,
    StrategyConfig,
    SpawnError,
    SubsetTag,
    SynthDocument,
    SynthSpec,
    TrainConfig,
    TrainReport,
    ZOrderConfig,
    anls,
    assign_gaze,
    centroid,
    classify_pattern,
    consolidate,
    default_order,
    document_to_json,
    feature_dimension,
    first_visit_order,
    gold_pipeline,
    kendall_tau,
    known_strategies,
    last_visit_order,
    levenshtein,
    load_document,
    load_gaze,
    load_model,
    make_pairs,
    mean_anls,
    missing_rate,
    order_with_strategy,
    pair_features,
    preorder,
    rank_correlation,
    render_svg,
    repair_missing,
    save_document,
    save_gaze,
    save_model,
    scanpath_stats,
    score,
    spearman_rho,
    synth,
    train,
    validate_document,
    xy_order,
    z_order,
)

__version__ = "0.1.0"
