"""Map code-clone groups across software versions via topic distributions."""

__version__ = "0.1.0"

from .errors import (
    CloneMapError,
    CloneMapWarning,
    ConfigError,
    CoverageError,
    EmptyDocumentError,
    FragmentRangeError,
    ReportParseError,
    ValidationError,
)
from .ingest import (
    CloneFragment,
    CloneGroup,
    VersionSnapshot,
    parse_clone_report,
    resolve_snapshot,
    snapshot_from_dict,
    snapshot_to_dict,
)
from .preprocess import (
    FilterConfig,
    TokenDocument,
    build_group_document,
    default_filter_config,
    strip_comments,
    tokenize,
)
from .topicmodel import (
    Corpus,
    LdaConfig,
    LdaResult,
    TopicDistribution,
    build_corpus,
    fit_group_topic,
    fit_lda,
)
from .similarity import Metric, lcs_similarity, topic_similarity
from .mapping import (
    Genealogy,
    GroupMapping,
    Lineage,
    MappingConfig,
    Strategy,
    VersionTopics,
    baseline_text_map,
    map_lineage,
    map_version_pair,
    unmatched_old_groups,
)
from .evaluation import (
    EvalReport,
    GroundTruth,
    SynthConfig,
    generate_evolution,
    load_ground_truth,
    score,
)
from .pipeline import run_map

__all__ = [
    "__version__",
    "CloneMapError",
    "CloneMapWarning",
    "ConfigError",
    "CoverageError",
    "EmptyDocumentError",
    "FragmentRangeError",
    "ReportParseError",
    "ValidationError",
    "CloneFragment",
    "CloneGroup",
    "VersionSnapshot",
    "parse_clone_report",
    "resolve_snapshot",
    "snapshot_from_dict",
    "snapshot_to_dict",
    "FilterConfig",
    "TokenDocument",
    "build_group_document",
    "default_filter_config",
    "strip_comments",
    "tokenize",
    "Corpus",
    "LdaConfig",
    "LdaResult",
    "TopicDistribution",
    "build_corpus",
    "fit_group_topic",
    "fit_lda",
    "Metric",
    "lcs_similarity",
    "topic_similarity",
    "Genealogy",
    "GroupMapping",
    "Lineage",
    "MappingConfig",
    "Strategy",
    "VersionTopics",
    "baseline_text_map",
    "map_lineage",
    "map_version_pair",
    "unmatched_old_groups",
    "EvalReport",
    "GroundTruth",
    "SynthConfig",
    "generate_evolution",
    "load_ground_truth",
    "score",
    "run_map",
]
