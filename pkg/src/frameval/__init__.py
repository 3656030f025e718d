"""frameval: weighted-rubric evaluation engine for safety-framework assessments."""

from .analytics import (
    Attribution,
    BestInClassResult,
    DiffReport,
    FrontierItem,
    LintFinding,
    RankResult,
    WhatIfResult,
    best_in_class,
    diff,
    improvement_frontier,
    lint_consistency,
    rank_and_stats,
    what_if,
)
from .assessment import (
    Assessment,
    AssessmentIssue,
    EvidenceItem,
    LeafEntry,
    RaterSheet,
    ReconcileResult,
    Subject,
    parse_assessment,
    reconcile,
    serialize_assessment,
    validate_assessment,
)
from .rubric import (
    AggregationRule,
    CriterionNode,
    Rubric,
    RubricIssue,
    ScoreScale,
    effective_weight,
    parse_rubric,
    serialize_rubric,
    validate_rubric,
)
from .scoring import (
    AggregateReport,
    NodeScore,
    display_round,
    leaf_score,
    node_score,
    score_tree,
)
from .store import (
    AssessmentStore,
    assessment_token,
    load_bundled_assessments,
    load_bundled_rubric,
    version_token,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
