"""Exact aggregate scoring over a rubric tree.

Every intermediate value is a `fractions.Fraction`; rounding happens once,
at display time, half up. That is what makes totals like 34.75 -> 35
reproducible instead of drifting with pre-rounded dimensions.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .assessment import Assessment
from .rubric import (
    VERIFIED_OVERRIDE,
    CriterionNode,
    Rubric,
    UnknownCriterionError,
)


class ScoringError(Exception):
    pass


class MissingEntryError(ScoringError):
    def __init__(self, criterion_id: str):
        self.criterion_id = criterion_id
        super().__init__(f"no entry for rubric leaf {criterion_id}"
                         " (pass missing_as_zero=True to score it as 0)")


class NonLeafError(ScoringError):
    def __init__(self, criterion_id: str):
        self.criterion_id = criterion_id
        super().__init__(f"{criterion_id} is not a rubric leaf")


def display_round(exact: Fraction | int) -> int:
    """Round half up to the nearest integer; defined on [0, 100]."""
    value = Fraction(exact)
    if value < 0 or value > 100:
        raise ScoringError(f"display value {float(value)} outside [0, 100]")
    return (2 * value.numerator + value.denominator) // (2 * value.denominator)


def leaf_score(assessment: Assessment, criterion_id: str, rubric: Rubric,
               missing_as_zero: bool = False) -> int:
    node = rubric.node(criterion_id)
    if not node.is_leaf:
        raise NonLeafError(criterion_id)
    entry = assessment.entry(criterion_id)
    if entry is None:
        if missing_as_zero:
            return 0
        raise MissingEntryError(criterion_id)
    return entry.score


def _aggregate(node: CriterionNode, rubric: Rubric, assessment: Assessment,
               missing_as_zero: bool, memo: dict[str, Fraction]) -> Fraction:
    if node.id in memo:
        return memo[node.id]
    if node.is_leaf:
        value = Fraction(leaf_score(assessment, node.id, rubric, missing_as_zero))
    else:
        verifier_id: Optional[str] = None
        if node.rule is not None and node.rule.kind == VERIFIED_OVERRIDE:
            verifier_id = node.rule.verifier
        mean_children = [c for c in node.children if c.id != verifier_id]
        total_weight = sum((c.raw_weight for c in mean_children), Fraction(0))
        if total_weight <= 0:
            raise ScoringError(f"sibling weights under {node.id} sum to zero")
        mean = sum(
            (c.raw_weight * _aggregate(c, rubric, assessment, missing_as_zero, memo)
             for c in mean_children),
            Fraction(0),
        ) / total_weight
        if verifier_id is not None:
            verifier_node = rubric.node(verifier_id)
            verifier_value = _aggregate(verifier_node, rubric, assessment, missing_as_zero, memo)
            # exact comparison; rounding never decides the branch
            value = max(mean, verifier_value)
        else:
            value = mean
    memo[node.id] = value
    return value


def node_score(rubric: Rubric, assessment: Assessment, node_id: str,
               missing_as_zero: bool = False) -> Fraction:
    """Exact score of any rubric node for one assessment."""
    node = rubric.node(node_id)
    return _aggregate(node, rubric, assessment, missing_as_zero, {})


def override_branches(rubric: Rubric, assessment: Assessment,
                      missing_as_zero: bool = False) -> dict[str, str]:
    """Winning branch ("mean" or "verifier") at every verified-override node.

    Ties go to "mean": max() returns the same value either way, so only a
    strictly greater verifier constitutes an override.
    """
    memo: dict[str, Fraction] = {}
    winners: dict[str, str] = {}
    for node in rubric.nodes():
        if node.is_leaf or node.rule is None or node.rule.kind != VERIFIED_OVERRIDE:
            continue
        verifier_id = node.rule.verifier
        mean_children = [c for c in node.children if c.id != verifier_id]
        total_weight = sum((c.raw_weight for c in mean_children), Fraction(0))
        mean = sum(
            (c.raw_weight * _aggregate(c, rubric, assessment, missing_as_zero, memo)
             for c in mean_children),
            Fraction(0),
        ) / total_weight
        verifier_value = _aggregate(rubric.node(verifier_id), rubric, assessment,
                                    missing_as_zero, memo)
        winners[node.id] = "verifier" if verifier_value > mean else "mean"
    return winners


@dataclass(frozen=True)
class NodeScore:
    node_id: str
    exact: Fraction
    display: int


@dataclass(frozen=True)
class AggregateReport:
    subject_company: str
    rubric_version: str
    nodes: tuple[NodeScore, ...]  # depth-first rubric order
    total_exact: Fraction
    total_display: int

    def exact(self, node_id: str) -> Fraction:
        for node in self.nodes:
            if node.node_id == node_id:
                return node.exact
        raise UnknownCriterionError(node_id)

    def display(self, node_id: str) -> int:
        for node in self.nodes:
            if node.node_id == node_id:
                return node.display
        raise UnknownCriterionError(node_id)

    @property
    def by_id(self) -> dict[str, NodeScore]:
        return {node.node_id: node for node in self.nodes}


def score_tree(rubric: Rubric, assessment: Assessment,
               missing_as_zero: bool = False) -> AggregateReport:
    """Score every rubric node plus the weighted total.

    Rejects partial assessments unless missing_as_zero is set; silent
    defaults are how scoring bugs hide.
    """
    memo: dict[str, Fraction] = {}
    nodes: list[NodeScore] = []
    for node in rubric.nodes():
        exact = _aggregate(node, rubric, assessment, missing_as_zero, memo)
        nodes.append(NodeScore(node_id=node.id, exact=exact, display=display_round(exact)))

    dim_weight_total = sum((d.raw_weight for d in rubric.dimensions), Fraction(0))
    if dim_weight_total <= 0:
        raise ScoringError("dimension weights sum to zero")
    total = sum(
        (d.raw_weight * memo[d.id] for d in rubric.dimensions), Fraction(0)
    ) / dim_weight_total
    return AggregateReport(
        subject_company=assessment.subject.company,
        rubric_version=rubric.version,
        nodes=tuple(nodes),
        total_exact=total,
        total_display=display_round(total),
    )


# --- canonical interchange form ----------------------------------------------

def _decimal4(value: Fraction) -> str:
    """Decimal rendering to 4 places, half up, sign-aware."""
    sign = "-" if value < 0 else ""
    magnitude = abs(value)
    scaled = (magnitude.numerator * 10_000 * 2 + magnitude.denominator) // (2 * magnitude.denominator)
    whole, frac = divmod(scaled, 10_000)
    return f"{sign}{whole}.{frac:04d}"


def exact_json(value: Fraction) -> dict:
    return {
        "num": value.numerator,
        "den": value.denominator,
        "decimal": _decimal4(value),
    }


def report_to_json(report: AggregateReport) -> dict:
    return {
        "subject": report.subject_company,
        "rubric_version": report.rubric_version,
        "nodes": [
            {"id": n.node_id, "exact": exact_json(n.exact), "display": n.display}
            for n in report.nodes
        ],
        "total": {"exact": exact_json(report.total_exact), "display": report.total_display},
    }


def serialize_report(report: AggregateReport) -> str:
    return json.dumps(report_to_json(report), indent=2, ensure_ascii=False) + "\n"
