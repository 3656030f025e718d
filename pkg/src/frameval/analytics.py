"""Cross-assessment analytics: composites, ranking, diffs, what-ifs, lint.

Everything here is a pure function over immutable inputs. Where the
verified-override rule makes the tree nonlinear, computations recompute the
whole tree rather than relying on closed-form weight products, and say so
(diff flags nonadditivity) instead of silently being wrong.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .assessment import Assessment, Subject
from .rubric import Rubric, UnknownCriterionError, dotted_key
from .scoring import (
    AggregateReport,
    display_round,
    exact_json,
    node_score,
    override_branches,
    score_tree,
)

BEST_IN_CLASS = "Best in Class"


class AnalyticsError(Exception):
    pass


def _check_same_rubric(rubric: Rubric, assessments: Sequence[Assessment]) -> None:
    for assessment in assessments:
        if assessment.rubric_version != rubric.version:
            raise AnalyticsError(
                f"{assessment.subject.company}: rubric version "
                f"{assessment.rubric_version!r} does not match {rubric.version!r}"
            )


# --- best in class -----------------------------------------------------------

@dataclass(frozen=True)
class BestInClassResult:
    composite: dict[str, int]  # leaf id -> leafwise max score
    report: AggregateReport


def best_in_class(rubric: Rubric, assessments: Sequence[Assessment],
                  missing_as_zero: bool = False) -> BestInClassResult:
    """Leafwise maximum across assessments, aggregated like any assessment."""
    if not assessments:
        raise AnalyticsError("best_in_class needs at least one assessment")
    _check_same_rubric(rubric, assessments)
    composite: dict[str, int] = {}
    for leaf_id in rubric.leaf_ids():
        scores = []
        for assessment in assessments:
            value = assessment.score_of(leaf_id)
            if value is None:
                if not missing_as_zero:
                    raise AnalyticsError(
                        f"{assessment.subject.company} has no entry for {leaf_id}")
                value = 0
            scores.append(value)
        composite[leaf_id] = max(scores)
    synthetic = Assessment(
        subject=Subject(company=BEST_IN_CLASS, framework_title="Leafwise composite"),
        rubric_version=rubric.version,
    ).with_scores(composite)
    return BestInClassResult(composite=composite, report=score_tree(rubric, synthetic))


# --- ranking -----------------------------------------------------------------

@dataclass(frozen=True)
class RankResult:
    ordering: tuple[AggregateReport, ...]  # total_exact desc, name asc
    median: Fraction                       # over display totals
    dimension_leaders: dict[str, str]      # dimension id -> subject


def rank_and_stats(reports: Sequence[AggregateReport]) -> RankResult:
    if not reports:
        raise AnalyticsError("rank_and_stats needs at least one report")
    ordering = tuple(sorted(
        reports, key=lambda r: (-r.total_exact, r.subject_company)
    ))
    displays = sorted(r.total_display for r in reports)
    n = len(displays)
    if n % 2 == 1:
        median = Fraction(displays[n // 2])
    else:
        median = Fraction(displays[n // 2 - 1] + displays[n // 2], 2)

    dimension_ids = [n.node_id for n in reports[0].nodes
                     if "." not in n.node_id]
    leaders: dict[str, str] = {}
    for dim_id in dimension_ids:
        best = max(ordering, key=lambda r: (r.exact(dim_id), ))
        # deterministic tie-break: earliest in the ordering wins, which is
        # already sorted by total then name
        leaders[dim_id] = next(
            r.subject_company for r in ordering if r.exact(dim_id) == best.exact(dim_id)
        )
    return RankResult(ordering=ordering, median=median, dimension_leaders=leaders)


# --- diff --------------------------------------------------------------------

@dataclass(frozen=True)
class LeafDelta:
    criterion_id: str
    base: int
    head: int


@dataclass(frozen=True)
class NodeDelta:
    node_id: str
    delta: Fraction


@dataclass(frozen=True)
class Attribution:
    criterion_id: str
    total_contribution: Fraction  # total delta of applying just this change


@dataclass(frozen=True)
class DiffReport:
    base_company: str
    head_company: str
    leaf_deltas: tuple[LeafDelta, ...]
    node_deltas: tuple[NodeDelta, ...]
    total_delta: Fraction
    attributions: tuple[Attribution, ...]
    nonadditive: bool


def diff(rubric: Rubric, base: Assessment, head: Assessment,
         missing_as_zero: bool = False) -> DiffReport:
    """Leaf-level diff with single-leaf substitution attributions.

    Attributions sum to the total delta exactly on override-free rubrics.
    The nonadditive flag reports any verified-override branch switch
    between base and head (where attribution stops being linear), as well
    as any attribution sum that misses the total.
    """
    if base.rubric_version != head.rubric_version:
        raise AnalyticsError(
            f"rubric versions differ: {base.rubric_version!r} vs {head.rubric_version!r}")
    _check_same_rubric(rubric, [base, head])

    changed: list[LeafDelta] = []
    for leaf_id in rubric.leaf_ids():
        b = base.score_of(leaf_id)
        h = head.score_of(leaf_id)
        if missing_as_zero:
            b = 0 if b is None else b
            h = 0 if h is None else h
        if b is None or h is None:
            raise AnalyticsError(f"missing entry for {leaf_id} in diff inputs")
        if b != h:
            changed.append(LeafDelta(criterion_id=leaf_id, base=b, head=h))

    base_report = score_tree(rubric, base, missing_as_zero)
    head_report = score_tree(rubric, head, missing_as_zero)
    node_deltas = tuple(
        NodeDelta(node_id=b.node_id, delta=h.exact - b.exact)
        for b, h in zip(base_report.nodes, head_report.nodes)
        if h.exact != b.exact
    )
    total_delta = head_report.total_exact - base_report.total_exact

    attributions: list[Attribution] = []
    for delta in changed:
        mutated = base.with_scores({delta.criterion_id: delta.head})
        contribution = (
            score_tree(rubric, mutated, missing_as_zero).total_exact
            - base_report.total_exact
        )
        attributions.append(Attribution(
            criterion_id=delta.criterion_id, total_contribution=contribution))

    attributed = sum((a.total_contribution for a in attributions), Fraction(0))
    branch_switch = (
        override_branches(rubric, base, missing_as_zero)
        != override_branches(rubric, head, missing_as_zero)
    )
    return DiffReport(
        base_company=base.subject.company,
        head_company=head.subject.company,
        leaf_deltas=tuple(changed),
        node_deltas=node_deltas,
        total_delta=total_delta,
        attributions=tuple(attributions),
        nonadditive=branch_switch or attributed != total_delta,
    )


# --- what-if -----------------------------------------------------------------

@dataclass(frozen=True)
class WhatIfResult:
    overrides: dict[str, int]
    report: AggregateReport
    total_delta: Fraction
    dimension_deltas: dict[str, Fraction]


def what_if(rubric: Rubric, assessment: Assessment, overrides: Mapping[str, int],
            missing_as_zero: bool = False) -> WhatIfResult:
    """Score the assessment with leaf overrides applied; report the shift.

    Per-dimension deltas ride along so display layers never have to do
    their own subtraction.
    """
    leaf_ids = set(rubric.leaf_ids())
    for criterion_id, score in overrides.items():
        if criterion_id not in leaf_ids:
            rubric.node(criterion_id)  # raises UnknownCriterionError if absent
            raise AnalyticsError(f"override target {criterion_id} is not a rubric leaf")
        if score not in rubric.scale:
            raise AnalyticsError(f"override {criterion_id}={score} is off the scale")
    base_report = score_tree(rubric, assessment, missing_as_zero)
    mutated = assessment.with_scores(dict(overrides))
    report = score_tree(rubric, mutated, missing_as_zero)
    return WhatIfResult(
        overrides=dict(overrides),
        report=report,
        total_delta=report.total_exact - base_report.total_exact,
        dimension_deltas={
            d.id: report.exact(d.id) - base_report.exact(d.id)
            for d in rubric.dimensions
        },
    )


# --- improvement frontier ----------------------------------------------------

@dataclass(frozen=True)
class FrontierItem:
    criterion_id: str
    current: int
    target: int   # best-in-class leaf score among peers
    gain: Fraction  # total delta of adopting just this leaf


def improvement_frontier(rubric: Rubric, assessment: Assessment,
                         peers: Sequence[Assessment],
                         missing_as_zero: bool = False) -> tuple[FrontierItem, ...]:
    """One candidate per leaf where someone already does better; sorted by
    the total-score gain of adopting that single practice."""
    if not peers:
        raise AnalyticsError("improvement_frontier needs a nonempty peer list")
    pool = list(peers)
    if all(p is not assessment for p in pool):
        pool = [assessment, *pool]
    composite = best_in_class(rubric, pool, missing_as_zero).composite

    base_report = score_tree(rubric, assessment, missing_as_zero)
    items: list[FrontierItem] = []
    for leaf_id in rubric.leaf_ids():
        current = assessment.score_of(leaf_id)
        if current is None:
            if not missing_as_zero:
                raise AnalyticsError(f"missing entry for {leaf_id}")
            current = 0
        target = composite[leaf_id]
        if target <= current:
            continue
        mutated = assessment.with_scores({leaf_id: target})
        gain = score_tree(rubric, mutated, missing_as_zero).total_exact - base_report.total_exact
        items.append(FrontierItem(
            criterion_id=leaf_id, current=current, target=target, gain=gain))
    items.sort(key=lambda item: (-item.gain, dotted_key(item.criterion_id)))
    return tuple(items)


# --- published-aggregate lint --------------------------------------------------

@dataclass(frozen=True)
class LintFinding:
    node_id: str
    published: int
    recomputed_display: int
    recomputed_exact: Fraction
    excess: int


def lint_consistency(rubric: Rubric, assessment: Assessment,
                     tolerance: int = 1,
                     missing_as_zero: bool = False) -> tuple[LintFinding, ...]:
    """Compare every published aggregate against recomputation.

    A finding means |published - recomputed display| exceeds the tolerance;
    nodes the publication never printed are skipped.
    """
    if not assessment.published:
        return ()
    report = score_tree(rubric, assessment, missing_as_zero)
    by_id = report.by_id
    findings: list[LintFinding] = []
    for node_id in sorted(assessment.published, key=lambda n: (n == "total", dotted_key(n) if n != "total" else ())):
        published = assessment.published[node_id]
        if node_id == "total":
            exact, display = report.total_exact, report.total_display
        elif node_id in by_id:
            exact, display = by_id[node_id].exact, by_id[node_id].display
        else:
            continue
        excess = abs(published - display)
        if excess > tolerance:
            findings.append(LintFinding(
                node_id=node_id, published=published,
                recomputed_display=display, recomputed_exact=exact,
                excess=excess,
            ))
    return tuple(findings)


# --- canonical serialization ---------------------------------------------------

def diff_to_json(report: DiffReport) -> dict:
    return {
        "base": report.base_company,
        "head": report.head_company,
        "leaf_deltas": [
            {"id": d.criterion_id, "base": d.base, "head": d.head}
            for d in report.leaf_deltas
        ],
        "node_deltas": [
            {"id": d.node_id, "delta": exact_json(d.delta)} for d in report.node_deltas
        ],
        "total_delta": exact_json(report.total_delta),
        "attributions": [
            {"id": a.criterion_id, "total_contribution": exact_json(a.total_contribution)}
            for a in report.attributions
        ],
        "nonadditive": report.nonadditive,
    }


def whatif_to_json(result: WhatIfResult) -> dict:
    from .scoring import report_to_json

    return {
        "overrides": {k: result.overrides[k] for k in sorted(result.overrides, key=dotted_key)},
        "report": report_to_json(result.report),
        "total_delta": exact_json(result.total_delta),
        "dimension_deltas": {
            k: exact_json(result.dimension_deltas[k])
            for k in sorted(result.dimension_deltas, key=dotted_key)
        },
    }


def frontier_to_json(items: Sequence[FrontierItem]) -> list[dict]:
    return [
        {
            "id": item.criterion_id,
            "current": item.current,
            "target": item.target,
            "gain": exact_json(item.gain),
        }
        for item in items
    ]


def lint_to_json(findings: Sequence[LintFinding]) -> list[dict]:
    return [
        {
            "id": f.node_id,
            "published": f.published,
            "recomputed_display": f.recomputed_display,
            "recomputed_exact": exact_json(f.recomputed_exact),
            "excess": f.excess,
        }
        for f in findings
    ]


def rank_to_json(result: RankResult) -> dict:
    return {
        "ordering": [
            {"subject": r.subject_company, "total_display": r.total_display,
             "total_exact": exact_json(r.total_exact)}
            for r in result.ordering
        ],
        "median": exact_json(result.median),
        "dimension_leaders": dict(sorted(result.dimension_leaders.items())),
    }


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
