"""Render comparison tables and per-subject profiles.

Pure functions; identical inputs produce byte-identical documents. CSV uses
comma delimiter, quoted titles where needed, LF endings, bare integers for
percents.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Optional, Sequence

from .assessment import Assessment
from .rubric import CriterionNode, Rubric
from .scoring import AggregateReport

FORMATS = ("csv", "markdown", "structured")

TOTAL_ROW_LABEL = "Total score"
NO_QUOTES_MARKER = "No relevant quotes found"
UNSCORED_MARKER = "—"  # em dash for unscored leaves in partial profiles


class ReportingError(Exception):
    pass


def _weight_text(node: CriterionNode) -> str:
    weight = node.raw_weight
    if weight.denominator == 1:
        return f"{weight.numerator}%"
    return f"{float(weight):g}%"


def _row_label(node: CriterionNode) -> str:
    return f"{node.id} {node.title} ({_weight_text(node)})"


def _ordered_columns(reports: Sequence[AggregateReport],
                     best: Optional[AggregateReport]) -> list[AggregateReport]:
    columns = sorted(reports, key=lambda r: (-r.total_exact, r.subject_company))
    if best is not None:
        columns.append(best)
    return columns


def _check_versions(rubric: Rubric, reports: Sequence[AggregateReport]) -> None:
    for report in reports:
        if report.rubric_version != rubric.version:
            raise ReportingError(
                f"report for {report.subject_company!r} targets rubric "
                f"{report.rubric_version!r}, table is {rubric.version!r}")


def render_comparison(rubric: Rubric, reports: Sequence[AggregateReport],
                      best: Optional[AggregateReport] = None,
                      fmt: str = "markdown") -> str:
    """Comparison table: total first, then nodes depth-first, columns by
    total descending with the composite column last."""
    if fmt not in FORMATS:
        raise ReportingError(f"unknown format {fmt!r}")
    _check_versions(rubric, [*reports, *( [best] if best else [] )])
    columns = _ordered_columns(reports, best)

    header = ["Criteria (Weight)"] + [c.subject_company for c in columns]
    rows: list[list[str]] = []
    rows.append([TOTAL_ROW_LABEL] + [str(c.total_display) for c in columns])
    for node in rubric.nodes():
        rows.append([_row_label(node)] + [str(c.display(node.id)) for c in columns])

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()
    if fmt == "markdown":
        lines = [
            "| " + " | ".join(header) + " |",
            "| " + " | ".join(["---"] * len(header)) + " |",
        ]
        for row in rows:
            lines.append("| " + " | ".join(cell.replace("|", "\\|") for cell in row) + " |")
        return "\n".join(lines) + "\n"
    doc = {
        "rubric_version": rubric.version,
        "columns": [c.subject_company for c in columns],
        "rows": [{"label": row[0], "cells": [int(v) for v in row[1:]]} for row in rows],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def render_profile(rubric: Rubric, assessment: Assessment,
                   report: Optional[AggregateReport] = None,
                   fmt: str = "markdown") -> str:
    """Per-subject profile: sections per dimension, every leaf with score,
    rationale, evidence quotes, and improvement notes."""
    if fmt not in FORMATS:
        raise ReportingError(f"unknown format {fmt!r}")
    if report is not None and report.rubric_version != rubric.version:
        raise ReportingError("report and rubric versions differ")

    def display_of(node_id: str) -> Optional[str]:
        if report is not None:
            return str(report.display(node_id))
        entry = assessment.entry(node_id)
        if entry is not None:
            return str(entry.score)
        return None

    if fmt == "structured":
        doc: dict = {
            "subject": {
                "company": assessment.subject.company,
                "framework_title": assessment.subject.framework_title,
                "framework_version": assessment.subject.framework_version,
            },
            "rubric_version": assessment.rubric_version,
            "dimensions": [],
        }
        for dim in rubric.dimensions:
            dim_doc: dict = {"id": dim.id, "title": dim.title, "leaves": []}
            for node in dim.walk():
                if not node.is_leaf:
                    continue
                entry = assessment.entry(node.id)
                leaf_doc: dict = {
                    "id": node.id,
                    "title": node.title,
                    "weight": _weight_text(node),
                    "score": entry.score if entry else None,
                }
                if entry is not None:
                    leaf_doc["rationale"] = entry.rationale
                    leaf_doc["evidence"] = [
                        {"quote": ev.quote, "location": ev.location,
                         **({"note": ev.note} if ev.note else {})}
                        for ev in entry.evidence
                    ]
                    if entry.improvements:
                        leaf_doc["improvements"] = entry.improvements
                dim_doc["leaves"].append(leaf_doc)
            doc["dimensions"].append(dim_doc)
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["id", "title", "weight", "score", "rationale",
                         "evidence_count", "improvements"])
        for node in rubric.leaves():
            entry = assessment.entry(node.id)
            writer.writerow([
                node.id, node.title, _weight_text(node),
                entry.score if entry else UNSCORED_MARKER,
                entry.rationale if entry else "",
                len(entry.evidence) if entry else 0,
                entry.improvements or "" if entry else "",
            ])
        return buffer.getvalue()

    subject = assessment.subject
    lines: list[str] = [
        f"# {subject.company} — {subject.framework_title}"
        + (f" (v{subject.framework_version})" if subject.framework_version else ""),
        "",
    ]
    total_text = str(report.total_display) if report is not None else UNSCORED_MARKER
    lines += [f"Total score: {total_text}%", ""]
    for dim in rubric.dimensions:
        dim_score = display_of(dim.id) if report is not None else None
        suffix = f" – {dim_score}%" if dim_score is not None else ""
        lines += [f"## {dim.id}. {dim.title} ({_weight_text(dim)}){suffix}", ""]
        for node in dim.walk():
            if node.is_leaf:
                entry = assessment.entry(node.id)
                score_text = f"{entry.score}%" if entry else UNSCORED_MARKER
                lines += [f"### {node.id} {node.title} ({_weight_text(node)}) – {score_text}", ""]
                if entry is None:
                    lines += ["Not scored.", ""]
                    continue
                lines += [entry.rationale, "", "Quotes:", ""]
                if entry.evidence:
                    for ev in entry.evidence:
                        note = f" — {ev.note}" if ev.note else ""
                        lines += [f"> “{ev.quote}” ({ev.location}){note}", ""]
                else:
                    lines += [NO_QUOTES_MARKER, ""]
                if entry.improvements:
                    lines += [f"Improvements: {entry.improvements}", ""]
            elif node is not dim:
                suffix = ""
                if report is not None:
                    suffix = f" – {report.display(node.id)}%"
                lines += [f"### {node.id} {node.title} ({_weight_text(node)}){suffix}", ""]
    return "\n".join(lines).rstrip("\n") + "\n"
