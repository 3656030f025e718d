"""Assessments: reconciled leaf scores with rationale and evidence.

An assessment holds one subject's scores against a rubric version, plus the
aggregates the source publication printed (`published`), which are lint
inputs only and never feed scoring. Parsing and serialization round-trip
canonically so documents can be diffed and hashed byte-for-byte.
"""
from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

from .rubric import Rubric, dotted_key

STATUSES = ("draft", "reviewed", "reconciled")


class AssessmentError(Exception):
    pass


class AssessmentParseError(AssessmentError):
    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{message}" + (f" (at {location})" if location else ""))


class CoverageError(AssessmentError):
    """Rater sheets do not cover the same leaf set."""


@dataclass(frozen=True)
class Subject:
    company: str
    framework_title: str
    framework_version: str = ""
    assessment_date: Optional[_dt.date] = None
    source_url: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.company or not self.framework_title:
            raise AssessmentError("subject needs a company and a framework title")


@dataclass(frozen=True)
class EvidenceItem:
    quote: str
    location: str
    note: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.quote or not self.location:
            raise AssessmentError("evidence needs a nonempty quote and location")


@dataclass(frozen=True)
class LeafEntry:
    criterion_id: str
    score: int
    rationale: str
    evidence: tuple[EvidenceItem, ...] = ()
    improvements: Optional[str] = None
    status: str = "reconciled"

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise AssessmentError(f"unknown entry status {self.status!r}")


@dataclass(frozen=True)
class Assessment:
    subject: Subject
    rubric_version: str
    entries: dict[str, LeafEntry] = field(default_factory=dict)
    published: dict[str, int] = field(default_factory=dict)
    published_variants: dict[str, tuple[int, ...]] = field(default_factory=dict)
    partial: bool = False

    def entry(self, criterion_id: str) -> Optional[LeafEntry]:
        return self.entries.get(criterion_id)

    def score_of(self, criterion_id: str) -> Optional[int]:
        entry = self.entries.get(criterion_id)
        return entry.score if entry else None

    def with_entry(self, entry: LeafEntry) -> "Assessment":
        entries = dict(self.entries)
        entries[entry.criterion_id] = entry
        return replace(self, entries=entries)

    def with_scores(self, overrides: Mapping[str, int]) -> "Assessment":
        """Copy with leaf scores replaced; rationale marked as an override."""
        entries = dict(self.entries)
        for criterion_id, score in overrides.items():
            old = entries.get(criterion_id)
            if old is not None:
                entries[criterion_id] = replace(old, score=score)
            else:
                entries[criterion_id] = LeafEntry(
                    criterion_id=criterion_id, score=score,
                    rationale="Scenario override.", status="draft",
                )
        return replace(self, entries=entries)


@dataclass(frozen=True)
class RaterSheet:
    rater_id: str
    scores: dict[str, int]


@dataclass(frozen=True)
class AssessmentIssue:
    severity: str  # "error" | "notice"
    ref: str
    message: str


# --- parsing ----------------------------------------------------------------

def _fail(message: str, location: str | None = None) -> None:
    raise AssessmentParseError(message, location)


def _parse_score(value: object, where: str, scale=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(f"score must be an integer, got {value!r}", where)
    if scale is not None and value not in scale:
        _fail(f"score {value} is not on the rubric scale", where)
    return value


def parse_assessment(document: str, rubric: Optional[Rubric] = None) -> Assessment:
    """Parse an assessment document.

    With a rubric, off-scale scores and unknown or non-leaf criterion ids
    fail immediately; without one those checks defer to
    validate_assessment.
    """
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        _fail(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}")
    if not isinstance(raw, dict):
        _fail("top level must be an object")

    subj_raw = raw.get("subject")
    if not isinstance(subj_raw, dict):
        _fail("subject must be an object", "subject")
    date_raw = subj_raw.get("assessment_date")
    date = None
    if date_raw is not None:
        try:
            date = _dt.date.fromisoformat(date_raw)
        except (TypeError, ValueError):
            _fail(f"assessment_date {date_raw!r} is not an ISO date", "subject")
    try:
        subject = Subject(
            company=subj_raw.get("company", ""),
            framework_title=subj_raw.get("framework_title", ""),
            framework_version=subj_raw.get("framework_version", ""),
            assessment_date=date,
            source_url=subj_raw.get("source_url"),
        )
    except AssessmentError as exc:
        _fail(str(exc), "subject")

    version = raw.get("rubric_version")
    if not isinstance(version, str) or not version:
        _fail("rubric_version must be a nonempty string")
    partial = raw.get("partial", False)
    if not isinstance(partial, bool):
        _fail("partial must be a boolean")

    entries_raw = raw.get("entries")
    if not isinstance(entries_raw, list):
        _fail("entries must be a list")
    scale = rubric.scale if rubric is not None else None
    leaf_ids = set(rubric.leaf_ids()) if rubric is not None else None
    entries: dict[str, LeafEntry] = {}
    for item in entries_raw:
        if not isinstance(item, dict):
            _fail("entry must be an object")
        criterion_id = item.get("id")
        if not isinstance(criterion_id, str) or not criterion_id:
            _fail("entry id must be a nonempty string")
        if criterion_id in entries:
            _fail(f"duplicate entry for {criterion_id}", criterion_id)
        if leaf_ids is not None and criterion_id not in leaf_ids:
            _fail(f"{criterion_id} is not a rubric leaf", criterion_id)
        score = _parse_score(item.get("score"), criterion_id, scale)
        rationale = item.get("rationale")
        if not isinstance(rationale, str) or not rationale:
            _fail("rationale must be nonempty", criterion_id)
        evidence = []
        for ev in item.get("evidence", []):
            if not isinstance(ev, dict):
                _fail("evidence item must be an object", criterion_id)
            try:
                evidence.append(EvidenceItem(
                    quote=ev.get("quote", ""),
                    location=ev.get("location", ""),
                    note=ev.get("note"),
                ))
            except AssessmentError as exc:
                _fail(str(exc), criterion_id)
        improvements = item.get("improvements")
        if improvements is not None and not isinstance(improvements, str):
            _fail("improvements must be a string", criterion_id)
        status = item.get("status", "reconciled")
        if status not in STATUSES:
            _fail(f"unknown status {status!r}", criterion_id)
        entries[criterion_id] = LeafEntry(
            criterion_id=criterion_id, score=score, rationale=rationale,
            evidence=tuple(evidence), improvements=improvements, status=status,
        )

    published: dict[str, int] = {}
    pub_raw = raw.get("published", {})
    if not isinstance(pub_raw, dict):
        _fail("published must be an object")
    for node_id, value in pub_raw.items():
        published[node_id] = _parse_score(value, f"published.{node_id}")

    variants: dict[str, tuple[int, ...]] = {}
    var_raw = raw.get("published_variants", {})
    if not isinstance(var_raw, dict):
        _fail("published_variants must be an object")
    for node_id, values in var_raw.items():
        if not isinstance(values, list) or not all(isinstance(v, int) for v in values):
            _fail("published_variants values must be integer lists", node_id)
        variants[node_id] = tuple(values)

    return Assessment(
        subject=subject, rubric_version=version, entries=entries,
        published=published, published_variants=variants, partial=partial,
    )


# --- serialization ----------------------------------------------------------

def _published_order(node_id: str):
    if node_id == "total":
        return (0, ())
    return (1, dotted_key(node_id))


def serialize_assessment(assessment: Assessment) -> str:
    """Canonical form; serializing twice always yields identical bytes."""
    subj = assessment.subject
    subject_doc: dict = {
        "company": subj.company,
        "framework_title": subj.framework_title,
        "framework_version": subj.framework_version,
    }
    if subj.assessment_date is not None:
        subject_doc["assessment_date"] = subj.assessment_date.isoformat()
    if subj.source_url is not None:
        subject_doc["source_url"] = subj.source_url

    doc: dict = {"subject": subject_doc, "rubric_version": assessment.rubric_version}
    if assessment.partial:
        doc["partial"] = True

    entries_doc = []
    for criterion_id in sorted(assessment.entries, key=dotted_key):
        entry = assessment.entries[criterion_id]
        item: dict = {
            "id": entry.criterion_id,
            "score": entry.score,
            "rationale": entry.rationale,
            "evidence": [],
        }
        for ev in entry.evidence:
            ev_doc = {"quote": ev.quote, "location": ev.location}
            if ev.note is not None:
                ev_doc["note"] = ev.note
            item["evidence"].append(ev_doc)
        if entry.improvements is not None:
            item["improvements"] = entry.improvements
        item["status"] = entry.status
        entries_doc.append(item)
    doc["entries"] = entries_doc

    if assessment.published:
        doc["published"] = {
            k: assessment.published[k]
            for k in sorted(assessment.published, key=_published_order)
        }
    if assessment.published_variants:
        doc["published_variants"] = {
            k: list(assessment.published_variants[k])
            for k in sorted(assessment.published_variants, key=_published_order)
        }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# --- validation -------------------------------------------------------------

def validate_assessment(assessment: Assessment, rubric: Rubric) -> list[AssessmentIssue]:
    """Report every problem; an empty (or notice-only) list means usable."""
    issues: list[AssessmentIssue] = []
    if assessment.rubric_version != rubric.version:
        issues.append(AssessmentIssue(
            "error", "rubric_version",
            f"assessment targets {assessment.rubric_version!r}, rubric is {rubric.version!r}",
        ))
    leaf_ids = set(rubric.leaf_ids())
    known_ids = {node.id for node in rubric.nodes()}
    for criterion_id, entry in sorted(assessment.entries.items(), key=lambda kv: dotted_key(kv[0])):
        if criterion_id not in known_ids:
            issues.append(AssessmentIssue("error", criterion_id, "unknown criterion id"))
            continue
        if criterion_id not in leaf_ids:
            issues.append(AssessmentIssue("error", criterion_id, "entry keyed by a non-leaf criterion"))
            continue
        if entry.score not in rubric.scale:
            issues.append(AssessmentIssue("error", criterion_id, f"score {entry.score} is off the scale"))
        if not entry.rationale.strip():
            issues.append(AssessmentIssue("error", criterion_id, "empty rationale"))
    missing = sorted(leaf_ids - set(assessment.entries), key=dotted_key)
    for criterion_id in missing:
        issues.append(AssessmentIssue(
            "notice" if assessment.partial else "error",
            criterion_id, "no entry for this rubric leaf",
        ))
    for node_id in assessment.published:
        if node_id != "total" and node_id not in known_ids:
            issues.append(AssessmentIssue("notice", node_id, "published value for an unknown node"))
    return issues


def assessment_is_usable(issues: Sequence[AssessmentIssue]) -> bool:
    return all(issue.severity != "error" for issue in issues)


# --- reconciliation ---------------------------------------------------------

@dataclass(frozen=True)
class Disagreement:
    criterion_id: str
    scores: dict[str, int]  # rater_id -> score


@dataclass(frozen=True)
class ReconcileResult:
    disagreements: tuple[Disagreement, ...]
    merged: dict[str, int]


def reconcile(sheets: Sequence[RaterSheet], rubric: Rubric) -> ReconcileResult:
    """Merge unanimous leaves; surface everything else.

    A leaf is a disagreement as soon as any two raters differ — majorities
    never auto-win, resolution stays with the humans.
    """
    if not sheets:
        raise AssessmentError("reconcile needs at least one rater sheet")
    leaf_sets = [frozenset(sheet.scores) for sheet in sheets]
    if len(set(leaf_sets)) > 1:
        raise CoverageError("rater sheets cover different leaf sets")
    leaf_ids = set(rubric.leaf_ids())
    for sheet in sheets:
        for criterion_id, score in sheet.scores.items():
            if criterion_id not in leaf_ids:
                raise AssessmentError(f"sheet {sheet.rater_id!r} scores non-leaf {criterion_id!r}")
            if score not in rubric.scale:
                raise AssessmentError(f"sheet {sheet.rater_id!r} has off-scale score {score} at {criterion_id}")

    disagreements: list[Disagreement] = []
    merged: dict[str, int] = {}
    for criterion_id in sorted(leaf_sets[0], key=dotted_key):
        values = {sheet.rater_id: sheet.scores[criterion_id] for sheet in sheets}
        if len(set(values.values())) == 1:
            merged[criterion_id] = next(iter(values.values()))
        else:
            disagreements.append(Disagreement(criterion_id=criterion_id, scores=values))
    return ReconcileResult(disagreements=tuple(disagreements), merged=merged)
