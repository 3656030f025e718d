import itertools
import json

import pytest

from frameval.assessment import (
    AssessmentParseError,
    CoverageError,
    RaterSheet,
    assessment_is_usable,
    parse_assessment,
    reconcile,
    serialize_assessment,
    validate_assessment,
)
from frameval.rubric import parse_rubric
from frameval.store import bundled_data_path

ONE_LEAF = parse_rubric(json.dumps({
    "version": "t1",
    "scale": {"points": [0, 10, 25, 50, 75, 90, 100],
              "anchors": {str(p): f"a{p}" for p in (0, 10, 25, 50, 75, 90, 100)}},
    "dimensions": [{
        "id": "1", "title": "dim", "weight": 100, "guidance": [],
        "children": [{"id": "1.1", "title": "leaf", "weight": 100,
                      "guidance": [], "children": []}],
    }],
}))


def bundled_text(name):
    return (bundled_data_path() / "assessments" / f"{name}.json").read_text(encoding="utf-8")


def test_bundled_amazon_parses_with_published(rubric):
    assessment = parse_assessment(bundled_text("amazon"), rubric)
    assert len(assessment.entries) == 65
    assert assessment.subject.company == "Amazon"
    assert assessment.published  # aggregates present for lint
    assert assessment.published["3.1.1"] == 74
    assert assessment.published["total"] == 18


def test_off_scale_score_is_rejected(rubric):
    doc = json.loads(bundled_text("amazon"))
    doc["entries"][0]["score"] = 37
    with pytest.raises(AssessmentParseError, match="not on the rubric scale"):
        parse_assessment(json.dumps(doc), rubric)


def test_unknown_id_rejected_with_rubric_deferred_without(rubric):
    doc = json.loads(bundled_text("amazon"))
    doc["entries"][0]["id"] = "9.9.9"
    with pytest.raises(AssessmentParseError, match="not a rubric leaf"):
        parse_assessment(json.dumps(doc), rubric)
    deferred = parse_assessment(json.dumps(doc))  # no rubric: parses
    issues = validate_assessment(deferred, rubric)
    assert any(i.ref == "9.9.9" and i.severity == "error" for i in issues)


def test_round_trip_of_bundled_files_is_byte_identical(rubric):
    for name in ("anthropic", "amazon", "xai"):
        text = bundled_text(name)
        assessment = parse_assessment(text, rubric)
        assert serialize_assessment(assessment) == text


def test_serialization_is_stable(rubric, assessments):
    for assessment in assessments.values():
        once = serialize_assessment(assessment)
        twice = serialize_assessment(parse_assessment(once, rubric))
        assert once == twice


def test_all_bundled_assessments_validate_clean(rubric, assessments):
    assert len(assessments) == 12
    for slug, assessment in assessments.items():
        issues = validate_assessment(assessment, rubric)
        errors = [i for i in issues if i.severity == "error"]
        assert not errors, (slug, errors[:3])


def test_missing_leaf_is_reported(rubric, assessments):
    assessment = assessments["amazon"]
    entries = dict(assessment.entries)
    del entries["4.6.3"]
    import dataclasses

    broken = dataclasses.replace(assessment, entries=entries)
    issues = validate_assessment(broken, rubric)
    assert any(i.ref == "4.6.3" and "no entry" in i.message for i in issues)
    assert not assessment_is_usable(issues)
    # marked partial, the gap downgrades to a notice
    partial = dataclasses.replace(broken, partial=True)
    issues = validate_assessment(partial, rubric)
    assert any(i.ref == "4.6.3" and i.severity == "notice" for i in issues)
    assert assessment_is_usable(issues)


def test_non_leaf_entry_is_reported(rubric, assessments):
    assessment = assessments["amazon"]
    entry = next(iter(assessment.entries.values()))
    import dataclasses

    bad_entry = dataclasses.replace(entry, criterion_id="3.1.1")
    broken = assessment.with_entry(bad_entry)
    issues = validate_assessment(broken, rubric)
    assert any(i.ref == "3.1.1" and "non-leaf" in i.message for i in issues)


def test_rubric_version_mismatch(rubric, assessments):
    import dataclasses

    other = dataclasses.replace(assessments["amazon"], rubric_version="elsewhere")
    issues = validate_assessment(other, rubric)
    assert any(i.ref == "rubric_version" for i in issues)


# --- reconcile ---------------------------------------------------------------

def test_identical_sheets_merge_fully(rubric):
    scores = {leaf: 25 for leaf in rubric.leaf_ids()}
    result = reconcile([RaterSheet("r1", scores), RaterSheet("r2", dict(scores))], rubric)
    assert result.disagreements == ()
    assert result.merged == scores


def test_two_raters_disagree(rubric):
    scores1 = {leaf: 25 for leaf in rubric.leaf_ids()}
    scores2 = dict(scores1)
    scores2["1.1.1"] = 50
    result = reconcile([RaterSheet("r1", scores1), RaterSheet("r2", scores2)], rubric)
    assert [d.criterion_id for d in result.disagreements] == ["1.1.1"]
    assert result.disagreements[0].scores == {"r1": 25, "r2": 50}
    assert "1.1.1" not in result.merged
    assert len(result.merged) == 64


def test_majority_never_auto_wins_exhaustive():
    # independent oracle: every 3-rater combination over the full scale on a
    # one-leaf rubric; a leaf merges iff all three agree
    points = ONE_LEAF.scale.points
    for a, b, c in itertools.product(points, repeat=3):
        sheets = [RaterSheet("r1", {"1.1": a}), RaterSheet("r2", {"1.1": b}),
                  RaterSheet("r3", {"1.1": c})]
        result = reconcile(sheets, ONE_LEAF)
        unanimous = a == b == c
        assert ("1.1" in result.merged) == unanimous
        assert bool(result.disagreements) == (not unanimous)
        if not unanimous:
            assert result.merged == {}


def test_reconcile_is_order_insensitive(rubric):
    leaf_ids = rubric.leaf_ids()
    scores1 = {leaf: 25 for leaf in leaf_ids}
    scores2 = {leaf: (50 if i % 7 == 0 else 25) for i, leaf in enumerate(leaf_ids)}
    sheets = [RaterSheet("r1", scores1), RaterSheet("r2", scores2)]
    forward = reconcile(sheets, rubric)
    backward = reconcile(list(reversed(sheets)), rubric)
    assert forward.merged == backward.merged
    assert {d.criterion_id for d in forward.disagreements} == \
        {d.criterion_id for d in backward.disagreements}


def test_mismatched_leaf_sets_raise_coverage_error(rubric):
    full = {leaf: 25 for leaf in rubric.leaf_ids()}
    partial = dict(full)
    partial.popitem()
    with pytest.raises(CoverageError):
        reconcile([RaterSheet("r1", full), RaterSheet("r2", partial)], rubric)
