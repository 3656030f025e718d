import json
from fractions import Fraction

import pytest

from frameval.rubric import (
    ConditionalWeightError,
    RubricIssue,
    RubricParseError,
    UnknownCriterionError,
    effective_weight,
    parse_rubric,
    rubric_is_usable,
    serialize_rubric,
    validate_rubric,
)

MINIMAL = """
{
  "version": "t1",
  "scale": {"points": [0, 100], "anchors": {"0": "none", "100": "full"}},
  "dimensions": [
    {"id": "1", "title": "Only dimension", "weight": 100, "guidance": [],
     "children": [
       {"id": "1.1", "title": "Only leaf", "weight": 100, "guidance": [], "children": []}
     ]}
  ]
}
"""


def test_bundled_rubric_shape(rubric):
    assert len(rubric.dimensions) == 4
    assert all(d.raw_weight == 25 for d in rubric.dimensions)
    assert len(rubric.leaf_ids()) == 65
    assert rubric.scale.points == (0, 10, 25, 50, 75, 90, 100)


def test_bundled_rubric_override_rules(rubric):
    for node_id, verifier in (("3.1.1", "3.1.1.3"), ("3.1.2", "3.1.2.3")):
        node = rubric.node(node_id)
        assert node.rule is not None and node.rule.kind == "verified_override"
        assert node.rule.verifier == verifier
        assert rubric.node(verifier).raw_weight == 0
    others = [n for n in rubric.nodes() if n.rule is not None]
    assert {n.id for n in others} == {"3.1.1", "3.1.2"}


def test_minimal_rubric_parses():
    rubric = parse_rubric(MINIMAL)
    assert rubric.leaf_ids() == ["1.1"]
    assert effective_weight(rubric, "1.1") == 1


def test_empty_document_is_a_parse_error():
    with pytest.raises(RubricParseError):
        parse_rubric("")


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d["scale"]["points"].remove(100), "must contain 0 and 100"),
    (lambda d: d["scale"]["anchors"].pop("0"), "anchor"),
    (lambda d: d["dimensions"][0]["children"].append(
        dict(d["dimensions"][0]["children"][0])), "duplicate"),
    (lambda d: d["dimensions"][0]["children"][0].update(id="2.7"), "does not extend"),
    (lambda d: d["dimensions"][0].update(weight=-1), "nonnegative"),
])
def test_structural_errors(mutate, message):
    doc = json.loads(MINIMAL)
    mutate(doc)
    with pytest.raises(RubricParseError, match=message):
        parse_rubric(json.dumps(doc))


def test_parse_error_carries_location():
    with pytest.raises(RubricParseError) as excinfo:
        parse_rubric("{not json")
    assert "line" in str(excinfo.value)


def test_bundled_rubric_validates_with_notices_only(rubric):
    issues = validate_rubric(rubric)
    assert rubric_is_usable(issues)
    assert issues, "the printed thirds/sixths groups should produce notices"
    noticed = {i.node_id for i in issues}
    # thirds (33+33+33=99) and sixths (6 x 16.7)
    assert {"2.1.1", "4.2", "4.5", "4.6"} == noticed


def test_zero_weight_sibling_group_is_an_error():
    doc = json.loads(MINIMAL)
    doc["dimensions"][0]["children"][0]["weight"] = 0
    issues = validate_rubric(parse_rubric(json.dumps(doc)))
    assert any(i.severity == "error" and "zero" in i.message for i in issues)


def test_verifier_must_be_direct_child():
    doc = json.loads(MINIMAL)
    doc["dimensions"][0]["rule"] = {"kind": "verified_override", "verifier": "1.9"}
    with pytest.raises(RubricParseError, match="not a direct child"):
        parse_rubric(json.dumps(doc))


def test_effective_weight_examples(rubric):
    assert effective_weight(rubric, "2.2.4") == Fraction(25, 100) * Fraction(65, 100) * Fraction(20, 100)
    assert effective_weight(rubric, "2.2.4") == Fraction(13, 400)  # 0.0325
    assert effective_weight(rubric, "1") == Fraction(1, 4)
    expected = Fraction(1, 4) * Fraction(35, 100) * Fraction(80, 100) * Fraction(33, 99)
    assert effective_weight(rubric, "2.1.1.1") == expected
    assert abs(float(expected) - 0.02333) < 1e-4


def test_effective_weight_unknown_id(rubric):
    with pytest.raises(UnknownCriterionError):
        effective_weight(rubric, "9.9.9")


def test_effective_weight_verifier_branch_is_conditional(rubric):
    with pytest.raises(ConditionalWeightError):
        effective_weight(rubric, "3.1.1.3")
    # the weighted-mean branch under an override node stays linear
    assert effective_weight(rubric, "3.1.1.1") == (
        Fraction(1, 4) * Fraction(50, 100) * Fraction(35, 100) * Fraction(60, 100))


def test_weighted_mean_leaf_weights_sum_to_one():
    doc = json.loads(MINIMAL)
    doc["dimensions"][0]["children"] = [
        {"id": "1.1", "title": "a", "weight": 30, "guidance": [], "children": []},
        {"id": "1.2", "title": "b", "weight": 50, "guidance": [],
         "children": [
             {"id": "1.2.1", "title": "c", "weight": 2, "guidance": [], "children": []},
             {"id": "1.2.2", "title": "d", "weight": 6, "guidance": [], "children": []},
         ]},
    ]
    rubric = parse_rubric(json.dumps(doc))
    total = sum(effective_weight(rubric, leaf) for leaf in rubric.leaf_ids())
    assert total == 1


def test_serialize_then_parse_is_identity(rubric):
    text = serialize_rubric(rubric)
    again = parse_rubric(text)
    assert again == rubric
    assert serialize_rubric(again) == text


def test_bundled_file_is_canonical(rubric):
    from frameval.store import bundled_data_path

    raw = (bundled_data_path() / "rubric.json").read_text(encoding="utf-8")
    assert serialize_rubric(parse_rubric(raw)) == raw
