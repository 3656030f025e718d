"""Weighted criterion trees: the rubric model.

A rubric is a small forest of criterion nodes (one tree per top-level
dimension) plus a discrete score scale. Interior nodes aggregate their
children either by a sibling-normalized weighted mean or by the
verified-override rule, where a designated verifier child can replace the
weighted mean of its siblings when its own score is higher.

All weight arithmetic is exact (`fractions.Fraction`); nothing in this
module touches floating point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional

WEIGHTED_MEAN = "weighted_mean"
VERIFIED_OVERRIDE = "verified_override"


class RubricError(Exception):
    """Base class for rubric failures."""


class RubricParseError(RubricError):
    """Raised when a rubric document is malformed; carries a location hint."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{message}" + (f" (at {location})" if location else ""))


class UnknownCriterionError(RubricError):
    pass


class ConditionalWeightError(RubricError):
    """A verifier-branch criterion has no fixed linear weight."""


def dotted_key(node_id: str) -> tuple[int, ...]:
    """Sort key for dotted-decimal criterion ids ("1.3.2" < "1.10")."""
    return tuple(int(p) for p in node_id.split("."))


def _require(cond: bool, message: str, location: str | None = None) -> None:
    if not cond:
        raise RubricParseError(message, location)


@dataclass(frozen=True)
class ScoreScale:
    """Discrete score points (integer percents) with anchor descriptions."""

    points: tuple[int, ...]
    anchors: dict[int, str]

    def __post_init__(self) -> None:
        _require(len(self.points) > 0, "scale has no points", "scale")
        _require(
            all(0 <= p <= 100 for p in self.points),
            "scale points must lie in [0, 100]", "scale",
        )
        _require(
            all(a < b for a, b in zip(self.points, self.points[1:])),
            "scale points must be strictly increasing", "scale",
        )
        _require(0 in self.points and 100 in self.points,
                 "scale must contain 0 and 100", "scale")
        _require(
            set(self.anchors) == set(self.points),
            "every scale point needs exactly one anchor", "scale",
        )

    def __contains__(self, value: object) -> bool:
        return value in self.points


@dataclass(frozen=True)
class AggregationRule:
    kind: str
    verifier: Optional[str] = None

    def __post_init__(self) -> None:
        _require(self.kind in (WEIGHTED_MEAN, VERIFIED_OVERRIDE),
                 f"unknown rule kind {self.kind!r}")
        if self.kind == VERIFIED_OVERRIDE:
            _require(bool(self.verifier), "verified_override needs a verifier")


@dataclass(frozen=True)
class CriterionNode:
    id: str
    title: str
    raw_weight: Fraction
    guidance: tuple[str, ...] = ()
    children: tuple["CriterionNode", ...] = ()
    rule: Optional[AggregationRule] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator["CriterionNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class Rubric:
    version: str
    scale: ScoreScale
    dimensions: tuple[CriterionNode, ...]
    _index: dict[str, CriterionNode] = field(repr=False, compare=False, default_factory=dict)
    _parent: dict[str, Optional[str]] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        index: dict[str, CriterionNode] = {}
        parent: dict[str, Optional[str]] = {}
        for dim in self.dimensions:
            for node in dim.walk():
                _require(node.id not in index, f"duplicate criterion id {node.id}", node.id)
                index[node.id] = node
            parent[dim.id] = None
            for node in dim.walk():
                for child in node.children:
                    parent[child.id] = node.id
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_parent", parent)

    def node(self, node_id: str) -> CriterionNode:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownCriterionError(node_id) from None

    def parent_id(self, node_id: str) -> Optional[str]:
        self.node(node_id)
        return self._parent[node_id]

    def nodes(self) -> Iterator[CriterionNode]:
        """Depth-first traversal over all dimensions, rubric order."""
        for dim in self.dimensions:
            yield from dim.walk()

    def leaves(self) -> Iterator[CriterionNode]:
        return (n for n in self.nodes() if n.is_leaf)

    def leaf_ids(self) -> list[str]:
        return [n.id for n in self.leaves()]

    def siblings(self, node_id: str) -> tuple[CriterionNode, ...]:
        pid = self.parent_id(node_id)
        if pid is None:
            return self.dimensions
        return self.node(pid).children


@dataclass(frozen=True)
class RubricIssue:
    severity: str  # "error" | "notice"
    node_id: str
    message: str


# --- parsing ----------------------------------------------------------------

def _parse_weight(value: object, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise RubricParseError(f"weight must be a number, got {value!r}", where)
    weight = Fraction(value)
    _require(weight >= 0, "weight must be nonnegative", where)
    return weight


def _parse_node(obj: object, expected_parent: str | None) -> CriterionNode:
    where = obj.get("id", "<missing id>") if isinstance(obj, dict) else "<node>"
    _require(isinstance(obj, dict), "criterion node must be an object", str(where))
    node_id = obj.get("id")
    _require(isinstance(node_id, str) and node_id, "node id must be a nonempty string", str(where))
    parts = node_id.split(".")
    _require(all(p.isdigit() for p in parts), f"id {node_id!r} is not dotted-decimal", node_id)
    if expected_parent is not None:
        _require(
            node_id.startswith(expected_parent + ".") and node_id.count(".") == expected_parent.count(".") + 1,
            f"id {node_id!r} does not extend its parent {expected_parent!r} by one component",
            node_id,
        )
    title = obj.get("title")
    _require(isinstance(title, str) and title, "title must be a nonempty string", node_id)
    weight = _parse_weight(obj.get("weight"), node_id)
    guidance_raw = obj.get("guidance", [])
    _require(
        isinstance(guidance_raw, list) and all(isinstance(g, str) for g in guidance_raw),
        "guidance must be a list of strings", node_id,
    )
    children_raw = obj.get("children", [])
    _require(isinstance(children_raw, list), "children must be a list", node_id)
    children = tuple(_parse_node(c, node_id) for c in children_raw)

    rule = None
    if "rule" in obj:
        rule_raw = obj["rule"]
        _require(isinstance(rule_raw, dict), "rule must be an object", node_id)
        try:
            rule = AggregationRule(kind=rule_raw.get("kind", ""), verifier=rule_raw.get("verifier"))
        except RubricParseError as exc:
            raise RubricParseError(str(exc), node_id) from None
        _require(bool(children), "leaf criteria cannot carry a rule", node_id)
        if rule.kind == VERIFIED_OVERRIDE:
            _require(
                any(c.id == rule.verifier for c in children),
                f"verifier {rule.verifier!r} is not a direct child of {node_id}",
                node_id,
            )
    return CriterionNode(
        id=node_id, title=title, raw_weight=weight,
        guidance=tuple(guidance_raw), children=children, rule=rule,
    )


def parse_rubric(document: str) -> Rubric:
    """Parse the canonical rubric JSON into an immutable Rubric."""
    try:
        raw = json.loads(document, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise RubricParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
    _require(isinstance(raw, dict), "top level must be an object")
    version = raw.get("version")
    _require(isinstance(version, str) and version, "version must be a nonempty string")

    scale_raw = raw.get("scale")
    _require(isinstance(scale_raw, dict), "scale must be an object", "scale")
    points_raw = scale_raw.get("points")
    _require(
        isinstance(points_raw, list) and all(isinstance(p, int) and not isinstance(p, bool) for p in points_raw),
        "scale points must be integers", "scale",
    )
    anchors_raw = scale_raw.get("anchors")
    _require(isinstance(anchors_raw, dict), "scale anchors must be an object", "scale")
    anchors: dict[int, str] = {}
    for key, text in anchors_raw.items():
        _require(isinstance(key, str) and key.lstrip("-").isdigit(), f"anchor key {key!r} is not an integer", "scale")
        _require(isinstance(text, str) and text, f"anchor text for {key} must be nonempty", "scale")
        anchors[int(key)] = text
    scale = ScoreScale(points=tuple(points_raw), anchors=anchors)

    dims_raw = raw.get("dimensions")
    _require(isinstance(dims_raw, list) and dims_raw, "dimensions must be a nonempty list")
    dimensions = tuple(_parse_node(d, None) for d in dims_raw)
    return Rubric(version=version, scale=scale, dimensions=dimensions)


# --- serialization ----------------------------------------------------------

def _weight_json(weight: Fraction):
    if weight.denominator == 1:
        return weight.numerator
    return float(weight)


def _node_json(node: CriterionNode) -> dict:
    out: dict = {
        "id": node.id,
        "title": node.title,
        "weight": _weight_json(node.raw_weight),
        "guidance": list(node.guidance),
    }
    if node.rule is not None and node.rule.kind == VERIFIED_OVERRIDE:
        out["rule"] = {"kind": VERIFIED_OVERRIDE, "verifier": node.rule.verifier}
    out["children"] = [_node_json(c) for c in node.children]
    return out


def serialize_rubric(rubric: Rubric) -> str:
    """Canonical form: fixed key order, rubric order, LF lines, trailing newline."""
    doc = {
        "version": rubric.version,
        "scale": {
            "points": list(rubric.scale.points),
            "anchors": {str(p): rubric.scale.anchors[p] for p in rubric.scale.points},
        },
        "dimensions": [_node_json(d) for d in rubric.dimensions],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


# --- validation -------------------------------------------------------------

def validate_rubric(rubric: Rubric) -> list[RubricIssue]:
    """Structural and weight checks. Errors make the rubric unusable;
    notices flag benign conventions (sibling weights not summing to 100)."""
    issues: list[RubricIssue] = []

    def check_group(parent_id: str, group: tuple[CriterionNode, ...], verifier: str | None) -> None:
        mean_members = [c for c in group if c.id != verifier]
        total = sum((c.raw_weight for c in mean_members), Fraction(0))
        if total <= 0:
            issues.append(RubricIssue("error", parent_id, "sibling raw weights sum to zero"))
        elif total != 100:
            issues.append(RubricIssue(
                "notice", parent_id,
                f"sibling weights sum to {float(total):g}, normalized by their sum",
            ))

    check_group("<root>", rubric.dimensions, None)
    for node in rubric.nodes():
        if node.is_leaf:
            if node.rule is not None:
                issues.append(RubricIssue("error", node.id, "leaf carries an aggregation rule"))
            continue
        verifier = None
        if node.rule is not None and node.rule.kind == VERIFIED_OVERRIDE:
            verifier = node.rule.verifier
            if not any(c.id == verifier for c in node.children):
                issues.append(RubricIssue("error", node.id, f"verifier {verifier!r} is not a direct child"))
                verifier = None
            else:
                ver_node = rubric.node(verifier)
                if ver_node.raw_weight != 0:
                    issues.append(RubricIssue(
                        "notice", node.id,
                        "verifier child carries a raw weight; it is ignored by the weighted mean",
                    ))
        check_group(node.id, node.children, verifier)
    return issues


def rubric_is_usable(issues: list[RubricIssue]) -> bool:
    return all(issue.severity != "error" for issue in issues)


# --- effective weights ------------------------------------------------------

def _normalized_weight(rubric: Rubric, node_id: str) -> Fraction:
    node = rubric.node(node_id)
    pid = rubric.parent_id(node_id)
    group = rubric.siblings(node_id)
    if pid is not None:
        parent = rubric.node(pid)
        if parent.rule is not None and parent.rule.kind == VERIFIED_OVERRIDE:
            group = tuple(c for c in group if c.id != parent.rule.verifier)
    total = sum((c.raw_weight for c in group), Fraction(0))
    if total <= 0:
        raise RubricError(f"sibling weights of {node_id} sum to zero")
    return node.raw_weight / total


def effective_weight(rubric: Rubric, node_id: str) -> Fraction:
    """Product of normalized sibling weights along the path from the root.

    Defined along weighted-mean branches (the nominal linear coefficient,
    even under a verified-override node). The verifier child itself has no
    fixed coefficient and raises ConditionalWeightError.
    """
    rubric.node(node_id)
    path: list[str] = []
    cursor: Optional[str] = node_id
    while cursor is not None:
        path.append(cursor)
        cursor = rubric.parent_id(cursor)
    path.reverse()  # dimension root .. node_id

    for nid in path:
        pid = rubric.parent_id(nid)
        if pid is None:
            continue
        parent = rubric.node(pid)
        if parent.rule is not None and parent.rule.kind == VERIFIED_OVERRIDE and parent.rule.verifier == nid:
            raise ConditionalWeightError(
                f"{node_id} passes through the verifier branch of {pid}; "
                "its weight is not a fixed linear coefficient"
            )

    weight = Fraction(1)
    for nid in path:
        weight *= _normalized_weight(rubric, nid)
    return weight
