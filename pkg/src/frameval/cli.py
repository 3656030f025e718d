"""Command-line interface.

Exit codes: 0 success, 1 when validation or lint findings exist (still
printed), 2 on I/O, parse, or usage failures. Output is deterministic for
identical inputs.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import analytics, reporting
from .assessment import (
    Assessment,
    AssessmentParseError,
    assessment_is_usable,
    parse_assessment,
    validate_assessment,
)
from .rubric import Rubric, RubricError, parse_rubric, rubric_is_usable, validate_rubric
from .scoring import score_tree, serialize_report
from .store import AssessmentStore, StoreError, bundled_data_path

ENV_DATA_DIR = "FRAMEVAL_DATA_DIR"

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_FAILURE = 2


class CliError(Exception):
    pass


def _data_dir(args) -> Path:
    if args.data_dir:
        return Path(args.data_dir)
    env = os.environ.get(ENV_DATA_DIR)
    if env:
        return Path(env)
    return bundled_data_path()


def _load_rubric(args) -> Rubric:
    path = Path(args.rubric) if args.rubric else _data_dir(args) / "rubric.json"
    try:
        return parse_rubric(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read rubric {path}: {exc}") from exc


def _load_assessment(args, ref: str, rubric: Rubric | None = None) -> Assessment:
    path = Path(ref)
    if path.is_file():
        try:
            return parse_assessment(path.read_text(encoding="utf-8"), rubric)
        except OSError as exc:
            raise CliError(f"cannot read assessment {path}: {exc}") from exc
    store = AssessmentStore(_data_dir(args))
    assessment, _token = store.load(ref, rubric)
    return assessment


def _load_all(args, rubric: Rubric | None = None) -> dict[str, Assessment]:
    store = AssessmentStore(_data_dir(args))
    return {slug: store.load(slug, rubric)[0] for slug in store.list_ids()}


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_overrides(pairs: list[str]) -> dict[str, int]:
    overrides: dict[str, int] = {}
    for pair in pairs:
        criterion_id, sep, value = pair.partition("=")
        if not sep or not criterion_id or not value.lstrip("-").isdigit():
            raise CliError(f"override {pair!r} is not of the form id=score")
        overrides[criterion_id] = int(value)
    return overrides


# --- commands ----------------------------------------------------------------

def cmd_validate(args) -> int:
    rubric = _load_rubric(args)
    rubric_issues = validate_rubric(rubric)
    exit_code = EXIT_OK
    for issue in rubric_issues:
        if issue.severity == "error" or args.verbose:
            print(f"rubric\t{issue.severity}\t{issue.node_id}\t{issue.message}")
    if not rubric_is_usable(rubric_issues):
        exit_code = EXIT_FINDINGS
    for ref in args.assessment:
        assessment = _load_assessment(args, ref)
        issues = validate_assessment(assessment, rubric)
        for issue in issues:
            if issue.severity == "error" or args.verbose:
                print(f"{ref}\t{issue.severity}\t{issue.ref}\t{issue.message}")
        if not assessment_is_usable(issues):
            exit_code = EXIT_FINDINGS
    return exit_code


def cmd_score(args) -> int:
    rubric = _load_rubric(args)
    assessment = _load_assessment(args, args.assessment, rubric)
    report = score_tree(rubric, assessment, missing_as_zero=args.missing_zero)
    if args.format == "structured":
        _emit(args, serialize_report(report))
    else:
        lines = [f"{assessment.subject.company}"]
        for dim in rubric.dimensions:
            lines.append(f"{dim.id}. {dim.title}: {report.display(dim.id)}")
        lines.append(f"Total score: {report.total_display}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_rank(args) -> int:
    rubric = _load_rubric(args)
    assessments = _load_all(args, rubric)
    if not assessments:
        raise CliError("no assessments in the data directory")
    reports = [score_tree(rubric, a, missing_as_zero=args.missing_zero)
               for a in assessments.values()]
    result = analytics.rank_and_stats(reports)
    if args.format == "structured":
        _emit(args, analytics.dumps(analytics.rank_to_json(result)))
    else:
        lines = []
        for position, report in enumerate(result.ordering, start=1):
            lines.append(f"{position}\t{report.subject_company}\t{report.total_display}")
        lines.append(f"median\t{float(result.median):g}")
        for dim_id, leader in sorted(result.dimension_leaders.items()):
            lines.append(f"leader\t{dim_id}\t{leader}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_bic(args) -> int:
    rubric = _load_rubric(args)
    assessments = _load_all(args, rubric)
    if not assessments:
        raise CliError("no assessments in the data directory")
    result = analytics.best_in_class(rubric, list(assessments.values()),
                                     missing_as_zero=args.missing_zero)
    if args.format == "structured":
        _emit(args, serialize_report(result.report))
    else:
        _emit(args, f"Best in class total: {result.report.total_display}\n")
    return EXIT_OK


def cmd_diff(args) -> int:
    rubric = _load_rubric(args)
    base = _load_assessment(args, args.base, rubric)
    head = _load_assessment(args, args.head, rubric)
    report = analytics.diff(rubric, base, head, missing_as_zero=args.missing_zero)
    if args.format == "structured":
        _emit(args, analytics.dumps(analytics.diff_to_json(report)))
    else:
        lines = []
        for delta in report.leaf_deltas:
            lines.append(f"{delta.criterion_id}\t{delta.base} -> {delta.head}")
        lines.append(f"total delta\t{float(report.total_delta):+g}")
        if report.nonadditive:
            lines.append("note\tattributions are nonadditive (override branch switch)")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_whatif(args) -> int:
    rubric = _load_rubric(args)
    assessment = _load_assessment(args, args.assessment, rubric)
    overrides = _parse_overrides(args.override)
    result = analytics.what_if(rubric, assessment, overrides,
                               missing_as_zero=args.missing_zero)
    if args.format == "structured":
        _emit(args, analytics.dumps(analytics.whatif_to_json(result)))
    else:
        _emit(args, (
            f"Total: {result.report.total_display}"
            f" (delta {float(result.total_delta):+g})\n"
        ))
    return EXIT_OK


def cmd_frontier(args) -> int:
    rubric = _load_rubric(args)
    assessment = _load_assessment(args, args.assessment, rubric)
    peers = [a for slug, a in _load_all(args, rubric).items()
             if a.subject.company != assessment.subject.company]
    if not peers:
        raise CliError("no peer assessments found")
    items = analytics.improvement_frontier(rubric, assessment, peers,
                                           missing_as_zero=args.missing_zero)
    if args.format == "structured":
        _emit(args, analytics.dumps(analytics.frontier_to_json(items)))
    else:
        lines = [f"{i.criterion_id}\t{i.current} -> {i.target}\t+{float(i.gain):g}"
                 for i in items]
        _emit(args, "\n".join(lines) + ("\n" if lines else ""))
    return EXIT_OK


def cmd_lint(args) -> int:
    rubric = _load_rubric(args)
    assessment = _load_assessment(args, args.assessment, rubric)
    findings = analytics.lint_consistency(rubric, assessment, tolerance=args.tolerance,
                                          missing_as_zero=args.missing_zero)
    if args.format == "structured":
        _emit(args, analytics.dumps(analytics.lint_to_json(findings)))
    else:
        for finding in findings:
            print(f"{finding.node_id}\tpublished {finding.published}\t"
                  f"recomputed {finding.recomputed_display}\texcess {finding.excess}")
    return EXIT_FINDINGS if findings else EXIT_OK


def cmd_report(args) -> int:
    rubric = _load_rubric(args)
    if args.profile:
        assessment = _load_assessment(args, args.profile, rubric)
        complete = set(rubric.leaf_ids()) <= set(assessment.entries)
        report = None
        if complete or args.missing_zero:
            report = score_tree(rubric, assessment, missing_as_zero=args.missing_zero)
        _emit(args, reporting.render_profile(rubric, assessment, report, fmt=args.format))
        return EXIT_OK
    assessments = _load_all(args, rubric)
    if not assessments:
        raise CliError("no assessments in the data directory")
    reports = [score_tree(rubric, a, missing_as_zero=args.missing_zero)
               for a in assessments.values()]
    best = analytics.best_in_class(rubric, list(assessments.values()),
                                   missing_as_zero=args.missing_zero).report
    _emit(args, reporting.render_comparison(rubric, reports, best, fmt=args.format))
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    serve(_data_dir(args), host=args.host, port=args.port)
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frameval",
        description="Score, compare, and lint weighted-rubric assessments.",
    )
    parser.add_argument("--data-dir", help=f"data directory (default ${ENV_DATA_DIR} or bundled)")
    parser.add_argument("--rubric", help="rubric file (default <data-dir>/rubric.json)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="text"):
        p.add_argument("--format", choices=["text", "csv", "markdown", "structured"],
                       default=fmt_default)
        p.add_argument("--missing-zero", action="store_true",
                       help="score missing leaves as 0 instead of failing")
        p.add_argument("--out", help="write output to a file instead of stdout")

    p = sub.add_parser("validate", help="validate a rubric and assessments")
    p.add_argument("assessment", nargs="*", help="assessment files or ids")
    p.add_argument("--verbose", action="store_true", help="also print notices")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="score one assessment")
    p.add_argument("--assessment", required=True)
    common(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("rank", help="rank all assessments in the data directory")
    common(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("bic", help="best-in-class composite over all assessments")
    common(p)
    p.set_defaults(func=cmd_bic)

    p = sub.add_parser("diff", help="diff two assessments")
    p.add_argument("--base", required=True)
    p.add_argument("--head", required=True)
    common(p)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("whatif", help="apply leaf overrides and rescore")
    p.add_argument("--assessment", required=True)
    p.add_argument("override", nargs="*", help="leaf overrides as id=score")
    common(p)
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("frontier", help="ranked single-leaf improvement opportunities")
    p.add_argument("--assessment", required=True)
    common(p)
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("lint", help="check published aggregates against recomputation")
    p.add_argument("--assessment", required=True)
    p.add_argument("--tolerance", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("report", help="comparison table or per-subject profile")
    p.add_argument("--profile", help="render a profile for this assessment instead")
    common(p, fmt_default="markdown")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, RubricError, AssessmentParseError, StoreError,
            analytics.AnalyticsError, reporting.ReportingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
