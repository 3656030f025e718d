import json
import shutil
import subprocess
import sys

import pytest

from frameval.cli import main
from frameval.store import bundled_data_path


@pytest.fixture()
def data_dir(tmp_path):
    shutil.copytree(bundled_data_path(), tmp_path / "data")
    return tmp_path / "data"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_score_prints_anthropic_total(capsys, data_dir):
    code, out, err = run(capsys, "--data-dir", str(data_dir),
                         "score", "--assessment", "anthropic")
    assert code == 0
    assert "Total score: 35" in out
    assert err == ""


def test_score_structured_output_is_canonical(capsys, data_dir):
    code, out, _ = run(capsys, "--data-dir", str(data_dir),
                       "score", "--assessment", "anthropic", "--format", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["total"]["display"] == 35
    assert doc["total"]["exact"]["decimal"] == "34.7466"


def test_validate_clean_pair_exits_zero_silently(capsys, data_dir):
    code, out, err = run(capsys, "--data-dir", str(data_dir), "validate", "anthropic")
    assert code == 0
    assert out == "" and err == ""


def test_validate_broken_assessment_exits_one(capsys, data_dir, rubric, assessments):
    from frameval.assessment import serialize_assessment
    import dataclasses

    entries = dict(assessments["amazon"].entries)
    del entries["4.6.3"]
    broken = dataclasses.replace(assessments["amazon"], entries=entries)
    path = data_dir / "assessments" / "amazon.json"
    path.write_text(serialize_assessment(broken), encoding="utf-8")
    code, out, _ = run(capsys, "--data-dir", str(data_dir), "validate", "amazon")
    assert code == 1
    assert "4.6.3" in out


def test_lint_anthropic_exits_one_with_finding(capsys, data_dir):
    code, out, _ = run(capsys, "--data-dir", str(data_dir),
                       "lint", "--assessment", "anthropic")
    assert code == 1
    assert "3.1.3" in out
    assert "published 14" in out
    assert "recomputed 16" in out


def test_lint_tolerance_flag(capsys, data_dir):
    code, out, _ = run(capsys, "--data-dir", str(data_dir),
                       "lint", "--assessment", "anthropic", "--tolerance", "99")
    assert code == 0
    assert out == ""


def test_rank_lists_all_with_median(capsys, data_dir):
    code, out, _ = run(capsys, "--data-dir", str(data_dir), "rank")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "1\tAnthropic\t35"
    assert "median\t18.5" in out


def test_bic_total(capsys, data_dir):
    code, out, _ = run(capsys, "--data-dir", str(data_dir), "bic")
    assert code == 0
    assert "Best in class total: 56" in out


def test_whatif_override_pairs(capsys, data_dir):
    code, out, _ = run(capsys, "--data-dir", str(data_dir),
                       "whatif", "--assessment", "amazon", "2.2.4=75")
    assert code == 0
    assert "delta +1.625" in out


def test_whatif_rejects_malformed_pair(capsys, data_dir):
    code, _, err = run(capsys, "--data-dir", str(data_dir),
                       "whatif", "--assessment", "amazon", "2.2.4:75")
    assert code == 2
    assert "id=score" in err


def test_diff_reports_changed_leaves(capsys, data_dir, rubric, assessments):
    from frameval.assessment import serialize_assessment

    head = assessments["anthropic"].with_scores({"3.2.1.2": 0})
    head_path = data_dir / "assessments" / "anthropic_head.json"
    head_path.write_text(serialize_assessment(head), encoding="utf-8")
    code, out, _ = run(capsys, "--data-dir", str(data_dir),
                       "diff", "--base", "anthropic", "--head", str(head_path))
    assert code == 0
    assert "3.2.1.2\t100 -> 0" in out
    assert "total delta\t-1.25" in out


def test_frontier_output_sorted(capsys, data_dir):
    code, out, _ = run(capsys, "--data-dir", str(data_dir),
                       "frontier", "--assessment", "cohere", "--format", "structured")
    assert code == 0
    items = json.loads(out)
    assert items[0]["id"] == "1.1.1"
    gains = [float(i["gain"]["decimal"]) for i in items]
    assert gains == sorted(gains, reverse=True)


def test_report_writes_only_named_file(capsys, data_dir, tmp_path):
    out_path = tmp_path / "table.csv"
    before = sorted(p.name for p in data_dir.rglob("*"))
    code, out, _ = run(capsys, "--data-dir", str(data_dir),
                       "report", "--format", "csv", "--out", str(out_path))
    assert code == 0
    assert out == ""
    assert out_path.exists()
    after = sorted(p.name for p in data_dir.rglob("*"))
    assert before == after  # nothing else written


def test_report_profile(capsys, data_dir):
    code, out, _ = run(capsys, "--data-dir", str(data_dir),
                       "report", "--profile", "amazon")
    assert code == 0
    assert "# Amazon" in out
    assert "No relevant quotes found" in out


def test_identical_invocations_identical_bytes(capsys, data_dir):
    _, first, _ = run(capsys, "--data-dir", str(data_dir), "report", "--format", "csv")
    _, second, _ = run(capsys, "--data-dir", str(data_dir), "report", "--format", "csv")
    assert first == second


def test_unknown_assessment_exits_two(capsys, data_dir):
    code, _, err = run(capsys, "--data-dir", str(data_dir),
                       "score", "--assessment", "nonexistent")
    assert code == 2
    assert "error" in err


def test_unknown_command_usage_exit_two():
    proc = subprocess.run(
        [sys.executable, "-m", "frameval.cli", "frobnicate"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert "usage" in proc.stderr.lower()


def test_env_var_data_dir(capsys, data_dir, monkeypatch):
    monkeypatch.setenv("FRAMEVAL_DATA_DIR", str(data_dir))
    code, out, _ = run(capsys, "score", "--assessment", "anthropic")
    assert code == 0
    assert "Total score: 35" in out
