"""Check every published aggregate against recomputation from the leaves.

The bundled files keep the aggregates exactly as printed in the source
evaluation; a handful do not reproduce from their own leaf scores. The
lint reports them instead of deciding who is right.
"""
from frameval import load_bundled_assessments, load_bundled_rubric
from frameval.analytics import lint_consistency

rubric = load_bundled_rubric()
assessments = load_bundled_assessments(rubric)

total_findings = 0
for slug in sorted(assessments):
    assessment = assessments[slug]
    findings = lint_consistency(rubric, assessment, tolerance=1)
    if not findings:
        continue
    total_findings += len(findings)
    print(f"{assessment.subject.company}")
    for f in findings:
        print(f"  {f.node_id:8s} published {f.published:>3}  "
              f"recomputed {f.recomputed_display:>3}  (off by {f.excess})")

print(f"\n{total_findings} findings at tolerance 1 across {len(assessments)} assessments")
print("known fixtures: Anthropic 3.1.3 (14 vs 16) and Amazon 4.5 (20 vs 17)")

# Where the per-company sections and the summary table printed different
# values, both survive in published_variants.
xai = assessments["xai"]
print(f"\nxAI print conflicts kept as [section, table]:")
for node_id, values in sorted(xai.published_variants.items())[:6]:
    print(f"  {node_id:10s} {list(values)}")
