"""Score one company and walk the aggregation down the tree.

Shows why the engine keeps exact rationals until the very last step:
Anthropic's total is 34.7465625, which only displays as 35 because
rounding happens once, at the end, half up.
"""
from fractions import Fraction

from frameval import load_bundled_assessments, load_bundled_rubric
from frameval.scoring import display_round, score_tree

rubric = load_bundled_rubric()
assessments = load_bundled_assessments(rubric)
anthropic = assessments["anthropic"]

report = score_tree(rubric, anthropic)
print(f"{anthropic.subject.company} — {anthropic.subject.framework_title} "
      f"v{anthropic.subject.framework_version}")
print(f"total: {report.total_exact} = {float(report.total_exact):.6f} "
      f"-> displays as {report.total_display}")
print()

# The four dimensions, each worth a quarter of the total.
for dim in rubric.dimensions:
    exact = report.exact(dim.id)
    print(f"  {dim.id}. {dim.title:38s} {float(exact):6.2f} -> {report.display(dim.id)}")

# Display rounding is half-up: 12.5 displays as 13. Pre-rounding the
# dimensions instead would put the Anthropic total at 34.75 -> lost.
print()
print("half-up examples:", display_round(Fraction(25, 2)), display_round(Fraction(85, 2)))

# Drill into the verified-override node: Amazon's containment measures.
amazon = assessments["amazon"]
node = rubric.node("3.1.1")
print()
print(f"{node.id} {node.title} (verifier: {node.rule.verifier})")
for child in node.children:
    entry = amazon.entry(child.id)
    print(f"  {child.id} weight {str(child.raw_weight):>3} score {entry.score:>3}")
print("  0.6*90 + 0.4*50 = 74; the verifier scored 0, so the mean wins:",
      float(score_tree(rubric, amazon).exact("3.1.1")))
