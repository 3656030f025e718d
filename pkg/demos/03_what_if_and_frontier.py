"""What-if scenarios and the single-leaf improvement frontier.

A what-if rescoring is exact: the delta of raising one weighted-mean leaf
equals its effective weight times the score change, and the engine checks
itself against a full recompute rather than trusting that closed form.
"""
from frameval import load_bundled_assessments, load_bundled_rubric
from frameval.analytics import improvement_frontier, what_if
from frameval.rubric import effective_weight

rubric = load_bundled_rubric()
assessments = load_bundled_assessments(rubric)

# Amazon commits harder to a development pause (criterion 2.2.4, 25 -> 75).
amazon = assessments["amazon"]
result = what_if(rubric, amazon, {"2.2.4": 75})
weight = effective_weight(rubric, "2.2.4")
print(f"2.2.4 effective weight: {weight} = {float(weight)}")
print(f"what-if total delta: {result.total_delta} "
      f"(= {float(weight)} x 50 = {float(weight) * 50})")
print(f"new total: {result.report.total_display}")

# Cohere's frontier: single-criterion adoptions of existing best practice,
# ranked by total-score gain.
cohere = assessments["cohere"]
peers = [a for slug, a in assessments.items() if slug != "cohere"]
items = improvement_frontier(rubric, cohere, peers)
print(f"\nCohere: {len(items)} candidate improvements; top ten by gain:")
for item in items[:10]:
    title = rubric.node(item.criterion_id).title
    print(f"  {item.criterion_id:12s} {item.current:>3} -> {item.target:>3} "
          f"+{float(item.gain):5.2f}  {title[:48]}")

total_gain = sum(float(i.gain) for i in items)
print(f"\nsum of single-leaf gains: {total_gain:.2f} "
      "(additive here: no override branch switches on these leaves)")
