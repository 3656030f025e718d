"""Rank the twelve companies and build the best-in-class composite.

The composite takes the best published practice at every criterion; its
total is what any one company could reach by adopting what already exists
across the industry.
"""
from frameval import load_bundled_assessments, load_bundled_rubric
from frameval.analytics import best_in_class, rank_and_stats
from frameval.scoring import score_tree

rubric = load_bundled_rubric()
assessments = load_bundled_assessments(rubric)
reports = [score_tree(rubric, a) for a in assessments.values()]

ranking = rank_and_stats(reports)
print("rank  company            total")
for position, report in enumerate(ranking.ordering, start=1):
    print(f"{position:>4}  {report.subject_company:18s} {report.total_display:>3}")
print(f"\nmedian of display totals: {float(ranking.median)}")
print("dimension leaders:")
for dim in rubric.dimensions:
    print(f"  {dim.id}. {dim.title:38s} {ranking.dimension_leaders[dim.id]}")

composite = best_in_class(rubric, list(assessments.values()))
print(f"\nbest-in-class composite total: {composite.report.total_display} "
      f"({float(composite.report.total_exact):.2f} exact)")

# Which companies supply the composite's strongest criteria?
suppliers = {}
for leaf_id, target in composite.composite.items():
    for slug, assessment in assessments.items():
        if assessment.score_of(leaf_id) == target:
            suppliers.setdefault(assessment.subject.company, 0)
            suppliers[assessment.subject.company] += 1
            break
print("\ncriteria where each company (first in file order) sets the ceiling:")
for company, count in sorted(suppliers.items(), key=lambda kv: -kv[1]):
    print(f"  {company:18s} {count:>3}")
