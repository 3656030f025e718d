import pytest

from frameval import load_bundled_assessments, load_bundled_rubric


@pytest.fixture(scope="session")
def rubric():
    return load_bundled_rubric()


@pytest.fixture(scope="session")
def assessments(rubric):
    return load_bundled_assessments(rubric)
