import dataclasses
import shutil
import threading

import pytest

from frameval.store import (
    AssessmentStore,
    StoreError,
    TokenMismatch,
    assessment_token,
    bundled_data_path,
    version_token,
)


@pytest.fixture()
def store(tmp_path):
    shutil.copytree(bundled_data_path(), tmp_path / "data")
    return AssessmentStore(tmp_path / "data")


def test_listing_and_loading(store, rubric):
    ids = store.list_ids()
    assert len(ids) == 12
    assert "anthropic" in ids
    assessment, token = store.load("anthropic", rubric)
    assert assessment.subject.company == "Anthropic"
    assert token == version_token(store.read_bytes("anthropic"))


def test_token_equais_contents(store, rubric):
    assessment, token = store.load("meta", rubric)
    assert token == assessment_token(assessment)
    # identical contents, identical token
    again, token2 = store.load("meta", rubric)
    assert token2 == token
    # any change produces a different token
    changed = assessment.with_scores({"1.1.1": 90})
    assert assessment_token(changed) != token


def test_save_is_atomic_and_canonical(store, rubric):
    assessment, _ = store.load("cohere", rubric)
    changed = assessment.with_scores({"4.6.1": 90})
    new_token = store.save("cohere", changed)
    reloaded, token = store.load("cohere", rubric)
    assert token == new_token
    assert reloaded.score_of("4.6.1") == 90
    leftovers = [p for p in (store.assessments_dir).glob("*.tmp")]
    assert not leftovers


def test_replace_if_enforces_token(store, rubric):
    assessment, token = store.load("magic", rubric)
    head = assessment.with_scores({"2.2.4": 50})
    new_token = store.replace_if("magic", head, token)
    assert new_token != token
    with pytest.raises(TokenMismatch):
        store.replace_if("magic", assessment, token)  # stale now


def test_concurrent_replace_if_admits_one_winner(store, rubric):
    assessment, token = store.load("nvidia", rubric)
    outcomes = []
    barrier = threading.Barrier(2)

    def writer(score):
        head = assessment.with_scores({"1.1.1": score})
        barrier.wait()
        try:
            outcomes.append(("ok", store.replace_if("nvidia", head, token)))
        except TokenMismatch:
            outcomes.append(("conflict", None))

    threads = [threading.Thread(target=writer, args=(s,)) for s in (75, 90)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(kind for kind, _ in outcomes) == ["conflict", "ok"]


def test_unknown_assessment(store):
    with pytest.raises(StoreError):
        store.read_bytes("nonexistent")


def test_path_traversal_is_rejected(store):
    with pytest.raises(StoreError):
        store.read_bytes("../rubric")
