"""Shared fixtures: sample corpus paths, packaged resources, trained models.

Also collects the results of tests in test_acceptance.py and prints one
PASS/FAIL line per acceptance criterion at the end of the run.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracle helpers

from anflo import classifier, corpus, textproc, topics
from anflo.flowmodel import GroupingStrategy

REPO_ROOT = Path(__file__).resolve().parent.parent
SAMPLE_CORPUS = REPO_ROOT / "sample_corpus"

# documented learning parameters for the sample corpus (small K and a
# sharper alpha than 50/K because the corpus is tiny and its vocabularies
# are disjoint)
SAMPLE_PARAMS = topics.TopicModelParams(
    k=3, alpha=1.0, train_iters=1000, infer_iters=100, burn_in=50, seed=42
)
SAMPLE_LEARN_FLAGS = ["--k", "3", "--alpha", "1.0", "--seed", "42"]


@pytest.fixture(scope="session")
def sample_corpus_dir() -> Path:
    assert SAMPLE_CORPUS.is_dir(), "sample_corpus/ missing; run tools/gen_sample_corpus.py"
    return SAMPLE_CORPUS


@pytest.fixture(scope="session")
def trusted_dir(sample_corpus_dir) -> Path:
    return sample_corpus_dir / "trusted"


@pytest.fixture(scope="session")
def trip_organizer_path(sample_corpus_dir) -> Path:
    return sample_corpus_dir / "aua" / "trip_organizer.app"


@pytest.fixture(scope="session")
def city_explorer_path(sample_corpus_dir) -> Path:
    return sample_corpus_dir / "aua" / "city_explorer.app"


@pytest.fixture(scope="session")
def catalog():
    return corpus.load_api_catalog(corpus.default_catalog_path())


@pytest.fixture(scope="session")
def trusted_bundles(trusted_dir):
    return corpus.load_corpus(trusted_dir, corpus.Provenance.TRUSTED)


@pytest.fixture(scope="session")
def sample_model(trusted_bundles, catalog):
    """Topic-strategy model over the sample corpus (documented params)."""
    result = classifier.learn(
        trusted_bundles, catalog, GroupingStrategy.BY_TOPIC, SAMPLE_PARAMS
    )
    return result.model


@pytest.fixture(scope="session")
def sample_model_single(trusted_bundles, catalog):
    result = classifier.learn(
        trusted_bundles, catalog, GroupingStrategy.SINGLE, SAMPLE_PARAMS
    )
    return result.model


@pytest.fixture(scope="session")
def stopwords():
    return textproc.default_stopwords()


@pytest.fixture(scope="session")
def lemmas():
    return textproc.default_lemmas()


# ---------------------------------------------------------------------------
# Acceptance summary: one PASS/FAIL line per criterion

_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in str(item.path):
        return
    label = item.name
    if report.passed:
        _acceptance_results[label] = "PASS"
    elif report.failed:
        _acceptance_results[label] = "FAIL"
    else:
        _acceptance_results[label] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_acceptance_results):
        terminalreporter.write_line(f"{label}: {_acceptance_results[label]}")
