"""Learning and classification on top of the pipeline primitives.

Learning: filter the trusted corpus, group apps (dominant topic, category,
or one global group), run taint analysis per app and aggregate the per-
group flow matrices.  Classification: compute the group key of a new
bundle the same way, look up its matrix and judge every flow of the bundle
as common or uncommon; any uncommon flow makes the bundle anomalous.
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from . import textproc, topics
from .corpus import AppBundle, ApiCatalog, CorpusFilterPolicy, filter_corpus
from .flowmodel import (
    FlowModelSet,
    FlowStatus,
    GroupingStrategy,
    QuantileMethod,
    build_model_set,
    is_common,
)
from .taintir import FlowFact, group_by_permission, propagate_taint
from .topics import TopicModel, TopicModelParams

__all__ = [
    "Verdict",
    "FlowVerdict",
    "AnomalyReport",
    "BatchSummary",
    "LearnResult",
    "FilteredDescription",
    "MissingCategory",
    "UnknownCategory",
    "SINGLE_GROUP_KEY",
    "learn",
    "group_key_for",
    "classify",
    "classify_batch",
    "topic_model_of",
]

SINGLE_GROUP_KEY = "ALL"


class FilteredDescription(ValueError):
    """Bundle description fails the corpus admission policy."""

    def __init__(self, app_id: str, reason: str):
        super().__init__(f"{app_id}: description rejected ({reason})")
        self.app_id = app_id
        self.reason = reason


class MissingCategory(ValueError):
    """Category grouping requested but the bundle declares no category."""

    def __init__(self, app_id: str):
        super().__init__(f"{app_id}: bundle declares no category")
        self.app_id = app_id


class UnknownCategory(KeyError):
    """No matrix for the bundle's group (unseen category or empty topic)."""

    def __init__(self, group_key: str, detail: str):
        super().__init__(f"{group_key}: {detail}")
        self.group_key = group_key
        self.detail = detail


class Verdict(Enum):
    NORMAL = "normal"
    ANOMALOUS = "anomalous"


@dataclass(frozen=True)
class FlowVerdict:
    flow: tuple[str, str]
    status: FlowStatus
    model_count: int
    tau: Fraction | None
    witness: tuple[tuple[str, int], ...] = field(compare=False)


@dataclass(frozen=True)
class AnomalyReport:
    """Per-bundle outcome; verdicts list uncommon flows first.

    timing_ms is wall-clock around the full per-bundle pipeline, in whole
    milliseconds.
    """

    app_id: str
    strategy: GroupingStrategy
    group_key: str
    group_label: str | None
    verdicts: tuple[FlowVerdict, ...]
    overall: Verdict
    timing_ms: int = field(compare=False)

    def to_json_dict(self, include_timing: bool = False) -> dict:
        doc = {
            "app_id": self.app_id,
            "strategy": self.strategy.value,
            "group_key": self.group_key,
            "group_label": self.group_label,
            "overall": self.overall.value,
            "flows": [
                {
                    "source": v.flow[0],
                    "sink": v.flow[1],
                    "status": v.status.value,
                    "model_count": v.model_count,
                    "tau": None if v.tau is None else f"{v.tau.numerator}/{v.tau.denominator}",
                    "witness": [[name, idx] for name, idx in v.witness],
                }
                for v in self.verdicts
            ],
        }
        if include_timing:
            doc["timing_ms"] = self.timing_ms
        return doc


@dataclass(frozen=True)
class BatchSummary:
    n_normal: int
    n_anomalous: int
    n_errors: int
    mean_ms: float
    median_ms: float
    stddev_ms: float


@dataclass(frozen=True)
class LearnResult:
    model: FlowModelSet
    kept: int
    rejected: tuple[tuple[str, str], ...]
    group_sizes: dict[str, int] = field(hash=False)


def _dominant_key(
    model: TopicModel,
    description: str,
    lemmas: dict[str, str],
    stopwords: frozenset[str],
) -> int:
    doc = textproc.preprocess(description, lemmas, stopwords)
    dist = topics.infer_distribution(model, doc)
    return topics.dominant_topic(dist)


def group_key_for(
    bundle: AppBundle,
    strategy: GroupingStrategy,
    topic_model: TopicModel | None = None,
    lemmas: dict[str, str] | None = None,
    stopwords: frozenset[str] | None = None,
) -> str:
    """Group key of a bundle under a strategy.

    BY_TOPIC requires a topic model; BY_CATEGORY requires the bundle to
    declare a category (raises MissingCategory otherwise).
    """
    if strategy is GroupingStrategy.SINGLE:
        return SINGLE_GROUP_KEY
    if strategy is GroupingStrategy.BY_CATEGORY:
        if bundle.category is None:
            raise MissingCategory(bundle.app_id)
        return bundle.category
    if topic_model is None:
        raise ValueError("BY_TOPIC grouping needs a topic model")
    if lemmas is None:
        lemmas = textproc.default_lemmas()
    if stopwords is None:
        stopwords = textproc.default_stopwords()
    return str(_dominant_key(topic_model, bundle.description, lemmas, stopwords))


def learn(
    bundles: Sequence[AppBundle],
    catalog: ApiCatalog,
    strategy: GroupingStrategy,
    params: TopicModelParams | None = None,
    policy: CorpusFilterPolicy | None = None,
    quantile_method: QuantileMethod = QuantileMethod.INTERPOLATED,
    lemmas: dict[str, str] | None = None,
    stopwords: frozenset[str] | None = None,
) -> LearnResult:
    """Learning phase over a trusted corpus.

    Raises flowmodel.EmptyTrainingSet when filtering rejects everything,
    plus any parse/catalog errors from the underlying passes.
    """
    if params is None:
        params = TopicModelParams()
    if policy is None:
        policy = CorpusFilterPolicy()
    if lemmas is None:
        lemmas = textproc.default_lemmas()
    if stopwords is None:
        stopwords = textproc.default_stopwords()

    kept, rejected = filter_corpus(bundles, policy, stopwords)

    topic_payload = None
    topic_model = None
    if strategy is GroupingStrategy.BY_TOPIC:
        if kept:
            docs = [textproc.preprocess(b.description, lemmas, stopwords) for b in kept]
            topic_model = topics.fit_lda(docs, params)
            topic_payload = topics.model_to_payload(topic_model)

    features = []
    for bundle in kept:
        # apps without a category cannot join a category model and are
        # skipped rather than failing the whole learning run
        if strategy is GroupingStrategy.BY_CATEGORY and bundle.category is None:
            continue
        key = group_key_for(bundle, strategy, topic_model, lemmas, stopwords)
        pairs = group_by_permission(propagate_taint(bundle.program, catalog))
        features.append((bundle.app_id, key, pairs))

    model = build_model_set(features, strategy, quantile_method, topic_payload)
    sizes = {key: m.n_apps for key, m in model.matrices.items()}
    return LearnResult(model, len(kept), tuple(rejected), sizes)


def topic_model_of(model_set: FlowModelSet) -> TopicModel | None:
    """Reconstruct the embedded topic model, if any."""
    if model_set.topic_payload is None:
        return None
    return topics.model_from_payload(model_set.topic_payload)


def _label_for(model_set: FlowModelSet, topic_model: TopicModel | None, key: str) -> str | None:
    if model_set.strategy is GroupingStrategy.BY_TOPIC and topic_model is not None:
        if topic_model.topic_labels:
            return topic_model.topic_labels.get(int(key))
        words = topics.top_words(topic_model, int(key), 3)
        return "topic {} ({})".format(key, ", ".join(words)) if words else f"topic {key}"
    return None


_STATUS_ORDER = {
    FlowStatus.UNCOMMON_ABSENT: 0,
    FlowStatus.UNCOMMON_RARE: 0,
    FlowStatus.COMMON: 1,
}


def classify(
    model_set: FlowModelSet,
    bundle: AppBundle,
    catalog: ApiCatalog,
    lemmas: dict[str, str] | None = None,
    stopwords: frozenset[str] | None = None,
    policy: CorpusFilterPolicy | None = None,
    topic_model: TopicModel | None = None,
) -> AnomalyReport:
    """Classification phase for one bundle.

    Raises FilteredDescription when the description fails the admission
    policy and UnknownCategory when the model has no matrix for the
    bundle's group.  A bundle with no flows at all is normal.
    """
    t0 = time.perf_counter()
    if policy is None:
        policy = CorpusFilterPolicy()
    if stopwords is None:
        stopwords = textproc.default_stopwords()
    if lemmas is None:
        lemmas = textproc.default_lemmas()

    if policy.require_english and not textproc.detect_english(
        bundle.description, stopwords, policy.english_threshold
    ):
        raise FilteredDescription(bundle.app_id, "non_english")
    if len(bundle.description.split()) < policy.min_description_words:
        raise FilteredDescription(bundle.app_id, "too_short")

    if topic_model is None:
        topic_model = topic_model_of(model_set)
    key = group_key_for(bundle, model_set.strategy, topic_model, lemmas, stopwords)
    matrix = model_set.matrix_for(key)
    if matrix is None:
        raise UnknownCategory(key, "model has no matrix for this group")

    facts: set[FlowFact] = propagate_taint(bundle.program, catalog)
    verdicts = []
    for fact in facts:
        status = is_common(matrix, fact.pair)
        verdicts.append(
            FlowVerdict(
                flow=fact.pair,
                status=status,
                model_count=matrix.counts.get(fact.pair, 0),
                tau=matrix.tau,
                witness=fact.witness,
            )
        )
    verdicts.sort(key=lambda v: (_STATUS_ORDER[v.status], v.flow))
    overall = (
        Verdict.ANOMALOUS
        if any(v.status is not FlowStatus.COMMON for v in verdicts)
        else Verdict.NORMAL
    )
    timing_ms = int(round((time.perf_counter() - t0) * 1000.0))
    return AnomalyReport(
        app_id=bundle.app_id,
        strategy=model_set.strategy,
        group_key=key,
        group_label=_label_for(model_set, topic_model, key),
        verdicts=tuple(verdicts),
        overall=overall,
        timing_ms=timing_ms,
    )


def _classify_task(args):
    model_set, bundle, catalog, lemmas, stopwords, policy = args
    try:
        return ("ok", classify(model_set, bundle, catalog, lemmas, stopwords, policy))
    except Exception as exc:  # collected per bundle, reported by the caller
        return ("error", (bundle.app_id, f"{type(exc).__name__}: {exc}"))


def classify_batch(
    model_set: FlowModelSet,
    bundles: Sequence[AppBundle],
    catalog: ApiCatalog,
    lemmas: dict[str, str] | None = None,
    stopwords: frozenset[str] | None = None,
    policy: CorpusFilterPolicy | None = None,
    jobs: int = 1,
) -> tuple[list, BatchSummary]:
    """Classify many bundles; per-bundle failures don't abort the batch.

    Returns (items, summary) where each item is ("ok", AnomalyReport) or
    ("error", (app_id, message)), in input order.
    """
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if jobs == 1 or len(bundles) <= 1:
        topic_model = topic_model_of(model_set)
        items = []
        for bundle in bundles:
            try:
                items.append(
                    ("ok", classify(model_set, bundle, catalog, lemmas, stopwords, policy, topic_model))
                )
            except Exception as exc:
                items.append(("error", (bundle.app_id, f"{type(exc).__name__}: {exc}")))
    else:
        tasks = [(model_set, b, catalog, lemmas, stopwords, policy) for b in bundles]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            items = list(pool.map(_classify_task, tasks))

    reports = [item[1] for item in items if item[0] == "ok"]
    timings = [r.timing_ms for r in reports]
    summary = BatchSummary(
        n_normal=sum(1 for r in reports if r.overall is Verdict.NORMAL),
        n_anomalous=sum(1 for r in reports if r.overall is Verdict.ANOMALOUS),
        n_errors=len(items) - len(reports),
        mean_ms=statistics.fmean(timings) if timings else 0.0,
        median_ms=statistics.median(timings) if timings else 0.0,
        stddev_ms=statistics.pstdev(timings) if timings else 0.0,
    )
    return items, summary
