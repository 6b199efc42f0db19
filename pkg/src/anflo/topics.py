"""LDA topic model: training, inference, dominant topic.

Training runs collapsed Gibbs sampling over the trusted corpus and keeps
only the topic-word counts (the document-topic matrix is discarded: new
documents are folded in by sampling against frozen counts).  Inference
runs the same sampler for one document, averages its topic counts over the
post-burn-in sweeps and normalizes with the alpha prior:

    probs[k]  proportional to  mean n_k + alpha

Everything is seeded and deterministic: the same corpus, parameters and
seed give byte-identical models on every machine and backend.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels

__all__ = [
    "TopicModelParams",
    "TopicModel",
    "TopicDistribution",
    "EmptyCorpus",
    "fit_lda",
    "infer_distribution",
    "dominant_topic",
    "top_words",
    "model_to_payload",
    "model_from_payload",
    "model_digest",
]

_U64_MASK = (1 << 64) - 1


class EmptyCorpus(ValueError):
    """No usable documents (all empty after preprocessing)."""


@dataclass(frozen=True)
class TopicModelParams:
    """Sampler hyperparameters.  alpha defaults to 50/k when omitted."""

    k: int = 30
    alpha: float | None = None
    beta: float = 0.01
    train_iters: int = 1000
    infer_iters: int = 100
    burn_in: int = 50
    seed: int = 42

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.k)
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.train_iters < 1 or self.infer_iters < 1:
            raise ValueError("iteration counts must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.infer_iters <= self.burn_in:
            raise ValueError("infer_iters must exceed burn_in")


@dataclass(frozen=True, eq=False)
class TopicModel:
    """Trained model: vocabulary plus frozen topic-word counts.

    Equality is identity; compare serialized payloads (model_to_payload)
    when a value comparison is needed.
    """

    params: TopicModelParams
    vocabulary: dict[str, int]
    topic_word_counts: np.ndarray  # (k, V) int32
    topic_totals: np.ndarray  # (k,) int64
    topic_labels: dict[int, str] | None = None

    def __post_init__(self):
        k, v = self.topic_word_counts.shape
        if k != self.params.k or v != len(self.vocabulary):
            raise ValueError("count matrix shape disagrees with params/vocabulary")
        if (self.topic_word_counts < 0).any():
            raise ValueError("negative topic-word count")
        if not np.array_equal(
            self.topic_word_counts.sum(axis=1, dtype=np.int64), self.topic_totals
        ):
            raise ValueError("topic totals do not match count matrix")


@dataclass(frozen=True)
class TopicDistribution:
    """Per-topic probabilities for one document; sums to 1."""

    probs: tuple[float, ...]

    def __post_init__(self):
        if not self.probs:
            raise ValueError("empty distribution")
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        if abs(sum(self.probs) - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")


def _build_vocabulary(docs: Sequence[Sequence[str]]) -> dict[str, int]:
    vocab: dict[str, int] = {}
    for doc in docs:
        for token in doc:
            if token not in vocab:
                vocab[token] = len(vocab)
    return vocab


def fit_lda(docs: Sequence[Sequence[str]], params: TopicModelParams) -> TopicModel:
    """Train on preprocessed documents (token lists).

    Documents that are empty after preprocessing are skipped for sampling
    purposes but keep their indices: callers map documents to topics via
    infer_distribution, never through training-time assignments.  Raises
    EmptyCorpus when no document has any token.
    """
    vocab = _build_vocabulary(docs)
    if not vocab:
        raise EmptyCorpus("every document is empty after preprocessing")

    words: list[int] = []
    doc_ids: list[int] = []
    for di, doc in enumerate(docs):
        for token in doc:
            words.append(vocab[token])
            doc_ids.append(di)

    k = params.k
    words_arr = np.asarray(words, dtype=np.int32)
    docs_arr = np.asarray(doc_ids, dtype=np.int32)
    z = np.zeros(len(words), dtype=np.int32)
    nwt = np.zeros((k, len(vocab)), dtype=np.int32)
    ndt = np.zeros((len(docs), k), dtype=np.int32)
    nt = np.zeros(k, dtype=np.int64)

    kernels.train_lda(
        words_arr, docs_arr, z, nwt, ndt, nt,
        float(params.alpha), float(params.beta),
        int(params.train_iters), params.seed & _U64_MASK,
    )
    return TopicModel(params, vocab, nwt, nt)


def infer_distribution(model: TopicModel, doc: Sequence[str]) -> TopicDistribution:
    """Fold one preprocessed document into the trained model.

    Out-of-vocabulary tokens are ignored; a document with no in-vocabulary
    tokens gets the uniform distribution.  The alpha prior keeps every
    probability strictly positive.
    """
    params = model.params
    k = params.k
    ids = [model.vocabulary[t] for t in doc if t in model.vocabulary]
    if not ids:
        return TopicDistribution(tuple(1.0 / k for _ in range(k)))

    acc = np.zeros(k, dtype=np.int64)
    kernels.infer_lda(
        np.asarray(ids, dtype=np.int32),
        model.topic_word_counts, model.topic_totals,
        float(params.alpha), float(params.beta),
        int(params.infer_iters), int(params.burn_in),
        params.seed & _U64_MASK, acc,
    )
    averaged = params.infer_iters - params.burn_in
    weights = [a / averaged + params.alpha for a in acc.tolist()]
    total = sum(weights)
    return TopicDistribution(tuple(wgt / total for wgt in weights))


def dominant_topic(dist: TopicDistribution) -> int:
    """Argmax topic index; ties go to the smallest index."""
    best = 0
    for i in range(1, len(dist.probs)):
        if dist.probs[i] > dist.probs[best]:
            best = i
    return best


def top_words(model: TopicModel, topic: int, n: int = 10) -> list[str]:
    """Most frequent words of a topic; count ties break by vocabulary order."""
    if not 0 <= topic < model.params.k:
        raise IndexError(f"topic {topic} out of range")
    inverse = {i: w for w, i in model.vocabulary.items()}
    row = model.topic_word_counts[topic]
    order = sorted(range(len(inverse)), key=lambda i: (-int(row[i]), i))
    return [inverse[i] for i in order[:n] if row[i] > 0]


# ---------------------------------------------------------------------------
# Persistence payload (embedded in the flow model JSON)


def model_to_payload(model: TopicModel) -> dict:
    vocab_words = [None] * len(model.vocabulary)
    for word, idx in model.vocabulary.items():
        vocab_words[idx] = word
    payload = {
        "params": {
            "k": model.params.k,
            "alpha": model.params.alpha,
            "beta": model.params.beta,
            "train_iters": model.params.train_iters,
            "infer_iters": model.params.infer_iters,
            "burn_in": model.params.burn_in,
            "seed": model.params.seed,
        },
        "vocabulary": vocab_words,
        "topic_word_counts": model.topic_word_counts.tolist(),
        "topic_totals": model.topic_totals.tolist(),
        "topic_labels": (
            None
            if model.topic_labels is None
            else {str(k): v for k, v in model.topic_labels.items()}
        ),
    }
    return payload


def model_from_payload(payload: dict) -> TopicModel:
    params = TopicModelParams(**payload["params"])
    vocabulary = {w: i for i, w in enumerate(payload["vocabulary"])}
    labels = payload.get("topic_labels")
    return TopicModel(
        params,
        vocabulary,
        np.asarray(payload["topic_word_counts"], dtype=np.int32),
        np.asarray(payload["topic_totals"], dtype=np.int64),
        None if labels is None else {int(k): v for k, v in labels.items()},
    )


def model_digest(model: TopicModel) -> str:
    blob = json.dumps(model_to_payload(model), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()
