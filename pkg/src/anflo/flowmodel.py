"""Per-group flow matrices and the rarity threshold.

For every group of trusted apps (one group per topic, per category, or a
single global group) the model counts, per (source group, sink group) cell,
how many distinct apps exhibit that flow.  An app contributes at most 1 to
a cell no matter how many witnesses it has.

The rarity threshold tau of a matrix is the boxplot lower fence over the
multiset of nonzero cell counts:

    tau = Q1 - 1.5 * (Q3 - Q1)

computed in exact rational arithmetic.  Quartiles default to linear
interpolation (index p * (n - 1)); Tukey hinges (medians of the lower and
upper halves) are available as a config-selectable alternative.  A flow is
common when its cell count is >= tau; uncommon flows are either rare
(count below tau) or absent (no cell at all).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

__all__ = [
    "GroupingStrategy",
    "QuantileMethod",
    "FlowStatus",
    "FlowMatrix",
    "FlowModelSet",
    "EmptyCellSet",
    "EmptyTrainingSet",
    "ModelFormatError",
    "compute_threshold",
    "quartiles",
    "is_common",
    "build_model_set",
    "save_model_set",
    "load_model_set",
    "dumps_model_set",
    "loads_model_set",
]

FORMAT_VERSION = 1


class EmptyCellSet(ValueError):
    pass


class EmptyTrainingSet(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


class GroupingStrategy(Enum):
    BY_TOPIC = "by_topic"
    SINGLE = "single"
    BY_CATEGORY = "by_category"


class QuantileMethod(Enum):
    INTERPOLATED = "interpolated"
    TUKEY = "tukey"


class FlowStatus(Enum):
    COMMON = "common"
    UNCOMMON_RARE = "uncommon_rare"
    UNCOMMON_ABSENT = "uncommon_absent"


def _interpolated_quartile(xs: Sequence[int], p: Fraction) -> Fraction:
    """Linear interpolation at rank p * (n - 1) over sorted xs."""
    n = len(xs)
    idx = p * (n - 1)
    lo = int(idx)  # floor; idx >= 0
    frac = idx - lo
    if frac == 0:
        return Fraction(xs[lo])
    return Fraction(xs[lo]) + frac * (xs[lo + 1] - xs[lo])


def _median(xs: Sequence[int]) -> Fraction:
    n = len(xs)
    mid = n // 2
    if n % 2:
        return Fraction(xs[mid])
    return Fraction(xs[mid - 1] + xs[mid], 2)


def quartiles(counts: Iterable[int], method: QuantileMethod = QuantileMethod.INTERPOLATED) -> tuple[Fraction, Fraction]:
    """(Q1, Q3) of a nonempty multiset of integers, as exact rationals."""
    xs = sorted(counts)
    if not xs:
        raise EmptyCellSet("no counts to take quartiles of")
    if method is QuantileMethod.INTERPOLATED:
        return (
            _interpolated_quartile(xs, Fraction(1, 4)),
            _interpolated_quartile(xs, Fraction(3, 4)),
        )
    # Tukey hinges: medians of lower/upper halves, halves share the middle
    # element when n is odd
    n = len(xs)
    half = (n + 1) // 2
    return _median(xs[:half]), _median(xs[n - half:])


def compute_threshold(
    counts: Iterable[int],
    method: QuantileMethod = QuantileMethod.INTERPOLATED,
) -> Fraction:
    """Boxplot lower fence Q1 - 1.5*(Q3 - Q1) over nonzero cell counts.

    Raises EmptyCellSet for an empty multiset; rejects non-positive counts
    (zero cells are absent from a matrix by construction).
    """
    xs = sorted(counts)
    if not xs:
        raise EmptyCellSet("threshold undefined for an empty cell multiset")
    if xs[0] <= 0:
        raise ValueError("cell counts must be positive integers")
    q1, q3 = quartiles(xs, method)
    return q1 - Fraction(3, 2) * (q3 - q1)


@dataclass(frozen=True)
class FlowMatrix:
    """Flow counts for one group of trusted apps.

    counts maps (source group, sink group) to the number of distinct apps
    with that flow; zero-count cells are never stored.  tau is None when
    the group has no flows at all (every flow is then uncommon-absent).
    """

    group_key: str
    counts: Mapping[tuple[str, str], int] = field(hash=False)
    tau: Fraction | None
    n_apps: int

    def __post_init__(self):
        for pair, count in self.counts.items():
            if count <= 0:
                raise ValueError(f"zero/negative count stored for {pair}")


def is_common(matrix: FlowMatrix, flow: tuple[str, str]) -> FlowStatus:
    count = matrix.counts.get(flow)
    if count is None:
        return FlowStatus.UNCOMMON_ABSENT
    if matrix.tau is None or count >= matrix.tau:
        return FlowStatus.COMMON
    return FlowStatus.UNCOMMON_RARE


@dataclass(frozen=True)
class FlowModelSet:
    """The learned model: one FlowMatrix per group plus bookkeeping.

    topic_payload is the serialized topic model for BY_TOPIC models (None
    otherwise); it is carried opaquely here so that persistence stays in
    one place, and reconstructed by anflo.topics on load.
    """

    strategy: GroupingStrategy
    matrices: Mapping[str, FlowMatrix] = field(hash=False)
    quantile_method: QuantileMethod = QuantileMethod.INTERPOLATED
    topic_payload: dict | None = field(default=None, hash=False)

    def matrix_for(self, group_key: str) -> FlowMatrix | None:
        return self.matrices.get(group_key)


def build_model_set(
    features: Sequence[tuple[str, str, Iterable[tuple[str, str]]]],
    strategy: GroupingStrategy,
    quantile_method: QuantileMethod = QuantileMethod.INTERPOLATED,
    topic_payload: dict | None = None,
) -> FlowModelSet:
    """Aggregate per-app features into per-group matrices.

    features: (app_id, group_key, flow pairs) per trusted app.  Every app
    contributes at most 1 per cell; apps with no flows still establish
    their group.  Raises EmptyTrainingSet for an empty feature list and
    ValueError on duplicate app ids.
    """
    if not features:
        raise EmptyTrainingSet("no trusted apps to build a model from")
    seen: set[str] = set()
    groups: dict[str, dict[tuple[str, str], int]] = {}
    sizes: dict[str, int] = {}
    for app_id, group_key, flows in features:
        if app_id in seen:
            raise ValueError(f"duplicate app id {app_id!r}")
        seen.add(app_id)
        cells = groups.setdefault(group_key, {})
        sizes[group_key] = sizes.get(group_key, 0) + 1
        for pair in set(flows):
            cells[pair] = cells.get(pair, 0) + 1

    matrices = {}
    for key, cells in groups.items():
        tau = compute_threshold(cells.values(), quantile_method) if cells else None
        matrices[key] = FlowMatrix(key, dict(cells), tau, sizes[key])
    return FlowModelSet(strategy, matrices, quantile_method, topic_payload)


# ---------------------------------------------------------------------------
# Persistence: canonical JSON, byte-stable across runs and machines


def _fraction_to_str(x: Fraction | None) -> str | None:
    if x is None:
        return None
    return f"{x.numerator}/{x.denominator}"


def _fraction_from_str(s: str | None) -> Fraction | None:
    if s is None:
        return None
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or 1))


def topic_payload_digest(payload: dict | None) -> str | None:
    if payload is None:
        return None
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()


def dumps_model_set(model: FlowModelSet) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "strategy": model.strategy.value,
        "quantile_method": model.quantile_method.value,
        "matrices": {
            key: {
                "n_apps": m.n_apps,
                "tau": _fraction_to_str(m.tau),
                "cells": sorted(
                    [src, dst, count] for (src, dst), count in m.counts.items()
                ),
            }
            for key, m in model.matrices.items()
        },
        "topic_model": model.topic_payload,
        "topic_model_digest": topic_payload_digest(model.topic_payload),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads_model_set(text: str) -> FlowModelSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {version!r}")
    try:
        strategy = GroupingStrategy(doc["strategy"])
        method = QuantileMethod(doc["quantile_method"])
        matrices: dict[str, FlowMatrix] = {}
        for key, m in doc["matrices"].items():
            counts = {}
            for src, dst, count in m["cells"]:
                pair = (str(src), str(dst))
                if pair in counts:
                    raise ModelFormatError(f"duplicate cell {pair} in group {key!r}")
                counts[pair] = int(count)
            matrices[key] = FlowMatrix(
                key, counts, _fraction_from_str(m["tau"]), int(m["n_apps"])
            )
        payload = doc.get("topic_model")
        digest = doc.get("topic_model_digest")
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"bad model document: {exc}") from exc
    if digest != topic_payload_digest(payload):
        raise ModelFormatError("topic model digest mismatch; file corrupt?")
    return FlowModelSet(strategy, matrices, method, payload)


def save_model_set(model: FlowModelSet, path) -> None:
    Path(path).write_text(dumps_model_set(model), encoding="utf-8")


def load_model_set(path) -> FlowModelSet:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
    return loads_model_set(text)
