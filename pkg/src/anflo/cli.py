"""Command line interface.

Commands:
    anflo learn     train a model from a trusted corpus directory
    anflo classify  judge bundles against a saved model
    anflo flows     show the taint flows of bundles (no model needed)
    anflo bench     classify with per-bundle and aggregate timings
    anflo model     inspect a saved model (info)

Exit codes:
    0  success (classify: every bundle normal)
    1  generic failure; for classify/bench: at least one anomalous bundle
       or per-bundle error
    2  learn: corpus empty after filtering
    3  catalog errors (syntax, duplicates, missing IPC entry, unknown API)
    4  model file unreadable or corrupt

The sampler seed resolves as: --seed flag, then config file, then the
ANFLO_SEED environment variable, then 42.  Set ANFLO_PURE_PYTHON=1 to
force the pure-Python sampling kernel.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import classifier, corpus, flowmodel, kernels, taintir, textproc, topics
from .classifier import Verdict
from .flowmodel import FlowStatus, GroupingStrategy, QuantileMethod

__all__ = ["main", "build_parser"]

DEFAULT_SEED = 42

_STRATEGY_TOKENS = {
    "topic": GroupingStrategy.BY_TOPIC,
    "single": GroupingStrategy.SINGLE,
    "category": GroupingStrategy.BY_CATEGORY,
}

_CATALOG_ERRORS = (corpus.CatalogSyntaxError, taintir.UnknownApi)
_MODEL_ERRORS = (flowmodel.ModelFormatError,)


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anflo",
        description="Learn common sensitive-information flows from trusted app "
        "bundles and flag unusual flows in new bundles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_resource_opts(p):
        p.add_argument("--catalog", metavar="FILE", default=None,
                       help="API catalog (default: packaged catalog)")
        p.add_argument("--stopwords", metavar="FILE", default=None,
                       help="stopword list (default: packaged list)")
        p.add_argument("--lemmas", metavar="FILE", default=None,
                       help="lemma dictionary (default: packaged dictionary)")
        p.add_argument("--config", metavar="FILE", default=None,
                       help="JSON config file; explicit flags win over it")

    def add_policy_opts(p):
        p.add_argument("--min-words", type=int, default=None, metavar="N",
                       help="minimum raw word count of a description (default 10)")
        p.add_argument("--no-english-check", action="store_true",
                       help="skip the English language heuristic")
        p.add_argument("--english-threshold", type=float, default=None, metavar="X",
                       help="stopword hit ratio for the English check (default 0.05)")

    p_learn = sub.add_parser("learn", help="train a model from trusted bundles")
    p_learn.add_argument("--corpus", required=True, metavar="DIR",
                         help="directory of trusted *.app bundles")
    p_learn.add_argument("--strategy", required=True, choices=sorted(_STRATEGY_TOKENS),
                         help="grouping strategy")
    p_learn.add_argument("--out", required=True, metavar="FILE", help="model output path")
    p_learn.add_argument("--k", type=int, default=None, help="number of topics (default 30)")
    p_learn.add_argument("--alpha", type=float, default=None,
                         help="document-topic prior (default 50/k)")
    p_learn.add_argument("--beta", type=float, default=None,
                         help="topic-word prior (default 0.01)")
    p_learn.add_argument("--train-iters", type=int, default=None,
                         help="training sweeps (default 1000)")
    p_learn.add_argument("--infer-iters", type=int, default=None,
                         help="inference sweeps (default 100)")
    p_learn.add_argument("--burn-in", type=int, default=None,
                         help="inference burn-in sweeps (default 50)")
    p_learn.add_argument("--seed", type=int, default=None, help="sampler seed")
    p_learn.add_argument("--quantile-method", choices=[m.value for m in QuantileMethod],
                         default=None, help="quartile rule for tau (default interpolated)")
    p_learn.add_argument("-v", "--verbose", action="store_true")
    add_policy_opts(p_learn)
    add_resource_opts(p_learn)

    p_cls = sub.add_parser("classify", help="classify bundles against a model")
    p_cls.add_argument("--model", required=True, metavar="FILE")
    p_cls.add_argument("--format", choices=["text", "json"], default="text")
    p_cls.add_argument("--timing", action="store_true",
                       help="include timings in the output")
    p_cls.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="parallel workers (default 1)")
    p_cls.add_argument("bundles", nargs="+", metavar="BUNDLE")
    add_policy_opts(p_cls)
    add_resource_opts(p_cls)

    p_flows = sub.add_parser("flows", help="print taint flows of bundles")
    p_flows.add_argument("-v", "--verbose", action="store_true",
                         help="also note suppressed internal ICC sends")
    p_flows.add_argument("bundles", nargs="+", metavar="BUNDLE")
    add_resource_opts(p_flows)

    p_bench = sub.add_parser("bench", help="classify with timing statistics")
    p_bench.add_argument("--model", required=True, metavar="FILE")
    p_bench.add_argument("--jobs", type=int, default=1, metavar="N")
    p_bench.add_argument("bundles", nargs="*", metavar="BUNDLE")
    add_policy_opts(p_bench)
    add_resource_opts(p_bench)

    p_model = sub.add_parser("model", help="inspect saved models")
    model_sub = p_model.add_subparsers(dest="model_command", required=True)
    p_info = model_sub.add_parser("info", help="summarize a saved model")
    p_info.add_argument("model", metavar="FILE")

    return parser


# ---------------------------------------------------------------------------
# Config / resource plumbing


# keys a JSON config file may supply; anything else is rejected
_CONFIG_KEYS = frozenset({
    "catalog", "stopwords", "lemmas",
    "k", "alpha", "beta", "train_iters", "infer_iters", "burn_in", "seed",
    "quantile_method", "min_words", "require_english", "english_threshold",
})


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise _CliError(1, f"config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise _CliError(1, f"config {path}: expected a JSON object")
    unknown = sorted(set(doc) - _CONFIG_KEYS)
    if unknown:
        raise _CliError(1, f"config {path}: unknown keys: {', '.join(unknown)}")
    return doc


def _setting(args, config: dict, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _resolve_seed(args, config: dict) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in config:
        return int(config["seed"])
    env = os.environ.get("ANFLO_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _CliError(1, f"ANFLO_SEED is not an integer: {env!r}") from None
    return DEFAULT_SEED


def _load_resources(args, config: dict):
    catalog_path = _setting(args, config, "catalog", None)
    if catalog_path is None:
        catalog_path = corpus.default_catalog_path()
    catalog = corpus.load_api_catalog(catalog_path)

    stop_path = _setting(args, config, "stopwords", None)
    stopwords = (
        textproc.default_stopwords() if stop_path is None else textproc.load_stopwords(stop_path)
    )
    lemma_path = _setting(args, config, "lemmas", None)
    lemmas = (
        textproc.default_lemmas() if lemma_path is None else textproc.load_lemmas(lemma_path)
    )
    return catalog, stopwords, lemmas


def _policy(args, config: dict) -> corpus.CorpusFilterPolicy:
    require_english = not getattr(args, "no_english_check", False)
    if "require_english" in config and not getattr(args, "no_english_check", False):
        require_english = bool(config["require_english"])
    return corpus.CorpusFilterPolicy(
        min_description_words=int(_setting(args, config, "min_words", 10)),
        require_english=require_english,
        english_threshold=float(
            _setting(args, config, "english_threshold", textproc.DEFAULT_ENGLISH_THRESHOLD)
        ),
    )


# ---------------------------------------------------------------------------
# Commands


def _fmt_tau(tau) -> str:
    if tau is None:
        return "-"
    return f"{tau.numerator}/{tau.denominator}" if tau.denominator != 1 else str(tau.numerator)


def _fmt_witness(witness) -> str:
    return " -> ".join(f"{name}[{idx}]" for name, idx in witness)


def cmd_learn(args) -> int:
    config = _load_config(args.config)
    catalog, stopwords, lemmas = _load_resources(args, config)
    policy = _policy(args, config)
    params = topics.TopicModelParams(
        k=int(_setting(args, config, "k", 30)),
        alpha=_setting(args, config, "alpha", None),
        beta=float(_setting(args, config, "beta", 0.01)),
        train_iters=int(_setting(args, config, "train_iters", 1000)),
        infer_iters=int(_setting(args, config, "infer_iters", 100)),
        burn_in=int(_setting(args, config, "burn_in", 50)),
        seed=_resolve_seed(args, config),
    )
    strategy = _STRATEGY_TOKENS[args.strategy]
    method = QuantileMethod(_setting(args, config, "quantile_method", "interpolated"))

    bundles = corpus.load_corpus(args.corpus, corpus.Provenance.TRUSTED)
    if not bundles:
        raise flowmodel.EmptyTrainingSet(f"no *.app bundles under {args.corpus}")
    result = classifier.learn(
        bundles, catalog, strategy, params, policy, method, lemmas, stopwords
    )
    flowmodel.save_model_set(result.model, args.out)

    print(f"trained on {result.kept} of {len(bundles)} bundles "
          f"({len(result.rejected)} filtered out)")
    if args.verbose:
        for app_id, reason in result.rejected:
            print(f"  filtered {app_id}: {reason}")
    topic_model = classifier.topic_model_of(result.model)
    for key in sorted(result.model.matrices):
        matrix = result.model.matrices[key]
        label = ""
        if topic_model is not None:
            words = topics.top_words(topic_model, int(key), 3)
            if words:
                label = f" ({', '.join(words)})"
        print(f"  group {key}{label}: {matrix.n_apps} apps, "
              f"{len(matrix.counts)} flow cells, tau={_fmt_tau(matrix.tau)}")
    print(f"model written to {args.out}")
    return 0


def _load_analysis_bundles(paths) -> tuple[list, list]:
    """(loaded bundles, (path, message) errors), in input order."""
    loaded, errors = [], []
    for path in paths:
        try:
            loaded.append(corpus.load_bundle(path, corpus.Provenance.UNDER_ANALYSIS))
        except corpus.MalformedBundle as exc:
            errors.append((str(path), str(exc)))
    return loaded, errors


def _print_text_report(report: classifier.AnomalyReport, timing: bool) -> None:
    label = f" [{report.group_label}]" if report.group_label else ""
    head = f"{report.app_id}: {report.overall.value.upper()} " \
           f"(group {report.group_key}{label}, strategy {report.strategy.value})"
    if timing:
        head += f" {report.timing_ms} ms"
    print(head)
    if not report.verdicts:
        print("  no sensitive flows")
    for v in report.verdicts:
        if v.status is FlowStatus.COMMON:
            print(f"  common: {v.flow[0]} -> {v.flow[1]} "
                  f"(count {v.model_count}, tau {_fmt_tau(v.tau)})")
        else:
            kind = "absent" if v.status is FlowStatus.UNCOMMON_ABSENT else "rare"
            print(f"  UNCOMMON ({kind}): {v.flow[0]} -> {v.flow[1]} "
                  f"(count {v.model_count}, tau {_fmt_tau(v.tau)}) "
                  f"witness {_fmt_witness(v.witness)}")


def cmd_classify(args) -> int:
    config = _load_config(args.config)
    catalog, stopwords, lemmas = _load_resources(args, config)
    policy = _policy(args, config)
    model_set = flowmodel.load_model_set(args.model)

    bundles, load_errors = _load_analysis_bundles(args.bundles)
    items, summary = classifier.classify_batch(
        model_set, bundles, catalog, lemmas, stopwords, policy, jobs=args.jobs
    )

    errors = [{"bundle": p, "error": m} for p, m in load_errors]
    reports = []
    for kind, payload in items:
        if kind == "ok":
            reports.append(payload)
        else:
            errors.append({"bundle": payload[0], "error": payload[1]})

    if args.format == "json":
        doc = {
            "reports": [r.to_json_dict(include_timing=args.timing) for r in reports],
            "errors": errors,
            "summary": {
                "normal": summary.n_normal,
                "anomalous": summary.n_anomalous,
                "errors": len(errors),
            },
        }
        if args.timing:
            doc["summary"]["mean_ms"] = summary.mean_ms
            doc["summary"]["median_ms"] = summary.median_ms
            doc["summary"]["stddev_ms"] = summary.stddev_ms
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        for report in reports:
            _print_text_report(report, args.timing)
        for err in errors:
            print(f"error: {err['bundle']}: {err['error']}", file=sys.stderr)
        print(f"{len(reports) + len(errors)} bundle(s): {summary.n_normal} normal, "
              f"{summary.n_anomalous} anomalous, {len(errors)} error(s)")

    if summary.n_anomalous or errors:
        return 1
    return 0


def cmd_flows(args) -> int:
    config = _load_config(args.config)
    catalog, _, _ = _load_resources(args, config)
    status = 0
    for path in args.bundles:
        try:
            bundle = corpus.load_bundle(path)
            facts = sorted(
                taintir.propagate_taint(bundle.program, catalog),
                key=lambda f: f.pair,
            )
        except corpus.MalformedBundle as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = 1
            continue
        print(f"{bundle.app_id}: {len(facts)} flow(s)")
        for fact in facts:
            print(f"  {fact.source_group} -> {fact.sink_group} "
                  f"via {_fmt_witness(fact.witness)}")
        if args.verbose:
            suppressed = taintir.internal_send_count(bundle.program)
            if suppressed:
                print(f"  note: {suppressed} internal ICC send(s) stay inside "
                      f"the app and are not IPC sink flows")
    return status


def cmd_bench(args) -> int:
    config = _load_config(args.config)
    catalog, stopwords, lemmas = _load_resources(args, config)
    policy = _policy(args, config)
    model_set = flowmodel.load_model_set(args.model)

    bundles, load_errors = _load_analysis_bundles(args.bundles)
    items, summary = classifier.classify_batch(
        model_set, bundles, catalog, lemmas, stopwords, policy, jobs=args.jobs
    )
    print(f"kernel backend: {kernels.backend_name()}")
    for kind, payload in items:
        if kind == "ok":
            print(f"  {payload.app_id}: {payload.timing_ms} ms ({payload.overall.value})")
        else:
            print(f"  {payload[0]}: error: {payload[1]}", file=sys.stderr)
    for path, msg in load_errors:
        print(f"  {path}: error: {msg}", file=sys.stderr)
    n = summary.n_normal + summary.n_anomalous
    print(f"{n} classified: mean {summary.mean_ms:.2f} ms, "
          f"median {summary.median_ms:.2f} ms, stddev {summary.stddev_ms:.2f} ms")
    if load_errors or summary.n_errors:
        return 1
    return 0


def cmd_model_info(args) -> int:
    model_set = flowmodel.load_model_set(args.model)
    print(f"strategy: {model_set.strategy.value}")
    print(f"quantile method: {model_set.quantile_method.value}")
    print(f"groups: {len(model_set.matrices)}")
    topic_model = classifier.topic_model_of(model_set)
    for key in sorted(model_set.matrices):
        matrix = model_set.matrices[key]
        print(f"  group {key}: {matrix.n_apps} apps, {len(matrix.counts)} cells, "
              f"tau={_fmt_tau(matrix.tau)}")
        for (src, dst), count in sorted(matrix.counts.items()):
            print(f"    {src} -> {dst}: {count}")
    if topic_model is not None:
        p = topic_model.params
        print(f"topic model: k={p.k} alpha={p.alpha} beta={p.beta} "
              f"train_iters={p.train_iters} infer_iters={p.infer_iters} "
              f"burn_in={p.burn_in} seed={p.seed}")
        print(f"vocabulary: {len(topic_model.vocabulary)} words")
        print(f"digest: {flowmodel.topic_payload_digest(model_set.topic_payload)}")
        for topic in range(p.k):
            words = topics.top_words(topic_model, topic, 10)
            if words:
                print(f"  topic {topic}: {' '.join(words)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "learn":
            return cmd_learn(args)
        if args.command == "classify":
            return cmd_classify(args)
        if args.command == "flows":
            return cmd_flows(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "model":
            return cmd_model_info(args)
        parser.error(f"unknown command {args.command!r}")
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except _MODEL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except _CATALOG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (flowmodel.EmptyTrainingSet, topics.EmptyCorpus) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if args.command == "learn" else 1
    except (corpus.MalformedBundle, taintir.UnresolvedTarget, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
