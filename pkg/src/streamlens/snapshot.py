"""Immutable analysis snapshots: build every section once, serve it forever.

A snapshot is a directory of section files plus a manifest of content
hashes. The snapshot id is derived from the config digest and those hashes,
so rebuilding from identical inputs and configuration reproduces the same
id byte for byte; the creation timestamp lives in an unhashed sidecar so it
never perturbs identity. Sections whose inputs are not configured are
marked absent rather than failing the build.
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
import shutil
import uuid
from collections.abc import Mapping
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from . import audit as audit_mod
from . import botcal, characterize, network, topics
from .ingest import (
    Corpus,
    load_corpus,
    load_keywords,
    stream_summary,
    write_daily_csv,
)

__all__ = [
    "AnalysisConfig",
    "ConfigError",
    "Snapshot",
    "SnapshotStore",
    "load_config",
    "config_from_dict",
    "snapshot_build",
]

_STREAM_SUFFIXES = (".ndjson", ".ndjson.gz", ".jsonl", ".jsonl.gz", ".json.gz")


class ConfigError(ValueError):
    """Invalid analysis configuration; the message names the field path."""


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything a snapshot build depends on, inputs and parameters alike.

    Defaults mirror the workflow's published operating points (k-core at
    100, one-million edge samples, 4000-token vocabulary, one-million-account
    audit sample, 95% intervals); desk-scale corpora simply clamp the sample
    sizes they cannot fill.
    """

    streams: tuple[str, ...] = ()
    corpus_dir: str | None = None
    keywords: str | None = None
    scores: Mapping[str, str] = field(default_factory=dict)
    labels: str | None = None
    bias_dictionary: str | None = None
    abusive_lexicon: str | None = None
    state_media: str | None = None
    audit_fixture: str | None = None
    subset: str | None = None
    graph_kinds: tuple[str, ...] = ("mention", "retweet")
    k_core_k: int = 100
    edge_sample_m: int = 1_000_000
    edge_sample_seed: int = 7
    centrality_tolerance: float = 1e-10
    centrality_max_iterations: int = 1000
    louvain_seed: int = 0
    influencers_top_n: int = 25
    community_top_n: int = 5
    bot_threshold_default: float = 0.5
    bot_thresholds: Mapping[str, float] = field(default_factory=dict)
    calibration_policy: str = "max_f1"
    top_hashtags: int = 12
    marketshare_denominator: str = "top_k"
    daily_cap: int | None = None
    lda_k: int = 5
    lda_alpha: float | None = None
    lda_beta: float = 0.01
    lda_iterations: int = 1000
    lda_seed: int = 13
    lda_lang: str | None = "en"
    dtm_v: int = 4000
    dtm_lang: str | None = None
    audit_sample: int | None = 1_000_000
    audit_seed: int = 3
    ci_confidence: float = 0.95

    def to_dict(self) -> dict:
        raw = asdict(self)
        raw["streams"] = list(self.streams)
        raw["graph_kinds"] = list(self.graph_kinds)
        raw["scores"] = dict(self.scores)
        raw["bot_thresholds"] = dict(self.bot_thresholds)
        return raw

    def digest(self) -> str:
        return hashlib.sha256(_canonical_json(self.to_dict()).encode()).hexdigest()

    def threshold_for(self, detector: str) -> float:
        return float(self.bot_thresholds.get(detector, self.bot_threshold_default))


_CHECKS = {
    "k_core_k": lambda v: v >= 0,
    "edge_sample_m": lambda v: v >= 1,
    "centrality_tolerance": lambda v: v > 0,
    "centrality_max_iterations": lambda v: v >= 1,
    "influencers_top_n": lambda v: v >= 1,
    "community_top_n": lambda v: v >= 1,
    "bot_threshold_default": lambda v: 0.0 <= v <= 1.0,
    "top_hashtags": lambda v: v >= 1,
    "lda_k": lambda v: v >= 1,
    "lda_beta": lambda v: v > 0,
    "lda_iterations": lambda v: v >= 0,
    "dtm_v": lambda v: v >= 1,
    "ci_confidence": lambda v: 0.0 < v < 1.0,
}


def config_from_dict(raw: Mapping) -> AnalysisConfig:
    """Validate a plain mapping into a config; errors carry field paths."""
    known = {f.name for f in AnalysisConfig.__dataclass_fields__.values()}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown configuration key")
    kwargs = dict(raw)
    for key in ("streams", "graph_kinds"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    cfg = AnalysisConfig(**kwargs)

    for fname, check in _CHECKS.items():
        value = getattr(cfg, fname)
        if not check(value):
            raise ConfigError(f"{fname}: value {value!r} out of range")
    for kind in cfg.graph_kinds:
        if kind not in network.GRAPH_KINDS:
            raise ConfigError(f"graph_kinds: unknown kind {kind!r}")
    if cfg.marketshare_denominator not in ("top_k", "all"):
        raise ConfigError("marketshare_denominator: must be 'top_k' or 'all'")
    if cfg.subset not in (None, "state-media"):
        raise ConfigError(f"subset: unknown filter {cfg.subset!r}")
    if cfg.subset == "state-media" and not cfg.state_media:
        raise ConfigError("subset: state-media filter needs a state_media directory")
    if cfg.lda_alpha is not None and cfg.lda_alpha <= 0:
        raise ConfigError("lda_alpha: must be positive when given")
    for detector, t in cfg.bot_thresholds.items():
        if not 0.0 <= float(t) <= 1.0:
            raise ConfigError(f"bot_thresholds.{detector}: {t!r} out of [0,1]")
    try:
        botcal.ThresholdPolicy.parse(cfg.calibration_policy)
    except ValueError as exc:
        raise ConfigError(f"calibration_policy: {exc}") from exc
    if not cfg.streams and not cfg.corpus_dir:
        raise ConfigError("streams: provide stream files or a corpus_dir")
    return cfg


def load_config(path: str | Path) -> AnalysisConfig:
    """Read a JSON config file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    base = path.parent

    def resolve(value: str) -> str:
        return str((base / value).resolve()) if value else value

    for key in (
        "corpus_dir",
        "keywords",
        "labels",
        "bias_dictionary",
        "abusive_lexicon",
        "state_media",
        "audit_fixture",
    ):
        if raw.get(key):
            raw[key] = resolve(raw[key])
    if raw.get("streams"):
        raw["streams"] = [resolve(s) for s in raw["streams"]]
    if raw.get("scores"):
        raw["scores"] = {name: resolve(p) for name, p in raw["scores"].items()}
    return config_from_dict(raw)


@dataclass(frozen=True)
class Snapshot:
    snapshot_id: str
    path: Path
    manifest: dict

    @property
    def config(self) -> dict:
        return self.manifest["config"]

    @property
    def config_digest(self) -> str:
        return self.manifest["config_digest"]

    def section(self, name: str) -> dict:
        return self.manifest["sections"][name]

    def section_file(self, relpath: str) -> Path:
        return self.path / "sections" / relpath


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _dump_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _stream_paths(config: AnalysisConfig) -> list[Path]:
    paths = [Path(p) for p in config.streams]
    if config.corpus_dir:
        root = Path(config.corpus_dir)
        for child in sorted(root.iterdir()):
            if child.name.endswith(_STREAM_SUFFIXES):
                paths.append(child)
    return paths


def _apply_subset(corpus: Corpus, config: AnalysisConfig) -> Corpus:
    """Optional corpus filter, recorded in config: state-media traffic only."""
    if config.subset is None:
        return corpus
    directory = characterize.load_state_media_directory(config.state_media)
    lowered = directory.lowered()

    def touches(record) -> bool:
        if record.screen_name.lower() in lowered:
            return True
        return any(name.lower() in lowered for _, name in record.mentions)

    kept = [r for r in corpus.records if touches(r)]
    kept_ids = {r.author_id for r in kept}
    return Corpus(
        records=kept,
        profiles={a: p for a, p in corpus.profiles.items() if a in kept_ids},
        skips=corpus.skips,
        line_count=corpus.line_count,
    )


def _primary_detector(config: AnalysisConfig) -> str | None:
    return min(config.scores) if config.scores else None


class _Build:
    """Scratch state for one snapshot build: section files plus statuses."""

    def __init__(self, root: Path):
        self.sections_dir = root / "sections"
        self.sections_dir.mkdir(parents=True)
        self.statuses: dict[str, dict] = {}

    def mark(self, name: str, status: str, reason: str | None = None, detail=None) -> None:
        entry: dict = {"status": status}
        if reason:
            entry["reason"] = reason
        if detail:
            entry["detail"] = detail
        self.statuses[name] = entry

    def path(self, relpath: str) -> Path:
        p = self.sections_dir / relpath
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    def dir(self, relpath: str) -> Path:
        p = self.sections_dir / relpath
        p.mkdir(parents=True, exist_ok=True)
        return p


def snapshot_build(config: AnalysisConfig, store_dir: str | Path) -> Snapshot:
    """Run every configured section and persist an immutable snapshot."""
    store = SnapshotStore(store_dir)
    staging = store.root / f".tmp-{uuid.uuid4().hex}"
    build = _Build(staging)
    try:
        corpus = _load_inputs(config)
        corpus = _apply_subset(corpus, config)
        _build_stats(build, config, corpus)
        scores_by_detector = _load_scores(config)
        for kind in config.graph_kinds:
            _build_network(build, config, corpus, kind, scores_by_detector)
        _build_calibration(build, config, scores_by_detector)
        _build_audit(build, config, corpus, scores_by_detector)
        _build_content(build, config, corpus, scores_by_detector)
        _build_characterize(build, config, corpus, scores_by_detector)
        _build_topics(build, config, corpus, scores_by_detector)
        _build_dtm(build, config, corpus)
        return _seal(build, config, store, staging)
    except Exception:
        shutil.rmtree(staging, ignore_errors=True)
        raise


def _load_inputs(config: AnalysisConfig) -> Corpus:
    paths = _stream_paths(config)
    if not paths:
        raise ConfigError("streams: no stream files found")
    for p in paths:
        if not p.exists():
            raise ConfigError(f"streams: {p} does not exist")
    keywords = load_keywords(config.keywords) if config.keywords else None
    return load_corpus(paths, keywords=keywords)


def _load_scores(config: AnalysisConfig) -> dict[str, botcal.BotScoreTable]:
    tables = {}
    for detector in sorted(config.scores):
        tables[detector] = botcal.load_score_table(
            config.scores[detector],
            detector_name=detector,
            default_threshold=config.threshold_for(detector),
        )
    return tables


def _primary_scores(
    config: AnalysisConfig, tables: Mapping[str, botcal.BotScoreTable]
) -> tuple[Mapping[str, float], float]:
    detector = _primary_detector(config)
    if detector is None:
        return {}, config.bot_threshold_default
    return tables[detector].scores, config.threshold_for(detector)


def _build_stats(build: _Build, config: AnalysisConfig, corpus: Corpus) -> None:
    stats = stream_summary(corpus.records, daily_cap=config.daily_cap)
    payload = {
        "total_tweets": stats.total_tweets,
        "unique_users": stats.unique_users,
        "original_tweets": stats.original_tweets,
        "retweet_tweets": stats.retweet_tweets,
        "reply_tweets": stats.reply_tweets,
        "quote_tweets": stats.quote_tweets,
        "unique_hashtags": stats.unique_hashtags,
        "image_count": stats.image_count,
        "url_count": stats.url_count,
        "unique_domains": stats.unique_domains,
        "verified_tweets": stats.verified_tweets,
        "daily_cap": stats.daily_cap,
        "capped_days": stats.capped_days,
        "skipped_lines": dict(corpus.skips),
        "line_count": corpus.line_count,
        "subset": config.subset,
    }
    _dump_json(build.path("stats/stats.json"), payload)
    write_daily_csv(stats.daily_counts, build.path("stats/daily.csv"))
    build.mark("stats", "built")


def _graph_stats_payload(g: network.ConversationGraph) -> dict:
    stats = network.graph_stats(g)
    return {"n": stats.n, "m": stats.m, "density": stats.density}


def _build_network(
    build: _Build,
    config: AnalysisConfig,
    corpus: Corpus,
    kind: str,
    tables: Mapping[str, botcal.BotScoreTable],
) -> None:
    section = f"network/{kind}"
    g = network.build_graph(corpus.records, kind)
    if g.m == 0:
        build.mark(section, "absent", reason="graph has no edges")
        return

    network.write_edge_csv(g, build.path(f"network/{kind}/edges.csv"))
    names = {}
    for r in corpus.records:
        names.setdefault(r.author_id, r.screen_name)
    network.write_node_csv(
        {a: names.get(a, "") for a in g.nodes},
        build.path(f"network/{kind}/nodes.csv"),
    )

    core = network.k_core(g, config.k_core_k)
    network.write_edge_csv(core, build.path(f"network/{kind}/core_edges.csv"))

    payload = {
        "kind": kind,
        "graph": _graph_stats_payload(g),
        "core": {"k": config.k_core_k, **_graph_stats_payload(core)},
        "sample": None,
    }
    if g.m > config.edge_sample_m:
        sampled = network.sample_edges(g, config.edge_sample_m, config.edge_sample_seed)
        network.write_edge_csv(sampled, build.path(f"network/{kind}/sample_edges.csv"))
        payload["sample"] = {
            "target_m": config.edge_sample_m,
            "seed": config.edge_sample_seed,
            **_graph_stats_payload(sampled),
        }

    centrality = network.eigenvector_centrality(
        g,
        tolerance=config.centrality_tolerance,
        max_iterations=config.centrality_max_iterations,
    )
    scores, threshold = _primary_scores(config, tables)
    influencers = network.top_influencers(
        centrality,
        scores or None,
        top_n=config.influencers_top_n,
        threshold=threshold,
        names=names,
    )
    _dump_json(
        build.path(f"network/{kind}/influencers.json"),
        {
            "detector": _primary_detector(config),
            "threshold": threshold,
            "iterations_used": centrality.iterations_used,
            "converged": centrality.converged,
            "rows": [asdict(row) for row in influencers],
        },
    )

    partition = network.louvain(g, seed=config.louvain_seed)
    with open(build.path(f"network/{kind}/assignment.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["account_id", "community"])
        for account in sorted(partition.assignment):
            writer.writerow([account, partition.assignment[account]])
    cards = network.community_summary(
        partition,
        centrality,
        corpus.records,
        scores or None,
        top_n=config.community_top_n,
        threshold=threshold,
    )
    _dump_json(
        build.path(f"network/{kind}/communities.json"),
        {
            "seed": config.louvain_seed,
            "modularity": partition.modularity,
            "community_sizes": {str(c): n for c, n in partition.community_sizes.items()},
            "cards": [
                {
                    "community_id": card.community_id,
                    "size": card.size,
                    "scored_members": card.scored_members,
                    "bot_share": card.bot_share,
                    "top_members": list(card.top_members),
                    "top_hashtags": list(card.top_hashtags),
                }
                for card in cards
            ],
        },
    )
    payload["stats_of"] = {"louvain_seed": config.louvain_seed}
    _dump_json(build.path(f"network/{kind}/stats.json"), payload)
    build.mark(section, "built")


def _build_calibration(
    build: _Build, config: AnalysisConfig, tables: Mapping[str, botcal.BotScoreTable]
) -> None:
    if not tables:
        build.mark("calibration", "absent", reason="no detector score files configured")
        return
    if not config.labels:
        build.mark("calibration", "absent", reason="no labeled sample configured")
        return
    labels = botcal.load_labeled_sample(config.labels)
    policy = botcal.ThresholdPolicy.parse(config.calibration_policy)
    for detector, table in tables.items():
        curve = botcal.precision_recall_curve(table.scores, labels)
        try:
            selected = botcal.select_threshold(curve, policy)
        except botcal.PolicyError as exc:
            selected, selection_error = None, str(exc)
        else:
            selection_error = None
        default_t = config.threshold_for(detector)
        payload = {
            "detector": detector,
            "labeled_accounts": len(labels),
            "policy": config.calibration_policy,
            "selected_threshold": selected,
            "selection_error": selection_error,
            "metrics_at_default": asdict(
                botcal.evaluate_at_threshold(table.scores, labels, default_t)
            ),
            "metrics_at_selected": (
                asdict(botcal.evaluate_at_threshold(table.scores, labels, selected))
                if selected is not None
                else None
            ),
            "density": asdict(
                botcal.score_density(table.scores, thresholds=(default_t,))
            ),
        }
        _dump_json(build.path(f"calibration/{detector}.json"), payload)
        botcal.write_curve_csv(curve, build.path(f"calibration/{detector}_curve.csv"))
    build.mark("calibration", "built")


def _build_audit(
    build: _Build,
    config: AnalysisConfig,
    corpus: Corpus,
    tables: Mapping[str, botcal.BotScoreTable],
) -> None:
    if not config.audit_fixture:
        build.mark("audit", "absent", reason="no account-status fixture configured")
        return
    client = audit_mod.load_fixture(config.audit_fixture)
    population = sorted(corpus.profiles)
    if not population:
        build.mark("audit", "absent", reason="corpus has no accounts")
        return
    k = min(config.audit_sample or len(population), len(population))
    sample = audit_mod.sample_accounts(population, k, config.audit_seed)
    report = audit_mod.run_audit(sample, client)
    report = audit_mod.with_estimates(report, confidence=config.ci_confidence)
    scores, threshold = _primary_scores(config, tables)
    tweet_count, botlike = audit_mod.suspended_activity(
        report.suspended_ids, corpus.records, scores, threshold
    )
    report = replace(
        report, suspended_tweet_count=tweet_count, suspended_botlike_share=botlike
    )
    payload = {
        "seed": config.audit_seed,
        "sample_size": k,
        "population": len(population),
        "total_sampled": report.total_sampled,
        "missing": report.missing,
        "suspended": report.suspended,
        "deleted": report.deleted,
        "missing_estimate": asdict(report.missing_estimate),
        "suspended_estimate": asdict(report.suspended_estimate),
        "suspended_tweet_count": report.suspended_tweet_count,
        "suspended_botlike_share": report.suspended_botlike_share,
        "detector": _primary_detector(config),
    }
    _dump_json(build.path("audit/report.json"), payload)
    build.mark("audit", "built")


def _build_content(
    build: _Build,
    config: AnalysisConfig,
    corpus: Corpus,
    tables: Mapping[str, botcal.BotScoreTable],
) -> None:
    series = characterize.hashtag_marketshare(
        corpus.records, config.top_hashtags, denominator=config.marketshare_denominator
    )
    characterize.write_marketshare_csv(series, build.path("content/marketshare.csv"))

    for fname in ("lang", "domain"):
        rows = characterize.tally(corpus.records, fname)
        with open(build.path(f"content/{fname}.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([fname, "count"])
            writer.writerows(rows)

    scores, threshold = _primary_scores(config, tables)
    profiles = sorted(corpus.profiles.values(), key=lambda p: p.account_id)
    flags = characterize.flag_analysis(profiles, scores, threshold)
    _dump_json(
        build.path("content/flags.json"),
        {
            "profiles_with_flags": flags.profiles_with_flags,
            "threshold": threshold,
            "buckets": {
                bucket: {
                    "+".join(combo): asdict(stat) for combo, stat in combos.items()
                }
                for bucket, combos in flags.buckets.items()
            },
        },
    )

    creation = botcal.creation_date_histogram(profiles, scores, threshold)
    with open(build.path("content/creation.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "count", "bot_proportion"])
        for row in creation:
            writer.writerow(
                [
                    row.day.isoformat(),
                    row.count,
                    "" if row.bot_proportion is None else f"{row.bot_proportion:.12g}",
                ]
            )
    build.mark("content", "built")


def _build_characterize(
    build: _Build,
    config: AnalysisConfig,
    corpus: Corpus,
    tables: Mapping[str, botcal.BotScoreTable],
) -> None:
    scores, threshold = _primary_scores(config, tables)
    detail = {}
    built_any = False

    if config.bias_dictionary:
        dictionary = characterize.load_bias_dictionary(config.bias_dictionary)
        report = characterize.bias_distribution(corpus.records, dictionary, scores, threshold)
        _dump_json(
            build.path("characterize/bias.json"),
            {
                "threshold": threshold,
                "bias": {cat: asdict(stat) for cat, stat in report.bias.items()},
                "factual": {cat: asdict(stat) for cat, stat in report.factual.items()},
                "coverage_occurrences": report.coverage_occurrences,
                "coverage_unique_domains": report.coverage_unique_domains,
            },
        )
        detail["bias"] = "built"
        built_any = True
    else:
        detail["bias"] = "absent: no bias dictionary"

    if config.abusive_lexicon:
        lexicon = characterize.load_abusive_lexicon(config.abusive_lexicon)
        report = characterize.abusive_series(corpus.records, lexicon, scores, threshold)
        _dump_json(
            build.path("characterize/abusive.json"),
            {
                "threshold": threshold,
                "daily": [[day.isoformat(), count] for day, count in report.daily],
                "abusive_bot_share": report.abusive_bot_share,
                "nonabusive_bot_share": report.nonabusive_bot_share,
                "abusive_tweets": report.abusive_tweets,
                "abusive_accounts": report.abusive_accounts,
            },
        )
        detail["abusive"] = "built"
        built_any = True
    else:
        detail["abusive"] = "absent: no abusive lexicon"

    if config.state_media:
        directory = characterize.load_state_media_directory(config.state_media)
        stats = characterize.state_media_amplification(
            corpus.records, directory, scores, threshold
        )
        _dump_json(
            build.path("characterize/statemedia.json"),
            {
                "threshold": threshold,
                "countries": {c: asdict(stat) for c, stat in stats.items()},
                "total_original": sum(s.original_count for s in stats.values()),
                "total_amplification": sum(
                    s.amplification_count for s in stats.values()
                ),
            },
        )
        detail["statemedia"] = "built"
        built_any = True
    else:
        detail["statemedia"] = "absent: no state-media directory"

    if built_any:
        build.mark("characterize", "built", detail=detail)
    else:
        build.mark(
            "characterize",
            "absent",
            reason="no dictionaries configured",
            detail=detail,
        )


def _build_topics(
    build: _Build,
    config: AnalysisConfig,
    corpus: Corpus,
    tables: Mapping[str, botcal.BotScoreTable],
) -> None:
    docs = topics.build_hashtag_documents(corpus.records, lang_filter=config.lda_lang)
    if not docs:
        build.mark("topics", "absent", reason="no hashtag documents in corpus")
        return
    model = topics.lda_fit(
        docs,
        k=config.lda_k,
        alpha=config.lda_alpha,
        beta=config.lda_beta,
        iterations=config.lda_iterations,
        seed=config.lda_seed,
    )
    scores, threshold = _primary_scores(config, tables)
    report = topics.topic_report(model, scores, threshold)
    _dump_json(
        build.path("topics/report.json"),
        {
            "k": model.k,
            "alpha": model.alpha,
            "beta": model.beta,
            "iterations": model.iterations,
            "seed": model.seed,
            "lang_filter": config.lda_lang,
            "documents": len(model.doc_ids),
            "vocabulary": len(model.vocab),
            "threshold": threshold,
            "topics": [asdict(row) for row in report],
        },
    )
    topics.write_topic_model(model, build.dir("topics/model"))
    build.mark("topics", "built")


def _build_dtm(build: _Build, config: AnalysisConfig, corpus: Corpus) -> None:
    if not corpus.records:
        build.mark("dtm", "absent", reason="corpus is empty")
        return
    dtm = topics.build_dtm(corpus.records, v=config.dtm_v, lang_filter=config.dtm_lang)
    directory = build.dir("dtm")
    topics.write_dtm(dtm, directory)
    _dump_json(
        directory / "meta.json",
        {
            "v": config.dtm_v,
            "lang_filter": config.dtm_lang,
            "accounts": len(dtm.account_ids),
            "vocabulary": len(dtm.vocab),
            "zero_rows": len(dtm.zero_rows),
        },
    )
    build.mark("dtm", "built")


def _hash_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _seal(
    build: _Build, config: AnalysisConfig, store: "SnapshotStore", staging: Path
) -> Snapshot:
    files = {}
    for path in sorted(build.sections_dir.rglob("*")):
        if path.is_file():
            files[str(path.relative_to(build.sections_dir))] = _hash_file(path)

    config_digest = config.digest()
    identity = {
        "config_digest": config_digest,
        "sections": build.statuses,
        "files": files,
    }
    snapshot_id = "snap_" + hashlib.sha256(
        _canonical_json(identity).encode()
    ).hexdigest()[:16]

    manifest = {
        "snapshot_id": snapshot_id,
        "config_digest": config_digest,
        "config": config.to_dict(),
        "sections": build.statuses,
        "files": files,
    }
    _dump_json(staging / "manifest.json", manifest)
    # Wall-clock metadata stays outside the hashed payload so a rebuild of
    # identical inputs keeps the identical id.
    _dump_json(
        staging / "meta.json",
        {"created_at": datetime.now(timezone.utc).isoformat()},
    )

    target = store.root / snapshot_id
    if target.exists():
        shutil.rmtree(staging)
    else:
        os.replace(staging, target)
    return store.load(snapshot_id)


class SnapshotStore:
    """Directory of immutable snapshots, addressed by snapshot id."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def ids(self) -> list[str]:
        return sorted(
            p.name
            for p in self.root.iterdir()
            if p.is_dir() and p.name.startswith("snap_")
        )

    def list(self) -> list[dict]:
        entries = []
        for sid in self.ids():
            snap = self.load(sid)
            meta = {}
            meta_path = snap.path / "meta.json"
            if meta_path.exists():
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
            entries.append(
                {
                    "snapshot_id": sid,
                    "created_at": meta.get("created_at"),
                    "config_digest": snap.config_digest,
                    "sections": {
                        name: entry["status"]
                        for name, entry in snap.manifest["sections"].items()
                    },
                }
            )
        entries.sort(key=lambda e: (e["created_at"] or "", e["snapshot_id"]))
        return entries

    def load(self, snapshot_id: str) -> Snapshot:
        path = self.root / snapshot_id
        manifest_path = path / "manifest.json"
        if not manifest_path.exists():
            raise KeyError(f"unknown snapshot {snapshot_id!r}")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        return Snapshot(snapshot_id=snapshot_id, path=path, manifest=manifest)
