"""Command-line umbrella over the analysis modules.

Subcommands mirror the pipeline stages; ``pipeline run`` builds a full
snapshot from a config file and ``serve`` exposes a snapshot store over
HTTP. Every command that reads the stream accepts a shell glob so shard
sets can be addressed directly.
"""
from __future__ import annotations

import csv
import glob
import json
import urllib.error
import urllib.request
from dataclasses import asdict, replace
from datetime import date
from pathlib import Path

import click

from . import __version__, audit, botcal, characterize, ingest, network, snapshot, synth, topics


def _expand_glob(pattern: str) -> list[Path]:
    paths = sorted(Path(p) for p in glob.glob(pattern, recursive=True))
    if not paths:
        raise click.UsageError(f"no files match {pattern!r}")
    return paths


def _load_records(pattern: str, keywords: str | None = None):
    terms = ingest.load_keywords(keywords) if keywords else None
    corpus = ingest.load_corpus(_expand_glob(pattern), keywords=terms)
    return corpus


def _scores_map(path: str | None) -> dict[str, float]:
    if path is None:
        return {}
    return dict(botcal.load_score_table(path).scores)


def _echo_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True, default=str))


@click.group()
@click.version_option(version=__version__, prog_name="streamlens")
def main() -> None:
    """Forensic analysis of archived tweet streams."""


@main.command("ingest")
@click.option("--input", "pattern", required=True, help="Glob of stream files (.json/.gz).")
@click.option("--keywords", type=click.Path(exists=True), help="Term file, one per line, # comments.")
@click.option("--countries", type=click.Path(exists=True), help="account_id,country annotations CSV.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def ingest_command(pattern: str, keywords: str | None, countries: str | None, out_dir: str) -> None:
    """Parse the stream and write summary statistics."""
    corpus = _load_records(pattern, keywords)
    if countries:
        corpus.annotate_countries(ingest.load_country_annotations(countries))
    stats = ingest.stream_summary(corpus.records)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ingest.write_stats_report(stats, out / "stats.txt")
    ingest.write_daily_csv(stats.daily_counts, out / "daily.csv")
    skip_lines = [f"{reason}={count}" for reason, count in sorted(corpus.skips.items())]
    (out / "skips.txt").write_text("\n".join(skip_lines) + "\n", encoding="utf-8")
    click.echo(
        f"parsed {corpus.parsed_count} tweets from {corpus.line_count} lines "
        f"({sum(corpus.skips.values())} skipped); reports in {out}"
    )


@main.group("network")
def network_group() -> None:
    """Conversation graphs: build, prune, rank, partition."""


@network_group.command("build")
@click.option("--input", "pattern", required=True)
@click.option("--kind", type=click.Choice(network.GRAPH_KINDS), default="mention", show_default=True)
@click.option("--keywords", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--nodes", "nodes_path", type=click.Path(dir_okay=False), help="Also write account_id,screen_name rows.")
def network_build(pattern: str, kind: str, keywords: str | None, out_path: str, nodes_path: str | None) -> None:
    """Build an interaction graph from the stream and write its edge list."""
    corpus = _load_records(pattern, keywords)
    g = network.build_graph(corpus.records, kind)
    network.write_edge_csv(g, out_path)
    if nodes_path:
        names = {a: corpus.profiles[a].screen_name if a in corpus.profiles else "" for a in g.nodes}
        network.write_node_csv(names, nodes_path)
    stats = network.graph_stats(g)
    click.echo(f"{kind} graph: {stats.n} nodes, {stats.m} edges, density {stats.density:.6g}")


@network_group.command("kcore")
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(network.GRAPH_KINDS), default="mention", show_default=True)
@click.option("--k", required=True, type=int)
@click.option("--degree-mode", type=click.Choice(("total", "in", "out")), default="total", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def network_kcore(edges: str, kind: str, k: int, degree_mode: str, out_path: str) -> None:
    """Prune to the maximal subgraph where every node keeps degree >= k."""
    g = network.read_edge_csv(edges, kind=kind)
    core = network.k_core_directed(g, k, degree_mode=degree_mode)
    network.write_edge_csv(core, out_path)
    stats = network.graph_stats(core)
    click.echo(f"{k}-core: {stats.n} nodes, {stats.m} edges, density {stats.density:.6g}")


@network_group.command("centrality")
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(network.GRAPH_KINDS), default="mention", show_default=True)
@click.option("--top-n", default=10, show_default=True, type=int)
@click.option("--scores", type=click.Path(exists=True), help="account_id,score CSV for bot flags.")
@click.option("--threshold", default=0.5, show_default=True, type=float)
@click.option("--nodes", type=click.Path(exists=True), help="account_id,screen_name CSV for display names.")
def network_centrality(edges: str, kind: str, top_n: int, scores: str | None, threshold: float, nodes: str | None) -> None:
    """Rank accounts by eigenvector centrality."""
    g = network.read_edge_csv(edges, kind=kind)
    result = network.eigenvector_centrality(g)
    names = None
    if nodes:
        names = {}
        with open(nodes, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if row and row[0] != "account_id":
                    names[row[0]] = row[1] if len(row) > 1 else ""
    rows = network.top_influencers(
        result, _scores_map(scores) or None, top_n, threshold=threshold, names=names
    )
    if not result.converged:
        click.echo(f"warning: power iteration hit {result.iterations_used} iterations without converging", err=True)
    for row in rows:
        label = row.screen_name or row.account_id
        flag = " [bot-flagged]" if row.flagged else ""
        click.echo(f"{row.rank:>3}  {label:<24} {row.centrality:.6f}{flag}")


@network_group.command("communities")
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(network.GRAPH_KINDS), default="mention", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write account_id,community rows.")
def network_communities(edges: str, kind: str, seed: int, out_path: str | None) -> None:
    """Partition the graph with Louvain and report modularity."""
    g = network.read_edge_csv(edges, kind=kind)
    partition = network.louvain(g, seed=seed)
    sizes = partition.community_sizes
    click.echo(
        f"{len(sizes)} communities, modularity {partition.modularity:.6f}, "
        f"largest {max(sizes.values()) if sizes else 0} nodes"
    )
    if out_path:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["account_id", "community"])
            for account in sorted(partition.assignment):
                writer.writerow([account, partition.assignment[account]])


@network_group.command("sample")
@click.option("--edges", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(network.GRAPH_KINDS), default="mention", show_default=True)
@click.option("--m", "m_target", required=True, type=int, help="Edge-count target.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def network_sample(edges: str, kind: str, m_target: int, seed: int, out_path: str) -> None:
    """Uniform edge sample for workloads that cannot take the full graph."""
    g = network.read_edge_csv(edges, kind=kind)
    sampled = network.sample_edges(g, m_target, seed)
    network.write_edge_csv(sampled, out_path)
    click.echo(f"kept {sampled.m} of {g.m} edges")


@main.group("botcal")
def botcal_group() -> None:
    """Bot-score calibration against a labeled sample."""


@botcal_group.command("evaluate")
@click.option("--scores", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--labels", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", required=True, type=float)
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def botcal_evaluate(scores: str, labels: str, threshold: float, out_path: str | None) -> None:
    """Precision/recall/F1/accuracy/AUC at one threshold."""
    table = botcal.load_score_table(scores)
    sample = botcal.load_labeled_sample(labels)
    row = botcal.evaluate_at_threshold(table.scores, sample, threshold)
    if out_path:
        botcal.write_metrics_report(row, out_path, detector=table.detector_name)
    payload = asdict(row)
    payload["degenerate"] = list(row.degenerate)
    _echo_json(payload)


@botcal_group.command("curve")
@click.option("--scores", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--labels", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def botcal_curve(scores: str, labels: str, out_path: str) -> None:
    """Write the threshold/precision/recall curve as CSV."""
    table = botcal.load_score_table(scores)
    sample = botcal.load_labeled_sample(labels)
    curve = botcal.precision_recall_curve(table.scores, sample)
    botcal.write_curve_csv(curve, out_path)
    click.echo(f"{len(curve)} curve points written to {out_path}")


@botcal_group.command("select")
@click.option("--scores", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--labels", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--policy", default="max_f1", show_default=True,
              help="max_f1, precision>=V, recall>=V, or fixed:T.")
def botcal_select(scores: str, labels: str, policy: str) -> None:
    """Pick an operating threshold under a policy."""
    table = botcal.load_score_table(scores)
    sample = botcal.load_labeled_sample(labels)
    curve = botcal.precision_recall_curve(table.scores, sample)
    try:
        chosen = botcal.select_threshold(curve, botcal.ThresholdPolicy.parse(policy))
    except botcal.PolicyError as exc:
        raise click.ClickException(str(exc)) from exc
    row = botcal.evaluate_at_threshold(table.scores, sample, chosen)
    click.echo(f"threshold={chosen:.6g} precision={row.precision:.4f} recall={row.recall:.4f} f1={row.f1:.4f}")


class _EndpointClient:
    """HTTP binding of the account-status contract for remote audits.

    POST <endpoint>/batch with {"ids": [...]} must answer {"found": [...]};
    GET <endpoint>/probe/<id> must answer {"status": ...}. Transport and
    server-side failures surface as retryable errors.
    """

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def _request(self, req: urllib.request.Request) -> dict:
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, TimeoutError, json.JSONDecodeError) as exc:
            raise audit.ClientTransportError(str(exc)) from exc

    def batch_lookup(self, ids):
        req = urllib.request.Request(
            f"{self.endpoint}/batch",
            data=json.dumps({"ids": list(ids)}).encode("utf-8"),
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        return set(self._request(req)["found"])

    def probe(self, account_id: str) -> str:
        req = urllib.request.Request(f"{self.endpoint}/probe/{account_id}")
        return str(self._request(req)["status"])


@main.group("audit")
def audit_group() -> None:
    """Suspended-account audit over a sampled population."""


@audit_group.command("run")
@click.option("--ids", "ids_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Account ids, one per line.")
@click.option("--fixture", type=click.Path(exists=True, dir_okay=False),
              help="Recorded account_id,status table.")
@click.option("--endpoint", help="Base URL of a live status service.")
@click.option("--sample", "sample_size", type=int, help="Sample size; omit to audit every id.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--batch-size", default=audit.DEFAULT_BATCH_SIZE, show_default=True, type=int)
@click.option("--confidence", default=0.95, show_default=True, type=float)
@click.option("--method", type=click.Choice(("wald", "wilson")), default="wald", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def audit_run(
    ids_path: str,
    fixture: str | None,
    endpoint: str | None,
    sample_size: int | None,
    seed: int,
    batch_size: int,
    confidence: float,
    method: str,
    out_path: str | None,
) -> None:
    """Sample accounts, split missing ones into suspended vs deleted."""
    if (fixture is None) == (endpoint is None):
        raise click.UsageError("pass exactly one of --fixture or --endpoint")
    client = audit.load_fixture(fixture) if fixture else _EndpointClient(endpoint)
    ids = [
        line.strip()
        for line in Path(ids_path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if sample_size is not None:
        ids = audit.sample_accounts(ids, sample_size, seed)
    try:
        report = audit.run_audit(ids, client, batch_size=batch_size)
    except audit.AuditInterrupted as exc:
        raise click.ClickException(str(exc)) from exc
    report = audit.with_estimates(report, confidence=confidence, method=method)
    if out_path:
        audit.write_report(report, out_path)
    me, se = report.missing_estimate, report.suspended_estimate
    click.echo(f"sampled={report.total_sampled} missing={report.missing} "
               f"suspended={report.suspended} deleted={report.deleted}")
    click.echo(f"missing: {me.p_hat:.6%} +/- {me.half_width:.6%}")
    click.echo(f"suspended: {se.p_hat:.6%} +/- {se.half_width:.6%}")


@main.group("characterize")
def characterize_group() -> None:
    """Account and content characterization."""


@characterize_group.command("marketshare")
@click.option("--input", "pattern", required=True)
@click.option("--top-k", default=10, show_default=True, type=int)
@click.option("--denominator", type=click.Choice(("top_k", "all")), default="top_k", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def characterize_marketshare(pattern: str, top_k: int, denominator: str, out_path: str) -> None:
    """Daily share of the overall top-k hashtags, written as CSV."""
    corpus = _load_records(pattern)
    series = characterize.hashtag_marketshare(corpus.records, top_k, denominator=denominator)
    characterize.write_marketshare_csv(series, out_path)
    click.echo(f"top tags: {', '.join(series.tags)}")


@characterize_group.command("tally")
@click.option("--input", "pattern", required=True)
@click.option("--field", "field_name", type=click.Choice(("lang", "domain")), required=True)
@click.option("--top", default=20, show_default=True, type=int)
def characterize_tally(pattern: str, field_name: str, top: int) -> None:
    """Ranked language or link-domain counts."""
    corpus = _load_records(pattern)
    for key, count in characterize.tally(corpus.records, field_name)[:top]:
        click.echo(f"{count:>8}  {key}")


@characterize_group.command("bias")
@click.option("--input", "pattern", required=True)
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--scores", type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", default=0.5, show_default=True, type=float)
def characterize_bias(pattern: str, dict_path: str, scores: str | None, threshold: float) -> None:
    """Bias/factuality distribution of shared link domains."""
    corpus = _load_records(pattern)
    dictionary = characterize.load_bias_dictionary(dict_path)
    report = characterize.bias_distribution(corpus.records, dictionary, _scores_map(scores), threshold)
    _echo_json(
        {
            "bias": {k: asdict(v) for k, v in report.bias.items()},
            "factual": {k: asdict(v) for k, v in report.factual.items()},
            "coverage_occurrences": report.coverage_occurrences,
            "coverage_unique_domains": report.coverage_unique_domains,
        }
    )


@characterize_group.command("abusive")
@click.option("--input", "pattern", required=True)
@click.option("--lexicon", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--scores", type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", default=0.5, show_default=True, type=float)
def characterize_abusive(pattern: str, lexicon: str, scores: str | None, threshold: float) -> None:
    """Daily abusive-tweet counts plus bot shares either side of the line."""
    corpus = _load_records(pattern)
    lex = characterize.load_abusive_lexicon(lexicon)
    report = characterize.abusive_series(corpus.records, lex, _scores_map(scores), threshold)
    _echo_json(
        {
            "daily": [[str(day), count] for day, count in report.daily],
            "abusive_tweets": report.abusive_tweets,
            "abusive_accounts": report.abusive_accounts,
            "abusive_bot_share": report.abusive_bot_share,
            "nonabusive_bot_share": report.nonabusive_bot_share,
        }
    )


@characterize_group.command("flags")
@click.option("--input", "pattern", required=True)
@click.option("--scores", type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", default=0.5, show_default=True, type=float)
def characterize_flags(pattern: str, scores: str | None, threshold: float) -> None:
    """Flag-emoji combinations in profile descriptions."""
    corpus = _load_records(pattern)
    report = characterize.flag_analysis(
        list(corpus.profiles.values()), _scores_map(scores), threshold
    )
    payload = {
        "profiles_with_flags": report.profiles_with_flags,
        "buckets": {
            bucket: [
                {
                    "combo": list(combo),
                    "frequency": stat.frequency,
                    "bot_proportion": stat.bot_proportion,
                }
                for combo, stat in sorted(combos.items())
            ]
            for bucket, combos in report.buckets.items()
        },
    }
    _echo_json(payload)


@characterize_group.command("statemedia")
@click.option("--input", "pattern", required=True)
@click.option("--directory", "directory_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--scores", type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", default=0.5, show_default=True, type=float)
def characterize_statemedia(pattern: str, directory_path: str, scores: str | None, threshold: float) -> None:
    """State-media posting volume and amplification by country."""
    corpus = _load_records(pattern)
    directory = characterize.load_state_media_directory(directory_path)
    stats = characterize.state_media_amplification(
        corpus.records, directory, _scores_map(scores), threshold
    )
    _echo_json({country: asdict(stat) for country, stat in sorted(stats.items())})


@main.group("topics")
def topics_group() -> None:
    """Hashtag topic models."""


@topics_group.command("fit")
@click.option("--input", "pattern", required=True)
@click.option("--k", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--iterations", default=1000, show_default=True, type=int)
@click.option("--lang", help="Restrict to one language tag.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def topics_fit(pattern: str, k: int, seed: int, iterations: int, lang: str | None, out_dir: str) -> None:
    """Fit the hashtag topic model and persist it."""
    corpus = _load_records(pattern)
    docs = topics.build_hashtag_documents(corpus.records, lang_filter=lang)
    if not docs:
        raise click.ClickException("no hashtag documents in the input")
    model = topics.lda_fit(docs, k, iterations=iterations, seed=seed)
    topics.write_topic_model(model, out_dir)
    click.echo(f"fitted {k} topics over {len(docs)} documents, {len(model.vocab)} terms; model in {out_dir}")


@topics_group.command("report")
@click.option("--input", "pattern", required=True)
@click.option("--k", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--iterations", default=1000, show_default=True, type=int)
@click.option("--lang", help="Restrict to one language tag.")
@click.option("--scores", type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", default=0.5, show_default=True, type=float)
@click.option("--top-words", default=10, show_default=True, type=int)
def topics_report(pattern: str, k: int, seed: int, iterations: int, lang: str | None,
                  scores: str | None, threshold: float, top_words: int) -> None:
    """Fit (deterministic for a seed) and print per-topic summaries."""
    corpus = _load_records(pattern)
    docs = topics.build_hashtag_documents(corpus.records, lang_filter=lang)
    if not docs:
        raise click.ClickException("no hashtag documents in the input")
    model = topics.lda_fit(docs, k, iterations=iterations, seed=seed)
    summaries = topics.topic_report(model, _scores_map(scores), threshold, top_words=top_words)
    for s in summaries:
        share = "n/a" if s.bot_percentage is None else f"{s.bot_percentage:.1%}"
        click.echo(f"topic {s.topic}: {s.account_count} accounts, bot share {share}")
        click.echo("  " + ", ".join(s.top_words))


@main.group("botmatch")
def botmatch_group() -> None:
    """Similarity search over account content."""


@botmatch_group.command("query")
@click.option("--input", "pattern", required=True)
@click.option("--seed-account", required=True)
@click.option("--top", default=20, show_default=True, type=int)
@click.option("--v", "vocab_size", default=4000, show_default=True, type=int)
@click.option("--lang", help="Restrict to one language tag.")
def botmatch_query(pattern: str, seed_account: str, top: int, vocab_size: int, lang: str | None) -> None:
    """Nearest accounts to a seed by cosine similarity."""
    corpus = _load_records(pattern)
    dtm = topics.build_dtm(corpus.records, v=vocab_size, lang_filter=lang)
    try:
        matches = topics.bot_match_query(dtm, seed_account, top)
    except KeyError as exc:
        raise click.ClickException(str(exc.args[0])) from exc
    for account, sim in matches:
        click.echo(f"{sim:.6f}  {account}")


@botmatch_group.command("session")
@click.option("--input", "pattern", required=True)
@click.option("--seeds", required=True, help="Comma-separated seed account ids.")
@click.option("--v", "vocab_size", default=4000, show_default=True, type=int)
@click.option("--lang", help="Restrict to one language tag.")
def botmatch_session(pattern: str, seeds: str, vocab_size: int, lang: str | None) -> None:
    """Interactive expansion: step / accept IDS / reject IDS / show / done."""
    corpus = _load_records(pattern)
    dtm = topics.build_dtm(corpus.records, v=vocab_size, lang_filter=lang)
    seed_list = [s.strip() for s in seeds.split(",") if s.strip()]
    try:
        session = topics.new_session(dtm, seed_list)
    except (KeyError, ValueError) as exc:
        raise click.ClickException(str(exc.args[0])) from exc
    click.echo(f"session over {len(dtm.account_ids)} accounts; seeds: {', '.join(sorted(session.seed_accounts))}")
    while True:
        try:
            line = click.prompt("botmatch", prompt_suffix="> ", default="", show_default=False)
        except click.Abort:
            break
        parts = line.split()
        if not parts:
            continue
        op, args = parts[0], parts[1:]
        try:
            if op == "step":
                session = topics.expand(session, topics.Step(top_n=int(args[0]) if args else 20))
                for account, sim in session.frontier:
                    click.echo(f"  {sim:.6f}  {account}")
            elif op == "accept":
                session = topics.expand(session, topics.Accept(tuple(args)))
            elif op == "reject":
                session = topics.expand(session, topics.Reject(tuple(args)))
            elif op == "show":
                click.echo(f"accepted: {', '.join(sorted(session.accepted)) or '(none)'}")
                click.echo(f"rejected: {', '.join(sorted(session.rejected)) or '(none)'}")
                click.echo(f"frontier: {len(session.frontier)} candidates, round {session.round}")
            elif op in ("done", "quit", "exit"):
                break
            else:
                click.echo("commands: step [n], accept IDS, reject IDS, show, done")
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
    click.echo("accepted accounts: " + (", ".join(sorted(session.accepted)) or "(none)"))


@main.group("pipeline")
def pipeline_group() -> None:
    """Full analysis runs persisted as immutable snapshots."""


@pipeline_group.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_dir", required=True, type=click.Path(file_okay=False))
def pipeline_run(config_path: str, store_dir: str) -> None:
    """Build a snapshot from a JSON config file."""
    try:
        config = snapshot.load_config(config_path)
    except snapshot.ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    snap = snapshot.snapshot_build(config, store_dir)
    built = [name for name, entry in snap.manifest["sections"].items() if entry["status"] == "built"]
    click.echo(f"snapshot {snap.snapshot_id} at {snap.path}")
    click.echo(f"sections: {', '.join(sorted(built))}")


@main.command("serve")
@click.option("--store", "store_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_command(store_dir: str, host: str, port: int) -> None:
    """Serve a snapshot store over HTTP."""
    from .server import serve

    click.echo(f"serving snapshots from {store_dir} on http://{host}:{port}")
    serve(store_dir, host=host, port=port)


@main.command("synth")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=11, show_default=True, type=int)
@click.option("--accounts", default=400, show_default=True, type=int)
@click.option("--tweets", default=5000, show_default=True, type=int)
@click.option("--days", default=30, show_default=True, type=int)
@click.option("--start", default="2020-03-01", show_default=True, help="First stream day (YYYY-MM-DD).")
@click.option("--shards", default=1, show_default=True, type=int)
@click.option("--plain", is_flag=True, help="Write uncompressed .json shards.")
def synth_command(out_dir: str, seed: int, accounts: int, tweets: int, days: int,
                  start: str, shards: int, plain: bool) -> None:
    """Generate a reproducible synthetic corpus with known ground truth."""
    cfg = replace(
        synth.SynthConfig(),
        seed=seed,
        n_accounts=accounts,
        n_tweets=tweets,
        days=days,
        start_day=date.fromisoformat(start),
    )
    corpus = synth.generate(cfg)
    paths = synth.write_corpus(corpus, out_dir, shards=shards, compress=not plain)
    click.echo(f"wrote {len(corpus.lines)} stream lines across {shards} shard(s)")
    for name, path in sorted(paths.items()):
        click.echo(f"  {name}: {path}")


if __name__ == "__main__":
    main()
