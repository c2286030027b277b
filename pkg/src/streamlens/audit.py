"""Suspended-account audit against a pluggable account-status client.

The workflow mirrors platform rehydration mechanics: a batch lookup that
silently drops missing accounts, then one probe per missing id to split
suspensions from deletions. Clients are injected behind a small contract so
the whole audit runs against recorded fixtures; there is no live-API code
here.
"""
from __future__ import annotations

import csv
import math
import random
import time
from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from statistics import NormalDist
from typing import Protocol

from .ingest import TweetRecord

__all__ = [
    "AccountStatusClient",
    "FixtureClient",
    "ClientTransportError",
    "AuditInterrupted",
    "AuditCursor",
    "AuditReport",
    "ProportionEstimate",
    "sample_accounts",
    "run_audit",
    "proportion_ci",
    "with_estimates",
    "suspended_activity",
    "rate_budget",
    "load_fixture",
    "write_report",
]

EXISTS = "exists"
SUSPENDED = "suspended"
DELETED = "deleted"

DEFAULT_BATCH_SIZE = 100  # per-call id cap of the batch endpoint contract


class ClientTransportError(RuntimeError):
    """A client call failed for transport reasons and may be retried."""


class AccountStatusClient(Protocol):
    """What the audit needs from a platform: batch existence + single probe.

    ``batch_lookup`` returns only the ids that still exist (no feedback for
    the rest); ``probe`` resolves one id to exists/suspended/deleted.
    """

    def batch_lookup(self, ids: Sequence[str]) -> set[str]: ...

    def probe(self, account_id: str) -> str: ...


class FixtureClient:
    """Status client backed by a recorded ``account_id,status`` table.

    Ids absent from the fixture behave like deleted accounts: dropped from
    batch results and probed as deleted.
    """

    def __init__(self, statuses: Mapping[str, str]):
        for account, status in statuses.items():
            if status not in (EXISTS, SUSPENDED, DELETED):
                raise ValueError(f"bad status {status!r} for account {account!r}")
        self._statuses = dict(statuses)

    def batch_lookup(self, ids: Sequence[str]) -> set[str]:
        return {i for i in ids if self._statuses.get(i) == EXISTS}

    def probe(self, account_id: str) -> str:
        return self._statuses.get(account_id, DELETED)


def load_fixture(path: str | Path) -> FixtureClient:
    """CSV ``account_id,status`` with status exists|suspended|deleted."""
    statuses: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "account_id":
                continue
            statuses[row[0]] = row[1].strip().lower()
    return FixtureClient(statuses)


@dataclass(frozen=True)
class ProportionEstimate:
    """A proportion with its symmetric 95%-style confidence half-width."""

    p_hat: float
    half_width: float
    confidence: float
    n: int
    method: str = "wald"

    @property
    def low(self) -> float:
        return max(0.0, self.p_hat - self.half_width)

    @property
    def high(self) -> float:
        return min(1.0, self.p_hat + self.half_width)


@dataclass(frozen=True)
class AuditCursor:
    """Resume point: tallies over a completed prefix of the sorted missing ids.

    ``probed`` counts completed probes; the probe order is the sorted missing
    list, so the cursor plus the original inputs fully determine the rest of
    the run.
    """

    probed: int
    suspended_ids: tuple[str, ...]
    deleted: int

    @property
    def suspended(self) -> int:
        return len(self.suspended_ids)


@dataclass(frozen=True)
class AuditReport:
    """Outcome of one audit; estimates are attached by :func:`with_estimates`.

    ``suspended_ids`` is kept so downstream activity analysis can group the
    corpus by the suspended set without re-probing.
    """

    total_sampled: int
    missing: int
    suspended: int
    deleted: int
    suspended_ids: tuple[str, ...] = ()
    missing_estimate: ProportionEstimate | None = None
    suspended_estimate: ProportionEstimate | None = None
    suspended_tweet_count: int | None = None
    suspended_botlike_share: float | None = None


class AuditInterrupted(RuntimeError):
    """Probing died mid-run; carries the completed tallies and a resume cursor."""

    def __init__(self, cursor: AuditCursor, cause: Exception):
        super().__init__(
            f"audit interrupted after {cursor.probed} probes "
            f"({cursor.suspended} suspended, {cursor.deleted} deleted): {cause}"
        )
        self.cursor = cursor
        self.cause = cause


def sample_accounts(all_ids: Iterable[str], k: int, seed: int) -> list[str]:
    """Uniform sample without replacement, deterministic for a fixed seed."""
    population = sorted(all_ids)
    if k > len(population):
        raise ValueError(f"cannot sample {k} from population of {len(population)}")
    return random.Random(seed).sample(population, k)


def _with_retry(
    call: Callable[[], object],
    attempts: int = 3,
    base_delay: float = 0.05,
    sleep: Callable[[float], None] = time.sleep,
):
    """Retry transient client failures with exponential backoff."""
    for attempt in range(attempts):
        try:
            return call()
        except ClientTransportError:
            if attempt == attempts - 1:
                raise
            sleep(base_delay * (2**attempt))


def run_audit(
    ids: Sequence[str],
    client: AccountStatusClient,
    batch_size: int = DEFAULT_BATCH_SIZE,
    resume: AuditCursor | None = None,
    parallelism: int = 1,
    chunk_size: int = 1000,
    retry_sleep: Callable[[float], None] = time.sleep,
    missing_override: Sequence[str] | None = None,
) -> AuditReport:
    """Batch-then-probe audit of an id sample.

    Missing ids (batch lookup gives no feedback for them) are probed in
    sorted order, chunk by chunk; a chunk's tallies only count once the whole
    chunk finished, so an interrupt-and-resume run reproduces the
    uninterrupted report exactly. Transient failures are retried three times
    before :class:`AuditInterrupted` surfaces the resume cursor. On resume,
    pass ``missing_override`` with the missing list from the first attempt to
    skip re-running the batch phase, or let it re-derive (same result).
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if len(set(ids)) != len(ids):
        raise ValueError("audit ids must be unique")

    if missing_override is not None:
        missing = sorted(missing_override)
    else:
        existing: set[str] = set()
        try:
            for start in range(0, len(ids), batch_size):
                page = ids[start : start + batch_size]
                existing |= _with_retry(
                    lambda p=page: client.batch_lookup(p), sleep=retry_sleep
                )
        except ClientTransportError as exc:
            raise AuditInterrupted(
                AuditCursor(probed=0, suspended_ids=(), deleted=0), exc
            ) from exc
        missing = sorted(set(ids) - existing)

    cursor = resume or AuditCursor(probed=0, suspended_ids=(), deleted=0)
    if cursor.probed > len(missing):
        raise ValueError("resume cursor is past the end of the missing list")
    suspended_ids = list(cursor.suspended_ids)
    deleted = cursor.deleted

    position = cursor.probed
    while position < len(missing):
        chunk = missing[position : position + chunk_size]
        try:
            statuses = _probe_chunk(chunk, client, parallelism, retry_sleep)
        except ClientTransportError as exc:
            raise AuditInterrupted(
                AuditCursor(
                    probed=position,
                    suspended_ids=tuple(suspended_ids),
                    deleted=deleted,
                ),
                exc,
            ) from exc
        for account, status in zip(chunk, statuses):
            if status == SUSPENDED:
                suspended_ids.append(account)
            elif status == DELETED:
                deleted += 1
            else:
                raise ValueError(
                    "client contract violation: an id absent from batch_lookup "
                    f"probed as {status!r}"
                )
        position += len(chunk)

    return AuditReport(
        total_sampled=len(ids),
        missing=len(missing),
        suspended=len(suspended_ids),
        deleted=deleted,
        suspended_ids=tuple(suspended_ids),
    )


def _probe_chunk(
    chunk: Sequence[str],
    client: AccountStatusClient,
    parallelism: int,
    retry_sleep: Callable[[float], None],
) -> list[str]:
    def probe(account_id: str) -> str:
        return _with_retry(lambda: client.probe(account_id), sleep=retry_sleep)

    if parallelism <= 1:
        return [probe(i) for i in chunk]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(probe, chunk))


def proportion_ci(
    hits: int,
    n: int,
    confidence: float = 0.95,
    method: str = "wald",
) -> ProportionEstimate:
    """Normal-approximation (Wald) interval; Wilson available behind the flag.

    half_width = z * sqrt(p(1-p)/n) with z the two-sided normal quantile
    (1.96 at 95%). Wilson recenters, so its half_width is half the clamped
    interval length around the same p_hat.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= hits <= n:
        raise ValueError("hits must be within [0, n]")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0,1)")
    p = hits / n
    z = NormalDist().inv_cdf((1.0 + confidence) / 2.0)
    if method == "wald":
        half = z * math.sqrt(p * (1.0 - p) / n)
    elif method == "wilson":
        denom = 1.0 + z * z / n
        center = (p + z * z / (2 * n)) / denom
        spread = (z / denom) * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n))
        low = max(0.0, center - spread)
        high = min(1.0, center + spread)
        half = (high - low) / 2.0
    else:
        raise ValueError(f"unknown interval method {method!r}")
    return ProportionEstimate(
        p_hat=p, half_width=half, confidence=confidence, n=n, method=method
    )


def with_estimates(
    report: AuditReport, confidence: float = 0.95, method: str = "wald"
) -> AuditReport:
    """Attach missing/suspended proportion intervals over the full sample."""
    return replace(
        report,
        missing_estimate=proportion_ci(
            report.missing, report.total_sampled, confidence, method
        ),
        suspended_estimate=proportion_ci(
            report.suspended, report.total_sampled, confidence, method
        ),
    )


def suspended_activity(
    suspended_ids: Iterable[str],
    records: Sequence[TweetRecord],
    scores: Mapping[str, float],
    t: float,
) -> tuple[int, float | None]:
    """Corpus tweets by the suspended set, plus its bot-like share.

    The share denominator is the scored members only; with none scored it
    is None rather than a fake zero.
    """
    id_set = set(suspended_ids)
    tweet_count = sum(1 for r in records if r.author_id in id_set)
    scored = [scores[a] for a in id_set if a in scores]
    share = None
    if scored:
        share = sum(1 for s in scored if s >= t) / len(scored)
    return tweet_count, share


def rate_budget(total_items: int, page_size: int, pages_per_minute: float) -> float:
    """Minutes to page through a collection under a rate limit."""
    if page_size < 1:
        raise ValueError("page_size must be >= 1")
    if pages_per_minute <= 0:
        raise ValueError("pages_per_minute must be positive")
    if total_items < 0:
        raise ValueError("total_items must be >= 0")
    return math.ceil(total_items / page_size) / pages_per_minute


def write_report(report: AuditReport, path: str | Path) -> None:
    """Key-value dump of an audit report, one field per line."""
    lines = [
        f"total_sampled={report.total_sampled}",
        f"missing={report.missing}",
        f"suspended={report.suspended}",
        f"deleted={report.deleted}",
    ]
    for name, est in (
        ("missing", report.missing_estimate),
        ("suspended", report.suspended_estimate),
    ):
        if est is not None:
            lines.append(
                f"{name}_pct={est.p_hat * 100:.4f}±{est.half_width * 100:.4f} "
                f"(confidence={est.confidence}, method={est.method})"
            )
    if report.suspended_tweet_count is not None:
        lines.append(f"suspended_tweet_count={report.suspended_tweet_count}")
    if report.suspended_botlike_share is not None:
        lines.append(f"suspended_botlike_share={report.suspended_botlike_share:.4f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
