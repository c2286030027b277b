"""Bot-score calibration: evaluate detector scores against a labeled sample.

Scores arrive from external detectors as per-account probabilities in [0,1].
This module turns them into confusion-matrix metrics, precision-recall and
ROC summaries, policy-driven threshold choices, and the population-level
views built on a chosen threshold (score density, account-creation series).

Conventions, applied everywhere unless a function says otherwise: "bot" is
the positive class, and an account is predicted bot when score >= t. The
one deliberate exception is :func:`filter_count`, which uses strictly
greater, matching the claim format it reproduces.
"""
from __future__ import annotations

import csv
import math
from bisect import bisect_left, bisect_right
from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path

from .ingest import AccountProfile

__all__ = [
    "BotScoreTable",
    "LabeledSample",
    "MetricsRow",
    "ThresholdPolicy",
    "PolicyError",
    "ScoreDensity",
    "CreationDateBin",
    "evaluate_at_threshold",
    "precision_recall_curve",
    "roc_auc",
    "select_threshold",
    "score_density",
    "creation_date_histogram",
    "filter_count",
    "load_score_table",
    "load_labeled_sample",
    "write_metrics_report",
    "write_curve_csv",
]

BOT = "bot"
HUMAN = "human"


@dataclass(frozen=True)
class BotScoreTable:
    """Per-account scores from one external detector."""

    detector_name: str
    scores: Mapping[str, float]
    default_threshold: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.default_threshold < 1.0:
            raise ValueError("default_threshold must be in (0,1)")
        for account, score in self.scores.items():
            if not 0.0 <= score <= 1.0:
                raise ValueError(
                    f"score for account {account!r} is {score}, outside [0,1]"
                )


@dataclass(frozen=True)
class LabeledSample:
    """Hand labels for a sample of accounts; ids unique, labels bot/human."""

    entries: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        seen = set()
        for account, label in self.entries:
            if label not in (BOT, HUMAN):
                raise ValueError(f"label for {account!r} must be bot or human")
            if account in seen:
                raise ValueError(f"duplicate labeled account {account!r}")
            seen.add(account)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class MetricsRow:
    """Confusion-matrix metrics at one threshold.

    A metric whose denominator is zero is reported as 0.0 and listed in
    ``degenerate`` rather than raising; roc_auc lands there when the sample
    has a single class.
    """

    threshold: float
    f1: float
    accuracy: float
    precision: float
    recall: float
    roc_auc: float
    degenerate: tuple[str, ...] = ()


class PolicyError(ValueError):
    """A threshold policy cannot be satisfied by the given curve."""


@dataclass(frozen=True)
class ThresholdPolicy:
    """How to pick an operating threshold from a precision-recall curve.

    Objectives: ``max_f1`` (value ignored), ``precision_floor`` / the lowest
    threshold whose precision meets the floor, ``recall_floor`` / the highest
    threshold whose recall meets it, and ``fixed`` / the given value as-is.
    """

    objective: str
    value: float | None = None

    _FLOORS = ("precision_floor", "recall_floor")

    def __post_init__(self) -> None:
        if self.objective not in ("max_f1", "precision_floor", "recall_floor", "fixed"):
            raise ValueError(f"unknown objective {self.objective!r}")
        if self.objective == "max_f1":
            if self.value is not None:
                raise ValueError("max_f1 takes no value")
        elif self.value is None:
            raise ValueError(f"{self.objective} requires a value")
        elif self.objective in self._FLOORS and not 0.0 < self.value < 1.0:
            raise ValueError(f"{self.objective} value must be in (0,1)")
        elif self.objective == "fixed" and not 0.0 <= self.value <= 1.0:
            raise ValueError("fixed threshold must be in [0,1]")

    @classmethod
    def parse(cls, text: str) -> "ThresholdPolicy":
        """Parse CLI policy syntax: max_f1 | precision>=0.9 | recall>=0.7 | fixed:0.5."""
        text = text.strip()
        if text == "max_f1":
            return cls("max_f1")
        if text.startswith("precision>="):
            return cls("precision_floor", float(text.removeprefix("precision>=")))
        if text.startswith("recall>="):
            return cls("recall_floor", float(text.removeprefix("recall>=")))
        if text.startswith("fixed:"):
            return cls("fixed", float(text.removeprefix("fixed:")))
        raise ValueError(
            f"cannot parse policy {text!r}; expected max_f1, "
            "precision>=<v>, recall>=<v>, or fixed:<v>"
        )


def _paired(scores: Mapping[str, float], labels: LabeledSample) -> list[tuple[float, str]]:
    """(score, label) pairs for every labeled account; missing scores are an error."""
    if not labels.entries:
        raise ValueError("labeled sample is empty")
    missing = [a for a, _ in labels.entries if a not in scores]
    if missing:
        raise KeyError(
            f"{len(missing)} labeled account(s) have no score, e.g. {missing[:3]}"
        )
    return [(scores[a], lab) for a, lab in labels.entries]


def _confusion(pairs: Sequence[tuple[float, str]], t: float) -> tuple[int, int, int, int]:
    tp = fp = fn = tn = 0
    for score, label in pairs:
        predicted_bot = score >= t
        if predicted_bot and label == BOT:
            tp += 1
        elif predicted_bot:
            fp += 1
        elif label == BOT:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def evaluate_at_threshold(
    scores: Mapping[str, float], labels: LabeledSample, t: float
) -> MetricsRow:
    """Confusion-matrix metrics at threshold t, bot as the positive class."""
    pairs = _paired(scores, labels)
    tp, fp, fn, tn = _confusion(pairs, t)

    degenerate = []
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        degenerate.append("precision")
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall = 0.0
        degenerate.append("recall")
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        degenerate.append("f1")
    accuracy = (tp + tn) / len(pairs)
    try:
        auc = roc_auc(scores, labels)
    except ValueError:
        auc = 0.0
        degenerate.append("roc_auc")
    return MetricsRow(
        threshold=t,
        f1=f1,
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        roc_auc=auc,
        degenerate=tuple(degenerate),
    )


def precision_recall_curve(
    scores: Mapping[str, float], labels: LabeledSample
) -> list[tuple[float, float, float]]:
    """(threshold, precision, recall) at each distinct score, descending.

    Thresholds are the observed score values, so every point has at least
    one predicted positive and precision is always defined. Recall is
    non-decreasing down the list; with no bots in the sample it is 0.
    """
    pairs = _paired(scores, labels)
    total_bots = sum(1 for _, lab in pairs if lab == BOT)
    pairs.sort(key=lambda p: -p[0])

    curve = []
    tp = predicted = 0
    i = 0
    while i < len(pairs):
        t = pairs[i][0]
        # Consume the whole tie group so counts reflect "score >= t".
        while i < len(pairs) and pairs[i][0] == t:
            predicted += 1
            tp += pairs[i][1] == BOT
            i += 1
        precision = tp / predicted
        recall = tp / total_bots if total_bots else 0.0
        curve.append((t, precision, recall))
    return curve


def roc_auc(scores: Mapping[str, float], labels: LabeledSample) -> float:
    """P(random bot outscores random human), score ties counted 1/2.

    Rank-based Mann-Whitney computation; the tests cross-check it against
    direct pairwise enumeration.
    """
    pairs = _paired(scores, labels)
    bots = sorted(s for s, lab in pairs if lab == BOT)
    humans = sorted(s for s, lab in pairs if lab == HUMAN)
    if not bots or not humans:
        raise ValueError("roc_auc needs both classes in the sample")

    # Sum of mid-ranks of bot scores in the pooled ordering.
    pooled = sorted(bots + humans)
    rank_sum = 0.0
    for s in bots:
        lo = bisect_left(pooled, s)
        hi = bisect_right(pooled, s)
        rank_sum += (lo + 1 + hi) / 2
    n_b, n_h = len(bots), len(humans)
    u = rank_sum - n_b * (n_b + 1) / 2
    return u / (n_b * n_h)


def select_threshold(
    curve: Sequence[tuple[float, float, float]], policy: ThresholdPolicy
) -> float:
    """Pick a threshold from a (threshold, precision, recall) curve.

    max_f1 breaks ties toward the lower threshold; an unachievable floor
    raises :class:`PolicyError` naming the best attainable value.
    """
    if not curve:
        raise ValueError("curve is empty")
    if policy.objective == "fixed":
        return float(policy.value)

    if policy.objective == "max_f1":
        best_t, best_f1 = None, -1.0
        for t, p, r in curve:
            f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
            if f1 > best_f1 + 1e-15 or (abs(f1 - best_f1) <= 1e-15 and t < best_t):
                best_t, best_f1 = t, f1
        return best_t

    if policy.objective == "precision_floor":
        eligible = [t for t, p, _ in curve if p >= policy.value]
        if not eligible:
            best = max(p for _, p, _ in curve)
            raise PolicyError(
                f"no threshold reaches precision {policy.value}; best attainable "
                f"is {best:.4f}"
            )
        return min(eligible)

    eligible = [t for t, _, r in curve if r >= policy.value]
    if not eligible:
        best = max(r for _, _, r in curve)
        raise PolicyError(
            f"no threshold reaches recall {policy.value}; best attainable "
            f"is {best:.4f}"
        )
    return max(eligible)


@dataclass(frozen=True)
class ScoreDensity:
    """Histogram of scores over [0,1] with threshold marker positions."""

    bin_count: int
    counts: tuple[int, ...]
    thresholds: tuple[float, ...]

    @property
    def bin_width(self) -> float:
        return 1.0 / self.bin_count


def score_density(
    scores: Mapping[str, float],
    thresholds: Sequence[float] = (),
    bins: int = 100,
) -> ScoreDensity:
    """Fixed-width histogram of scores; 1.0 lands in the top bin."""
    if not scores:
        raise ValueError("no scores to bin")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts = [0] * bins
    for s in scores.values():
        counts[min(int(s * bins), bins - 1)] += 1
    return ScoreDensity(
        bin_count=bins, counts=tuple(counts), thresholds=tuple(thresholds)
    )


@dataclass(frozen=True)
class CreationDateBin:
    """One day of account creations; proportion is None with no scored members."""

    day: date
    count: int
    bot_proportion: float | None


def creation_date_histogram(
    profiles: Sequence[AccountProfile],
    scores: Mapping[str, float],
    t: float,
) -> list[CreationDateBin]:
    """Daily account-creation counts colored by bot proportion.

    Every profile counts toward its day; the proportion's denominator is
    only the scored profiles of that day (score >= t in the numerator).
    """
    by_day: dict[date, list[str]] = defaultdict(list)
    for p in profiles:
        by_day[p.created_at.date()].append(p.account_id)
    out = []
    for day in sorted(by_day):
        members = by_day[day]
        scored = [scores[a] for a in members if a in scores]
        proportion = None
        if scored:
            proportion = sum(1 for s in scored if s >= t) / len(scored)
        out.append(CreationDateBin(day=day, count=len(members), bot_proportion=proportion))
    return out


def filter_count(
    profiles: Sequence[AccountProfile],
    scores: Mapping[str, float],
    since: date | datetime,
    t: float,
) -> int:
    """Accounts created on/after ``since`` with score strictly above t."""
    count = 0
    for p in profiles:
        created = p.created_at if isinstance(since, datetime) else p.created_at.date()
        if created >= since and scores.get(p.account_id, -1.0) > t:
            count += 1
    return count


def load_score_table(
    path: str | Path,
    detector_name: str | None = None,
    default_threshold: float = 0.5,
) -> BotScoreTable:
    """CSV ``account_id,score``; an optional header row is skipped."""
    path = Path(path)
    scores: dict[str, float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "account_id":
                continue
            scores[row[0]] = float(row[1])
    return BotScoreTable(
        detector_name=detector_name or path.stem,
        scores=scores,
        default_threshold=default_threshold,
    )


def load_labeled_sample(path: str | Path) -> LabeledSample:
    """CSV ``account_id,label`` with label bot|human; header row optional."""
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "account_id":
                continue
            entries.append((row[0], row[1].strip().lower()))
    return LabeledSample(entries=tuple(entries))


def write_metrics_report(row: MetricsRow, path: str | Path, detector: str = "") -> None:
    lines = []
    if detector:
        lines.append(f"detector={detector}")
    lines += [
        f"threshold={row.threshold}",
        f"f1={row.f1:.6f}",
        f"accuracy={row.accuracy:.6f}",
        f"precision={row.precision:.6f}",
        f"recall={row.recall:.6f}",
        f"roc_auc={row.roc_auc:.6f}",
    ]
    if row.degenerate:
        lines.append("degenerate=" + ",".join(row.degenerate))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_curve_csv(curve: Sequence[tuple[float, float, float]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "precision", "recall"])
        for t, p, r in curve:
            writer.writerow([f"{t:.12g}", f"{p:.12g}", f"{r:.12g}"])
