"""Account- and content-level characterization of a tweet corpus.

Covers the descriptive analyses that sit on top of ingestion: hashtag
marketshare over time, language/domain tallies, URL bias and factuality
lookup against a user-supplied dictionary, abusive-language matching
against a lexicon, flag-emoji combinations in profile descriptions, and
state-media amplification. Everything here is a pure fold over immutable
records, so results do not depend on shard order.
"""
from __future__ import annotations

import csv
import re
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .ingest import AccountProfile, TweetRecord, extract_domain

__all__ = [
    "BiasDictionary",
    "AbusiveLexicon",
    "StateMediaDirectory",
    "FlagProfile",
    "MarketshareSeries",
    "CategoryStat",
    "BiasReport",
    "AbusiveReport",
    "FlagComboStat",
    "FlagReport",
    "StateMediaStat",
    "hashtag_marketshare",
    "tally",
    "bias_distribution",
    "abusive_series",
    "extract_flags",
    "flag_analysis",
    "state_media_amplification",
    "load_bias_dictionary",
    "load_abusive_lexicon",
    "load_state_media_directory",
]

BIAS_CATEGORIES = (
    "far-left",
    "left",
    "center-left",
    "center",
    "center-right",
    "right",
    "far-right",
    "fake",
    "satire",
    "conspiracy",
)
FACTUAL_CATEGORIES = ("very-low", "low", "mixed", "high", "very-high")

_WORD = re.compile(r"\w+", re.UNICODE)
_RI_BASE = 0x1F1E6  # regional indicator 'A'


@dataclass(frozen=True)
class BiasDictionary:
    """domain -> (bias, factual) lookup; domains bare and lowercased."""

    entries: Mapping[str, tuple[str, str]]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("bias dictionary is empty")
        for domain, (bias, factual) in self.entries.items():
            if domain != domain.lower() or "/" in domain or ":" in domain:
                raise ValueError(f"domain {domain!r} must be bare and lowercased")
            if bias not in BIAS_CATEGORIES:
                raise ValueError(f"unknown bias category {bias!r} for {domain!r}")
            if factual not in FACTUAL_CATEGORIES:
                raise ValueError(f"unknown factual category {factual!r} for {domain!r}")


@dataclass(frozen=True)
class AbusiveLexicon:
    """Lowercased abuse terms; a term may be restricted to one language."""

    universal: frozenset[str]
    by_lang: Mapping[str, frozenset[str]]

    def __post_init__(self) -> None:
        all_terms = set(self.universal)
        for terms in self.by_lang.values():
            all_terms |= terms
        if not all_terms:
            raise ValueError("abusive lexicon is empty")
        for term in all_terms:
            if not term or any(ch.isspace() for ch in term):
                raise ValueError(f"bad lexicon term {term!r}")
            if term != term.lower():
                raise ValueError(f"lexicon term {term!r} must be lowercased")

    def terms_for(self, lang: str) -> frozenset[str]:
        return self.universal | self.by_lang.get(lang, frozenset())


@dataclass(frozen=True)
class StateMediaDirectory:
    """screen_name -> country code; names matched case-insensitively."""

    entries: Mapping[str, str]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("state-media directory is empty")
        lowered = [name.lower() for name in self.entries]
        if len(set(lowered)) != len(lowered):
            raise ValueError("directory screen names must be unique ignoring case")

    def country_of(self, screen_name: str) -> str | None:
        return self.lowered().get(screen_name.lower())

    def lowered(self) -> dict[str, str]:
        """Case-normalized view; callers doing bulk lookups should hold one."""
        return {name.lower(): c.upper() for name, c in self.entries.items()}


@dataclass(frozen=True)
class FlagProfile:
    """Flags found in one profile description, in reading order."""

    account_id: str
    flags: tuple[str, ...]

    @property
    def combination(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.flags)))


@dataclass(frozen=True)
class MarketshareSeries:
    """Per-day share of each top-k hashtag; shares sum to 1 within a day."""

    tags: tuple[str, ...]
    rows: tuple[tuple[date, Mapping[str, float]], ...]


def hashtag_marketshare(
    records: Sequence[TweetRecord],
    top_k: int,
    denominator: str = "top_k",
) -> MarketshareSeries:
    """Daily usage share of the overall top-k hashtags.

    The default denominator is the day's top-k usage (shares sum to 1);
    ``denominator="all"`` divides by the day's total hashtag usage instead.
    Days with a zero denominator are omitted. Top-k selection is by overall
    count, ties toward the lexicographically smaller tag.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if denominator not in ("top_k", "all"):
        raise ValueError("denominator must be 'top_k' or 'all'")

    totals: Counter[str] = Counter()
    per_day: dict[date, Counter[str]] = defaultdict(Counter)
    for r in records:
        if r.hashtags:
            totals.update(r.hashtags)
            per_day[r.created_at.date()].update(r.hashtags)

    tags = tuple(
        tag for tag, _ in sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    )
    tag_set = set(tags)

    rows = []
    for day in sorted(per_day):
        counts = per_day[day]
        if denominator == "top_k":
            denom = sum(counts[t] for t in tag_set)
        else:
            denom = sum(counts.values())
        if denom == 0:
            continue
        rows.append((day, {t: counts[t] / denom for t in tags}))
    return MarketshareSeries(tags=tags, rows=tuple(rows))


def tally(records: Sequence[TweetRecord], field: str) -> list[tuple[str, int]]:
    """Ranked count table for ``lang`` or ``domain``.

    Counts are per occurrence: a tweet with three URLs contributes three
    domain counts. URLs without a recognizable host are dropped. Ordering
    is count descending, ties by key ascending.
    """
    counts: Counter[str] = Counter()
    if field == "lang":
        counts.update(r.lang for r in records)
    elif field == "domain":
        for r in records:
            for url in r.urls:
                domain = extract_domain(url)
                if domain:
                    counts[domain] += 1
    else:
        raise ValueError(f"unknown tally field {field!r}")
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


@dataclass(frozen=True)
class CategoryStat:
    """Occurrences in one category plus the sharing accounts' bot proportion."""

    count: int
    bot_proportion: float | None


@dataclass(frozen=True)
class BiasReport:
    bias: Mapping[str, CategoryStat]
    factual: Mapping[str, CategoryStat]
    coverage_occurrences: float
    coverage_unique_domains: float


def _bot_proportion(
    accounts: Iterable[str], scores: Mapping[str, float], t: float
) -> float | None:
    scored = [scores[a] for a in set(accounts) if a in scores]
    if not scored:
        return None
    return sum(1 for s in scored if s >= t) / len(scored)


def bias_distribution(
    records: Sequence[TweetRecord],
    dictionary: BiasDictionary,
    scores: Mapping[str, float],
    t: float,
) -> BiasReport:
    """Bias/factuality distribution of shared URLs.

    Each URL occurrence with a host is looked up by bare domain; unmatched
    occurrences count only toward coverage denominators. Coverage is
    reported both per occurrence and per unique domain, since either
    reading of "share of domains found" is defensible.
    """
    bias_counts: Counter[str] = Counter()
    factual_counts: Counter[str] = Counter()
    bias_accounts: dict[str, set[str]] = defaultdict(set)
    factual_accounts: dict[str, set[str]] = defaultdict(set)
    total_occurrences = 0
    matched_occurrences = 0
    all_domains: set[str] = set()
    matched_domains: set[str] = set()

    for r in records:
        for url in r.urls:
            domain = extract_domain(url)
            if not domain:
                continue
            total_occurrences += 1
            all_domains.add(domain)
            entry = dictionary.entries.get(domain)
            if entry is None:
                continue
            matched_occurrences += 1
            matched_domains.add(domain)
            bias, factual = entry
            bias_counts[bias] += 1
            factual_counts[factual] += 1
            bias_accounts[bias].add(r.author_id)
            factual_accounts[factual].add(r.author_id)

    def build(counts: Counter[str], accounts: dict[str, set[str]]) -> dict[str, CategoryStat]:
        return {
            cat: CategoryStat(
                count=counts[cat],
                bot_proportion=_bot_proportion(accounts.get(cat, ()), scores, t),
            )
            for cat in counts
        }

    return BiasReport(
        bias=build(bias_counts, bias_accounts),
        factual=build(factual_counts, factual_accounts),
        coverage_occurrences=(
            matched_occurrences / total_occurrences if total_occurrences else 0.0
        ),
        coverage_unique_domains=(
            len(matched_domains) / len(all_domains) if all_domains else 0.0
        ),
    )


@dataclass(frozen=True)
class AbusiveReport:
    """Daily abusive-tweet counts and account-level bot shares."""

    daily: tuple[tuple[date, int], ...]
    abusive_bot_share: float | None
    nonabusive_bot_share: float | None
    abusive_tweets: int
    abusive_accounts: int


def is_abusive(record: TweetRecord, lexicon: AbusiveLexicon) -> bool:
    """Token match (not substring) of the case-folded text against the lexicon."""
    terms = lexicon.terms_for(record.lang)
    return any(token in terms for token in _WORD.findall(record.text.casefold()))


def abusive_series(
    records: Sequence[TweetRecord],
    lexicon: AbusiveLexicon,
    scores: Mapping[str, float],
    t: float,
) -> AbusiveReport:
    """Daily abusive counts plus bot shares of abusive vs other accounts."""
    daily: Counter[date] = Counter()
    abusive_accounts: set[str] = set()
    all_accounts: set[str] = set()
    abusive_tweets = 0
    for r in records:
        all_accounts.add(r.author_id)
        if is_abusive(r, lexicon):
            daily[r.created_at.date()] += 1
            abusive_accounts.add(r.author_id)
            abusive_tweets += 1
    return AbusiveReport(
        daily=tuple(sorted(daily.items())),
        abusive_bot_share=_bot_proportion(abusive_accounts, scores, t),
        nonabusive_bot_share=_bot_proportion(
            all_accounts - abusive_accounts, scores, t
        ),
        abusive_tweets=abusive_tweets,
        abusive_accounts=len(abusive_accounts),
    )


def extract_flags(text: str) -> tuple[str, ...]:
    """Country codes from flag emoji, paired greedily left to right.

    A flag is two adjacent regional-indicator code points; a lone indicator
    is dropped, matching how renderers display them.
    """
    flags = []
    i = 0
    chars = text
    while i < len(chars):
        first = ord(chars[i])
        if _RI_BASE <= first <= _RI_BASE + 25:
            if i + 1 < len(chars) and _RI_BASE <= ord(chars[i + 1]) <= _RI_BASE + 25:
                flags.append(
                    chr(first - _RI_BASE + ord("A"))
                    + chr(ord(chars[i + 1]) - _RI_BASE + ord("A"))
                )
                i += 2
                continue
        i += 1
    return tuple(flags)


@dataclass(frozen=True)
class FlagComboStat:
    frequency: int
    bot_proportion: float | None


@dataclass(frozen=True)
class FlagReport:
    """Flag-combination distributions bucketed by distinct-flag count.

    Bucket keys are "1".."5" and "6+"; within a bucket, combinations map
    their sorted distinct country tuple to frequency and bot proportion.
    """

    buckets: Mapping[str, Mapping[tuple[str, ...], FlagComboStat]]
    profiles_with_flags: int


def _bucket_key(distinct_flags: int) -> str:
    return str(distinct_flags) if distinct_flags < 6 else "6+"


def flag_analysis(
    profiles: Sequence[AccountProfile],
    scores: Mapping[str, float],
    t: float,
) -> FlagReport:
    """Distribution of flag combinations in profile descriptions."""
    combo_accounts: dict[str, dict[tuple[str, ...], set[str]]] = defaultdict(
        lambda: defaultdict(set)
    )
    with_flags = 0
    for p in profiles:
        flags = extract_flags(p.description)
        if not flags:
            continue
        with_flags += 1
        combination = tuple(sorted(set(flags)))
        combo_accounts[_bucket_key(len(combination))][combination].add(p.account_id)

    buckets = {
        bucket: {
            combo: FlagComboStat(
                frequency=len(accounts),
                bot_proportion=_bot_proportion(accounts, scores, t),
            )
            for combo, accounts in combos.items()
        }
        for bucket, combos in combo_accounts.items()
    }
    return FlagReport(buckets=buckets, profiles_with_flags=with_flags)


@dataclass(frozen=True)
class StateMediaStat:
    original_count: int
    amplification_count: int
    bot_proportion: float | None


def state_media_amplification(
    records: Sequence[TweetRecord],
    directory: StateMediaDirectory,
    scores: Mapping[str, float],
    t: float,
) -> dict[str, StateMediaStat]:
    """Per-country state-media activity and its amplification.

    A record authored by a directory account is an original for that
    account's country. A record by anyone else amplifies each distinct
    directory account it mentions (retweets carry the source account as a
    mention, so they are covered). The bot proportion is over the scored
    amplifier accounts of each country.
    """
    lowered = directory.lowered()
    originals: Counter[str] = Counter()
    amplifications: Counter[str] = Counter()
    amplifiers: dict[str, set[str]] = defaultdict(set)

    for r in records:
        author_country = lowered.get(r.screen_name.lower())
        if author_country is not None:
            originals[author_country] += 1
            continue
        referenced = {
            lowered[name.lower()]
            for _, name in r.mentions
            if name.lower() in lowered
        }
        for country in referenced:
            amplifications[country] += 1
            amplifiers[country].add(r.author_id)

    return {
        country: StateMediaStat(
            original_count=originals[country],
            amplification_count=amplifications[country],
            bot_proportion=_bot_proportion(amplifiers[country], scores, t),
        )
        for country in sorted(originals.keys() | amplifications.keys())
    }


def write_marketshare_csv(series: MarketshareSeries, path: str | Path) -> None:
    """Long-form ``day,tag,share`` rows, one per day and tracked tag."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "tag", "share"])
        for day, shares in series.rows:
            for tag in series.tags:
                writer.writerow([day.isoformat(), tag, f"{shares[tag]:.12g}"])


def load_bias_dictionary(path: str | Path) -> BiasDictionary:
    """CSV ``domain,bias,factual``; header row optional."""
    entries: dict[str, tuple[str, str]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "domain":
                continue
            entries[row[0].strip().lower()] = (
                row[1].strip().lower(),
                row[2].strip().lower(),
            )
    return BiasDictionary(entries=entries)


def load_abusive_lexicon(path: str | Path) -> AbusiveLexicon:
    """One term per line, lowercase, optional ``lang:`` prefix; '#' comments."""
    universal: set[str] = set()
    by_lang: dict[str, set[str]] = defaultdict(set)
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        term = line.strip().lower()
        if not term or term.startswith("#"):
            continue
        if ":" in term:
            lang, word = term.split(":", 1)
            by_lang[lang].add(word)
        else:
            universal.add(term)
    return AbusiveLexicon(
        universal=frozenset(universal),
        by_lang={lang: frozenset(terms) for lang, terms in by_lang.items()},
    )


def load_state_media_directory(path: str | Path) -> StateMediaDirectory:
    """CSV ``screen_name,country``; header row optional."""
    entries: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "screen_name":
                continue
            entries[row[0].strip()] = row[1].strip().upper()
    return StateMediaDirectory(entries=entries)
