"""Stream ingestion: parse newline-delimited tweet JSON into typed records.

Accepts gzip-compressed or plain files of one JSON object per line (the
classic streaming format, including its keep-alive blank lines and
delete/limit notices). Malformed lines never abort a batch; they are
counted by skip reason.
"""
from __future__ import annotations

import csv
import gzip
import io
import json
import re
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from pathlib import Path
from urllib.parse import urlsplit

__all__ = [
    "TweetRecord",
    "TweetClass",
    "AccountProfile",
    "Skip",
    "StreamStats",
    "StreamAccumulator",
    "Corpus",
    "parse_tweet_record",
    "parse_account_profile",
    "classify_tweet",
    "keyword_filter",
    "load_keywords",
    "load_country_annotations",
    "extract_domain",
    "open_stream_file",
    "iter_lines",
    "load_corpus",
    "stream_summary",
    "partition_by_day",
    "write_stats_report",
    "write_daily_csv",
]

_MONTHS = {
    "Jan": 1, "Feb": 2, "Mar": 3, "Apr": 4, "May": 5, "Jun": 6,
    "Jul": 7, "Aug": 8, "Sep": 9, "Oct": 10, "Nov": 11, "Dec": 12,
}


class TweetClass(Enum):
    ORIGINAL = "original"
    RETWEET = "retweet"
    REPLY = "reply"
    QUOTE = "quote"


@dataclass(frozen=True, slots=True)
class TweetRecord:
    """One parsed stream item.

    ``retweeted_author_id`` (and the quoted/reply analogues) come from the
    embedded referenced object on the raw line; conversation graphs need the
    account-level endpoint, not just the tweet id.
    """

    tweet_id: str
    author_id: str
    screen_name: str
    created_at: datetime
    text: str
    lang: str = "und"
    hashtags: tuple[str, ...] = ()
    mentions: tuple[tuple[str, str], ...] = ()  # (account_id, screen_name)
    urls: tuple[str, ...] = ()
    media_count: int = 0
    retweeted_id: str | None = None
    quoted_id: str | None = None
    reply_to_id: str | None = None
    retweeted_author_id: str | None = None
    quoted_author_id: str | None = None
    reply_to_author_id: str | None = None
    verified: bool = False


@dataclass(frozen=True, slots=True)
class AccountProfile:
    account_id: str
    screen_name: str
    created_at: datetime
    description: str = ""
    followers: int = 0
    friends: int = 0
    verified: bool = False
    country: str | None = None


@dataclass(frozen=True, slots=True)
class Skip:
    """Marker for a stream line that did not yield a record."""

    reason: str


def _parse_created_at(value: str) -> datetime:
    """Parse the classic 'Wed Apr 15 09:21:47 +0000 2020' form or ISO 8601."""
    parts = value.split()
    if len(parts) == 6 and parts[1] in _MONTHS:
        _, mon, day, clock, offset, year = parts
        hh, mm, ss = clock.split(":")
        dt = datetime(
            int(year), _MONTHS[mon], int(day), int(hh), int(mm), int(ss),
            tzinfo=timezone.utc,
        )
        if offset not in ("+0000", "-0000"):
            sign = -1 if offset[0] == "-" else 1
            dt -= sign * timedelta(hours=int(offset[1:3]), minutes=int(offset[3:5]))
        return dt
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _id_of(obj: dict, key: str = "id") -> str | None:
    raw = obj.get(key + "_str") or obj.get(key)
    return None if raw is None else str(raw)


def _tweet_text(obj: dict) -> str | None:
    extended = obj.get("extended_tweet")
    if isinstance(extended, dict) and extended.get("full_text"):
        return extended["full_text"]
    return obj.get("full_text") or obj.get("text")


def _entities(obj: dict) -> dict:
    extended = obj.get("extended_tweet")
    if isinstance(extended, dict) and "entities" in extended:
        return extended["entities"] or {}
    return obj.get("entities") or {}


def parse_tweet_record(raw_line: str) -> TweetRecord | Skip:
    """Parse one stream line; return a ``Skip`` with a reason instead of raising.

    Non-tweet protocol lines (keep-alives, delete/limit notices) are skipped,
    as is anything structurally broken. A batch is never aborted by one line.
    """
    line = raw_line.strip()
    if not line:
        return Skip("empty")
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return Skip("invalid_json")
    if not isinstance(obj, dict):
        return Skip("not_a_tweet")
    user = obj.get("user")
    if not isinstance(user, dict):
        return Skip("not_a_tweet")

    tweet_id = _id_of(obj)
    author_id = _id_of(user)
    text = _tweet_text(obj)
    if tweet_id is None or author_id is None or text is None:
        return Skip("missing_field")
    try:
        created_at = _parse_created_at(obj["created_at"])
    except (KeyError, TypeError, ValueError, IndexError):
        return Skip("bad_created_at")

    ent = _entities(obj)
    hashtags = tuple(
        h["text"].lower().lstrip("#")
        for h in ent.get("hashtags") or []
        if isinstance(h, dict) and h.get("text")
    )
    mentions = tuple(
        (str(m.get("id_str") or m.get("id")), m.get("screen_name") or "")
        for m in ent.get("user_mentions") or []
        if isinstance(m, dict) and (m.get("id_str") or m.get("id")) is not None
    )
    urls = tuple(
        u.get("expanded_url") or u.get("url")
        for u in ent.get("urls") or []
        if isinstance(u, dict) and (u.get("expanded_url") or u.get("url"))
    )
    media = (obj.get("extended_entities") or {}).get("media") or ent.get("media") or []

    retweeted = obj.get("retweeted_status")
    quoted = obj.get("quoted_status")
    retweeted_id = _id_of(retweeted) if isinstance(retweeted, dict) else None
    quoted_id = obj.get("quoted_status_id_str")
    quoted_id = str(quoted_id) if quoted_id else (_id_of(quoted) if isinstance(quoted, dict) else None)
    reply_to_id = obj.get("in_reply_to_status_id_str") or obj.get("in_reply_to_status_id")

    def _author_of(ref) -> str | None:
        if isinstance(ref, dict) and isinstance(ref.get("user"), dict):
            return _id_of(ref["user"])
        return None

    reply_author = obj.get("in_reply_to_user_id_str") or obj.get("in_reply_to_user_id")
    return TweetRecord(
        tweet_id=tweet_id,
        author_id=author_id,
        screen_name=user.get("screen_name") or "",
        created_at=created_at,
        text=text,
        lang=obj.get("lang") or "und",
        hashtags=hashtags,
        mentions=mentions,
        urls=urls,
        media_count=len(media),
        retweeted_id=retweeted_id,
        quoted_id=quoted_id,
        reply_to_id=str(reply_to_id) if reply_to_id else None,
        retweeted_author_id=_author_of(retweeted),
        quoted_author_id=_author_of(quoted),
        reply_to_author_id=str(reply_author) if reply_author else None,
        verified=bool(user.get("verified")),
    )


def parse_account_profile(raw_line: str) -> AccountProfile | None:
    """Extract the author profile embedded in a stream line, if any."""
    line = raw_line.strip()
    if not line:
        return None
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return None
    if not isinstance(obj, dict):
        return None
    return _profile_from_user(obj.get("user"))


def _profile_from_user(user) -> AccountProfile | None:
    if not isinstance(user, dict):
        return None
    account_id = _id_of(user)
    if account_id is None:
        return None
    try:
        created_at = _parse_created_at(user["created_at"])
    except (KeyError, TypeError, ValueError, IndexError):
        return None
    return AccountProfile(
        account_id=account_id,
        screen_name=user.get("screen_name") or "",
        created_at=created_at,
        description=user.get("description") or "",
        followers=int(user.get("followers_count") or 0),
        friends=int(user.get("friends_count") or 0),
        verified=bool(user.get("verified")),
    )


def classify_tweet(r: TweetRecord) -> TweetClass:
    """Classify with precedence retweet > quote > reply > original.

    A record can carry several reference fields at once (a retweet of a
    quote inherits both); the precedence keeps the four classes an exact
    partition of any corpus.
    """
    if r.retweeted_id is not None:
        return TweetClass.RETWEET
    if r.quoted_id is not None:
        return TweetClass.QUOTE
    if r.reply_to_id is not None:
        return TweetClass.REPLY
    return TweetClass.ORIGINAL


def keyword_filter(r: TweetRecord, keywords: Sequence[str]) -> bool:
    """Case-folded substring match on text or any hashtag (track-filter style)."""
    if not keywords:
        raise ValueError("keyword list must be non-empty")
    text = r.text.casefold()
    for kw in keywords:
        if kw in text:
            return True
        for tag in r.hashtags:
            if kw in tag:
                return True
    return False


def load_keywords(path: str | Path) -> list[str]:
    """One term per line, lowercased; '#'-prefixed comment lines ignored."""
    terms = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        term = line.strip()
        if term and not term.startswith("#"):
            terms.append(term.lower())
    return terms


def load_country_annotations(path: str | Path) -> dict[str, str]:
    """CSV ``account_id,country`` of externally inferred country labels."""
    annotations: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "account_id":
                continue
            annotations[row[0]] = row[1].strip().upper()
    return annotations


_HOST_SHAPE = re.compile(r"^[a-z0-9-]+(\.[a-z0-9-]+)+$")


def extract_domain(url: str) -> str:
    """Normalize an expanded URL to its bare domain.

    Lowercased, scheme/path/port/userinfo stripped, leading ``www.`` stripped
    so host variants of one outlet merge. Returns "" when no dotted host can
    be found (urlsplit is permissive, so the shape check does the rejecting).
    """
    target = url.strip()
    if "//" not in target.split("?", 1)[0].split("#", 1)[0]:
        target = "//" + target
    try:
        host = (urlsplit(target).hostname or "").lower()
    except ValueError:
        return ""
    if host.startswith("www."):
        host = host[4:]
    return host if _HOST_SHAPE.match(host) else ""


def open_stream_file(path: str | Path) -> io.TextIOBase:
    """Open a stream file as text; gzip is detected by magic bytes."""
    path = Path(path)
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == b"\x1f\x8b":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, encoding="utf-8")


def iter_lines(paths: Iterable[str | Path]) -> Iterator[str]:
    for path in paths:
        with open_stream_file(path) as fh:
            yield from fh


@dataclass
class Corpus:
    """Everything one pass over the stream yields."""

    records: list[TweetRecord] = field(default_factory=list)
    profiles: dict[str, AccountProfile] = field(default_factory=dict)
    skips: Counter = field(default_factory=Counter)
    line_count: int = 0

    @property
    def parsed_count(self) -> int:
        return len(self.records)

    def annotate_countries(self, annotations: dict[str, str]) -> None:
        for account_id, country in annotations.items():
            profile = self.profiles.get(account_id)
            if profile is not None:
                self.profiles[account_id] = replace(profile, country=country)


def load_corpus(
    paths: Iterable[str | Path],
    keywords: Sequence[str] | None = None,
) -> Corpus:
    """Parse stream files into records plus last-seen author profiles.

    ``keywords``, when given, drops records failing :func:`keyword_filter`
    (counted under the ``filtered`` skip reason, separate from parse errors).
    """
    corpus = Corpus()
    for line in iter_lines(paths):
        corpus.line_count += 1
        parsed = parse_tweet_record(line)
        if isinstance(parsed, Skip):
            corpus.skips[parsed.reason] += 1
            continue
        if keywords is not None and not keyword_filter(parsed, keywords):
            corpus.skips["filtered"] += 1
            continue
        corpus.records.append(parsed)
        profile = parse_account_profile(line)
        if profile is not None:
            corpus.profiles[profile.account_id] = profile
    return corpus


@dataclass(frozen=True)
class StreamStats:
    total_tweets: int
    unique_users: int
    original_tweets: int
    retweet_tweets: int
    reply_tweets: int
    quote_tweets: int
    unique_hashtags: int
    image_count: int
    url_count: int
    unique_domains: int
    verified_tweets: int
    daily_counts: dict[date, int]
    daily_cap: int | None = None
    capped_days: tuple[date, ...] = ()


class StreamAccumulator:
    """Commutative-monoid aggregation so shards can merge in any order."""

    def __init__(self) -> None:
        self.total = 0
        self.class_counts = Counter()
        self.users: set[str] = set()
        self.hashtags: set[str] = set()
        self.domains: set[str] = set()
        self.images = 0
        self.urls = 0
        self.verified = 0
        self.days = Counter()

    def update(self, r: TweetRecord) -> None:
        self.total += 1
        self.class_counts[classify_tweet(r)] += 1
        self.users.add(r.author_id)
        self.hashtags.update(r.hashtags)
        self.images += r.media_count
        self.urls += len(r.urls)
        for url in r.urls:
            domain = extract_domain(url)
            if domain:
                self.domains.add(domain)
        if r.verified:
            self.verified += 1
        self.days[r.created_at.date()] += 1

    def merge(self, other: "StreamAccumulator") -> "StreamAccumulator":
        self.total += other.total
        self.class_counts += other.class_counts
        self.users |= other.users
        self.hashtags |= other.hashtags
        self.domains |= other.domains
        self.images += other.images
        self.urls += other.urls
        self.verified += other.verified
        self.days += other.days
        return self

    def finalize(self, daily_cap: int | None = None) -> StreamStats:
        daily = _fill_days(self.days)
        capped = tuple(d for d, c in daily.items() if daily_cap is not None and c > daily_cap)
        return StreamStats(
            total_tweets=self.total,
            unique_users=len(self.users),
            original_tweets=self.class_counts[TweetClass.ORIGINAL],
            retweet_tweets=self.class_counts[TweetClass.RETWEET],
            reply_tweets=self.class_counts[TweetClass.REPLY],
            quote_tweets=self.class_counts[TweetClass.QUOTE],
            unique_hashtags=len(self.hashtags),
            image_count=self.images,
            url_count=self.urls,
            unique_domains=len(self.domains),
            verified_tweets=self.verified,
            daily_counts=daily,
            daily_cap=daily_cap,
            capped_days=capped,
        )


def stream_summary(records: Iterable[TweetRecord], daily_cap: int | None = None) -> StreamStats:
    """Table-shaped corpus statistics plus UTC daily counts.

    ``daily_cap`` flags days whose count exceeds a platform rate cap
    (a capped stream is a sample, not the conversation).
    """
    acc = StreamAccumulator()
    for r in records:
        acc.update(r)
    return acc.finalize(daily_cap)


def _fill_days(days: Counter) -> dict[date, int]:
    if not days:
        return {}
    lo, hi = min(days), max(days)
    out: dict[date, int] = {}
    d = lo
    while d <= hi:
        out[d] = days.get(d, 0)
        d += timedelta(days=1)
    return out


def partition_by_day(records: Iterable[TweetRecord]) -> dict[date, int]:
    """UTC day buckets; zero-count days inside the corpus span are present."""
    days = Counter(r.created_at.date() for r in records)
    return _fill_days(days)


_REPORT_FIELDS = (
    ("total_tweets", "Total Tweets"),
    ("unique_users", "Total Unique Users"),
    ("original_tweets", "Original Tweets"),
    ("retweet_tweets", "Retweet Tweets"),
    ("reply_tweets", "Reply Tweets"),
    ("quote_tweets", "Quote Tweets"),
    ("unique_hashtags", "Hashtags"),
    ("image_count", "Images"),
    ("url_count", "URLs"),
    ("unique_domains", "Unique Domains"),
    ("verified_tweets", "Tweets from Verified Accounts"),
)


def write_stats_report(stats: StreamStats, path: str | Path) -> None:
    """Key-value report, one ``label=value`` line per statistic."""
    lines = [f"{label}={getattr(stats, field_name)}" for field_name, label in _REPORT_FIELDS]
    if stats.daily_cap is not None:
        lines.append(f"Daily Cap={stats.daily_cap}")
        lines.append(
            "Days Exceeding Cap=" + ";".join(d.isoformat() for d in stats.capped_days)
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_daily_csv(daily: dict[date, int], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "count"])
        for day in sorted(daily):
            writer.writerow([day.isoformat(), daily[day]])
