"""Deterministic synthetic stream generator with known ground truth.

Real stream corpora cannot ship with the code, so the end-to-end paths run
against generated ones. The generator plants the structure every module
looks for (tweet classes, mention communities, topical hashtag pools,
bimodal bot scores, state-media amplifiers, abusive terms, flag emoji,
account statuses) and records exact tallies alongside, so tests can compare
pipeline output to the plant instead of to itself. A fixed seed reproduces
the corpus byte for byte.
"""
from __future__ import annotations

import gzip
import json
import random
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

__all__ = [
    "SynthConfig",
    "SynthCorpus",
    "generate",
    "write_corpus",
    "planted_statuses",
]

_WEEKDAYS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
_MONTHS = (
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
)

# Lexicon placeholders, deliberately nonsense words rather than real slurs.
ABUSE_TERMS = ("grubworm", "sludgebrain", "dungwit")
ABUSE_TERMS_TAGGED = (("es", "bazofia"),)

TOPIC_POOLS = (
    ("outbreak", "quarantine", "stayhome", "lockdown", "flatten"),
    ("vaccine", "cure", "treatment", "research", "trials"),
    ("economy", "stocks", "jobs", "relief", "stimulus"),
    ("hoax", "coverup", "wakeup", "truthers", "plandemic"),
    ("prayers", "hope", "community", "heroes", "gratitude"),
)

BIAS_ENTRIES = (
    ("truthbeacon.net", "fake", "very-low"),
    ("dailyledger.com", "right", "mixed"),
    ("centerwire.org", "center", "high"),
    ("peoplesvoice.info", "far-left", "low"),
    ("satirerag.com", "satire", "mixed"),
)
PLAIN_DOMAINS = ("example.com", "videohub.tv", "blogspace.io", "newsy.co")

STATE_OUTLETS = (
    ("GlobalWireRU", "RU"),
    ("RedStarNewsCN", "CN"),
    ("SunrisePressIR", "IR"),
)

FLAG_CODES = ("US", "CA", "GB", "FR", "DE", "RU", "CN", "IR", "NG", "IN")

LANGS = ("en", "en", "en", "en", "en", "es", "pt", "fr", "und")


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 11
    n_accounts: int = 400
    n_tweets: int = 5000
    start_day: date = date(2020, 3, 1)
    days: int = 30
    bot_rate: float = 0.3
    retweet_rate: float = 0.45
    quote_rate: float = 0.12
    reply_rate: float = 0.13
    hashtag_rate: float = 0.75
    url_rate: float = 0.25
    media_rate: float = 0.08
    abusive_rate: float = 0.04
    amplifier_rate: float = 0.05
    flags_rate: float = 0.15
    verified_rate: float = 0.04
    labeled_accounts: int = 120
    noise_every: int = 400
    missing_rate: float = 0.07
    suspended_rate: float = 0.01


@dataclass
class SynthCorpus:
    """Raw stream lines plus every side table the pipeline can consume."""

    lines: list[str]
    scores: dict[str, float]
    labels: list[tuple[str, str]]
    statuses: dict[str, str]
    truth: dict = field(default_factory=dict)


def _classic_timestamp(dt: datetime) -> str:
    return (
        f"{_WEEKDAYS[dt.weekday()]} {_MONTHS[dt.month - 1]} {dt.day:02d} "
        f"{dt.hour:02d}:{dt.minute:02d}:{dt.second:02d} +0000 {dt.year}"
    )


@dataclass
class _Account:
    index: int
    account_id: str
    screen_name: str
    created_at: datetime
    description: str
    is_bot: bool
    group: int
    verified: bool
    outlet_country: str | None = None
    amplifies: str | None = None

    def user_object(self) -> dict:
        return {
            "id_str": self.account_id,
            "screen_name": self.screen_name,
            "created_at": _classic_timestamp(self.created_at),
            "description": self.description,
            "followers_count": 100 + self.index * 3,
            "friends_count": 50 + self.index,
            "verified": self.verified,
        }


def _make_accounts(cfg: SynthConfig, rng: random.Random) -> list[_Account]:
    accounts = []
    epoch = datetime(2009, 1, 1, tzinfo=timezone.utc)
    recent = datetime(2020, 2, 1, tzinfo=timezone.utc)
    for i in range(cfg.n_accounts):
        is_bot = rng.random() < cfg.bot_rate
        # Bots skew toward recent creation so the creation series has signal.
        if is_bot and rng.random() < 0.7:
            created = recent + timedelta(seconds=rng.randrange(45 * 86400))
        else:
            created = epoch + timedelta(seconds=rng.randrange(11 * 365 * 86400))
        description = f"account number {i}"
        if rng.random() < cfg.flags_rate:
            n_flags = rng.choice((1, 1, 1, 2, 2, 3, 4, 5, 6, 7))
            flags = "".join(_flag_emoji(rng.choice(FLAG_CODES)) for _ in range(n_flags))
            description += " " + flags
        accounts.append(
            _Account(
                index=i,
                account_id=str(1_000_000_000 + i),
                screen_name=f"user_{i}",
                created_at=created,
                description=description,
                is_bot=is_bot,
                group=i % len(TOPIC_POOLS),
                verified=rng.random() < cfg.verified_rate,
            )
        )
    for j, (outlet_name, country) in enumerate(STATE_OUTLETS):
        accounts.append(
            _Account(
                index=cfg.n_accounts + j,
                account_id=str(2_000_000_000 + j),
                screen_name=outlet_name,
                created_at=epoch,
                description=f"official wire service {country}",
                is_bot=False,
                group=j % len(TOPIC_POOLS),
                verified=True,
                outlet_country=country,
            )
        )
    # A slice of ordinary accounts amplify one outlet apiece; bots dominate it.
    ordinary = accounts[: cfg.n_accounts]
    for acct in ordinary:
        wants = cfg.amplifier_rate * (3.0 if acct.is_bot else 0.6)
        if rng.random() < wants:
            acct.amplifies = rng.choice(STATE_OUTLETS)[0]
    return accounts


def _flag_emoji(code: str) -> str:
    return "".join(chr(0x1F1E6 + ord(ch) - ord("A")) for ch in code)


def planted_statuses(
    ids: list[str], missing_count: int, suspended_count: int, seed: int
) -> dict[str, str]:
    """Exact-count status plant: missing ids split suspended/deleted."""
    if suspended_count > missing_count or missing_count > len(ids):
        raise ValueError("plant counts exceed the population")
    rng = random.Random(seed)
    missing = rng.sample(sorted(ids), missing_count)
    suspended = set(missing[:suspended_count])
    statuses = dict.fromkeys(ids, "exists")
    for account in missing:
        statuses[account] = "suspended" if account in suspended else "deleted"
    return statuses


def generate(cfg: SynthConfig) -> SynthCorpus:
    rng = random.Random(cfg.seed)
    accounts = _make_accounts(cfg, rng)
    ordinary = accounts[: cfg.n_accounts]
    outlets = accounts[cfg.n_accounts :]
    by_group: dict[int, list[_Account]] = {}
    for acct in ordinary:
        by_group.setdefault(acct.group, []).append(acct)

    day_weights = [1.0 + 2.0 * d / max(1, cfg.days - 1) for d in range(cfg.days)]
    total_weight = sum(day_weights)

    lines: list[str] = []
    originals_pool: list[dict] = []  # minimal reference info for rt/quote/reply
    url_domains = tuple(e[0] for e in BIAS_ENTRIES) + PLAIN_DOMAINS
    class_counts = {"original": 0, "retweet": 0, "reply": 0, "quote": 0}
    state_original = 0
    state_amplifications = 0
    abusive_planted = 0
    tweet_serial = 0

    def next_id() -> str:
        nonlocal tweet_serial
        tweet_serial += 1
        return str(900_000_000_000 + tweet_serial)

    def pick_day() -> date:
        u = rng.random() * total_weight
        acc = 0.0
        for d, w in enumerate(day_weights):
            acc += w
            if u <= acc:
                return cfg.start_day + timedelta(days=d)
        return cfg.start_day + timedelta(days=cfg.days - 1)

    def base_payload(author: _Account, when: datetime, text: str, lang: str) -> dict:
        return {
            "id_str": next_id(),
            "created_at": _classic_timestamp(when),
            "text": text,
            "lang": lang,
            "user": author.user_object(),
            "entities": {"hashtags": [], "user_mentions": [], "urls": []},
        }

    def compose_text(author: _Account, abusive: bool) -> tuple[str, list[str]]:
        nonlocal abusive_planted
        pool = TOPIC_POOLS[author.group]
        words = [rng.choice(pool), "covid", rng.choice(pool)]
        if abusive:
            words.insert(1, rng.choice(ABUSE_TERMS))
            abusive_planted += 1
        tags = []
        if rng.random() < cfg.hashtag_rate:
            tags = [rng.choice(pool) for _ in range(rng.choice((1, 1, 2, 3)))]
        return " ".join(words), tags

    for _ in range(cfg.n_tweets):
        day = pick_day()
        when = datetime(
            day.year, day.month, day.day,
            rng.randrange(24), rng.randrange(60), rng.randrange(60),
            tzinfo=timezone.utc,
        )
        author = rng.choice(ordinary)
        lang = rng.choice(LANGS)
        roll = rng.random()

        if author.amplifies and rng.random() < 0.5:
            # Amplifier behavior: retweet or mention a state outlet.
            outlet = next(o for o in outlets if o.screen_name == author.amplifies)
            state_amplifications += 1
            if rng.random() < 0.7 and originals_pool:
                payload = _retweet_payload(rng, author, outlet, when, lang, base_payload)
                class_counts["retweet"] += 1
            else:
                text, tags = compose_text(author, rng.random() < cfg.abusive_rate)
                payload = base_payload(author, when, f"@{outlet.screen_name} {text}", lang)
                payload["entities"]["user_mentions"].append(
                    {"id_str": outlet.account_id, "screen_name": outlet.screen_name}
                )
                _attach_tags(payload, tags)
                class_counts["original"] += 1
                originals_pool.append(_ref_of(payload))
        elif roll < cfg.retweet_rate and originals_pool:
            source = _pick_source(rng, originals_pool, by_group.get(author.group, ()))
            payload = _retweet_of(author, source, when, lang, base_payload)
            class_counts["retweet"] += 1
        elif roll < cfg.retweet_rate + cfg.quote_rate and originals_pool:
            source = _pick_source(rng, originals_pool, by_group.get(author.group, ()))
            text, tags = compose_text(author, rng.random() < cfg.abusive_rate)
            payload = base_payload(author, when, text, lang)
            payload["quoted_status_id_str"] = source["id_str"]
            payload["quoted_status"] = {
                "id_str": source["id_str"],
                "text": source["text"],
                "user": source["user"],
            }
            _attach_tags(payload, tags)
            class_counts["quote"] += 1
        elif roll < cfg.retweet_rate + cfg.quote_rate + cfg.reply_rate and originals_pool:
            source = _pick_source(rng, originals_pool, by_group.get(author.group, ()))
            text, tags = compose_text(author, rng.random() < cfg.abusive_rate)
            payload = base_payload(author, when, f"@{source['user']['screen_name']} {text}", lang)
            payload["in_reply_to_status_id_str"] = source["id_str"]
            payload["in_reply_to_user_id_str"] = source["user"]["id_str"]
            payload["entities"]["user_mentions"].append(
                {
                    "id_str": source["user"]["id_str"],
                    "screen_name": source["user"]["screen_name"],
                }
            )
            _attach_tags(payload, tags)
            class_counts["reply"] += 1
        else:
            text, tags = compose_text(author, rng.random() < cfg.abusive_rate)
            payload = base_payload(author, when, text, lang)
            _attach_tags(payload, tags)
            if rng.random() < 0.3:
                peer = rng.choice(by_group.get(author.group) or ordinary)
                if peer.account_id != author.account_id:
                    payload["text"] += f" @{peer.screen_name}"
                    payload["entities"]["user_mentions"].append(
                        {"id_str": peer.account_id, "screen_name": peer.screen_name}
                    )
            class_counts["original"] += 1
            originals_pool.append(_ref_of(payload))

        if rng.random() < cfg.url_rate:
            domain = rng.choice(url_domains)
            payload["entities"]["urls"].append(
                {"expanded_url": f"https://{domain}/p/{tweet_serial}"}
            )
        if rng.random() < cfg.media_rate:
            payload["extended_entities"] = {"media": [{"type": "photo"}]}

        lines.append(json.dumps(payload, separators=(",", ":"), sort_keys=True))
        if cfg.noise_every and len(lines) % cfg.noise_every == 0:
            lines.append(json.dumps({"delete": {"status": {"id_str": next_id()}}}))
            lines.append("")

    # Outlet originals arrive in one burst at the end of day one.
    for outlet in outlets:
        for burst in range(max(1, cfg.n_tweets // 500)):
            when = datetime(
                cfg.start_day.year, cfg.start_day.month, cfg.start_day.day,
                12, 0, burst % 60, tzinfo=timezone.utc,
            )
            payload = base_payload(
                outlet, when, f"official covid update {burst}", "en"
            )
            _attach_tags(payload, ["covid19"])
            lines.append(json.dumps(payload, separators=(",", ":"), sort_keys=True))
            class_counts["original"] += 1
            state_original += 1

    # Bimodal with a small confusable tail each side, so calibration
    # metrics on generated corpora are realistic rather than all 1.0.
    scores = {}
    for acct in ordinary:
        confused = rng.random() < 0.08
        if acct.is_bot != confused:
            scores[acct.account_id] = round(0.55 + 0.43 * rng.random(), 4)
        else:
            scores[acct.account_id] = round(0.45 * rng.random(), 4)

    labeled = rng.sample(ordinary, min(cfg.labeled_accounts, len(ordinary)))
    labels = [(a.account_id, "bot" if a.is_bot else "human") for a in labeled]

    all_ids = [a.account_id for a in ordinary]
    statuses = planted_statuses(
        all_ids,
        round(len(all_ids) * cfg.missing_rate),
        round(len(all_ids) * cfg.suspended_rate),
        cfg.seed + 1,
    )

    truth = {
        "total_tweets": sum(class_counts.values()),
        "class_counts": class_counts,
        "n_accounts": len(accounts),
        "bots": sorted(a.account_id for a in ordinary if a.is_bot),
        "group_of": {a.account_id: a.group for a in ordinary},
        "state_original": state_original,
        "state_amplifications": state_amplifications,
        "abusive_planted": abusive_planted,
        "missing_planted": sum(1 for s in statuses.values() if s != "exists"),
        "suspended_planted": sum(1 for s in statuses.values() if s == "suspended"),
    }
    return SynthCorpus(
        lines=lines, scores=scores, labels=labels, statuses=statuses, truth=truth
    )


def _attach_tags(payload: dict, tags: list[str]) -> None:
    for tag in tags:
        payload["entities"]["hashtags"].append({"text": tag})
        payload["text"] += f" #{tag}"


def _ref_of(payload: dict) -> dict:
    return {
        "id_str": payload["id_str"],
        "text": payload["text"],
        "user": payload["user"],
    }


def _pick_source(rng: random.Random, pool: list[dict], group_members) -> dict:
    member_ids = {m.account_id for m in group_members}
    if member_ids and rng.random() < 0.8:
        same_group = [p for p in pool[-200:] if p["user"]["id_str"] in member_ids]
        if same_group:
            return rng.choice(same_group)
    return rng.choice(pool)


def _retweet_of(author, source: dict, when, lang, base_payload) -> dict:
    text = f"RT @{source['user']['screen_name']}: {source['text']}"
    payload = base_payload(author, when, text, lang)
    payload["retweeted_status"] = dict(source)
    payload["entities"]["user_mentions"].append(
        {
            "id_str": source["user"]["id_str"],
            "screen_name": source["user"]["screen_name"],
        }
    )
    return payload


def _retweet_payload(rng, author, outlet, when, lang, base_payload) -> dict:
    # Synthesize an outlet post on the fly and retweet it; the outlet copy
    # itself is not emitted (mirrors seeing only the amplification).
    source = {
        "id_str": str(800_000_000_000 + rng.randrange(10_000_000)),
        "text": f"wire briefing covid {rng.randrange(1000)}",
        "user": outlet.user_object(),
    }
    return _retweet_of(author, source, when, lang, base_payload)


def write_corpus(
    corpus: SynthCorpus,
    out_dir: str | Path,
    shards: int = 1,
    compress: bool = True,
) -> dict[str, Path]:
    """Write the stream plus every side table; returns the path map."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    per_shard = (len(corpus.lines) + shards - 1) // shards
    stream_paths = []
    for s in range(shards):
        chunk = corpus.lines[s * per_shard : (s + 1) * per_shard]
        body = ("\n".join(chunk) + "\n").encode("utf-8")
        if compress:
            path = out / f"stream_{s:03d}.ndjson.gz"
            with open(path, "wb") as fh:
                # mtime pinned so regeneration is byte-identical
                with gzip.GzipFile(fileobj=fh, mode="wb", mtime=0) as gz:
                    gz.write(body)
        else:
            path = out / f"stream_{s:03d}.ndjson"
            path.write_bytes(body)
        stream_paths.append(path)
    paths["streams"] = stream_paths

    scores_path = out / "scores_tier1.csv"
    with open(scores_path, "w", encoding="utf-8") as fh:
        fh.write("account_id,score\n")
        for account in sorted(corpus.scores):
            fh.write(f"{account},{corpus.scores[account]}\n")
    paths["scores"] = scores_path

    labels_path = out / "labels.csv"
    with open(labels_path, "w", encoding="utf-8") as fh:
        fh.write("account_id,label\n")
        for account, label in sorted(corpus.labels):
            fh.write(f"{account},{label}\n")
    paths["labels"] = labels_path

    fixture_path = out / "audit_fixture.csv"
    with open(fixture_path, "w", encoding="utf-8") as fh:
        fh.write("account_id,status\n")
        for account in sorted(corpus.statuses):
            fh.write(f"{account},{corpus.statuses[account]}\n")
    paths["audit_fixture"] = fixture_path

    bias_path = out / "bias.csv"
    with open(bias_path, "w", encoding="utf-8") as fh:
        fh.write("domain,bias,factual\n")
        for domain, bias, factual in BIAS_ENTRIES:
            fh.write(f"{domain},{bias},{factual}\n")
    paths["bias"] = bias_path

    lexicon_path = out / "lexicon.txt"
    terms = list(ABUSE_TERMS) + [f"{lang}:{term}" for lang, term in ABUSE_TERMS_TAGGED]
    lexicon_path.write_text("\n".join(terms) + "\n", encoding="utf-8")
    paths["lexicon"] = lexicon_path

    statemedia_path = out / "statemedia.csv"
    with open(statemedia_path, "w", encoding="utf-8") as fh:
        fh.write("screen_name,country\n")
        for name, country in STATE_OUTLETS:
            fh.write(f"{name},{country}\n")
    paths["statemedia"] = statemedia_path

    keywords_path = out / "keywords.txt"
    keywords_path.write_text("covid\n", encoding="utf-8")
    paths["keywords"] = keywords_path

    truth_path = out / "truth.json"
    truth_path.write_text(
        json.dumps(corpus.truth, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    paths["truth"] = truth_path
    return paths
