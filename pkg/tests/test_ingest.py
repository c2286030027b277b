import gzip
import json
from datetime import date, datetime, timezone

import pytest

from streamlens import ingest
from streamlens.ingest import Skip, TweetClass, TweetRecord


def make_line(**overrides) -> str:
    obj = {
        "id_str": "900001",
        "created_at": "Wed Apr 15 09:21:47 +0000 2020",
        "text": "base text",
        "lang": "en",
        "user": {
            "id_str": "42",
            "screen_name": "someone",
            "created_at": "Mon Jan 06 00:00:00 +0000 2014",
            "verified": False,
        },
        "entities": {},
    }
    obj.update(overrides)
    return json.dumps(obj)


def make_record(**overrides) -> TweetRecord:
    base = dict(
        tweet_id="1",
        author_id="a",
        screen_name="a",
        created_at=datetime(2020, 4, 1, tzinfo=timezone.utc),
        text="hello",
    )
    base.update(overrides)
    return TweetRecord(**base)


class TestCreatedAt:
    def test_classic_format(self):
        r = ingest.parse_tweet_record(make_line())
        assert r.created_at == datetime(2020, 4, 15, 9, 21, 47, tzinfo=timezone.utc)

    def test_nonzero_offset_normalizes_to_utc(self):
        line = make_line(created_at="Wed Apr 15 09:21:47 +0300 2020")
        r = ingest.parse_tweet_record(line)
        assert r.created_at == datetime(2020, 4, 15, 6, 21, 47, tzinfo=timezone.utc)

    def test_iso_fallback(self):
        line = make_line(created_at="2020-04-15T09:21:47Z")
        r = ingest.parse_tweet_record(line)
        assert r.created_at == datetime(2020, 4, 15, 9, 21, 47, tzinfo=timezone.utc)

    def test_unparseable_date_is_skipped(self):
        parsed = ingest.parse_tweet_record(make_line(created_at="not a date"))
        assert parsed == Skip("bad_created_at")


class TestParse:
    def test_full_record(self):
        line = make_line(
            entities={
                "hashtags": [{"text": "COVID19"}, {"text": "news"}],
                "user_mentions": [{"id_str": "7", "screen_name": "mentioned"}],
                "urls": [{"expanded_url": "https://example.org/a", "url": "https://t.co/x"}],
                "media": [{"type": "photo"}],
            },
        )
        r = ingest.parse_tweet_record(line)
        assert r.tweet_id == "900001"
        assert r.author_id == "42"
        assert r.hashtags == ("covid19", "news")
        assert r.mentions == (("7", "mentioned"),)
        assert r.urls == ("https://example.org/a",)
        assert r.media_count == 1

    def test_extended_tweet_wins(self):
        line = make_line(
            text="truncated...",
            extended_tweet={
                "full_text": "the whole untruncated text",
                "entities": {"hashtags": [{"text": "long"}]},
            },
        )
        r = ingest.parse_tweet_record(line)
        assert r.text == "the whole untruncated text"
        assert r.hashtags == ("long",)

    def test_numeric_ids_coerced_to_strings(self):
        line = make_line(id_str=None, id=900002, user={"id": 43, "created_at": "Mon Jan 06 00:00:00 +0000 2014"})
        r = ingest.parse_tweet_record(line)
        assert r.tweet_id == "900002"
        assert r.author_id == "43"

    def test_referenced_authors_resolved(self):
        embedded = {
            "id_str": "800",
            "text": "original",
            "user": {"id_str": "99", "screen_name": "source"},
        }
        r = ingest.parse_tweet_record(make_line(retweeted_status=embedded))
        assert r.retweeted_id == "800"
        assert r.retweeted_author_id == "99"
        q = ingest.parse_tweet_record(make_line(quoted_status=embedded))
        assert q.quoted_id == "800"
        assert q.quoted_author_id == "99"

    def test_reply_fields(self):
        line = make_line(
            in_reply_to_status_id_str="700", in_reply_to_user_id_str="77"
        )
        r = ingest.parse_tweet_record(line)
        assert r.reply_to_id == "700"
        assert r.reply_to_author_id == "77"

    def test_profile_extraction(self):
        p = ingest.parse_account_profile(make_line())
        assert p.account_id == "42"
        assert p.screen_name == "someone"
        assert p.created_at.year == 2014


class TestSkips:
    @pytest.mark.parametrize(
        "line,reason",
        [
            ("", "empty"),
            ("   \n", "empty"),
            ("{not json", "invalid_json"),
            ('"just a string"', "not_a_tweet"),
            ('{"delete": {"status": {"id": 1}}}', "not_a_tweet"),
            ('{"limit": {"track": 5}}', "not_a_tweet"),
            (json.dumps({"user": {"id_str": "1"}, "created_at": "x"}), "missing_field"),
        ],
    )
    def test_skip_reasons(self, line, reason):
        assert ingest.parse_tweet_record(line) == Skip(reason)

    def test_no_text_is_missing_field(self):
        obj = json.loads(make_line())
        del obj["text"]
        assert ingest.parse_tweet_record(json.dumps(obj)) == Skip("missing_field")


class TestClassification:
    def test_precedence_is_a_partition(self):
        # All eight presence combinations classify to exactly one class,
        # with retweet > quote > reply > original.
        for has_rt in (None, "1"):
            for has_q in (None, "2"):
                for has_re in (None, "3"):
                    r = make_record(
                        retweeted_id=has_rt, quoted_id=has_q, reply_to_id=has_re
                    )
                    c = ingest.classify_tweet(r)
                    if has_rt:
                        assert c is TweetClass.RETWEET
                    elif has_q:
                        assert c is TweetClass.QUOTE
                    elif has_re:
                        assert c is TweetClass.REPLY
                    else:
                        assert c is TweetClass.ORIGINAL

    def test_class_counts_sum_to_total(self, small_corpus):
        _cfg, corpus, paths = small_corpus
        loaded = ingest.load_corpus(paths["streams"])
        stats = ingest.stream_summary(loaded.records)
        assert (
            stats.original_tweets
            + stats.retweet_tweets
            + stats.reply_tweets
            + stats.quote_tweets
            == stats.total_tweets
        )
        assert stats.total_tweets == len(loaded.records)


class TestKeywordFilter:
    def test_text_substring_casefolded(self):
        r = make_record(text="The OUTBREAK has begun")
        assert ingest.keyword_filter(r, ["outbreak"])
        assert not ingest.keyword_filter(r, ["vaccine"])

    def test_hashtag_substring(self):
        r = make_record(text="plain", hashtags=("covid19",))
        assert ingest.keyword_filter(r, ["covid"])

    def test_empty_keyword_list_rejected(self):
        with pytest.raises(ValueError):
            ingest.keyword_filter(make_record(), [])

    def test_load_keywords_skips_comments(self, tmp_path):
        p = tmp_path / "kw.txt"
        p.write_text("# comment\nCovid\n\n outbreak \n", encoding="utf-8")
        assert ingest.load_keywords(p) == ["covid", "outbreak"]


class TestDomains:
    @pytest.mark.parametrize(
        "url,domain",
        [
            ("https://www.Example.org/path?q=1", "example.org"),
            ("http://user:pw@host.net:8080/x", "host.net"),
            ("example.com/page", "example.com"),
            ("https://sub.news.co.uk", "sub.news.co.uk"),
            ("not a url at all", ""),
        ],
    )
    def test_extract_domain(self, url, domain):
        assert ingest.extract_domain(url) == domain


class TestStreamFiles:
    def test_gzip_detected_by_magic_bytes(self, tmp_path):
        # A gzip stream with a misleading plain-text extension still opens.
        lines = [make_line(), make_line(id_str="900002")]
        gz = tmp_path / "shard.json"
        with gzip.open(gz, "wt", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        plain = tmp_path / "shard2.json"
        plain.write_text(make_line(id_str="900003") + "\n", encoding="utf-8")
        got = list(ingest.iter_lines([gz, plain]))
        assert len(got) == 3

    def test_load_corpus_counts_skips(self, tmp_path):
        p = tmp_path / "s.ndjson"
        p.write_text(
            "\n".join([make_line(), "", '{"delete": {}}', "{bad"]) + "\n",
            encoding="utf-8",
        )
        corpus = ingest.load_corpus([p])
        assert corpus.parsed_count == 1
        assert corpus.line_count == 4
        assert corpus.skips["invalid_json"] == 1
        assert corpus.skips["not_a_tweet"] == 1

    def test_keyword_filtering_counts(self, tmp_path):
        p = tmp_path / "s.ndjson"
        p.write_text(
            make_line(text="about the outbreak") + "\n" + make_line(text="cooking pasta") + "\n",
            encoding="utf-8",
        )
        corpus = ingest.load_corpus([p], keywords=["outbreak"])
        assert corpus.parsed_count == 1
        assert corpus.skips["filtered"] == 1


class TestStats:
    def test_accumulator_merge_matches_single_pass(self, small_corpus):
        _cfg, corpus, paths = small_corpus
        records = ingest.load_corpus(paths["streams"]).records
        whole = ingest.stream_summary(records)
        half = len(records) // 2
        a, b = ingest.StreamAccumulator(), ingest.StreamAccumulator()
        for r in records[:half]:
            a.update(r)
        for r in records[half:]:
            b.update(r)
        merged = b.merge(a).finalize()
        assert merged == whole

    def test_daily_fill_in_covers_gaps(self):
        records = [
            make_record(created_at=datetime(2020, 4, 1, tzinfo=timezone.utc)),
            make_record(created_at=datetime(2020, 4, 4, tzinfo=timezone.utc)),
        ]
        daily = ingest.partition_by_day(records)
        assert list(daily) == [
            date(2020, 4, 1),
            date(2020, 4, 2),
            date(2020, 4, 3),
            date(2020, 4, 4),
        ]
        assert daily[date(2020, 4, 2)] == 0

    def test_daily_cap_flags_days(self):
        records = [make_record(created_at=datetime(2020, 4, 1, i, tzinfo=timezone.utc)) for i in range(5)]
        stats = ingest.stream_summary(records, daily_cap=3)
        assert stats.capped_days == (date(2020, 4, 1),)

    def test_report_roundtrip(self, tmp_path):
        stats = ingest.stream_summary([make_record()])
        out = tmp_path / "stats.txt"
        ingest.write_stats_report(stats, out)
        text = out.read_text(encoding="utf-8")
        assert "Total Tweets=1" in text
        assert "Original Tweets=1" in text
