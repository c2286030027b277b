import random
from datetime import date, datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streamlens import botcal
from streamlens.botcal import LabeledSample, ThresholdPolicy
from streamlens.ingest import AccountProfile

from oracles import auc_pairwise, confusion_oracle


def make_sample(labels: dict[str, str]) -> LabeledSample:
    return LabeledSample(entries=tuple(sorted(labels.items())))


def random_case(rng: random.Random, n: int, coarse: bool = False):
    """Random scores/labels; coarse scores force plenty of ties."""
    scores, labels = {}, {}
    for i in range(n):
        account = f"u{i}"
        if coarse:
            scores[account] = rng.choice([0.0, 0.25, 0.5, 0.75, 1.0])
        else:
            scores[account] = round(rng.random(), 3)
        labels[account] = "bot" if rng.random() < 0.4 else "human"
    return scores, labels


class TestTypes:
    def test_score_range_validated(self):
        with pytest.raises(ValueError):
            botcal.BotScoreTable("d", {"a": 1.2})

    def test_default_threshold_open_interval(self):
        with pytest.raises(ValueError):
            botcal.BotScoreTable("d", {}, default_threshold=1.0)

    def test_labels_validated(self):
        with pytest.raises(ValueError):
            make_sample({"a": "cyborg"})
        with pytest.raises(ValueError):
            LabeledSample(entries=(("a", "bot"), ("a", "human")))


class TestEvaluate:
    def test_matches_enumeration_oracle_on_random_sets(self):
        rng = random.Random(1)
        for trial in range(200):
            scores, labels = random_case(rng, rng.randint(2, 40), coarse=trial % 3 == 0)
            t = rng.choice([0.0, 0.25, 0.5, rng.random(), 1.0])
            row = botcal.evaluate_at_threshold(scores, make_sample(labels), t)
            p, r, f1, acc = confusion_oracle(scores, labels, t)
            assert row.precision == pytest.approx(p, abs=1e-12)
            assert row.recall == pytest.approx(r, abs=1e-12)
            assert row.f1 == pytest.approx(f1, abs=1e-12)
            assert row.accuracy == pytest.approx(acc, abs=1e-12)

    def test_predicted_bot_needs_score_at_or_above_threshold(self):
        scores = {"a": 0.5, "b": 0.4999}
        labels = make_sample({"a": "bot", "b": "bot"})
        row = botcal.evaluate_at_threshold(scores, labels, 0.5)
        assert row.recall == pytest.approx(0.5)

    def test_missing_score_raises_and_names_accounts(self):
        labels = make_sample({"a": "bot", "b": "human"})
        with pytest.raises(KeyError, match="'b'"):
            botcal.evaluate_at_threshold({"a": 0.9}, labels, 0.5)

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            botcal.evaluate_at_threshold({}, LabeledSample(entries=()), 0.5)

    def test_degenerate_metrics_flagged_not_raised(self):
        # All humans, threshold above every score: no predictions, no bots.
        scores = {"a": 0.1, "b": 0.2}
        labels = make_sample({"a": "human", "b": "human"})
        row = botcal.evaluate_at_threshold(scores, labels, 0.9)
        assert set(row.degenerate) == {"precision", "recall", "f1", "roc_auc"}
        assert row.accuracy == 1.0

    def test_order_independence(self):
        scores, labels = random_case(random.Random(3), 20)
        entries = tuple(labels.items())
        row1 = botcal.evaluate_at_threshold(scores, LabeledSample(entries), 0.5)
        row2 = botcal.evaluate_at_threshold(
            scores, LabeledSample(tuple(reversed(entries))), 0.5
        )
        assert row1.accuracy == row2.accuracy
        assert row1.f1 == row2.f1


class TestCurve:
    def test_thresholds_are_observed_scores_descending(self):
        scores = {"a": 0.9, "b": 0.7, "c": 0.7, "d": 0.1}
        labels = make_sample({k: "bot" for k in scores})
        curve = botcal.precision_recall_curve(scores, labels)
        assert [t for t, _, _ in curve] == [0.9, 0.7, 0.1]

    def test_recall_monotone_non_decreasing(self):
        rng = random.Random(5)
        for trial in range(100):
            scores, labels = random_case(rng, rng.randint(2, 30), coarse=trial % 2 == 0)
            curve = botcal.precision_recall_curve(scores, make_sample(labels))
            recalls = [r for _, _, r in curve]
            assert recalls == sorted(recalls)

    def test_points_match_threshold_evaluation(self):
        rng = random.Random(7)
        scores, labels = random_case(rng, 25, coarse=True)
        sample = make_sample(labels)
        for t, p, r in botcal.precision_recall_curve(scores, sample):
            row = botcal.evaluate_at_threshold(scores, sample, t)
            if "precision" not in row.degenerate:
                assert p == pytest.approx(row.precision, abs=1e-12)
            assert r == pytest.approx(row.recall, abs=1e-12)

    def test_tie_groups_collapse_to_one_point(self):
        scores = {"a": 0.5, "b": 0.5, "c": 0.5}
        labels = make_sample({"a": "bot", "b": "human", "c": "bot"})
        curve = botcal.precision_recall_curve(scores, labels)
        assert curve == [(0.5, pytest.approx(2 / 3), pytest.approx(1.0))]


class TestAuc:
    def test_matches_pairwise_oracle(self):
        rng = random.Random(11)
        for trial in range(150):
            scores, labels = random_case(rng, rng.randint(2, 40), coarse=trial % 2 == 0)
            if len(set(labels.values())) < 2:
                continue
            got = botcal.roc_auc(scores, make_sample(labels))
            assert got == pytest.approx(auc_pairwise(scores, labels), abs=1e-12)

    def test_perfect_and_inverted(self):
        labels = make_sample({"b1": "bot", "b2": "bot", "h1": "human"})
        assert botcal.roc_auc({"b1": 0.9, "b2": 0.8, "h1": 0.1}, labels) == 1.0
        assert botcal.roc_auc({"b1": 0.1, "b2": 0.2, "h1": 0.9}, labels) == 0.0

    def test_all_tied_is_half(self):
        labels = make_sample({"a": "bot", "b": "human"})
        assert botcal.roc_auc({"a": 0.5, "b": 0.5}, labels) == pytest.approx(0.5)

    def test_single_class_rejected(self):
        labels = make_sample({"a": "bot"})
        with pytest.raises(ValueError):
            botcal.roc_auc({"a": 0.5}, labels)


class TestPolicies:
    CURVE = [(0.9, 1.0, 0.25), (0.7, 0.8, 0.5), (0.5, 0.75, 0.75), (0.3, 0.5, 1.0)]

    def test_parse_forms(self):
        assert ThresholdPolicy.parse("max_f1") == ThresholdPolicy("max_f1")
        assert ThresholdPolicy.parse("precision>=0.9") == ThresholdPolicy("precision_floor", 0.9)
        assert ThresholdPolicy.parse("recall>=0.7") == ThresholdPolicy("recall_floor", 0.7)
        assert ThresholdPolicy.parse("fixed:0.5") == ThresholdPolicy("fixed", 0.5)
        with pytest.raises(ValueError):
            ThresholdPolicy.parse("maximize_joy")

    def test_max_f1_picks_best(self):
        t = botcal.select_threshold(self.CURVE, ThresholdPolicy("max_f1"))
        f1s = {tt: 2 * p * r / (p + r) for tt, p, r in self.CURVE}
        assert f1s[t] == max(f1s.values())

    def test_max_f1_tie_prefers_lower_threshold(self):
        curve = [(0.8, 0.5, 1.0), (0.4, 1.0, 0.5)]  # identical F1 = 2/3
        assert botcal.select_threshold(curve, ThresholdPolicy("max_f1")) == 0.4

    def test_precision_floor_lowest_satisfying(self):
        t = botcal.select_threshold(self.CURVE, ThresholdPolicy("precision_floor", 0.75))
        assert t == 0.5

    def test_recall_floor_highest_satisfying(self):
        t = botcal.select_threshold(self.CURVE, ThresholdPolicy("recall_floor", 0.5))
        assert t == 0.7

    def test_fixed_passthrough(self):
        assert botcal.select_threshold(self.CURVE, ThresholdPolicy("fixed", 0.42)) == 0.42

    def test_unattainable_floor_names_best(self):
        with pytest.raises(botcal.PolicyError, match="best attainable"):
            botcal.select_threshold([(0.5, 0.6, 1.0)], ThresholdPolicy("precision_floor", 0.99))


class TestDensity:
    def test_top_edge_lands_in_last_bin(self):
        d = botcal.score_density({"a": 1.0, "b": 0.0, "c": 0.999}, bins=10)
        assert d.counts[9] == 2
        assert d.counts[0] == 1

    def test_counts_sum_to_population(self):
        rng = random.Random(13)
        scores = {f"u{i}": rng.random() for i in range(500)}
        d = botcal.score_density(scores)
        assert sum(d.counts) == 500
        assert d.bin_count == 100

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            botcal.score_density({})


def profile(account, created, **kw):
    return AccountProfile(
        account_id=account,
        screen_name=account,
        created_at=created,
        **kw,
    )


class TestCreationAnalysis:
    def test_histogram_counts_and_proportions(self):
        day1 = datetime(2020, 1, 1, 5, tzinfo=timezone.utc)
        day2 = datetime(2020, 1, 2, 6, tzinfo=timezone.utc)
        profiles = [
            profile("a", day1),
            profile("b", day1),
            profile("c", day2),
        ]
        bins = botcal.creation_date_histogram(
            profiles, {"a": 0.9, "b": 0.1}, t=0.5
        )
        assert bins[0].day == date(2020, 1, 1)
        assert bins[0].count == 2
        assert bins[0].bot_proportion == pytest.approx(0.5)
        # No scored member on day 2: proportion stays None, count stays real.
        assert bins[1].count == 1
        assert bins[1].bot_proportion is None

    def test_filter_count_uses_strict_inequality(self):
        created = datetime(2020, 6, 1, tzinfo=timezone.utc)
        profiles = [profile("a", created), profile("b", created), profile("c", created)]
        scores = {"a": 0.5, "b": 0.51}  # c unscored
        n = botcal.filter_count(profiles, scores, date(2020, 1, 1), t=0.5)
        assert n == 1

    def test_filter_count_date_boundary(self):
        profiles = [
            profile("a", datetime(2020, 1, 1, 0, 0, tzinfo=timezone.utc)),
            profile("b", datetime(2019, 12, 31, 23, 59, tzinfo=timezone.utc)),
        ]
        scores = {"a": 0.9, "b": 0.9}
        assert botcal.filter_count(profiles, scores, date(2020, 1, 1), 0.5) == 1


class TestIo:
    def test_score_table_roundtrip(self, tmp_path):
        p = tmp_path / "scores.csv"
        p.write_text("account_id,score\nu1,0.25\nu2,0.75\n", encoding="utf-8")
        table = botcal.load_score_table(p, detector_name="tier1")
        assert table.scores == {"u1": 0.25, "u2": 0.75}
        assert table.detector_name == "tier1"

    def test_labeled_sample_roundtrip(self, tmp_path):
        p = tmp_path / "labels.csv"
        p.write_text("account_id,label\nu1,bot\nu2,human\n", encoding="utf-8")
        sample = botcal.load_labeled_sample(p)
        assert sample.entries == (("u1", "bot"), ("u2", "human"))

    def test_curve_csv(self, tmp_path):
        out = tmp_path / "curve.csv"
        botcal.write_curve_csv([(0.5, 1.0, 0.25)], out)
        lines = out.read_text(encoding="utf-8").strip().splitlines()
        assert lines[0] == "threshold,precision,recall"
        assert lines[1] == "0.5,1,0.25"


@settings(max_examples=60, deadline=None)
@given(
    st.dictionaries(
        st.text(alphabet="abcdefgh", min_size=1, max_size=3),
        st.tuples(
            st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
            st.sampled_from(["bot", "human"]),
        ),
        min_size=1,
        max_size=30,
    ),
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
)
def test_metrics_match_oracle_property(case, t):
    scores = {a: s for a, (s, _) in case.items()}
    labels = {a: lab for a, (_, lab) in case.items()}
    row = botcal.evaluate_at_threshold(scores, make_sample(labels), t)
    p, r, f1, acc = confusion_oracle(scores, labels, t)
    assert row.precision == pytest.approx(p, abs=1e-12)
    assert row.recall == pytest.approx(r, abs=1e-12)
    assert row.f1 == pytest.approx(f1, abs=1e-12)
    assert row.accuracy == pytest.approx(acc, abs=1e-12)
