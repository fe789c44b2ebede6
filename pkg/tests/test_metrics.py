import math

import numpy as np
import pytest

from holdemlab.cards import DealRng, parse_cards
from holdemlab.metrics import (
    FailureCostModel,
    LedgerError,
    ResultLedger,
    TrialReport,
    Z_95,
    all_in_adjusted,
    bb100,
    failure_cost,
    ledger_from_records,
    segment_analysis,
)
from holdemlab.table import SeatConfig, play_hand
from holdemlab.events import ActionType


class TestBB100:
    def test_trial_rows(self):
        # the published trial's input rows, in cents at 2c a blind
        assert bb100(17792, 64267, 2) == pytest.approx(13.8, abs=0.05)
        assert bb100(-13870, 64267, 2) == pytest.approx(-10.8, abs=0.05)
        assert bb100(959, 64267, 2) == pytest.approx(0.7, abs=0.05)
        assert bb100(4781, 64267, 2) == pytest.approx(3.7, abs=0.05)

    def test_zero_amount(self):
        assert bb100(0, 1234, 2) == 0.0

    def test_zero_hands_undefined(self):
        with pytest.raises(LedgerError):
            bb100(100, 0, 2)

    def test_linearity(self):
        assert bb100(2000, 500, 2) == pytest.approx(2 * bb100(1000, 500, 2))
        assert bb100(1000, 1000, 2) == pytest.approx(bb100(1000, 500, 2) / 2)


class TestLedger:
    def test_identity_exact_in_cents(self):
        rng = np.random.default_rng(0)
        ledger = ResultLedger(bb_cents=2, rakeback_rate=0.069)
        for h in range(1, 501):
            net = int(rng.integers(-400, 400))
            rake = int(rng.integers(0, 7))
            ledger.add_hand(h, net, rake)
        t = ledger.totals()
        assert t["pre_rake"] - t["rake"] == t["net"]
        assert t["final"] == pytest.approx(t["net"] + 0.069 * t["rake"])
        for row in ledger.rows:
            assert row.pre_rake_cents - row.rake_cents == row.net_cents

    def test_rakeback_rate_matches_trial_back_solve(self):
        # 9.59 / 138.70 = 6.91%: the shipped default is the rounded rate
        assert ResultLedger(bb_cents=2).rakeback_rate == pytest.approx(0.069, abs=0.001)


class TestFailureCost:
    def test_model_point_values_exact(self):
        direct, total = failure_cost(FailureCostModel(0.8, 7.35, 0.45))
        assert direct == 1.47
        assert total == 1.92

    def test_always_fold_costs_nothing_direct(self):
        direct, total = failure_cost(FailureCostModel(1.0, 7.35, 0.45))
        assert direct == 0.0
        assert total == 0.45

    def test_no_secondary(self):
        direct, total = failure_cost(FailureCostModel(0.8, 7.35, 0.0))
        assert total == direct

    def test_invalid_probability(self):
        with pytest.raises(LedgerError):
            FailureCostModel(1.4, 1.0, 0.0)


class TestSegments:
    def test_constant_winner_zero_spread(self):
        ledger = ResultLedger(bb_cents=2)
        for h in range(1, 40_001):
            ledger.add_hand(h, 2, 0)  # +1 BB every hand
        seg = segment_analysis(ledger, segment_size=10_000)
        assert seg.spread_bb100 == 0.0
        assert seg.segment_bb100 == [100.0] * 4

    def test_ci_matches_closed_form(self):
        rng = np.random.default_rng(42)
        sigma_bb = 8.0
        nets = rng.normal(0.0, sigma_bb * 2, size=50_000).astype(int)  # cents
        ledger = ResultLedger(bb_cents=2)
        for h, n in enumerate(nets, start=1):
            ledger.add_hand(h, int(n), 0)
        seg = segment_analysis(ledger)
        expected = Z_95 * (np.std(nets / 2, ddof=1)) / math.sqrt(len(nets)) * 100
        assert seg.ci_half_width_bb100 == pytest.approx(expected, rel=0.05)

    def test_partial_segment_flag(self):
        ledger = ResultLedger(bb_cents=2)
        for h in range(1, 5001):
            ledger.add_hand(h, 0, 0)
        seg = segment_analysis(ledger, segment_size=10_000)
        assert seg.partial_segment


def allin_record(hero_equity_high: bool):
    """Money goes in on the turn: a full house against a dead combo draw."""

    class TurnJam:
        def __call__(self, view):
            if view.to_call_cents > 0:
                return (ActionType.CALL, 0)
            if view.street == "turn" and view.stack_cents > 0:
                return (ActionType.ALL_IN, 0)
            return (ActionType.CHECK, 0)

    hero_hole = parse_cards("9h9s") if hero_equity_high else parse_cards("4d3d")
    vill_hole = parse_cards("4d3d") if hero_equity_high else parse_cards("9h9s")
    deck = hero_hole + vill_hole + parse_cards("9d5s2c2dKs")
    deck += [c for c in range(52) if c not in set(deck)]
    seats = [SeatConfig("hero", 120, TurnJam()), SeatConfig("villain", 120, TurnJam())]
    return play_hand(1, "t", seats, 0, 1, 2, deck)


class TestAllInAdjusted:
    def test_no_allin_equals_actual(self):
        class Meek:
            def __call__(self, view):
                return (ActionType.CHECK, 0) if view.to_call_cents <= 0 else (ActionType.CALL, 0)

        deck = DealRng(3).shuffled_deck()
        seats = [SeatConfig("hero", 200, Meek()), SeatConfig("villain", 200, Meek())]
        record = play_hand(1, "t", seats, 0, 1, 2, deck)
        assert all_in_adjusted(record, "hero") == record.net[record.hero_seat_of("hero")]

    def test_hundred_percent_equity_lock_equals_actual(self):
        # hero's full house vs the drawing-dead combo draw: adjusted == actual
        record = allin_record(hero_equity_high=True)
        seat = record.hero_seat_of("hero")
        assert record.net[seat] > 0
        assert all_in_adjusted(record, "hero") == record.net[seat]

    def test_zero_equity_lock_flips_to_full_loss(self):
        record = allin_record(hero_equity_high=False)
        adjusted = all_in_adjusted(record, "hero")
        # hero was drawing dead when the money went in: expectation is -invested
        assert adjusted == -120

    def test_ledger_yellow_equals_green_without_allins(self):
        class Meek:
            def __call__(self, view):
                return (ActionType.CHECK, 0) if view.to_call_cents <= 0 else (
                    (ActionType.CALL, 0) if view.to_call_cents < 20 else (ActionType.FOLD, 0)
                )

        records = []
        for seed in range(30):
            deck = DealRng(seed, 3).shuffled_deck()
            seats = [SeatConfig("hero", 200, Meek()), SeatConfig("villain", 200, Meek())]
            records.append(play_hand(seed + 1, "t", seats, 0, 1, 2, deck))
        ledger = ledger_from_records(records, "hero", 2)
        t = ledger.totals()
        assert t["adjusted"] == t["net"]


class TestZeroSum:
    def test_per_hand_net_plus_rake_is_zero(self):
        from holdemlab.session import SessionConfig, run_fastfold_session

        collected = []
        run_fastfold_session(SessionConfig(hands=60, seed=13), on_record=collected.append)
        for record in collected:
            assert sum(record.net.values()) + record.total_rake() == 0


class TestTrialReport:
    def test_report_identity_and_text(self):
        ledger = ResultLedger(bb_cents=2)
        rng = np.random.default_rng(1)
        for h in range(1, 2001):
            ledger.add_hand(h, int(rng.integers(-40, 44)), int(rng.integers(0, 4)))
        report = TrialReport.from_ledger(ledger)
        assert report.pre_rake_cents - report.rake_cents == report.post_rake_cents
        text = report.to_text()
        assert "BB/100" in text and "rake" in text
        csv = report.to_csv()
        assert csv.startswith("metric,cash_cents,bb100")
