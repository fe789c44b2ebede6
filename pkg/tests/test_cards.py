import numpy as np
import pytest

from holdemlab.cards import (
    Card,
    DealRng,
    HandCategory,
    InvalidCardsError,
    UndefinedRangeError,
    card_index,
    card_str,
    equity_exhaustive,
    equity_vs_range,
    evaluate5,
    evaluate7,
    hand_score,
    parse_cards,
    score_cards_batch,
)
from holdemlab.rangegrid import ComboGrid, combo_index

from reference_eval import ref_eval7


def cards(text):
    return parse_cards(text)


class TestCardBasics:
    def test_52_distinct_cards(self):
        deck = {Card.from_index(i) for i in range(52)}
        assert len(deck) == 52

    def test_text_round_trip(self):
        for i in range(52):
            assert card_index(card_str(i)) == i

    def test_parse_examples(self):
        assert card_str(card_index("As")) == "As"
        assert card_str(card_index("Td")) == "Td"
        assert card_str(card_index("9h")) == "9h"

    def test_ordering_is_rank_then_suit(self):
        assert Card.parse("2c") < Card.parse("2d") < Card.parse("3c") < Card.parse("As")

    def test_bad_cards_rejected(self):
        with pytest.raises(InvalidCardsError):
            Card.parse("Xx")
        with pytest.raises(InvalidCardsError):
            Card(15, 0)


class TestEvaluate7:
    def test_case_study_full_house(self):
        hv = evaluate7(cards("9h9s"), cards("9d5s2c2dKs"))
        assert hv.category == HandCategory.FULL_HOUSE
        assert hv.tiebreak == (9, 2)  # nines full of twos

    def test_busted_draw_plays_board_pair(self):
        hv = evaluate7(cards("4d3d"), cards("9d5s2c2dKs"))
        assert hv.category == HandCategory.PAIR
        assert hv.tiebreak == (2, 13, 9, 5)  # pair of twos, K/9/5 kickers

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            seven = rng.choice(52, size=7, replace=False).tolist()
            base = evaluate7(seven[:2], seven[2:])
            perm = rng.permutation(seven).tolist()
            assert evaluate7(perm[:2], perm[2:]) == base

    def test_duplicate_cards_rejected(self):
        with pytest.raises(InvalidCardsError):
            evaluate7(cards("AsAs"), cards("2c3c4c5c6c"))
        with pytest.raises(InvalidCardsError):
            evaluate7(cards("AsKs"), cards("As3c4c5c6c"))

    def test_matches_best_of_21_brute_force(self):
        rng = np.random.default_rng(303)
        order = [
            HandCategory.HIGH_CARD,
            HandCategory.PAIR,
            HandCategory.TWO_PAIR,
            HandCategory.TRIPS,
            HandCategory.STRAIGHT,
            HandCategory.FLUSH,
            HandCategory.FULL_HOUSE,
            HandCategory.QUADS,
            HandCategory.STRAIGHT_FLUSH,
        ]
        for _ in range(2000):
            seven = rng.choice(52, size=7, replace=False).tolist()
            mine = evaluate7(seven[:2], seven[2:])
            ref = ref_eval7(seven[:2], seven[2:])
            assert int(mine.category) == ref[0]
            assert order[ref[0]] == mine.category
            assert tuple(mine.tiebreak)[: len(ref) - 1] == ref[1:]

    def test_wheel_straights(self):
        hv = evaluate5(cards("Ah2c3d4s5h"))
        assert hv.category == HandCategory.STRAIGHT
        assert hv.tiebreak == (5,)
        sf = evaluate5(cards("Ac2c3c4c5c"))
        assert sf.category == HandCategory.STRAIGHT_FLUSH
        assert sf.tiebreak == (5,)

    def test_batch_agrees_with_scalar(self):
        rng = np.random.default_rng(7)
        for k in (5, 6, 7):
            deals = np.array([rng.choice(52, size=k, replace=False) for _ in range(500)])
            batch = score_cards_batch(deals)
            scalar = np.array([hand_score(tuple(int(x) for x in row)) for row in deals])
            assert (batch == scalar).all()


class TestDealRng:
    def test_same_seed_same_sequence(self):
        a = DealRng(123, stream=4)
        b = DealRng(123, stream=4)
        for _ in range(5):
            assert a.shuffled_deck() == b.shuffled_deck()

    def test_streams_differ(self):
        assert DealRng(123, 0).shuffled_deck() != DealRng(123, 1).shuffled_deck()


class TestEquityExhaustive:
    def test_nuts_on_complete_board(self):
        eq = equity_exhaustive(cards("AsKs"), cards("2h2d"), cards("QsJsTs3c3d"))
        assert eq == 1.0

    def test_tie_on_complete_board(self):
        eq = equity_exhaustive(cards("2c2d"), cards("2h2s"), cards("AsKsQsJd9d"))
        assert eq == 0.5

    def test_case_study_turn_is_a_lock(self):
        # full house vs busted combo draw: every one of the 44 rivers loses
        eq = equity_exhaustive(cards("9h9s"), cards("4d3d"), cards("9d5s2c2d"))
        assert eq == 1.0

    def test_complement(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            seven = rng.choice(52, size=8, replace=False).tolist()
            hero, villain, board = seven[:2], seven[2:4], seven[4:8]
            a = equity_exhaustive(hero, villain, board)
            b = equity_exhaustive(villain, hero, board)
            assert a + b == pytest.approx(1.0, abs=1e-12)

    def test_river_enumeration_against_reference(self):
        hero, villain, board = cards("AhKh"), cards("QcQd"), cards("2h7h8sJc")
        eq = equity_exhaustive(hero, villain, board)
        wins = ties = 0
        dead = set(hero + villain + board)
        rivers = [c for c in range(52) if c not in dead]
        for r in rivers:
            h = ref_eval7(hero, board + [r])
            v = ref_eval7(villain, board + [r])
            wins += h > v
            ties += h == v
        assert eq == pytest.approx((wins + 0.5 * ties) / len(rivers), abs=1e-12)

    def test_collision_rejected(self):
        with pytest.raises(InvalidCardsError):
            equity_exhaustive(cards("AsKs"), cards("AsQd"), cards("2c3c4c"))


class TestEquityVsRange:
    def test_single_combo_equals_exhaustive(self):
        hero = cards("9h9s")
        villain = cards("4d3d")
        board = cards("9d5s2c")
        w = np.zeros(1326)
        w[combo_index(*villain)] = 1.0
        assert equity_vs_range(hero, w, board) == pytest.approx(
            equity_exhaustive(hero, villain, board), abs=1e-12
        )

    def test_nuts_vs_any_range_on_complete_board(self):
        hero = cards("AsKs")
        board = cards("QsJsTs3c3d")
        grid = ComboGrid.uniform().strip(hero + board)
        assert equity_vs_range(hero, grid.weights, board) == 1.0

    def test_three_combo_weighted_average(self):
        hero = cards("AhKd")
        board = cards("Ad7s2c5h")
        combos = [cards("QsQc"), cards("7h7d"), cards("KsQs")]
        weights = [0.5, 0.3, 0.2]
        w = np.zeros(1326)
        for c, wt in zip(combos, weights):
            w[combo_index(*c)] = wt
        expected = sum(wt * equity_exhaustive(hero, c, board) for c, wt in zip(combos, weights))
        got = equity_vs_range(hero, w, board)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_empty_support_raises(self):
        hero = cards("AsKs")
        w = np.zeros(1326)
        w[combo_index(*cards("AsQs"))] = 1.0  # collides with hero
        with pytest.raises(UndefinedRangeError):
            equity_vs_range(hero, w, cards("2c3c4c"))

    def test_preflop_monte_carlo_sane(self):
        hero = cards("AsAh")
        grid = ComboGrid.uniform().strip(hero)
        eq = equity_vs_range(hero, grid.weights, (), preflop_samples=4000, rng=DealRng(9))
        assert 0.80 < eq < 0.90  # aces vs a random hand
