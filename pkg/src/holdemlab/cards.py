"""Card primitives, deck shuffling, hand evaluation, and equity oracles.

Cards are small value objects; hot paths work on integer card indices
(0..51, rank-major) and score hands with precomputed rank-mask tables.
A vectorized batch scorer handles "many holdings vs one board" workloads,
which is what range-wide strength queries and equity sweeps need.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

RANK_CHARS = "23456789TJQKA"
SUIT_CHARS = "cdhs"
SUIT_GLYPHS = {"c": "♣", "d": "♦", "h": "♥", "s": "♠"}

DECK_SIZE = 52
N_COMBOS = 1326


class InvalidCardsError(ValueError):
    """Raised for malformed, duplicate, or out-of-domain card input."""


class UndefinedRangeError(ValueError):
    """Raised when an equity query is made against an empty-support range."""


@dataclass(frozen=True, order=True)
class Card:
    """A playing card. Ordering is (rank, suit) with suits in c<d<h<s order."""

    rank: int  # 2..14, where 11=J, 12=Q, 13=K, 14=A
    suit: int  # 0..3 indexing into "cdhs"

    def __post_init__(self) -> None:
        if not (2 <= self.rank <= 14) or not (0 <= self.suit <= 3):
            raise InvalidCardsError(f"bad card ({self.rank},{self.suit})")

    @property
    def index(self) -> int:
        return (self.rank - 2) * 4 + self.suit

    @classmethod
    def from_index(cls, idx: int) -> "Card":
        if not (0 <= idx < DECK_SIZE):
            raise InvalidCardsError(f"card index {idx} out of range")
        return cls(rank=(idx >> 2) + 2, suit=idx & 3)

    @classmethod
    def parse(cls, text: str) -> "Card":
        t = text.strip()
        if len(t) != 2:
            raise InvalidCardsError(f"cannot parse card {text!r}")
        try:
            rank = RANK_CHARS.index(t[0].upper()) + 2
            suit = SUIT_CHARS.index(t[1].lower())
        except ValueError:
            raise InvalidCardsError(f"cannot parse card {text!r}") from None
        return cls(rank, suit)

    def __str__(self) -> str:
        return RANK_CHARS[self.rank - 2] + SUIT_CHARS[self.suit]


def card_index(text: str) -> int:
    return Card.parse(text).index


def card_str(idx: int) -> str:
    return RANK_CHARS[idx >> 2] + SUIT_CHARS[idx & 3]


def parse_cards(text: str) -> list[int]:
    """Parse "9h9s" or "9h 9s Kc" into card indices."""
    t = text.replace(",", " ").strip()
    chunks = t.split() if " " in t else [t[i : i + 2] for i in range(0, len(t), 2)]
    return [card_index(c) for c in chunks]


def cards_str(indices: Iterable[int]) -> str:
    return " ".join(card_str(i) for i in indices)


def validate_board(board: Sequence[int]) -> tuple[int, ...]:
    b = tuple(board)
    if len(b) not in (0, 3, 4, 5):
        raise InvalidCardsError(f"board must have 0/3/4/5 cards, got {len(b)}")
    if len(set(b)) != len(b):
        raise InvalidCardsError("duplicate cards on board")
    return b


def _require_distinct(cards: Sequence[int]) -> None:
    if len(set(cards)) != len(cards):
        raise InvalidCardsError(f"duplicate cards in {cards_str(cards)}")


class HandCategory(IntEnum):
    HIGH_CARD = 0
    PAIR = 1
    TWO_PAIR = 2
    TRIPS = 3
    STRAIGHT = 4
    FLUSH = 5
    FULL_HOUSE = 6
    QUADS = 7
    STRAIGHT_FLUSH = 8


# ---------------------------------------------------------------------------
# Rank-mask lookup tables.
#
# Masks are 13-bit integers with bit r set when rank index r (0 = deuce,
# 12 = ace) is present. STRAIGHT_TOP maps a mask to the top rank index of
# the best straight in it (wheel counts, top = 3), or -1. TOP5 packs the
# five highest set bits into nibbles (bits 19..16 hold the highest).
# ---------------------------------------------------------------------------

_WHEEL = (1 << 12) | 0b1111


def _build_luts() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    straight = np.full(8192, -1, dtype=np.int64)
    top5 = np.zeros(8192, dtype=np.int64)
    popc = np.zeros(8192, dtype=np.int64)
    for mask in range(8192):
        packed = 0
        n = 0
        for r in range(12, -1, -1):
            if mask >> r & 1 and n < 5:
                packed |= r << (16 - 4 * n)
                n += 1
        top5[mask] = packed
        for hi in range(12, 3, -1):
            need = 0b11111 << (hi - 4)
            if mask & need == need:
                straight[mask] = hi
                break
        else:
            if mask & _WHEEL == _WHEEL:
                straight[mask] = 3
        popc[mask] = bin(mask).count("1")
    return straight, top5, popc


STRAIGHT_TOP, TOP5, POPCOUNT = _build_luts()
_STRAIGHT_TOP_PY = STRAIGHT_TOP.tolist()
_TOP5_PY = TOP5.tolist()

_CARD_RANK = np.repeat(np.arange(13, dtype=np.int64), 4)
_CARD_SUIT = np.tile(np.arange(4, dtype=np.int64), 13)
_POW2 = (1 << np.arange(13)).astype(np.int64)

# Score layout: category << 20 | up to five rank nibbles (bit 16 highest).
_CAT_SHIFT = 20


def hand_score(cards: Sequence[int]) -> int:
    """Score the best five-card hand out of 5..7 card indices (higher wins)."""
    m1 = m2 = m3 = m4 = 0
    scnt = [0, 0, 0, 0]
    smask = [0, 0, 0, 0]
    for c in cards:
        r = c >> 2
        s = c & 3
        b = 1 << r
        if m1 & b:
            if m2 & b:
                if m3 & b:
                    m4 |= b
                else:
                    m3 |= b
            else:
                m2 |= b
        else:
            m1 |= b
        scnt[s] += 1
        smask[s] |= b
    for s in range(4):
        if scnt[s] >= 5:
            fm = smask[s]
            st = _STRAIGHT_TOP_PY[fm]
            if st >= 0:
                return (8 << _CAT_SHIFT) | (st << 16)
            return (5 << _CAT_SHIFT) | _TOP5_PY[fm]
    if m4:
        q = _TOP5_PY[m4] >> 16
        kick = _TOP5_PY[m1 & ~(1 << q)] >> 16
        return (7 << _CAT_SHIFT) | (q << 16) | (kick << 12)
    if m3:
        t = _TOP5_PY[m3] >> 16
        rest = m2 & ~(1 << t)
        if rest:
            p = _TOP5_PY[rest] >> 16
            return (6 << _CAT_SHIFT) | (t << 16) | (p << 12)
    st = _STRAIGHT_TOP_PY[m1]
    if st >= 0:
        return (4 << _CAT_SHIFT) | (st << 16)
    if m3:
        t = _TOP5_PY[m3] >> 16
        k2 = _TOP5_PY[m1 & ~(1 << t)] >> 12
        return (3 << _CAT_SHIFT) | (t << 16) | (k2 << 8)
    if m2:
        pp = _TOP5_PY[m2]
        p1 = pp >> 16
        rest = m2 & ~(1 << p1)
        if rest:
            p2 = _TOP5_PY[rest] >> 16
            kick = _TOP5_PY[m1 & ~(1 << p1) & ~(1 << p2)] >> 16
            return (2 << _CAT_SHIFT) | (p1 << 16) | (p2 << 12) | (kick << 8)
        k3 = _TOP5_PY[m1 & ~(1 << p1)] >> 8
        return (1 << _CAT_SHIFT) | (p1 << 16) | (k3 << 4)
    return _TOP5_PY[m1]


def score_cards_batch(cards: np.ndarray) -> np.ndarray:
    """Vectorized hand_score over an (n, k) array of card indices, k in 5..7."""
    cards = np.asarray(cards, dtype=np.int64)
    n, k = cards.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    r = _CARD_RANK[cards]
    s = _CARD_SUIT[cards]
    rows13 = (np.arange(n) * 13)[:, None]
    rows4 = (np.arange(n) * 4)[:, None]
    rc = np.bincount((rows13 + r).ravel(), minlength=n * 13).reshape(n, 13)
    sc = np.bincount((rows4 + s).ravel(), minlength=n * 4).reshape(n, 4)

    m1 = (rc >= 1) @ _POW2
    m2 = (rc >= 2) @ _POW2
    m3 = (rc >= 3) @ _POW2
    m4 = (rc >= 4) @ _POW2

    has_flush = (sc >= 5).any(axis=1)
    fsuit = np.argmax(sc >= 5, axis=1)
    # OR, not sum: duplicated cards (dead-combo sweeps) must not overflow
    fmask = np.bitwise_or.reduce(np.where(s == fsuit[:, None], np.int64(1) << r, 0), axis=1)
    fmask = np.where(has_flush, fmask, 0)

    sf_top = STRAIGHT_TOP[fmask]
    st_top = STRAIGHT_TOP[m1]

    q = TOP5[m4] >> 16
    quad_kick = TOP5[m1 & ~(np.int64(1) << q)] >> 16
    quads = (7 << _CAT_SHIFT) | (q << 16) | (quad_kick << 12)

    t = TOP5[m3] >> 16
    fh_rest = m2 & ~(np.int64(1) << t)
    full_ok = (m3 > 0) & (fh_rest > 0)
    fh_pair = TOP5[fh_rest] >> 16
    full = (6 << _CAT_SHIFT) | (t << 16) | (fh_pair << 12)

    flush = (5 << _CAT_SHIFT) | TOP5[fmask]
    straight = (4 << _CAT_SHIFT) | (st_top << 16)

    trip_kick = TOP5[m1 & ~(np.int64(1) << t)] >> 12
    trips = (3 << _CAT_SHIFT) | (t << 16) | (trip_kick << 8)

    p1 = TOP5[m2] >> 16
    rest2 = m2 & ~(np.int64(1) << p1)
    p2 = TOP5[rest2] >> 16
    tp_kick = TOP5[m1 & ~(np.int64(1) << p1) & ~(np.int64(1) << p2)] >> 16
    twopair = (2 << _CAT_SHIFT) | (p1 << 16) | (p2 << 12) | (tp_kick << 8)

    pair_kick = TOP5[m1 & ~(np.int64(1) << p1)] >> 8
    pair = (1 << _CAT_SHIFT) | (p1 << 16) | (pair_kick << 4)

    high = TOP5[m1]

    return np.select(
        [
            sf_top >= 0,
            m4 > 0,
            full_ok,
            has_flush,
            st_top >= 0,
            m3 > 0,
            POPCOUNT[m2] >= 2,
            m2 > 0,
        ],
        [
            (8 << _CAT_SHIFT) | (sf_top << 16),
            quads,
            full,
            flush,
            straight,
            trips,
            twopair,
            pair,
        ],
        default=high,
    )


def score_holes_vs_board(holes: np.ndarray, board: Sequence[int]) -> np.ndarray:
    """Score an (n, 2) array of hole-card pairs against one fixed board."""
    holes = np.asarray(holes, dtype=np.int64)
    n = holes.shape[0]
    b = np.asarray(board, dtype=np.int64)
    full = np.concatenate([holes, np.broadcast_to(b, (n, len(b)))], axis=1)
    return score_cards_batch(full)


@dataclass(frozen=True)
class HandValue:
    """Evaluated hand: category plus tiebreak ranks (2..14, most significant first)."""

    category: HandCategory
    tiebreak: tuple[int, ...]

    @property
    def score(self) -> int:
        s = int(self.category) << _CAT_SHIFT
        for i, r in enumerate(self.tiebreak):
            s |= (r - 2) << (16 - 4 * i)
        return s

    @classmethod
    def from_score(cls, score: int) -> "HandValue":
        cat = HandCategory(score >> _CAT_SHIFT)
        n_ranks = {
            HandCategory.HIGH_CARD: 5,
            HandCategory.PAIR: 4,
            HandCategory.TWO_PAIR: 3,
            HandCategory.TRIPS: 3,
            HandCategory.STRAIGHT: 1,
            HandCategory.FLUSH: 5,
            HandCategory.FULL_HOUSE: 2,
            HandCategory.QUADS: 2,
            HandCategory.STRAIGHT_FLUSH: 1,
        }[cat]
        ranks = tuple(((score >> (16 - 4 * i)) & 0xF) + 2 for i in range(n_ranks))
        return cls(cat, ranks)

    def __lt__(self, other: "HandValue") -> bool:
        return self.score < other.score

    def __le__(self, other: "HandValue") -> bool:
        return self.score <= other.score

    def __gt__(self, other: "HandValue") -> bool:
        return self.score > other.score

    def __ge__(self, other: "HandValue") -> bool:
        return self.score >= other.score


def evaluate7(hole: Sequence[int], board: Sequence[int]) -> HandValue:
    """Best five-card hand from two hole cards and a five-card board."""
    if len(hole) != 2 or len(board) != 5:
        raise InvalidCardsError("evaluate7 needs 2 hole cards and a 5-card board")
    cards = tuple(hole) + tuple(board)
    _require_distinct(cards)
    return HandValue.from_score(hand_score(cards))


def evaluate5(cards: Sequence[int]) -> HandValue:
    if len(cards) != 5:
        raise InvalidCardsError("evaluate5 needs exactly 5 cards")
    _require_distinct(cards)
    return HandValue.from_score(hand_score(cards))


# ---------------------------------------------------------------------------
# Deterministic dealing
# ---------------------------------------------------------------------------


class DealRng:
    """Seedable card stream. Identical (seed, stream) gives identical deals.

    One instance per simulated table; instances are not safe to share
    across threads.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,)))
        )

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def shuffled_deck(self) -> list[int]:
        return self._gen.permutation(DECK_SIZE).tolist()

    def randint(self, n: int) -> int:
        return int(self._gen.integers(0, n))

    def random(self) -> float:
        return float(self._gen.random())

    def choice_index(self, weights: Sequence[float]) -> int:
        w = np.asarray(weights, dtype=float)
        w = w / w.sum()
        return int(self._gen.choice(len(w), p=w))

    def spawn(self, stream: int) -> "DealRng":
        return DealRng(self.seed, stream)


# ---------------------------------------------------------------------------
# Equity oracles
# ---------------------------------------------------------------------------


def _runout_chunks(deck: list[int], need: int, chunk: int = 200_000):
    it = itertools.combinations(deck, need)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def equity_exhaustive(hero: Sequence[int], villain: Sequence[int], board: Sequence[int]) -> float:
    """Exact equity of hero vs one known villain hand: wins plus half of ties,
    enumerating every remaining runout."""
    board = validate_board(board)
    used = tuple(hero) + tuple(villain) + board
    _require_distinct(used)
    if len(hero) != 2 or len(villain) != 2:
        raise InvalidCardsError("both hands need exactly 2 cards")
    need = 5 - len(board)
    if need == 0:
        hs = hand_score(tuple(hero) + board)
        vs = hand_score(tuple(villain) + board)
        return 1.0 if hs > vs else (0.5 if hs == vs else 0.0)
    deck = [c for c in range(DECK_SIZE) if c not in set(used)]
    wins = ties = total = 0
    hero_a = np.array(hero, dtype=np.int64)
    vill_a = np.array(villain, dtype=np.int64)
    board_a = np.array(board, dtype=np.int64)
    for runs in _runout_chunks(deck, need):
        m = runs.shape[0]
        full_board = np.concatenate([np.broadcast_to(board_a, (m, len(board))), runs], axis=1)
        hs = score_cards_batch(np.concatenate([np.broadcast_to(hero_a, (m, 2)), full_board], axis=1))
        vs = score_cards_batch(np.concatenate([np.broadcast_to(vill_a, (m, 2)), full_board], axis=1))
        wins += int((hs > vs).sum())
        ties += int((hs == vs).sum())
        total += m
    return (wins + 0.5 * ties) / total


def equity_vs_range(
    hero: Sequence[int],
    range_weights: np.ndarray,
    board: Sequence[int],
    *,
    preflop_samples: int = 10_000,
    runout_samples: int | None = None,
    combo_samples: int | None = None,
    rng: DealRng | None = None,
) -> float:
    """Weight-averaged equity of hero against a 1326-combo weighted range.

    Post-flop the runouts are enumerated exhaustively unless runout_samples
    is given; pre-flop falls back to Monte Carlo with preflop_samples draws.
    combo_samples optionally subsamples the range support (weighted), which
    is what the decision layer uses to keep per-decision cost flat.
    """
    from . import rangegrid  # local import; rangegrid depends on cards

    board = validate_board(board)
    _require_distinct(tuple(hero) + board)
    w = np.asarray(range_weights, dtype=float).copy()
    dead = set(hero) | set(board)
    dead_mask = rangegrid.combos_with_any(dead)
    w[dead_mask] = 0.0
    if w.sum() <= 0:
        raise UndefinedRangeError("range has no live support against this hero/board")
    w = w / w.sum()
    support = np.flatnonzero(w > 0)

    gen = (rng or DealRng(0)).generator

    if combo_samples is not None and combo_samples < len(support):
        picks = gen.choice(support, size=combo_samples, p=w[support] / w[support].sum())
        support, counts = np.unique(picks, return_counts=True)
        sub_w = counts.astype(float)
    else:
        sub_w = w[support]

    combos = rangegrid.COMBO_CARDS[support]  # (c, 2)

    if len(board) == 0:
        # Monte Carlo: sample a combo, then a 5-card runout avoiding collisions.
        n = preflop_samples
        pick = gen.choice(len(support), size=n, p=sub_w / sub_w.sum())
        vill = combos[pick]
        deck = np.array([c for c in range(DECK_SIZE) if c not in set(hero)], dtype=np.int64)
        hero_a = np.array(hero, dtype=np.int64)
        wins = ties = 0
        for i in range(n):
            avail = deck[(deck != vill[i, 0]) & (deck != vill[i, 1])]
            run = gen.choice(avail, size=5, replace=False)
            hs = hand_score((hero[0], hero[1], *run))
            vs = hand_score((int(vill[i, 0]), int(vill[i, 1]), *run))
            if hs > vs:
                wins += 1
            elif hs == vs:
                ties += 1
        return (wins + 0.5 * ties) / n

    need = 5 - len(board)
    deck = np.array(sorted(set(range(DECK_SIZE)) - dead), dtype=np.int64)
    if need == 0:
        runs = np.zeros((1, 0), dtype=np.int64)
    else:
        runs = np.array(list(itertools.combinations(deck.tolist(), need)), dtype=np.int64)
        if runout_samples is not None and runout_samples < runs.shape[0]:
            idx = gen.choice(runs.shape[0], size=runout_samples, replace=False)
            runs = runs[idx]

    m = runs.shape[0]
    board_a = np.broadcast_to(np.array(board, dtype=np.int64), (m, len(board)))
    full_board = np.concatenate([board_a, runs], axis=1)  # (m, 5)
    hero_scores = score_cards_batch(
        np.concatenate([np.broadcast_to(np.array(hero, dtype=np.int64), (m, 2)), full_board], axis=1)
    )

    total_equity = 0.0
    total_weight = 0.0
    chunk = max(1, 2_000_000 // max(m, 1))
    for lo in range(0, len(support), chunk):
        cc = combos[lo : lo + chunk]  # (c, 2)
        cw = sub_w[lo : lo + chunk]
        c = cc.shape[0]
        # villain cards colliding with a runout invalidate that runout
        if need > 0:
            collide = (runs[None, :, :] == cc[:, None, 0:1]).any(axis=2) | (
                runs[None, :, :] == cc[:, None, 1:2]
            ).any(axis=2)
        else:
            collide = np.zeros((c, m), dtype=bool)
        vb = np.concatenate(
            [
                np.repeat(cc, m, axis=0),
                np.tile(full_board, (c, 1)),
            ],
            axis=1,
        )
        vscores = score_cards_batch(vb).reshape(c, m)
        hs = hero_scores[None, :]
        pts = np.where(hs > vscores, 1.0, np.where(hs == vscores, 0.5, 0.0))
        pts = np.where(collide, np.nan, pts)
        valid = (~collide).sum(axis=1)
        eq = np.nansum(pts, axis=1) / np.maximum(valid, 1)
        ok = valid > 0
        total_equity += float((eq[ok] * cw[ok]).sum())
        total_weight += float(cw[ok].sum())
    if total_weight <= 0:
        raise UndefinedRangeError("no combo in range has a legal runout")
    return total_equity / total_weight


FULL_DECK: tuple[int, ...] = tuple(range(DECK_SIZE))
