"""Relative hand strength on an 11-point scale, with a learnable overlay.

The base model is rule-derived rather than a literal multi-dimensional
array: a holding is reduced to features (made-hand class relative to the
board, kicker tier, draw tier, board texture) and the rules map those to a
real value in [0, 10], rounded to a category on query. On complete boards
the value is anchored to the holding's percentile among all live opposing
combos, which keeps the scale monotone in absolute strength where draws
are dead. Learning applies clamped additive deltas per feature bucket.

Category meanings, low to high: 0 Niente (nothing), 1 HardlyAnything,
2 Weak, 3 Fair, 4 Decent, 5 Good, 6 Great, 7 Excellent, 8 Monster,
9 Nuts, 10 Alcatraz. Alcatraz is reserved for unbeatable hands such as
quads on a paired board that cripple the board and choke off action.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .cards import (
    STRAIGHT_TOP,
    HandCategory,
    InvalidCardsError,
    score_holes_vs_board,
    validate_board,
)
from .rangegrid import COMBO_CARDS, N_COMBOS, combos_with_any


class RsCategory(IntEnum):
    NIENTE = 0
    HARDLY_ANYTHING = 1
    WEAK = 2
    FAIR = 3
    DECENT = 4
    GOOD = 5
    GREAT = 6
    EXCELLENT = 7
    MONSTER = 8
    NUTS = 9
    ALCATRAZ = 10

    @property
    def label(self) -> str:
        return _CATEGORY_LABELS[int(self)]


_CATEGORY_LABELS = [
    "Niente",
    "HardlyAnything",
    "Weak",
    "Fair",
    "Decent",
    "Good",
    "Great",
    "Excellent",
    "Monster",
    "Nuts",
    "Alcatraz",
]

N_CATEGORIES = 11


class MadeClass(IntEnum):
    """Hole-card participation classes, ascending in typical strength."""

    NOTHING = 0
    HIGH_CARD = 1
    PAIR_WEAK = 2
    PAIR_MID = 3
    PAIR_TOP_WEAK = 4
    PAIR_TOP_GOOD = 5
    OVERPAIR_MID = 6
    OVERPAIR_BIG = 7
    TWO_PAIR = 8
    TRIPS = 9
    SET = 10
    STRAIGHT = 11
    FLUSH = 12
    FULL_HOUSE = 13
    QUADS = 14
    STRAIGHT_FLUSH = 15


class DrawTier(IntEnum):
    NONE = 0
    WEAK = 1  # gutshot-grade, ~4 outs
    STRONG = 2  # flush draw or 7+ straight outs
    COMBO = 3  # flush draw plus straight outs


@dataclass(frozen=True)
class BoardTexture:
    paired: bool
    flush_level: str  # rainbow / twotone / suited
    connectivity: str  # low / med / high
    high_card: str  # low / mid / high

    @property
    def wet(self) -> bool:
        return self.flush_level == "suited" or self.connectivity == "high"


def board_texture(board: Sequence[int]) -> BoardTexture:
    board = validate_board(board)
    if len(board) < 3:
        raise InvalidCardsError("texture needs a dealt board")
    ranks = [c >> 2 for c in board]
    suits = [c & 3 for c in board]
    rank_counts = np.bincount(ranks, minlength=13)
    suit_counts = np.bincount(suits, minlength=4)
    paired = bool((rank_counts >= 2).any())
    ms = int(suit_counts.max())
    flush_level = "rainbow" if ms <= 1 else ("twotone" if ms == 2 else "suited")
    distinct = sorted(set(ranks), reverse=True)
    windows = [set(range(lo, lo + 5)) for lo in range(0, 9)]
    windows.append({12, 0, 1, 2, 3})  # wheel window
    best_in_window = max(len(w & set(distinct)) for w in windows)
    connectivity = "high" if best_in_window >= 3 else ("med" if best_in_window == 2 else "low")
    top = distinct[0]
    high_card = "high" if top >= 9 else ("mid" if top >= 6 else "low")
    return BoardTexture(paired, flush_level, connectivity, high_card)


def street_kind(board: Sequence[int]) -> str:
    return {3: "flop", 4: "turn", 5: "river"}[len(board)]


# ---------------------------------------------------------------------------
# Feature extraction (vectorized over many combos vs one board)
# ---------------------------------------------------------------------------


def _made_classes(holes: np.ndarray, scores: np.ndarray, board: Sequence[int]) -> np.ndarray:
    ranks = [c >> 2 for c in board]
    suit_counts = np.bincount([c & 3 for c in board], minlength=4)
    board_mask = 0
    for r in ranks:
        board_mask |= 1 << r
    distinct = sorted(set(ranks), reverse=True)
    bt0 = distinct[0]
    bt1 = distinct[1] if len(distinct) > 1 else -1
    board_straight = int(STRAIGHT_TOP[board_mask]) if len(board) == 5 else -1

    r1 = holes[:, 0] >> 2
    r2 = holes[:, 1] >> 2
    s1 = holes[:, 0] & 3
    s2 = holes[:, 1] & 3
    rhi = np.maximum(r1, r2)
    pocket = r1 == r2
    overcards = (r1 > bt0).astype(np.int64) + (r2 > bt0).astype(np.int64)

    cat = scores >> 20
    nib0 = (scores >> 16) & 0xF
    nib1 = (scores >> 12) & 0xF

    high = np.where((overcards >= 1) | (rhi == 12), MadeClass.HIGH_CARD, MadeClass.NOTHING)

    def pocket_tier(pr):
        overpair = np.where(pr >= 11, MadeClass.OVERPAIR_BIG, MadeClass.OVERPAIR_MID)
        return np.select(
            [pr > bt0, pr > bt1],
            [overpair, MadeClass.PAIR_MID],
            default=MadeClass.PAIR_WEAK,
        )

    def hole_pair_tier(pr, kick):
        return np.select(
            [(pr == bt0) & (kick >= 10), pr == bt0, pr == bt1],
            [MadeClass.PAIR_TOP_GOOD, MadeClass.PAIR_TOP_WEAK, MadeClass.PAIR_MID],
            default=MadeClass.PAIR_WEAK,
        )

    made = high.copy()

    # One pair
    is_pair = cat == HandCategory.PAIR
    pp = nib0
    m_pocket = is_pair & pocket & (r1 == pp)
    made = np.where(m_pocket, pocket_tier(pp), made)
    one_hit = is_pair & ~pocket & ((r1 == pp) | (r2 == pp))
    kick = np.where(r1 == pp, r2, r1)
    made = np.where(one_hit, hole_pair_tier(pp, kick), made)

    # Two pair
    is_tp = cat == HandCategory.TWO_PAIR
    p1, p2 = nib0, nib1
    both = is_tp & ~pocket & ((r1 == p1) | (r1 == p2)) & ((r2 == p1) | (r2 == p2))
    made = np.where(both, MadeClass.TWO_PAIR, made)
    tp_pocket = is_tp & pocket & ((r1 == p1) | (r1 == p2))
    made = np.where(tp_pocket, pocket_tier(r1), made)
    tp_one = is_tp & ~pocket & ~both & (((r1 == p1) | (r1 == p2)) ^ ((r2 == p1) | (r2 == p2)))
    hole_pr = np.where((r1 == p1) | (r1 == p2), r1, r2)
    hole_kick = np.where((r1 == p1) | (r1 == p2), r2, r1)
    made = np.where(tp_one, hole_pair_tier(hole_pr, hole_kick), made)

    # Trips: set (pocket) vs trips (one hole + board pair) vs board trips
    is_trips = cat == HandCategory.TRIPS
    tr = nib0
    made = np.where(is_trips & pocket & (r1 == tr), MadeClass.SET, made)
    made = np.where(is_trips & ~pocket & ((r1 == tr) | (r2 == tr)), MadeClass.TRIPS, made)

    # Straight: must beat whatever the board alone plays
    is_st = cat == HandCategory.STRAIGHT
    made = np.where(is_st & (nib0 > board_straight), MadeClass.STRAIGHT, made)

    # Flush: any hole card of the flush suit participates
    is_fl = cat == HandCategory.FLUSH
    if is_fl.any():
        tot0 = suit_counts[s1] + 1 + (s1 == s2)
        tot1 = suit_counts[s2] + 1 + (s1 == s2)
        hole_in = (tot0 >= 5) | (tot1 >= 5)
        made = np.where(is_fl & hole_in, MadeClass.FLUSH, made)

    # Full house / quads / straight flush
    is_fh = cat == HandCategory.FULL_HOUSE
    fh_in = (r1 == nib0) | (r2 == nib0) | (r1 == nib1) | (r2 == nib1)
    made = np.where(is_fh & fh_in, MadeClass.FULL_HOUSE, made)
    is_q = cat == HandCategory.QUADS
    made = np.where(is_q & ((r1 == nib0) | (r2 == nib0)), MadeClass.QUADS, made)
    made = np.where(cat == HandCategory.STRAIGHT_FLUSH, MadeClass.STRAIGHT_FLUSH, made)

    return made.astype(np.int64)


def _draw_tiers(holes: np.ndarray, board: Sequence[int]) -> np.ndarray:
    """Draw tier per combo; all NONE on a complete board."""
    n = holes.shape[0]
    if len(board) >= 5:
        return np.zeros(n, dtype=np.int64)
    ranks = [c >> 2 for c in board]
    board_mask = 0
    for r in ranks:
        board_mask |= 1 << r
    suit_counts = np.bincount([c & 3 for c in board], minlength=4)

    r1 = holes[:, 0] >> 2
    r2 = holes[:, 1] >> 2
    s1 = holes[:, 0] & 3
    s2 = holes[:, 1] & 3

    tot1 = suit_counts[s1] + 1 + (s1 == s2)
    tot2 = suit_counts[s2] + 1 + (s1 == s2)
    fd = (tot1 == 4) | (tot2 == 4)

    mask_full = board_mask | (np.int64(1) << r1) | (np.int64(1) << r2)
    outs = np.zeros(n, dtype=np.int64)
    for r in range(13):
        bit = np.int64(1) << r
        absent = (mask_full & bit) == 0
        made_with = STRAIGHT_TOP[mask_full | bit]
        board_with = int(STRAIGHT_TOP[board_mask | (1 << r)])
        qualifies = absent & (made_with >= 0) & (made_with > board_with)
        outs += np.where(qualifies, 4, 0)

    return np.select(
        [fd & (outs >= 4), fd | (outs >= 7), outs >= 4],
        [DrawTier.COMBO, DrawTier.STRONG, DrawTier.WEAK],
        default=DrawTier.NONE,
    ).astype(np.int64)


class BoardContext:
    """Everything strength-related that depends only on the board: scores,
    features, and the river percentile table for all 1,326 combos. Built
    once per street and shared across every grid on that board."""

    def __init__(self, board: Sequence[int]):
        self.board = validate_board(board)
        if len(self.board) < 3:
            raise InvalidCardsError("relative strength is undefined pre-flop")
        self.street = street_kind(self.board)
        self.texture = board_texture(self.board)
        self.dead_mask = combos_with_any(self.board)
        scores = score_holes_vs_board(COMBO_CARDS, self.board)
        self.scores = np.where(self.dead_mask, -1, scores)
        self.max_score = int(self.scores.max())
        self.made = _made_classes(COMBO_CARDS, scores, self.board)
        self.draw = _draw_tiers(COMBO_CARDS, self.board)
        self._percentile: np.ndarray | None = None
        self._category_cache: dict[tuple[int, int], np.ndarray] = {}

    def combo_index_of(self, hole: Sequence[int]) -> int:
        from .rangegrid import combo_index

        return combo_index(hole[0], hole[1])

    @property
    def percentile(self) -> np.ndarray:
        """Share of the live-combo pool each combo beats (ties count half).

        The pool is shared by every combo (no per-combo blocker exclusion),
        which makes the percentile a pure non-decreasing function of the
        hand score: equal scores share a value, better scores never rank
        lower. Card-removal nuance belongs to the grids, not the scale."""
        if self._percentile is None:
            live = ~self.dead_mask
            s = self.scores
            live_scores = np.sort(s[live])
            n_live = max(live_scores.size, 1)
            pos_less = np.searchsorted(live_scores, s, side="left")
            pos_leq = np.searchsorted(live_scores, s, side="right")
            ties = pos_leq - pos_less
            self._percentile = (pos_less + 0.5 * ties) / n_live
        return self._percentile

    _CTX_CACHE: "dict[tuple[int, ...], BoardContext]" = {}
    _CTX_CACHE_MAX = 24

    @classmethod
    def cached(cls, board: Sequence[int]) -> "BoardContext":
        """Shared per-board context; hot paths on the same street reuse it."""
        key = tuple(board)
        ctx = cls._CTX_CACHE.get(key)
        if ctx is None:
            ctx = cls(board)
            if len(cls._CTX_CACHE) >= cls._CTX_CACHE_MAX:
                cls._CTX_CACHE.pop(next(iter(cls._CTX_CACHE)))
            cls._CTX_CACHE[key] = ctx
        return ctx

    def percentile_of(self, idx: int) -> float:
        """Scalar percentile for one combo without building the full table."""
        if self._percentile is not None:
            return float(self._percentile[idx])
        live = ~self.dead_mask
        s = self.scores
        si = int(s[idx])
        pool = s[live]
        if pool.size == 0:
            return 0.5
        less = int((pool < si).sum())
        ties = int((pool == si).sum())
        return (less + 0.5 * ties) / pool.size


# ---------------------------------------------------------------------------
# Rules and the queryable table
# ---------------------------------------------------------------------------


class RsmRulesError(ValueError):
    pass


@dataclass
class RsmRules:
    made_value: dict[MadeClass, float]
    draw_value: dict[tuple[str, DrawTier], float]
    adjustments: dict[str, float]

    @classmethod
    def parse(cls, lines: Iterable[str], *, source: str = "<rules>") -> "RsmRules":
        made: dict[MadeClass, float] = {}
        draw: dict[tuple[str, DrawTier], float] = {}
        adj: dict[str, float] = {}
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "made" and len(parts) == 3:
                    made[MadeClass[parts[1]]] = float(parts[2])
                elif parts[0] == "draw" and len(parts) == 4:
                    draw[(parts[1], DrawTier[parts[2]])] = float(parts[3])
                elif parts[0] == "adjust" and len(parts) == 3:
                    adj[parts[1]] = float(parts[2])
                else:
                    raise KeyError(parts[0])
            except (KeyError, ValueError, IndexError):
                raise RsmRulesError(f"{source}:{lineno}: cannot parse {line!r}") from None
        missing = [m.name for m in MadeClass if m not in made]
        if missing:
            raise RsmRulesError(f"{source}: missing made-class values: {missing}")
        return cls(made, draw, adj)

    @classmethod
    def shipped(cls) -> "RsmRules":
        text = resources.files("holdemlab").joinpath("data/rsm_rules.txt").read_text(encoding="utf-8")
        return cls.parse(text.splitlines(), source="rsm_rules.txt")


def bucket_key(street: str, made: MadeClass, draw: DrawTier, wet: bool) -> str:
    return f"{street}|{MadeClass(made).name}|{DrawTier(draw).name}|{'wet' if wet else 'dry'}"


_ONE_PAIR_CLASSES = (
    MadeClass.PAIR_WEAK,
    MadeClass.PAIR_MID,
    MadeClass.PAIR_TOP_WEAK,
    MadeClass.PAIR_TOP_GOOD,
    MadeClass.OVERPAIR_MID,
    MadeClass.OVERPAIR_BIG,
)
_BIG_MADE_CLASSES = (MadeClass.TWO_PAIR, MadeClass.TRIPS, MadeClass.SET)


class RsmTable:
    """Rule base plus an additive learned overlay, queried per (hole, board).

    Queries are deterministic for a fixed table state. Deltas accumulate per
    feature bucket and are clamped so learning cannot push a bucket more
    than `clamp` categories from its base. Writers must be serialized by the
    owner; concurrent readers are safe.
    """

    def __init__(self, rules: RsmRules | None = None, clamp: float = 1.5):
        self.rules = rules or RsmRules.shipped()
        self.clamp = float(clamp)
        self.overlay: dict[str, float] = {}
        self.version = 0  # bumped on every overlay change; keys caches
        self._made_values = np.array([self.rules.made_value[MadeClass(m)] for m in range(16)])

    # -- values ------------------------------------------------------------

    def _base_values(self, ctx: BoardContext) -> np.ndarray:
        made = ctx.made
        draw = ctx.draw
        vals = self._made_values[made]
        if ctx.street in ("flop", "turn"):
            dv = np.zeros(4)
            for tier in DrawTier:
                dv[int(tier)] = self.rules.draw_value.get((ctx.street, tier), 0.0)
            vals = np.maximum(vals, dv[draw])
            wet = ctx.texture.wet
            if wet and "wet_pairs" in self.rules.adjustments:
                sel = np.isin(made, [int(c) for c in _ONE_PAIR_CLASSES])
                vals = np.where(sel, vals + self.rules.adjustments["wet_pairs"], vals)
            if ctx.texture.flush_level == "suited" and "suited_bigmade" in self.rules.adjustments:
                sel = np.isin(made, [int(c) for c in _BIG_MADE_CLASSES])
                vals = np.where(sel, vals + self.rules.adjustments["suited_bigmade"], vals)
        else:
            # Complete board: anchor to the percentile among live opposing
            # combos, a pure function of absolute strength, so a better made
            # hand can never map lower than a worse one once draws are dead.
            vals = ctx.percentile * 9.0
        # Nut promotion and the crippled-board ceiling.
        is_nut = ctx.scores == ctx.max_score
        vals = np.where(is_nut, np.maximum(vals, 9.0), vals)
        cripple = (
            is_nut
            & ((ctx.scores >> 20) >= int(HandCategory.QUADS))
            & ctx.texture.paired
        )
        vals = np.where(cripple, 10.0, vals)
        return vals

    def _overlay_table(self, street: str, wet: bool) -> np.ndarray | None:
        """(made, draw) delta lattice for one street/texture slice, cached
        per overlay version."""
        key = (street, wet, self.version)
        cached = getattr(self, "_overlay_cache", None)
        if cached is not None and cached[0] == key:
            return cached[1]
        wet_tag = "wet" if wet else "dry"
        table = None
        for bucket, delta in self.overlay.items():
            b_street, made_name, draw_name, wtag = bucket.split("|")
            if b_street != street or wtag != wet_tag:
                continue
            if table is None:
                table = np.zeros((16, 4))
            table[int(MadeClass[made_name]), int(DrawTier[draw_name])] += delta
        self._overlay_cache = (key, table)
        return table

    def _overlay_values(self, ctx: BoardContext) -> np.ndarray:
        table = self._overlay_table(ctx.street, ctx.texture.wet)
        if table is None:
            return np.zeros(N_COMBOS)
        return table[ctx.made, ctx.draw]

    def values_many(self, ctx: BoardContext) -> np.ndarray:
        vals = self._base_values(ctx) + self._overlay_values(ctx)
        return np.clip(vals, 0.0, 10.0)

    def categories_many(self, ctx: BoardContext) -> np.ndarray:
        """Category per combo; dead combos get -1. Cached per (table,
        overlay version) on the context."""
        key = (id(self), self.version)
        cached = ctx._category_cache.get(key)
        if cached is not None:
            return cached
        cats = np.floor(self.values_many(ctx) + 0.5).astype(np.int64)
        cats = np.clip(cats, 0, 10)
        cats = np.where(ctx.dead_mask, -1, cats)
        ctx._category_cache.clear()
        ctx._category_cache[key] = cats
        return cats

    def query(self, hole: Sequence[int], board: Sequence[int], ctx: BoardContext | None = None) -> RsCategory:
        board = validate_board(board)
        if len(board) < 3:
            raise InvalidCardsError("relative strength is undefined pre-flop")
        if len(set(tuple(hole) + board)) != 2 + len(board):
            raise InvalidCardsError("hole cards collide with the board")
        ctx = ctx or BoardContext.cached(board)
        idx = ctx.combo_index_of(hole)
        cats = self.categories_many(ctx)
        return RsCategory(int(cats[idx]))

    def bucket_for(self, hole: Sequence[int], board: Sequence[int], ctx: BoardContext | None = None) -> str:
        ctx = ctx or BoardContext.cached(board)
        idx = ctx.combo_index_of(hole)
        return bucket_key(
            ctx.street, MadeClass(int(ctx.made[idx])), DrawTier(int(ctx.draw[idx])), ctx.texture.wet
        )

    # -- learning ----------------------------------------------------------

    def apply_delta(self, bucket: str, delta: float) -> float:
        """Accumulate a correction for one feature bucket. Each delta and the
        accumulated overlay are bounded by the clamp; violating deltas are
        rejected. Returns the new overlay value."""
        if abs(delta) > self.clamp + 1e-12:
            raise ValueError(f"delta {delta} exceeds clamp {self.clamp}")
        new = float(np.clip(self.overlay.get(bucket, 0.0) + delta, -self.clamp, self.clamp))
        if new == 0.0:
            self.overlay.pop(bucket, None)
        else:
            self.overlay[bucket] = new
        self.version += 1
        return new

    # -- persistence ---------------------------------------------------------

    def overlay_to_dict(self) -> dict[str, float]:
        return dict(self.overlay)

    def overlay_from_dict(self, data: dict[str, float]) -> None:
        self.overlay = {str(k): float(v) for k, v in data.items()}
        self.version += 1


def relative_strength(hole: Sequence[int], board: Sequence[int], table: RsmTable | None = None) -> RsCategory:
    """Convenience scalar query against the shipped default rules."""
    return (table or _default_table()).query(hole, board)


_DEFAULT_TABLE: RsmTable | None = None


def _default_table() -> RsmTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = RsmTable()
    return _DEFAULT_TABLE
