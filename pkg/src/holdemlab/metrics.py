"""Win-rate accounting: net/adjusted ledgers, BB/100, rake and rakeback,
variance segmentation, confidence intervals, and the failure cost model.

Ledger arithmetic is integer cents; the identity
    net = pre-rake - rake + rakeback
holds exactly per hand and cumulatively. The all-in adjusted column swaps a
hand's actual result for its expectation at the moment the money went in,
locked at the first point the hero was fully committed with a live caller.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable

import numpy as np

from .cards import DECK_SIZE, score_cards_batch
from .table import HandRecord

Z_95 = 1.959963984540054


class LedgerError(ValueError):
    pass


def bb100(amount_cents: int | float, hands: int, bb_cents: int | float) -> float:
    """Big blinds won per 100 hands."""
    if hands <= 0:
        raise LedgerError("win rate undefined for zero hands")
    return (amount_cents / bb_cents) / (hands / 100.0)


@dataclass
class LedgerRow:
    hand_id: int
    net_cents: int
    rake_cents: int  # rake attributed to the hero this hand
    adjusted_cents: int  # all-in adjusted net
    rakeback_cents: float

    @property
    def pre_rake_cents(self) -> int:
        return self.net_cents + self.rake_cents


@dataclass
class ResultLedger:
    bb_cents: int
    rakeback_rate: float = 0.069
    rows: list[LedgerRow] = field(default_factory=list)

    def add_hand(self, hand_id: int, net_cents: int, rake_cents: int, adjusted_cents: int | None = None) -> LedgerRow:
        row = LedgerRow(
            hand_id,
            net_cents,
            rake_cents,
            net_cents if adjusted_cents is None else adjusted_cents,
            self.rakeback_rate * rake_cents,
        )
        self.rows.append(row)
        return row

    @property
    def hands(self) -> int:
        return len(self.rows)

    def totals(self) -> dict[str, float]:
        net = sum(r.net_cents for r in self.rows)
        rake = sum(r.rake_cents for r in self.rows)
        adjusted = sum(r.adjusted_cents for r in self.rows)
        rakeback = sum(r.rakeback_cents for r in self.rows)
        return {
            "net": net,
            "rake": rake,
            "pre_rake": net + rake,
            "adjusted": adjusted,
            "rakeback": rakeback,
            "final": net + rakeback,
        }


@dataclass(frozen=True)
class FailureCostModel:
    """Cost of an operational failure mid-hand. Most failures happen when the
    correct action was folding anyway (zero direct cost); the rest forfeit
    the hand's equity, and every incident carries secondary costs (forced
    blinds on re-entry, reset stack)."""

    p_fold: float
    mean_equity_loss_bb: float
    secondary_cost_bb: float

    def __post_init__(self):
        if not (0.0 <= self.p_fold <= 1.0):
            raise LedgerError("p_fold must be a probability")


def failure_cost(model: FailureCostModel) -> tuple[float, float]:
    """(direct BB per incident, total BB per incident), exact decimal math."""
    p = Decimal(str(model.p_fold))
    loss = Decimal(str(model.mean_equity_loss_bb))
    secondary = Decimal(str(model.secondary_cost_bb))
    direct = (Decimal(1) - p) * loss
    total = direct + secondary
    return float(direct), float(total)


# ---------------------------------------------------------------------------
# All-in adjustment
# ---------------------------------------------------------------------------


def _equity_multiway(hero_hole, villain_holes, board, sample_above: int = 100_000, seed: int = 0) -> float:
    """Hero's expected share of the pot vs revealed hands, enumerating every
    remaining runout (ties split evenly). Pre-flop locks have 1.7M runouts;
    beyond sample_above a seeded subsample keeps the cost flat while staying
    deterministic per hand."""
    import itertools

    used = set(hero_hole) | set(board)
    for h in villain_holes:
        used |= set(h)
    need = 5 - len(board)
    deck = [c for c in range(DECK_SIZE) if c not in used]
    runs = [()] if need == 0 else list(itertools.combinations(deck, need))
    if len(runs) > sample_above:
        gen = np.random.Generator(np.random.PCG64(seed))
        picks = gen.choice(len(runs), size=12_000, replace=False)
        runs = [runs[i] for i in picks]
    runs_a = np.array([list(r) for r in runs], dtype=np.int64).reshape(len(runs), need)
    m = len(runs)
    board_a = np.broadcast_to(np.array(board, dtype=np.int64), (m, len(board)))
    full = np.concatenate([board_a, runs_a], axis=1)
    all_hands = [tuple(hero_hole)] + [tuple(v) for v in villain_holes]
    scores = np.stack(
        [
            score_cards_batch(np.concatenate([np.broadcast_to(np.array(h, dtype=np.int64), (m, 2)), full], axis=1))
            for h in all_hands
        ]
    )  # (players, m)
    best = scores.max(axis=0)
    hero_best = scores[0] == best
    n_best = (scores == best).sum(axis=0)
    share = np.where(hero_best, 1.0 / n_best, 0.0)
    return float(share.mean())


def all_in_adjusted(record: HandRecord, hero_id: str) -> int:
    """Adjusted net for the hero: if the hand locked all-in before the river
    with live callers, replace the actual result with equity x (pot - rake)
    minus what the hero invested; otherwise the actual net."""
    hero_seat = record.hero_seat_of(hero_id)
    if hero_seat is None:
        raise LedgerError(f"{hero_id} not in hand {record.hand_id}")
    actual = record.net.get(hero_seat, 0)
    if len(record.showdown) < 2 or hero_seat not in dict(record.showdown):
        return actual

    # Walk the action stream to find the lock point: the first moment the
    # hero is all-in (or every opponent is) while the hand is still live.
    street_board_len = {"preflop": 0, "flop": 3, "turn": 4, "river": 5}
    stacks = {seat: stack for seat, _, stack in record.seats}
    committed = {seat: 0 for seat, _, _ in record.seats}
    street_b = {seat: 0 for seat, _, _ in record.seats}
    live = {seat for seat, _, _ in record.seats}
    sb_seat = bb_seat = None
    from .table import positions_for

    pos = positions_for(sorted(live), record.button)
    for seat, name in pos.items():
        if name == "sb":
            committed[seat] = min(record.sb_cents, stacks[seat])
        elif name == "bb":
            committed[seat] = min(record.bb_cents, stacks[seat])
    street_b = dict(committed)
    cur_street = "preflop"
    lock_board_len: int | None = None
    showdown_seats = {s for s, _ in record.showdown}

    def allin(seat: int) -> bool:
        return committed[seat] >= stacks[seat]

    for street, seat, action, to_amount in record.actions:
        if street != cur_street:
            cur_street = street
            street_b = {s: 0 for s in street_b}
        if action == "fold":
            live.discard(seat)
        elif action in ("call", "bet", "raise", "allin"):
            committed[seat] += to_amount - street_b[seat]
            street_b[seat] = to_amount
        live_sd = live & showdown_seats
        # Lock at the first moment the hero's chips are fully committed with
        # a live caller, or every live opponent's are (hero merely covers).
        if (
            lock_board_len is None
            and hero_seat in live
            and len(live_sd) >= 2
            and (allin(hero_seat) or all(allin(s) for s in live_sd if s != hero_seat))
        ):
            lock_board_len = street_board_len[cur_street]
    if lock_board_len is None or lock_board_len >= 5:
        return actual

    board = record.board[:lock_board_len]
    villains = [h for s, h in record.showdown if s != hero_seat]
    hero_hole = dict(record.showdown)[hero_seat]
    equity = _equity_multiway(hero_hole, villains, board, seed=record.hand_id)
    pot = sum(record.awards.values())
    rake = record.total_rake()
    invested = committed[hero_seat]
    return int(round(equity * (pot - rake))) - invested


def ledger_from_records(
    records: Iterable[HandRecord], hero_id: str, bb_cents: int, rakeback_rate: float = 0.069
) -> ResultLedger:
    ledger = ResultLedger(bb_cents=bb_cents, rakeback_rate=rakeback_rate)
    for record in records:
        seat = record.hero_seat_of(hero_id)
        if seat is None:
            continue
        net = record.net.get(seat, 0)
        rake = record.rake_paid.get(seat, 0)
        ledger.add_hand(record.hand_id, net, rake, all_in_adjusted(record, hero_id))
    return ledger


# ---------------------------------------------------------------------------
# Variance and reporting
# ---------------------------------------------------------------------------


@dataclass
class SegmentReport:
    segment_size: int
    segment_bb100: list[float]
    spread_bb100: float
    per_hand_std_bb: float
    ci_half_width_bb100: float
    partial_segment: bool


def segment_analysis(ledger: ResultLedger, segment_size: int = 10_000, use_adjusted: bool = False) -> SegmentReport:
    if ledger.hands == 0:
        raise LedgerError("empty ledger")
    nets = np.array(
        [r.adjusted_cents if use_adjusted else r.net_cents for r in ledger.rows], dtype=float
    ) / ledger.bb_cents
    segments = []
    for lo in range(0, len(nets) - segment_size + 1, segment_size):
        chunk = nets[lo : lo + segment_size]
        segments.append(float(chunk.sum() / (segment_size / 100.0)))
    partial = len(nets) % segment_size != 0 or len(nets) < segment_size
    spread = (max(segments) - min(segments)) if len(segments) >= 2 else 0.0
    std = float(nets.std(ddof=1)) if len(nets) > 1 else 0.0
    ci = Z_95 * std / math.sqrt(len(nets)) * 100.0
    return SegmentReport(segment_size, segments, spread, std, ci, partial)


@dataclass
class TrialReport:
    hands: int
    bb_cents: int
    pre_rake_cents: int
    rake_cents: int
    rakeback_cents: float
    post_rake_cents: int
    adjusted_cents: int
    final_cents: float
    segment: SegmentReport | None

    @classmethod
    def from_ledger(cls, ledger: ResultLedger, segment_size: int = 10_000) -> "TrialReport":
        t = ledger.totals()
        seg = None
        if ledger.hands >= 2:
            seg = segment_analysis(ledger, segment_size=min(segment_size, max(1, ledger.hands)))
        return cls(
            hands=ledger.hands,
            bb_cents=ledger.bb_cents,
            pre_rake_cents=int(t["pre_rake"]),
            rake_cents=int(t["rake"]),
            rakeback_cents=float(t["rakeback"]),
            post_rake_cents=int(t["net"]),
            adjusted_cents=int(t["adjusted"]),
            final_cents=float(t["final"]),
            segment=seg,
        )

    def rates(self) -> dict[str, float]:
        if self.hands == 0:
            return {k: 0.0 for k in ("pre_rake", "rake", "rakeback", "post_rake", "adjusted", "final")}
        return {
            "pre_rake": bb100(self.pre_rake_cents, self.hands, self.bb_cents),
            "rake": bb100(-self.rake_cents, self.hands, self.bb_cents),
            "rakeback": bb100(self.rakeback_cents, self.hands, self.bb_cents),
            "post_rake": bb100(self.post_rake_cents, self.hands, self.bb_cents),
            "adjusted": bb100(self.adjusted_cents, self.hands, self.bb_cents),
            "final": bb100(self.final_cents, self.hands, self.bb_cents),
        }

    def to_text(self) -> str:
        r = self.rates()
        dollars = lambda c: f"${c / 100:,.2f}"
        lines = [
            f"hands played: {self.hands}",
            "",
            f"{'metric':<42}{'cash':>12}{'BB/100':>10}",
            f"{'won excluding rake and rakeback':<42}{dollars(self.pre_rake_cents):>12}{r['pre_rake']:>10.1f}",
            f"{'rake attributed':<42}{dollars(-self.rake_cents):>12}{r['rake']:>10.1f}",
            f"{'rakeback':<42}{dollars(self.rakeback_cents):>12}{r['rakeback']:>10.1f}",
            f"{'won incl. rake, excl. rakeback (green)':<42}{dollars(self.post_rake_cents):>12}{r['post_rake']:>10.1f}",
            f"{'all-in adjusted, excl. rakeback (yellow)':<42}{dollars(self.adjusted_cents):>12}{r['adjusted']:>10.1f}",
            f"{'bank balance (true amount won)':<42}{dollars(self.final_cents):>12}{r['final']:>10.1f}",
        ]
        if self.segment and self.segment.segment_bb100:
            lines += [
                "",
                f"{self.segment.segment_size}-hand segments: "
                + ", ".join(f"{x:+.1f}" for x in self.segment.segment_bb100)
                + f"  (spread {self.segment.spread_bb100:.1f} BB/100)",
            ]
        if self.segment:
            lines.append(f"95% CI half-width: {self.segment.ci_half_width_bb100:.2f} BB/100")
        return "\n".join(lines)

    def to_csv(self) -> str:
        r = self.rates()
        rows = ["metric,cash_cents,bb100"]
        rows.append(f"pre_rake,{self.pre_rake_cents},{r['pre_rake']:.4f}")
        rows.append(f"rake,{-self.rake_cents},{r['rake']:.4f}")
        rows.append(f"rakeback,{self.rakeback_cents:.2f},{r['rakeback']:.4f}")
        rows.append(f"post_rake,{self.post_rake_cents},{r['post_rake']:.4f}")
        rows.append(f"all_in_adjusted,{self.adjusted_cents},{r['adjusted']:.4f}")
        rows.append(f"final,{self.final_cents:.2f},{r['final']:.4f}")
        rows.append(f"hands,{self.hands},")
        if self.segment:
            rows.append(f"ci_half_width_bb100,,{self.segment.ci_half_width_bb100:.4f}")
            rows.append(f"segment_spread_bb100,,{self.segment.spread_bb100:.4f}")
        return "\n".join(rows) + "\n"
