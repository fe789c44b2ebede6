#!/usr/bin/env python3
"""Regenerate the shipped default pre-flop range files.

The per-(archetype, situation) files under src/holdemlab/data/ranges/ are
calibration surfaces: they ship as editable text, and this script only
exists to rebuild them from the percentile bands below after an edit here.
Run from the repo root:  python scripts/make_default_ranges.py
"""
from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from holdemlab.preflop import CLASS_PERCENTILE, chen_score  # noqa: E402
from holdemlab.rangegrid import CLASS_NAMES  # noqa: E402

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "holdemlab" / "data" / "ranges"

# (archetype, situation) -> list of (percentile_band_upper, weight)
# Bands read in order; a class falls in the first band whose upper bound
# exceeds its strength percentile (0.0 = best hand).
BANDS: dict[tuple[str, str], list[tuple[float, float]]] = {
    # Rocks play almost nothing, and only premiums continue.
    ("rock", "open"): [(0.05, 1.0), (0.08, 0.8)],
    ("rock", "call"): [(0.02, 0.4), (0.06, 1.0)],
    ("rock", "threebet"): [(0.025, 1.0)],
    ("tightreg", "open"): [(0.12, 1.0), (0.16, 0.85)],
    ("tightreg", "call"): [(0.03, 0.4), (0.10, 1.0), (0.13, 0.6)],
    ("tightreg", "threebet"): [(0.04, 1.0)],
    ("mediumreg", "open"): [(0.15, 1.0), (0.21, 0.85)],
    # mediumreg call is curated below (flat-call range, premiums mostly 3-bet)
    ("mediumreg", "threebet"): [(0.05, 1.0)],
    ("loosereg", "open"): [(0.20, 1.0), (0.28, 0.85)],
    ("loosereg", "call"): [(0.03, 0.45), (0.14, 1.0), (0.18, 0.7)],
    ("loosereg", "threebet"): [(0.07, 1.0)],
    ("lag", "open"): [(0.28, 1.0), (0.38, 0.9)],
    ("lag", "call"): [(0.03, 0.35), (0.16, 1.0), (0.22, 0.75)],
    ("lag", "threebet"): [(0.08, 1.0), (0.12, 0.5)],
    ("fish", "open"): [(0.30, 1.0), (0.42, 0.8)],
    ("fish", "call"): [(0.04, 0.6), (0.38, 1.0), (0.50, 0.8)],
    ("fish", "threebet"): [(0.06, 1.0), (0.10, 0.4)],
    ("callingstation", "open"): [(0.20, 1.0), (0.30, 0.7)],
    ("callingstation", "call"): [(0.04, 0.7), (0.45, 1.0), (0.62, 0.85)],
    ("callingstation", "threebet"): [(0.035, 1.0)],
    # The whale defends nearly any two; premiums discounted (occasionally
    # raised instead), trash tapered but never zero.
    ("whale", "open"): [(0.25, 1.0), (0.40, 0.8)],
    ("whale", "call"): [(0.04, 0.5), (0.10, 0.85), (0.70, 1.0), (0.85, 0.9), (1.01, 0.75)],
    ("whale", "threebet"): [(0.04, 1.0), (0.08, 0.5)],
    ("unknown", "open"): [(0.18, 1.0), (0.25, 0.8)],
    ("unknown", "call"): [(0.03, 0.5), (0.22, 1.0), (0.32, 0.7)],
    ("unknown", "threebet"): [(0.05, 1.0)],
}

# Curated flat-call range for the medium regular: pairs for set value,
# broadways, suited connectors; premiums mostly live in the 3-bet file.
MEDIUMREG_CALL = {
    "AA": 0.10, "KK": 0.15, "QQ": 0.30, "JJ": 0.80, "TT": 1.0, "99": 1.0,
    "88": 1.0, "77": 1.0, "66": 1.0, "55": 1.0, "44": 1.0, "33": 1.0, "22": 1.0,
    "AKs": 0.20, "AKo": 0.15, "AQs": 0.80, "AQo": 0.35, "AJs": 0.80, "ATs": 0.70,
    "KQs": 0.80, "KQo": 0.30, "KJs": 0.60, "QJs": 0.70, "JTs": 0.90, "T9s": 0.90,
    "98s": 0.80, "87s": 0.80, "76s": 0.70, "65s": 0.60, "A5s": 0.40, "A4s": 0.40,
}

HEADER = """# Default pre-flop range: {arch} / {sit}
# Format: <class|combo> <weight>. Weights are relative; the loader
# normalizes. This file is a calibration surface: edit freely.
"""


def band_weight(bands, pct):
    for upper, weight in bands:
        if pct < upper:
            return weight
    return 0.0


def write_file(arch: str, sit: str, weights: dict[str, float]) -> None:
    path = OUT / arch / f"{sit}.rng"
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [HEADER.format(arch=arch, sit=sit)]
    named = sorted(weights.items(), key=lambda kv: (-chen_score(kv[0]), kv[0]))
    for name, w in named:
        if w > 0:
            lines.append(f"{name} {w:g}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({sum(1 for _, w in named if w > 0)} classes)")


def main() -> None:
    for (arch, sit), bands in BANDS.items():
        weights = {
            name: band_weight(bands, float(CLASS_PERCENTILE[i]))
            for i, name in enumerate(CLASS_NAMES)
        }
        write_file(arch, sit, weights)
    write_file("mediumreg", "call", MEDIUMREG_CALL)


if __name__ == "__main__":
    main()
