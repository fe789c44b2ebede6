"""The shipped case-study hand, end to end.

Pocket nines open under the gun; a medium regular flat-calls the small
blind and a whale defends the big blind. The flop gives the hero top set,
the whale leads into the raiser, calls the raise, and open-jams the
paired turn with a combo draw. The replay shows the exact template
pipeline the whale's grid moves through and the hero's read at the
decisive call, then renders the final grid as a heatmap.
"""
from importlib import resources
from pathlib import Path

from holdemlab.heatmap import render_svg
from holdemlab.rangegrid import parse_range_lines
from holdemlab.scenario import load_scenario, run_scenario

scenario = load_scenario(resources.files("holdemlab").joinpath("data/hand6.scn"))
result = run_scenario(scenario)

print(result.trace_text())

hero_seat = scenario.hero.seat
print(f"\nhero net: {result.record.net[hero_seat] / scenario.bb_cents:+.0f} BB")

# The final read still contains the hand the whale actually shows up with.
from holdemlab.cards import parse_cards
from holdemlab.rangegrid import combo_index, combo_str

final = result.snapshots[max(k for k in result.snapshots if k[0] == "whale_bb")]
token = combo_str(combo_index(*parse_cards("4d3d")))
weight_43 = next((line for line in final if line.startswith(token)), f"{token} 0")
print(f"4d3d in the final whale grid: {weight_43}")

out = Path("case_study_final_grid.svg")
out.write_text(render_svg(parse_range_lines(final), mode="169", title="whale final range"))
print(f"heatmap written to {out}")
