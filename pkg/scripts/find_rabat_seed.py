"""Search for a seed whose stubborn-heavy run reproduces the reference
pipeline shape: 63 ideas, merge to 40, 5 zero-support eliminations in round
one, a clean 17-item cut with no boundary tie, and a budget stop after the
second tour still carrying 17 items.

Usage: python3 scripts/find_rabat_seed.py [start] [stop]
"""

from __future__ import annotations

import sys
import time
import warnings

warnings.filterwarnings("ignore")

from scenarioforge.sim.presets import rabat_scenario
from scenarioforge.sim.runner import run_simulation


def shape(seed: int) -> dict:
    result = run_simulation(rabat_scenario(seed=seed))
    zero_support = None
    cut_selected = None
    for event in result.trace:
        if event["kind"] != "step_closed":
            continue
        payload = event["payload"]
        if payload["kind"] == "Ranking" and payload["round_index"] == 0:
            zero_support = len(payload["result"]["zero_support_eliminated"])
        if payload["kind"] == "CutOff" and payload["round_index"] == 0:
            cut_selected = len(payload["result"]["selected"])
    return {
        "seed": seed,
        "pool": result.summary["pool_size"],
        "merged": result.summary["after_merge"],
        "zero_support": zero_support,
        "cut_selected": cut_selected,
        "w": [m["kendall_w"] for m in result.metrics],
        "decision": result.summary["decision"],
        "final": result.summary["final_count"],
        "rounds": result.summary["rounds"],
    }


def matches(s: dict) -> bool:
    return (
        s["pool"] == 63
        and s["merged"] == 40
        and s["zero_support"] == 5
        and s["cut_selected"] == 17
        and s["decision"] == "BudgetStop"
        and s["final"] == 17
        and s["rounds"] == 2
        and all(w < 0.6 for w in s["w"])
    )


def main() -> None:
    start = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    stop = int(sys.argv[2]) if len(sys.argv) > 2 else 500
    t0 = time.time()
    hits = []
    for seed in range(start, stop):
        s = shape(seed)
        tag = "HIT " if matches(s) else "    "
        print(
            f"{tag}seed={s['seed']:4d} merged={s['merged']} zs={s['zero_support']} "
            f"cut={s['cut_selected']} final={s['final']} decision={s['decision']} "
            f"w={[round(w, 3) for w in s['w']]}"
        )
        if matches(s):
            hits.append(seed)
            if len(hits) >= 3:
                break
    print(f"hits: {hits}  ({time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
