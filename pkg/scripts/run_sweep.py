"""Run the exhaustive sweeps at one carrier size and print a summary table.

Example: ``python3 scripts/run_sweep.py --n 3 --drops b1 b2 u --out results/``
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from relfix.falsifier import DROPPABLE, SweepSpec, search_counterexample, sweep_propositions, sweep_theorem


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--phis", default="linear,rational")
    ap.add_argument("--metric", choices=("path", "uniform"), default="path")
    ap.add_argument("--drops", nargs="*", default=list(DROPPABLE), choices=DROPPABLE)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--full", action="store_true", help="allow n = 4")
    ap.add_argument("--out", type=Path, help="directory for per-sweep JSON reports")
    args = ap.parse_args()
    phis = tuple(args.phis.split(","))

    rows = []

    def record(label, fn):
        t0 = time.perf_counter()
        outcome = fn()
        rows.append((label, outcome, time.perf_counter() - t0))
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"n{args.n}_{label}.json").write_text(json.dumps(outcome.as_dict(), indent=2) + "\n")

    record("theorem", lambda: sweep_theorem(SweepSpec(args.n, args.metric, phis, None, args.workers, args.full)))
    record("propositions", lambda: sweep_propositions(args.n, allow_n4=args.full))
    for drop in args.drops:
        record(f"drop-{drop}", lambda d=drop: search_counterexample(
            SweepSpec(args.n, args.metric, phis, d, args.workers, args.full)))

    print(f"{'sweep':<14}{'instances':>11}{'gated':>8}{'candidates':>12}{'violations':>12}{'separations':>13}{'sec':>8}")
    for label, o, secs in rows:
        print(f"{label:<14}{o.instances_checked:>11}{o.hypothesis_passing:>8}{o.candidates:>12}"
              f"{len(o.violations):>12}{len(o.separations):>13}{secs:>8.2f}")
        for note in o.notes:
            print(f"  note: {note}")


if __name__ == "__main__":
    main()
