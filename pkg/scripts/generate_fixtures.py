"""Regenerate the JSON fixtures under tests/fixtures.

Run from the repository root: ``python3 scripts/generate_fixtures.py``.
The separating instances come from the exhaustive sweeps, so rerunning this
after a change to the enumeration order would move them; the tests replay
whatever is stored.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from relfix.falsifier import SweepSpec, search_counterexample, sweep_propositions


def _write(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {path}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dest", type=Path, default=Path("tests/fixtures"))
    args = ap.parse_args()
    args.dest.mkdir(parents=True, exist_ok=True)

    base = {
        "points": ["a", "b", "c"],
        "relation": {"kind": "universal"},
        "map": {"kind": "table", "image": {"a": "a", "b": "a", "c": "a"}},
        "phi": {"family": "linear", "params": {"alpha": 0.5}},
    }
    _write(args.dest / "broken_triangle.json",
           {**base, "metric": {"kind": "table", "rows": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}})
    missing = {**base, "metric": {"kind": "path"}}
    del missing["phi"]
    _write(args.dest / "missing_phi.json", missing)
    # identity cannot contract: condition (e) fails
    _write(args.dest / "fails_e.json",
           {**base, "metric": {"kind": "path"}, "map": {"kind": "table", "image": ["a", "b", "c"]}})

    split = search_counterexample(SweepSpec(3, drop="u"))
    _write(args.dest / "two_fixed_points.json", split.separations[0].instance)

    props = sweep_propositions(3)
    _write(args.dest / "hierarchy_separations.json",
           {f.claim: {"id": list(f.instance_id), "instance": f.instance} for f in props.separations})


if __name__ == "__main__":
    main()
