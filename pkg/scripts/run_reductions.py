"""Compare the relational pipeline against the classical oracles over every small instance."""

from __future__ import annotations

import argparse

from relfix.reductions import all_reductions


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3])
    args = ap.parse_args()
    print(f"{'n':>2}  {'oracle':<18}{'instances':>10}{'oracle ok':>11}{'gate ok':>9}{'disagree':>10}")
    for n in args.n:
        for name, out in all_reductions(n).items():
            print(f"{n:>2}  {name:<18}{out.instances:>10}{out.oracle_passing:>11}{out.pipeline_passing:>9}"
                  f"{len(out.disagreements):>10}")
            for note in out.notes:
                print(f"      {note}")


if __name__ == "__main__":
    main()
