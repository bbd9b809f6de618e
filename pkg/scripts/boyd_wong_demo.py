"""Iterate x -> x/(1+x) on [0, 1] and compare with the closed form 1/(n+1)."""

from __future__ import annotations

import argparse
from importlib import resources

from relfix.instance_io import load_instance
from relfix.solver import picard, solve


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--tol", type=float, default=1e-4)
    args = ap.parse_args()

    inst = load_instance(resources.files("relfix").joinpath("fixtures", "boydwong_demo.json"))
    run = picard(inst, 1.0, budget=args.steps, tol=0.0)
    errs = [abs(x - 1 / (n + 1)) for n, x in enumerate(run.trace)]
    print(f"max |x_n - 1/(n+1)| for n <= {args.steps}: {max(errs):.3e}")
    for n in (1, 10, 100, args.steps):
        print(f"  x_{n} = {run.trace[n]:.15f}   residual {run.residuals[n - 1]:.3e}")

    res = solve(inst, tol=args.tol)
    print(f"solve(tol={args.tol}): {res.status.value} after {res.steps} steps, last iterate {res.fixed_point:.6g}")
    print(f"hypotheses: {'pass' if res.report.passed else 'fail'}; "
          f"condition c via {res.report['c'].justification}")


if __name__ == "__main__":
    main()
