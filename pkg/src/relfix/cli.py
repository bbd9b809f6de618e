"""Command-line entry point: check, solve, certify, sweep, demo.

Exit codes: 0 when every verdict passes, 2 when a condition or claim fails,
1 on parse, IO or enumeration-cap errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from .certifier import PreconditionError, certify_uniqueness, check_hypotheses
from .falsifier import DROPPABLE, SweepCapError, SweepSpec, search_counterexample, sweep_propositions, sweep_theorem
from .instance_io import InstanceError, dumps, load_instance, parse_instance, report_document, solve_section
from .solver import DEFAULT_BUDGET, Status, solve, solve_all_starts
from .metric import CONTINUOUS_TOL

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 2

BUNDLED = ("instance_3pt.json", "boydwong_demo.json")


def _emit(doc: dict, out: str | None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _timings(args, start: float) -> dict | None:
    return {"seconds": round(time.perf_counter() - start, 6)} if args.timings else None


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    inst = load_instance(args.instance)
    report = check_hypotheses(inst)
    _emit(report_document(inst, report, timings=_timings(args, t0)), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    inst = load_instance(args.instance)
    res = solve(inst, budget=args.budget, tol=args.tol)
    if res.status is Status.HYPOTHESIS_FAILURE:
        _emit(report_document(inst, res.report, res, timings=_timings(args, t0)), args.out)
        return EXIT_FAILED
    extra = None
    if args.all_starts:
        runs = solve_all_starts(inst, budget=args.budget, tol=args.tol)
        lab = (lambda i: inst.space.carrier.labels[i]) if inst.finite else (lambda x: x)
        reached = sorted({str(lab(r.fixed_point)) for r in runs.values() if r.fixed_point is not None})
        extra = {
            "all_starts": {
                "runs": [dict(solve_section(r, inst)) for r in runs.values()],
                "reached": reached,
            }
        }
    _emit(report_document(inst, res.report, res, extra=extra, timings=_timings(args, t0)), args.out)
    ok = res.status in (Status.FIXED_POINT, Status.TOLERANCE_REACHED)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_certify(args) -> int:
    t0 = time.perf_counter()
    inst = load_instance(args.instance)
    try:
        cert = certify_uniqueness(inst)
    except PreconditionError as exc:
        doc = report_document(inst, exc.report, extra={"error": str(exc)}, timings=_timings(args, t0))
        _emit(doc, args.out)
        return EXIT_FAILED
    _emit(report_document(inst, cert=cert, timings=_timings(args, t0)), args.out)
    return EXIT_OK if cert.unique else EXIT_FAILED


def cmd_sweep(args) -> int:
    phis = tuple(p.strip() for p in args.phi_set.split(",") if p.strip())
    spec = SweepSpec(args.n, args.metric, phis, args.drop, args.workers, args.full)
    if args.propositions:
        outcome = sweep_propositions(args.n, allow_n4=args.full)
    elif args.drop is None:
        outcome = sweep_theorem(spec)
    else:
        outcome = search_counterexample(spec)
    doc = outcome.as_dict()
    _emit(doc, args.out)
    if args.out:
        print(
            f"n={args.n}: {outcome.instances_checked} instances, {len(outcome.violations)} violations, "
            f"{len(outcome.separations)} separations -> {args.out}",
            file=sys.stderr,
        )
    return EXIT_OK if not outcome.violations else EXIT_FAILED


def _bundled_text(name: str) -> str:
    return resources.files("relfix").joinpath("fixtures", name).read_text()


def cmd_demo(args) -> int:
    status = EXIT_OK
    for name in BUNDLED:
        text = _bundled_text(name)
        inst = parse_instance(json.loads(text))
        res = solve(inst)
        print(f"== {name}")
        print(text.rstrip())
        fp = res.fixed_point
        if inst.finite and fp is not None:
            fp = inst.space.carrier.labels[fp]
        print(f"-> {res.status.value}, fixed point {fp}, {res.steps} steps")
        if res.status not in (Status.FIXED_POINT, Status.TOLERANCE_REACHED):
            status = EXIT_FAILED
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relfix", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def instance_cmd(name: str, helptext: str):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("instance", help="instance JSON file")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--timings", action="store_true", help="record wall time under meta")
        return sp

    instance_cmd("check", "evaluate the existence hypotheses").set_defaults(func=cmd_check)
    sp = instance_cmd("solve", "gate, then Picard iteration")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--tol", type=float, default=CONTINUOUS_TOL)
    sp.add_argument("--all-starts", action="store_true", help="iterate from every admissible start")
    sp.set_defaults(func=cmd_solve)
    instance_cmd("certify", "uniqueness certificate").set_defaults(func=cmd_certify)

    sp = sub.add_parser("sweep", help="exhaustive enumeration over small carriers")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--drop", choices=DROPPABLE, help="search for counterexamples without this hypothesis")
    sp.add_argument("--phi-set", default="linear,rational", help="comma list: linear, rational, omega, linear:A, scaled:C")
    sp.add_argument("--metric", choices=("path", "uniform"), default="path")
    sp.add_argument("--propositions", action="store_true", help="check the relation-algebra propositions instead")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--full", action="store_true", help="allow the n=4 enumeration")
    sp.add_argument("--out", help="write the sweep report here instead of stdout")
    sp.set_defaults(func=cmd_sweep)

    sub.add_parser("demo", help="run the bundled fixtures").set_defaults(func=cmd_demo)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SweepCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
