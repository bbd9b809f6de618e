"""Acceptance gate: one check per primary criterion, each reporting a pass/fail line.

Set ``RELFIX_FULL=1`` to add the opt-in n = 4 theorem sweep.
"""

from __future__ import annotations

import json
import math
import os
from fractions import Fraction
from importlib import resources

import pytest

from conftest import FIXTURES, record_criterion
from relfix.control import (
    Linear,
    Membership,
    OmegaOscillator,
    RationalShrink,
    ScaledRational,
    analytic_verdict,
    decay_trace,
    right_behavior,
    verify_membership,
)
from relfix.falsifier import SEPARATION_KINDS, SweepSpec, sweep_propositions, sweep_theorem
from relfix.instance_io import load_instance
from relfix.metric import cauchy_failure_witness, replay_cauchy_witness
from relfix.reductions import all_reductions
from relfix.solver import Status, picard

_SWEEPS: dict[int, object] = {}


def theorem_sweep(n: int):
    if n not in _SWEEPS:
        _SWEEPS[n] = sweep_theorem(SweepSpec(n, phis=("linear", "rational"), allow_n4=n == 4))
    return _SWEEPS[n]


class TestAcceptance:
    def test_existence_sweep(self):
        parts, ok = [], True
        for n in (2, 3):
            out = theorem_sweep(n)
            bad = [v for v in out.violations if v.claim.startswith("existence:")]
            count_ok = out.instances_checked == 2 ** (n * n) * n ** n * 2
            ok &= not bad and count_ok and out.hypothesis_passing > 0
            parts.append(f"n={n}: {out.instances_checked} instances, {out.hypothesis_passing} gated, {len(bad)} violations")
        record_criterion("existence sweep", ok, "; ".join(parts))
        assert ok

    def test_uniqueness_sweep(self):
        parts, ok = [], True
        for n in (2, 3):
            out = theorem_sweep(n)
            bad = [v for v in out.violations if v.claim.startswith("uniqueness:")]
            ok &= not bad and out.uniqueness_passing > 0
            parts.append(f"n={n}: {out.uniqueness_passing} connected-image instances, {len(bad)} violations")
        record_criterion("uniqueness sweep", ok, "; ".join(parts))
        assert ok

    @pytest.mark.skipif(os.environ.get("RELFIX_FULL") != "1", reason="n = 4 sweep is opt-in (RELFIX_FULL=1)")
    def test_existence_uniqueness_n4(self):
        out = theorem_sweep(4)
        ok = not out.violations
        record_criterion("theorem sweep n=4 (opt-in)", ok, f"{out.instances_checked} instances, {len(out.violations)} violations")
        assert ok

    def test_propositions(self):
        parts, ok = [], True
        for n in (2, 3):
            out = sweep_propositions(n)
            ok &= not out.violations
            parts.append(f"n={n}: {len(out.violations)} violations")
        found = {f.claim: list(f.instance_id) for f in out.separations}
        stored = json.loads((FIXTURES / "hierarchy_separations.json").read_text())
        ok &= set(found) == set(SEPARATION_KINDS) and found == {k: v["id"] for k, v in stored.items()}
        parts.append(f"{len(found)}/{len(SEPARATION_KINDS)} strict implications separated, fixtures match")
        record_criterion("relation propositions", ok, "; ".join(parts))
        assert ok

    def test_boyd_wong_demo(self):
        inst = load_instance(resources.files("relfix").joinpath("fixtures", "boydwong_demo.json"))
        run = picard(inst, 1.0, budget=1000, tol=0.0)
        err = max(abs(x - 1 / (n + 1)) for n, x in enumerate(run.trace))
        tol_run = picard(inst, 1.0, budget=10_000, tol=1e-4)
        ok = len(run.trace) == 1001 and err < 1e-12 and tol_run.status is Status.TOLERANCE_REACHED
        record_criterion(
            "Boyd-Wong continuous demo", ok,
            f"max |x_n - 1/(n+1)| = {err:.2e} over n <= 1000; residual < 1e-4 after {tol_run.steps} steps",
        )
        assert ok

    def test_decay(self):
        exact = decay_trace(RationalShrink(), Fraction(1), 99).values[99]
        ok = exact == Fraction(1, 100)
        worst = 0
        builtins = (Linear(0.5), Linear(0.9), RationalShrink(), ScaledRational(0.5), ScaledRational(1.0), OmegaOscillator())
        for phi in builtins:
            assert analytic_verdict(phi)[1] is Membership.VERIFIED
            for a0 in (1.0, 0.1, 10.0):
                tr = decay_trace(phi, a0, 10 ** 6, stop_below=True)
                ok &= tr.converged
                worst = max(worst, len(tr.values) - 1)
        record_criterion(
            "decay of a_{n+1} = phi(a_n)", ok,
            f"a_99 = {exact} exactly; all {len(builtins)} built-ins x 3 starts below 1e-6, slowest after {worst} steps",
        )
        assert ok

    def test_omega_phi_separation(self):
        v = verify_membership(OmegaOscillator())
        rb = right_behavior(OmegaOscillator(), 1.0)
        ok = (
            v.in_omega is Membership.VERIFIED
            and v.diagnostics["sampled_phi"] == "refuted"
            and v.diagnostics["sampled_phi_witness"] == 1.0
            and rb.amplitude >= 0.4
            and rb.limsup <= 0.76
        )
        record_criterion(
            "OMEGA strictly contains PHI", ok,
            f"t=1: amplitude {rb.amplitude:.4f} (>= 0.4), limsup {rb.limsup:.4f} (<= 0.76)",
        )
        assert ok

    def test_cauchy_witness_replay(self):
        xs = [k % 2 for k in range(64)]
        w = cauchy_failure_witness(xs, 0.5)
        ok = w.m_indices == tuple(range(63)) and w.n_indices == tuple(range(1, 64)) and not replay_cauchy_witness(xs, w)
        sequences = {
            "sin(sqrt n)": [math.sin(math.sqrt(n)) for n in range(4000)],
            "cos(log(n+1))": [math.cos(3 * math.log(n + 1)) for n in range(4000)],
            "harmonic zigzag": _zigzag(4000),
        }
        checked = 0
        for name, seq in sequences.items():
            res = [abs(b - a) for a, b in zip(seq, seq[1:])]
            for eps in (0.1, 0.25, 0.5):
                wit = cauchy_failure_witness(seq, eps)
                if wit is None:
                    continue
                ok &= not replay_cauchy_witness(seq, wit)
                for m, n in zip(wit.m_indices, wit.n_indices):
                    d = abs(seq[m] - seq[n])
                    ok &= eps < d <= eps + max(res[m:]) + 1e-12
                    checked += 1
        record_criterion("non-Cauchy witness replay", ok, f"alternating sequence exact; {checked} index pairs in band")
        assert ok

    def test_reductions(self):
        parts, ok = [], True
        for n in (2, 3):
            for name, out in all_reductions(n).items():
                ok &= out.agree and out.oracle_passing > 0
                if n == 3:
                    parts.append(f"{name} {out.instances} ({len(out.disagreements)} disagreements)")
        record_criterion("classical reductions", ok, "n<=3: " + ", ".join(parts))
        assert ok


def _zigzag(N: int) -> list[float]:
    # walk with step 1/(k+1), turning whenever it leaves [-1, 1]
    xs, x, sign = [], 0.0, 1.0
    for k in range(N):
        xs.append(x)
        x += sign / (k + 1)
        if abs(x) > 1:
            sign = -sign
    return xs
