"""Membership verdicts, right-window oscillation and decay traces for the built-in control functions."""

from __future__ import annotations

import argparse
from fractions import Fraction

from relfix.control import (
    Linear,
    OmegaOscillator,
    RationalShrink,
    ScaledRational,
    TablePiecewise,
    decay_trace,
    right_behavior,
    verify_membership,
)

FUNCS = {
    "linear(0.5)": Linear(0.5),
    "linear(0.9)": Linear(0.9),
    "rational": RationalShrink(),
    "scaled(0.5)": ScaledRational(0.5),
    "oscillator": OmegaOscillator(),
    "table-identity-piece": TablePiecewise(((0.0, 0.5, 0.0), (1.0, 1.0, 0.0), (2.0, 0.5, 0.0))),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-steps", type=int, default=10 ** 6)
    args = ap.parse_args()

    print(f"{'function':<22}{'PHI':>10}{'OMEGA':>10}{'witness':>9}  source")
    for name, phi in FUNCS.items():
        v = verify_membership(phi)
        w = "" if v.phi_witness is None else f"{v.phi_witness:g}"
        print(f"{name:<22}{v.in_phi.value:>10}{v.in_omega.value:>10}{w:>9}  {v.source}")

    rb = right_behavior(OmegaOscillator(), 1.0)
    print("\noscillator right of t=1, window amplitudes (largest window first):")
    print("  " + " ".join(f"{a:.3f}" for a in rb.window_amplitudes))
    print(f"  limsup {rb.limsup:.4f}  liminf {rb.liminf:.4f}  amplitude {rb.amplitude:.4f}")

    print(f"\nrational decay from 1, exact: a_99 = {decay_trace(RationalShrink(), Fraction(1), 99).final}")
    print("steps to fall below 1e-6:")
    for name, phi in FUNCS.items():
        if name.startswith("table"):
            continue
        counts = [len(decay_trace(phi, a0, args.max_steps, stop_below=True).values) - 1 for a0 in (1.0, 0.1, 10.0)]
        print(f"  {name:<20} a0=1: {counts[0]:>8}  a0=0.1: {counts[1]:>8}  a0=10: {counts[2]:>8}")


if __name__ == "__main__":
    main()
