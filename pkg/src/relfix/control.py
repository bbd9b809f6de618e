"""Control functions of Boyd-Wong type and their class membership.

Two classes are tracked.  ``PHI`` asks for ``phi(t) < t`` and a right limit
below ``t`` at every ``t > 0``; ``OMEGA`` relaxes the right limit to a right
limsup.  Built-in analytic families carry membership verdicts that hold by
inspection; the sampler is run alongside them as a cross-check and is the
only source of verdicts for ``TablePiecewise``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, ClassVar, Sequence, Union

Number = Union[float, Fraction]

DECAY_THRESHOLD = 1e-6


class ControlFunction:
    family: ClassVar[str] = ""

    def __call__(self, t: Number) -> Number:
        raise NotImplementedError

    def params(self) -> dict[str, Any]:
        return {}

    def critical_points(self) -> tuple[float, ...]:
        """Points where the sampler should look hardest."""
        return ()


@dataclass(frozen=True)
class Linear(ControlFunction):
    alpha: Number
    family: ClassVar[str] = "linear"

    def __post_init__(self) -> None:
        if not 0 <= self.alpha < 1:
            raise ValueError(f"linear modulus must lie in [0, 1), got {self.alpha}")

    def __call__(self, t: Number) -> Number:
        return self.alpha * t

    def params(self) -> dict[str, Any]:
        return {"alpha": float(self.alpha)}


@dataclass(frozen=True)
class RationalShrink(ControlFunction):
    """``t / (1 + t)``."""

    family: ClassVar[str] = "rational"

    def __call__(self, t: Number) -> Number:
        return t / (1 + t)


@dataclass(frozen=True)
class ScaledRational(ControlFunction):
    """``c * t / (1 + t)`` with ``0 < c <= 1``."""

    c: Number
    family: ClassVar[str] = "scaled_rational"

    def __post_init__(self) -> None:
        if not 0 < self.c <= 1:
            raise ValueError(f"scale must lie in (0, 1], got {self.c}")

    def __call__(self, t: Number) -> Number:
        return self.c * t / (1 + t)

    def params(self) -> dict[str, Any]:
        return {"c": float(self.c)}


@dataclass(frozen=True)
class OmegaOscillator(ControlFunction):
    """``t/2`` except on ``(1, 1.5]`` where it is ``1/2 + sin(1/(t-1))/4``.

    Has no right limit at ``t = 1`` but its right limsup there is ``3/4``.
    """

    family: ClassVar[str] = "omega_oscillator"

    def __call__(self, t: Number) -> float:
        t = float(t)
        if 1.0 < t <= 1.5:
            return 0.5 + 0.25 * math.sin(1.0 / (t - 1.0))
        return t / 2

    def critical_points(self) -> tuple[float, ...]:
        return (1.0, 1.5)


@dataclass(frozen=True)
class TablePiecewise(ControlFunction):
    """Right-continuous piecewise affine function.

    ``pieces`` is a list of ``(start, slope, intercept)`` sorted by start, the
    first starting at 0; piece ``i`` covers ``[start_i, start_{i+1})`` and the
    last one extends to infinity.
    """

    pieces: tuple[tuple[float, float, float], ...]
    family: ClassVar[str] = "table"

    def __post_init__(self) -> None:
        if not self.pieces:
            raise ValueError("need at least one piece")
        starts = [p[0] for p in self.pieces]
        if starts[0] != 0:
            raise ValueError("first piece must start at 0")
        if any(a >= b for a, b in zip(starts, starts[1:])):
            raise ValueError("piece starts must be strictly increasing")

    def __call__(self, t: Number) -> float:
        t = float(t)
        chosen = self.pieces[0]
        for piece in self.pieces:
            if piece[0] <= t:
                chosen = piece
            else:
                break
        _, slope, intercept = chosen
        return slope * t + intercept

    def params(self) -> dict[str, Any]:
        return {"pieces": [list(p) for p in self.pieces]}

    def critical_points(self) -> tuple[float, ...]:
        return tuple(p[0] for p in self.pieces if p[0] > 0)


FAMILIES: dict[str, type[ControlFunction]] = {
    cls.family: cls for cls in (Linear, RationalShrink, ScaledRational, OmegaOscillator, TablePiecewise)
}


def from_spec(family: str, params: dict[str, Any] | None = None) -> ControlFunction:
    params = dict(params or {})
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown control family {family!r}") from None
    if cls is TablePiecewise:
        params["pieces"] = tuple(tuple(float(v) for v in p) for p in params.get("pieces", ()))
    return cls(**params)


def evaluate(phi: ControlFunction, t: Number) -> Number:
    if t < 0:
        raise ValueError("control functions are defined on [0, inf)")
    return phi(t)


# --- membership ---------------------------------------------------------------


class Membership(enum.Enum):
    VERIFIED = "verified"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RightBehavior:
    """Sampled behaviour of phi just to the right of ``t``."""

    t: float
    limsup: float
    liminf: float
    amplitude: float
    window_amplitudes: tuple[float, ...]


@dataclass(frozen=True)
class MembershipVerdict:
    in_phi: Membership
    in_omega: Membership
    grid: str
    phi_witness: float | None = None
    omega_witness: float | None = None
    source: str = "sampled"
    diagnostics: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.in_phi is Membership.VERIFIED and self.in_omega is not Membership.VERIFIED:
            raise ValueError("a function verified in PHI must be verified in OMEGA")


WINDOW_LEVELS = 20
WINDOW_SAMPLES = 257
TAIL_WINDOWS = 5


def right_behavior(phi: ControlFunction, t: float, samples: int = WINDOW_SAMPLES) -> RightBehavior:
    """Sample ``phi`` on the windows ``(t, t + t * 2**-j]`` for ``j = 1..20``.

    The limsup / liminf estimates and the oscillation amplitude use only the
    last few (smallest) windows.
    """
    amps = []
    tail_vals: list[float] = []
    for j in range(1, WINDOW_LEVELS + 1):
        radius = t * 2.0 ** -j
        vals = [float(phi(t + radius * k / samples)) for k in range(1, samples + 1)]
        amps.append(max(vals) - min(vals))
        if j > WINDOW_LEVELS - TAIL_WINDOWS:
            tail_vals.extend(vals)
    tail_amps = amps[-TAIL_WINDOWS:]
    return RightBehavior(
        t=t,
        limsup=max(tail_vals),
        liminf=min(tail_vals),
        amplitude=min(tail_amps),
        window_amplitudes=tuple(amps),
    )


def analytic_verdict(phi: ControlFunction) -> tuple[Membership, Membership, float | None] | None:
    if isinstance(phi, (Linear, RationalShrink, ScaledRational)):
        return Membership.VERIFIED, Membership.VERIFIED, None
    if isinstance(phi, OmegaOscillator):
        return Membership.REFUTED, Membership.VERIFIED, 1.0
    return None


def verify_membership(phi: ControlFunction, t_max: float = 4.0, grid_size: int = 400) -> MembershipVerdict:
    """Decide PHI / OMEGA membership on ``(0, t_max]``.

    The sampled path checks ``phi(t) < t`` at every grid point, then looks at
    the right windows: a limsup estimate ``>= t`` refutes both classes, and an
    oscillation that does not shrink with the window refutes PHI only (no right
    limit).  Nothing found means UNKNOWN, never VERIFIED.
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    grid = sorted(
        {t_max * k / grid_size for k in range(1, grid_size + 1)}
        | {c for c in phi.critical_points() if 0 < c <= t_max}
    )
    grid_desc = f"{grid_size} uniform points on (0, {t_max}] + {len(phi.critical_points())} critical"

    in_phi = in_omega = Membership.UNKNOWN
    phi_w = omega_w = None
    behaviors: dict[float, RightBehavior] = {}
    for t in grid:
        v = float(phi(t))
        if not v < t:
            in_phi = in_omega = Membership.REFUTED
            phi_w = omega_w = t
            break
        rb = right_behavior(phi, t)
        behaviors[t] = rb
        if rb.limsup >= t:
            in_phi = in_omega = Membership.REFUTED
            phi_w = omega_w = t
            break
        if in_phi is Membership.UNKNOWN and rb.amplitude >= 1e-3 * t:
            in_phi = Membership.REFUTED
            phi_w = t

    diagnostics: dict[str, Any] = {
        "sampled_phi": in_phi.value,
        "sampled_omega": in_omega.value,
        "sampled_phi_witness": phi_w,
        "behaviors": behaviors,
    }
    analytic = analytic_verdict(phi)
    if analytic is not None:
        a_phi, a_omega, a_w = analytic
        return MembershipVerdict(a_phi, a_omega, grid_desc, a_w, None, "analytic", diagnostics)
    return MembershipVerdict(in_phi, in_omega, grid_desc, phi_w, omega_w, "sampled", diagnostics)


# --- decay of a_{n+1} = phi(a_n) ---------------------------------------------------


@dataclass(frozen=True)
class DecayTrace:
    values: tuple[Number, ...]
    converged: bool
    threshold: float

    @property
    def final(self) -> Number:
        return self.values[-1]


def decay_trace(
    phi: ControlFunction,
    a0: Number,
    steps: int,
    threshold: float = DECAY_THRESHOLD,
    stop_below: bool = False,
    allow_unverified: bool = False,
) -> DecayTrace:
    """Iterate ``a_{n+1} = phi(a_n)`` from ``a0`` for ``steps`` steps.

    Passing a ``Fraction`` for ``a0`` keeps the rational families exact.  With
    ``stop_below`` the trace ends at the first term under ``threshold``.
    """
    if not a0 > 0:
        raise ValueError("a0 must be positive")
    analytic = analytic_verdict(phi)
    in_omega = analytic[1] if analytic is not None else verify_membership(phi).in_omega
    if in_omega is Membership.REFUTED:
        raise ValueError(f"{phi!r} is refuted for OMEGA")
    if in_omega is not Membership.VERIFIED and not allow_unverified:
        raise ValueError(f"{phi!r} is not verified in OMEGA")
    values: list[Number] = [a0]
    a = a0
    for _ in range(steps):
        if stop_below and a < threshold:
            break
        a = phi(a)
        values.append(a)
    return DecayTrace(tuple(values), bool(values[-1] < threshold), threshold)


__all__ = [
    "DECAY_THRESHOLD",
    "FAMILIES",
    "ControlFunction",
    "DecayTrace",
    "Linear",
    "Membership",
    "MembershipVerdict",
    "OmegaOscillator",
    "RationalShrink",
    "RightBehavior",
    "ScaledRational",
    "TablePiecewise",
    "decay_trace",
    "evaluate",
    "from_spec",
    "right_behavior",
    "verify_membership",
]
