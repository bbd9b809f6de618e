"""Fixed points of relational Boyd-Wong contractions on finite and 1-D spaces."""

__version__ = "0.1.0"

from .relations import (  # noqa: E402
    Carrier,
    FiniteRelation,
    PropertyKind,
    SelfMap,
    Witness,
    check_property,
    comparative,
    inverse,
    is_locally_T_transitive,
    is_locally_transitive,
    is_T_closed,
    is_T_transitive,
    restrict,
    symmetric_closure,
    walkable_ranges,
)
from .metric import LineRelation, MetricTable, NumericLine  # noqa: E402
from .control import (  # noqa: E402
    Linear,
    OmegaOscillator,
    RationalShrink,
    ScaledRational,
    TablePiecewise,
    decay_trace,
    verify_membership,
)
from .solver import LineMap, ProblemInstance, Status, picard, solve, verify_contraction  # noqa: E402
from .certifier import certify_uniqueness, check_hypotheses, find_path  # noqa: E402
from .falsifier import SweepSpec, search_counterexample, sweep_propositions, sweep_theorem  # noqa: E402
