"""Two calculi of the infinitely small, and the bridge between them.

`levi_civita` does exact arithmetic in an ordered field with an
explicit infinitesimal; `hyperseq` models infinitesimals as rates of
convergence with certified filter answers; `opcalc` and `dixmier`
handle the operator side, where size means decay of singular values;
`bridge` walks a compact operator to a dyadic enclosure and reports
which steps were canonical.
"""

from ._kernels import BACKEND as kernel_backend
from .errors import InfinikitError
from .levi_civita import (
    EPS,
    Classification,
    LCNumber,
    Ordering,
    add,
    classify,
    compare,
    continuity_check,
    derivative,
    format_lc,
    from_rational,
    inv,
    make,
    mul,
    poly_eval,
    power,
    standard_part,
    sub,
)
from .hyperseq import (
    CofiniteSet,
    Congruence,
    DominanceVerdict,
    DyadicInterval,
    FilterVerdict,
    FiniteSet,
    PerfectPowers,
    Predicate,
    RateSeq,
    Threshold,
    UserSet,
    constant_seq,
    dominance_compare,
    dyadic_embed,
    eventually_equal,
    extend,
    filter_query,
    format_rate,
    from_terms,
    integer_part,
    make_rate,
    reciprocal,
    standard_part_seq,
    termwise_add,
    termwise_mul,
)
from .opcalc import (
    OperatorTrunc,
    SpectralSequence,
    conjugate,
    diag_embed,
    is_compact_model,
    ladder_commutator,
    make_trunc,
    random_orthogonal,
    read_matrix,
    spectrum_desc,
    symmetrise,
)
from .dixmier import (
    DixmierEstimate,
    dixmier_estimate,
    gamma,
    linearity_check,
    partial_sum,
    positivity_check,
    scale_check,
    tower_sequence,
)
from .bridge import BridgeReport, operator_to_infinitesimal, parse_predicate, run_bridge
from .exprs import eval_expr, parse, print_expr

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "InfinikitError",
    "EPS",
    "Classification",
    "LCNumber",
    "Ordering",
    "add",
    "classify",
    "compare",
    "continuity_check",
    "derivative",
    "format_lc",
    "from_rational",
    "inv",
    "make",
    "mul",
    "poly_eval",
    "power",
    "standard_part",
    "sub",
    "CofiniteSet",
    "Congruence",
    "DominanceVerdict",
    "DyadicInterval",
    "FilterVerdict",
    "FiniteSet",
    "PerfectPowers",
    "Predicate",
    "RateSeq",
    "Threshold",
    "UserSet",
    "constant_seq",
    "dominance_compare",
    "dyadic_embed",
    "eventually_equal",
    "extend",
    "filter_query",
    "format_rate",
    "from_terms",
    "integer_part",
    "make_rate",
    "reciprocal",
    "standard_part_seq",
    "termwise_add",
    "termwise_mul",
    "OperatorTrunc",
    "SpectralSequence",
    "conjugate",
    "diag_embed",
    "is_compact_model",
    "ladder_commutator",
    "make_trunc",
    "random_orthogonal",
    "read_matrix",
    "spectrum_desc",
    "symmetrise",
    "DixmierEstimate",
    "dixmier_estimate",
    "gamma",
    "linearity_check",
    "partial_sum",
    "positivity_check",
    "scale_check",
    "tower_sequence",
    "BridgeReport",
    "operator_to_infinitesimal",
    "parse_predicate",
    "run_bridge",
    "eval_expr",
    "parse",
    "print_expr",
    "__version__",
]
