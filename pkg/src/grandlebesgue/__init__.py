"""Fundamental functions of Grand Lebesgue Spaces.

Forward and inverse pipelines between a generating function ``psi`` and the
fundamental function of its Grand Lebesgue space, the Young-Fenchel
machinery they rest on, norms on discrete measure spaces, and exponential
Orlicz constructions for infinite measure.
"""

from .conjugate import biconjugate, conjugate_function, conjugate_table, legendre
from .eof import (
    AlphaPatch,
    WFunction,
    alpha_patch,
    eof_from_W,
    orlicz_from_psi_eof,
    psi_from_W,
    theorem_a_check,
    trudinger,
)
from .errors import (
    AllNonConvex,
    BracketFailure,
    DomainError,
    ExtensionNotConvex,
    GLSError,
    NonConvex,
    NonYoung,
    NotIncreasing,
    NotMonotone,
    NoValidC5,
    OutOfRange,
    TailUncertain,
    TruncationUncertain,
)
from .gls_core import (
    ComparisonReport,
    GeneratingFunction,
    OrliczFunction,
    compare_fundamental,
    fundamental_direct,
    nu_from_psi,
    orlicz_from_psi,
    parse_psi,
    theta,
)
from .inverse_problem import (
    FundamentalFunction,
    choose_C,
    log_orlicz,
    orlicz_from_fundamental,
    psi_from_fundamental,
)
from .norms import (
    DiscreteMeasureSpace,
    SampledFunction,
    amemiya,
    equivalence_report,
    gls_norm,
    indicator,
    lp_norm,
    luxemburg_norm,
    orlicz_norm_amemiya,
)
from .scalar_fn import ScalarFunction, from_table, invert_monotone, parse_spec, tabulate

__version__ = "0.1.0"
