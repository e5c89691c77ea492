"""Exact arithmetic for one-dimensional formal group laws over Q and
F_p, and the canonical Hasse-Schmidt derivations they induce on k[t]
and k[t,1/t]."""

from .errors import (
    AlgebraError,
    DivisionByZero,
    FieldMismatch,
    InsufficientPrecision,
    IntegralityViolation,
    InvalidGroupLaw,
    MalformedPSeries,
    NotAUnit,
    NotMultiplicativelyRestricted,
    NotNilpotent,
    NotProportional,
    NotReversible,
    OrderOutOfRange,
    ParseError,
    PositiveValuationRequired,
    WindowOverflow,
)
from .scalars import GF, QQ, FpElem, Rat, fp_inv, is_prime, rat_p_integral, rat_reduce_mod_p
from .series import LaurentPoly, TruncSeries1, TruncSeries2, XSeriesOverLaurent, parse_laurent
from .grouplaws import (
    AxiomReport,
    FormalGroupLaw,
    HeightResult,
    TruncatedGroupLaw,
    build_law,
    check_body_axioms,
    honda_logarithm,
    parse_law_descriptor,
)
from .derivations import (
    Derivation,
    HSDerivation,
    IterativityReport,
    P1Report,
    auto_window,
    canonical_derivation,
    check_restricted,
    compute_cf,
    default_window,
    prolong_ga1,
    prolong_gm1,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraError",
    "AxiomReport",
    "Derivation",
    "DivisionByZero",
    "FieldMismatch",
    "FormalGroupLaw",
    "FpElem",
    "GF",
    "HSDerivation",
    "HeightResult",
    "InsufficientPrecision",
    "IntegralityViolation",
    "InvalidGroupLaw",
    "IterativityReport",
    "LaurentPoly",
    "MalformedPSeries",
    "NotAUnit",
    "NotMultiplicativelyRestricted",
    "NotNilpotent",
    "NotProportional",
    "NotReversible",
    "OrderOutOfRange",
    "P1Report",
    "ParseError",
    "PositiveValuationRequired",
    "QQ",
    "Rat",
    "TruncSeries1",
    "TruncSeries2",
    "TruncatedGroupLaw",
    "WindowOverflow",
    "XSeriesOverLaurent",
    "auto_window",
    "build_law",
    "canonical_derivation",
    "check_body_axioms",
    "check_restricted",
    "compute_cf",
    "default_window",
    "fp_inv",
    "honda_logarithm",
    "is_prime",
    "parse_laurent",
    "parse_law_descriptor",
    "prolong_ga1",
    "prolong_gm1",
    "rat_p_integral",
    "rat_reduce_mod_p",
]
