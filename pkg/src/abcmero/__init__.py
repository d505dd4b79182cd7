"""Heights, radicals and abc checks for meromorphic and integer triples."""

from .config import RunConfig
from .nevanlinna import (
    AbcReport,
    HeightBreakdown,
    MeromorphicOracle,
    archimedean_radical,
    formal_abc_report,
    height,
    incomplete_radical,
    logder_lemma_margin,
    pj_residual,
    proximity,
    rho_scan,
    sincos_triple,
)
from .nt_abc import IntTriple, abc_check, enumerate_scan, factorize, height_q, radical_log
from .parser import parse_int_triple, parse_mero_triple, parse_rational
from .rational_core import GaussianRational, MeroTriple, Polynomial, RationalFunction

__version__ = "0.1.0"
