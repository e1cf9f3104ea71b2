"""Repetition exponents of Sturmian words: generation, locating chains and spectra."""

from .cf import CFExpansion, Convergent, GOLDEN, convergents, eval_bracket, min_spectrum, mirror_value, parse_cf, quadratic_to_cf
from .quadratic import QuadraticNumber
from .words import WordStream, characteristic_prefix, mechanical_prefix, standard_words, subword_complexity, sturmian_number
from .rep import RepProfile, r_naive, r_profile, rep_estimate
from .chains import (
    Chain,
    GoldenChain,
    LevelState,
    chain_of,
    chain_states,
    chain_stats,
    classify_level,
    parse_chain,
    predict_lambda,
    rep_exact_periodic_golden,
    synthesize,
)

__all__ = [
    "CFExpansion",
    "Convergent",
    "GOLDEN",
    "convergents",
    "eval_bracket",
    "min_spectrum",
    "mirror_value",
    "parse_cf",
    "quadratic_to_cf",
    "QuadraticNumber",
    "WordStream",
    "characteristic_prefix",
    "mechanical_prefix",
    "standard_words",
    "subword_complexity",
    "sturmian_number",
    "RepProfile",
    "r_naive",
    "r_profile",
    "rep_estimate",
    "Chain",
    "GoldenChain",
    "LevelState",
    "chain_of",
    "chain_states",
    "chain_stats",
    "classify_level",
    "parse_chain",
    "predict_lambda",
    "rep_exact_periodic_golden",
    "synthesize",
]

__version__ = "0.1.0"
