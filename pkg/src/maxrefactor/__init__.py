"""Optimal refactoring of definite logic programs with linear invented rules."""

from .decode import RefactoringSolution, compression_rate, decode, normalized_gap, verify, verify_program
from .encoder import Encoding, WcnfFormula, encode, layout, read_wcnf
from .engine import Outcome, refactor
from .logic import (
    LinearAuxRule,
    Literal,
    Program,
    Rule,
    alpha_equal,
    format_program,
    linearize,
    parse_program,
    predicates,
    program_size,
    unfold,
    unfold_all,
)
from .hardness import bibd_instance, induced_instance, k_bound, mis_bruteforce
from .oracle import OracleConfig, oracle_optimum
from .solver import SolveResult, export_and_run_external, solve

__version__ = "0.1.0"
