"""Dense semidefinite programming backend."""

from .model import Expr, Model, ptrace_operator
from .program import ConicProgram, HermitianAffine, SolveResult, dump_program, embed_complex
from .solver import SolverOptions, solve

__all__ = [
    "ConicProgram",
    "Expr",
    "HermitianAffine",
    "Model",
    "SolveResult",
    "SolverOptions",
    "dump_program",
    "embed_complex",
    "ptrace_operator",
    "solve",
]
