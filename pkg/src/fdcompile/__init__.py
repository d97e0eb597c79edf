"""Finite-domain constraint models compiled to CNF through order-encoded
bit-blasting, equi-propagation and partial evaluation."""
from .compiler import CompileOptions, CompileResult, compile_source, compile_text
from .core import CompileError
from .encode import Cnf, VarMap
from .parser import ParseError, parse_model
from .solver import SolveResult, decode, solve

__all__ = [
    "CompileError", "CompileOptions", "CompileResult", "Cnf", "ParseError", "SolveResult",
    "VarMap", "compile_source", "compile_text", "decode", "parse_model", "solve",
]
__version__ = "0.1.0"
