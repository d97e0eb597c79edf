"""The compile pipeline: parse, bit-blast, simplify/decompose to a fixpoint,
encode."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .bitblast import build_model
from .core import Model
from .decompose import DecomposeOptions, decompose_once
from .encode import Cnf, VarMap, encode_model
from .parser import SourceModel, parse_model
from .simplify import Engine


@dataclass
class CompileOptions:
    simplify: bool = True
    amo: str = "pairwise"  # pairwise | commander
    plus: str = "hybrid"  # oddeven | totalizer | hybrid
    hybrid_threshold: int = 8

    def decompose_options(self) -> DecomposeOptions:
        return DecomposeOptions(self.plus, self.hybrid_threshold)


@dataclass
class CompileResult:
    cnf: Cnf
    varmap: VarMap
    model: Model
    millis: float

    @property
    def unsat(self) -> bool:
        return self.cnf.clauses == [()]


def reduce_model(model: Model, options: CompileOptions) -> Model:
    """Alternate simplification and decomposition until neither applies."""
    dopts = options.decompose_options()
    while not model.unsat:
        if options.simplify:
            Engine(model).run()
            if model.unsat:
                break
        if not decompose_once(model, dopts):
            break
    return model


def compile_source(source: SourceModel, options: CompileOptions | None = None) -> CompileResult:
    options = options or CompileOptions()
    t0 = time.perf_counter()
    model = reduce_model(build_model(source), options)
    cnf, varmap = encode_model(model, options.amo)
    return CompileResult(cnf, varmap, model, (time.perf_counter() - t0) * 1000.0)


def compile_text(text: str, options: CompileOptions | None = None) -> CompileResult:
    return compile_source(parse_model(text), options)
