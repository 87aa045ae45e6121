"""Memoized evaluation of circuitous sentences over expressions, and the check pipeline"""
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Tuple

from config import settings
from models.decompositions import Decomposition
from models.errors import BoundExceeded, FormulaError, InvalidExpression
from models.expressions import Expression
from models.formulas import Formula
from models.graph import TypedGraph
from models.schemas import DecompositionKind, EngineKind, Family, FormulaMetrics, RunReport, Verdict
from services import algebra, builder, decomposer
from services.automata import accepts
from services.closure import build_closure
from services.inductive import decompose_symbol, literals
from services.normalizer import normalize
from services.semantics import eval_circuit, metrics
from services.translation import is_circuitous, translate

logger = logging.getLogger(__name__)


@dataclass
class MemoTable:
    """Truth values per (expression node, normalized formula) for one evaluation"""
    values: Dict[Tuple[int, Formula], bool] = field(default_factory=dict)
    lookups: int = 0

    def store(self, node: Expression, formula: Formula, value: bool) -> None:
        key = (id(node), formula)
        if key in self.values:
            raise KeyError(f"Memo entry written twice for {formula}")
        self.values[key] = value

    def lookup(self, node: Expression, formula: Formula) -> bool:
        self.lookups += 1
        return self.values[(id(node), formula)]

    def __contains__(self, key) -> bool:
        node, formula = key
        return (id(node), formula) in self.values

    @property
    def entries(self) -> int:
        return len(self.values)

    @property
    def distinct_formulas(self) -> int:
        return len({formula for _, formula in self.values})


def check_bounds(f: Formula) -> FormulaMetrics:
    """Formula metrics, or BoundExceeded when one is over its configured limit"""
    m = metrics(f)
    limits = (
        ("width", m.width, settings.MAX_WIDTH),
        ("variable index", m.max_var_index, settings.MAX_VARS),
        ("connectivity arity", m.max_conn_arity, settings.MAX_CONN),
        ("counting modulus", m.max_card_modulus, settings.MAX_MODULUS),
    )
    for name, value, limit in limits:
        if value > limit:
            raise BoundExceeded(f"Formula {name} {value} exceeds the configured bound {limit}")
    return m


def evaluate_on_expression(f: Formula, e: Expression, memo: Optional[MemoTable] = None) -> bool:
    """Truth of a circuitous sentence on the value of e.

    The first pass walks the tree top-down and collects, per node, the formulas
    its parent asks about. The second pass evaluates them bottom-up.
    """
    if f.free_vars:
        raise FormulaError(f"Free variables {sorted(v.name for v in f.free_vars)} in a sentence")
    check_bounds(f)
    problems = algebra.validate(e)
    if problems:
        raise InvalidExpression("; ".join(problems[:5]))
    memo = MemoTable() if memo is None else memo
    root = normalize(f, e.out_type)
    demand: Dict[int, Dict[Formula, None]] = {id(e): {root: None}}
    for node in e.nodes:
        for psi in demand.get(id(node), ()):
            for literal in literals(decompose_symbol(psi, node.symbol).skeleton):
                child = node.children[literal.child]
                demand.setdefault(id(child), {})[literal.formula] = None
    for node in e.postorder():
        for psi in demand.get(id(node), ()):
            if (node, psi) in memo:
                continue
            d = decompose_symbol(psi, node.symbol)
            value = d.evaluate(lambda i, chi: memo.lookup(node.children[i], chi))
            memo.store(node, psi, value)
    logger.info("Evaluated %d nodes: %d memo entries, %d distinct formulas",
                e.size, memo.entries, memo.distinct_formulas)
    return memo.values[(id(e), root)]


# Pipeline

@contextmanager
def _stage(timings: Dict[str, float], name: str) -> Iterator[None]:
    started = time.perf_counter()
    try:
        yield
    finally:
        timings[name] = round(time.perf_counter() - started, 6)


def prepare_decomposition(G: TypedGraph, k: int, family: Family,
                          decomposition: Optional[Decomposition] = None) -> Decomposition:
    """Rooted nice decomposition ready for the width-bounded builders"""
    kind = DecompositionKind.TREE if family == Family.TREE else DecompositionKind.PATH
    if decomposition is None:
        D = decomposer.decompose(G, k, kind, terminals_together=True)
    else:
        decomposer.require_valid(decomposition, G)
        D = decomposition
    terminals = set(G.terminals)
    if family == Family.TREE:
        if D.root is None or not terminals <= D.bags[D.root]:
            D = decomposer.verdant_root(D, G)
    elif D.root is None or not terminals <= D.bags[D.root] or len(D.adjacency[D.root]) > 1:
        D = decomposer.verdurous_root(D, G)
    return decomposer.make_nice(D)


def build_expression(G: TypedGraph, k: int, family: Family,
                     decomposition: Optional[Decomposition] = None) -> Tuple[Expression, Optional[Decomposition]]:
    """Expression of the family's algebra that evaluates to G"""
    if family == Family.GENERIC:
        return builder.build_generic(G), None
    D = prepare_decomposition(G, k, family, decomposition)
    if family == Family.TREE:
        return builder.build_treewidth(G, D, k), D
    return builder.build_pathwidth(G, D, k), D


def as_sentence(f: Formula) -> Formula:
    """The circuitous form of a sentence"""
    if not is_circuitous(f):
        f = translate(f)
    if f.free_vars:
        raise FormulaError(f"Free variables {sorted(v.name for v in f.free_vars)}; a sentence is required")
    return f


def check(G: TypedGraph, f: Formula, k: int, family: Family = Family.TREE,
          decomposition: Optional[Decomposition] = None,
          engine: EngineKind = EngineKind.INDUCTIVE) -> Tuple[bool, RunReport]:
    """Decide f on G through a width-k expression, or by brute force for the oracle engine"""
    timings: Dict[str, float] = {}
    with _stage(timings, "translate"):
        f = as_sentence(f)
        m = check_bounds(f)
    report = RunReport(
        tool=settings.APP_NAME,
        version=settings.APP_VERSION,
        command="check",
        engine=engine,
        family=family,
        width_bound=k,
        metrics=m,
    )
    if engine == EngineKind.ORACLE:
        with _stage(timings, "evaluate"):
            value = eval_circuit(f, G)
    else:
        with _stage(timings, "build"):
            e, D = build_expression(G, k, family, decomposition)
        report.expression_nodes = e.size
        report.decomposition_width = D.width if D is not None else None
        report.details["locality"] = sorted(algebra.locality(e))
        logger.info("Expression with %d nodes%s", e.size,
                    f" from a width-{D.width} decomposition" if D is not None else "")
        if engine == EngineKind.AUTOMATON:
            with _stage(timings, "evaluate"):
                alphabet = sorted(algebra.symbols_of(e), key=lambda s: s.sort_key)
                A = build_closure(f, None, e.out_type, alphabet=alphabet)
                value = accepts(A, e)
            report.closure_formulas = A.closure_size
            report.automaton_states = A.size
        else:
            memo = MemoTable()
            with _stage(timings, "evaluate"):
                value = evaluate_on_expression(f, e, memo)
            report.memo_entries = memo.entries
            report.memo_lookups = memo.lookups
            report.distinct_formulas = memo.distinct_formulas
    report.verdict = Verdict.TRUE if value else Verdict.FALSE
    report.timings = timings
    return value, report
