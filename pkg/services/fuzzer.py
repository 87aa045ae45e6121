"""Randomised cross-checking of the engines against the brute-force oracle"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from config import settings
from models.errors import (
    BoundExceeded, CheckerError, ClosureBudgetExceeded, NoneWithinBound, SizeLimitExceeded,
)
from models.formulas import (
    EMPTY, And, Card, Conn, Formula, Not, SetTerm, Sgl, Sort, Sub, Term, Var, disjunction, exists,
)
from models.graph import TypedGraph
from models.schemas import EngineKind, Family
from services import corpus
from services.data_handler import data_handler
from services.engine import build_expression, check
from services.formula_parser import to_text
from services.semantics import eval_circuit

logger = logging.getLogger(__name__)


# Random sentences

_VERTEX_NAMES = ("X", "Y", "Z")
_EDGE_NAMES = ("S", "F")


def _random_term(rng: np.random.Generator, var: Var, max_type: int) -> SetTerm:
    if not var.sort.is_vertex or max_type == 0 or rng.random() < 0.6:
        return var
    K = frozenset(int(i) for i in rng.choice(np.arange(1, max_type + 1), size=int(rng.integers(1, max_type + 1)),
                                              replace=False))
    return Term(K, var)


def _random_atom(rng: np.random.Generator, bound: Sequence[Var], max_type: int) -> Formula:
    vertex_vars = [v for v in bound if v.sort.is_vertex]
    edge_vars = [v for v in bound if not v.sort.is_vertex]
    pick = lambda pool: pool[int(rng.integers(0, len(pool)))]
    kinds = ["sgl", "card"]
    if len(bound) > 1:
        kinds.append("sub")
    if edge_vars and vertex_vars:
        kinds += ["conn", "conn"]
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == "sub":
        pool = vertex_vars if len(vertex_vars) > 1 or not edge_vars else edge_vars
        left = pick(pool)
        right = EMPTY if rng.random() < 0.2 else _random_term(rng, pick(pool), max_type)
        return Sub(_random_term(rng, left, max_type), right)
    if kind == "sgl":
        return Sgl(_random_term(rng, pick(bound), max_type))
    if kind == "card":
        m = int(rng.integers(2, 4))
        return Card(_random_term(rng, pick(bound), max_type), int(rng.integers(0, m)), m)
    arity = int(rng.integers(1, 3))
    return Conn(pick(edge_vars), tuple(_random_term(rng, pick(vertex_vars), max_type) for _ in range(arity)))


def _random_body(rng: np.random.Generator, bound: Sequence[Var], size: int, max_type: int) -> Formula:
    if size <= 1:
        atom = _random_atom(rng, bound, max_type)
        return Not(atom) if rng.random() < 0.3 else atom
    split = int(rng.integers(1, size))
    left = _random_body(rng, bound, split, max_type)
    right = _random_body(rng, bound, size - split, max_type)
    if rng.random() < 0.5:
        return And((left, right))
    return disjunction(left, right)


def random_sentence(rng: np.random.Generator, width: int = 2, atoms: int = 3, max_type: int = 2) -> Formula:
    """Circuitous sentence with ``width`` nested quantifiers over at most three variables"""
    bound: List[Var] = []
    for _ in range(width):
        if rng.random() < 0.35 and len([v for v in bound if not v.sort.is_vertex]) < len(_EDGE_NAMES):
            name = _EDGE_NAMES[len([v for v in bound if not v.sort.is_vertex])]
            bound.append(Var(name, Sort.ESET))
        else:
            name = _VERTEX_NAMES[len([v for v in bound if v.sort.is_vertex])]
            bound.append(Var(name, Sort.VSET))
    body = _random_body(rng, bound, atoms, max_type) if bound else Sub(EMPTY, EMPTY)
    f = body
    for var in reversed(bound):
        f = exists(var, f) if rng.random() < 0.5 else Not(exists(var, Not(f)))
    return f


# Cross-checking

ENGINES = (EngineKind.INDUCTIVE, EngineKind.AUTOMATON)

# Budget failures are give-ups; any other engine error is recorded by its class name
GIVE_UPS = (BoundExceeded, ClosureBudgetExceeded, SizeLimitExceeded)

Outcome = Union[bool, None, str]


@dataclass
class Disagreement:
    graph: TypedGraph
    sentence: Formula
    family: Family
    k: int
    verdicts: Dict[str, Outcome]
    reproduction: Optional[TypedGraph] = None


@dataclass
class FuzzReport:
    table: pd.DataFrame
    disagreements: List[Disagreement] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def summary(self) -> Dict[str, int]:
        result = {"cases": int(len(self.table)), "disagreements": len(self.disagreements)}
        if self.table.empty:
            return result
        counts = self.table.groupby("family")["agree"].agg(["count", "sum"])
        for family, row in counts.iterrows():
            result[f"{family}_cases"] = int(row["count"])
            result[f"{family}_agreements"] = int(row["sum"])
        for engine in ENGINES:
            if engine.value not in self.table:
                continue
            column = self.table[engine.value]
            result[f"{engine.value}_gave_up"] = int(column.isna().sum())
            result[f"{engine.value}_errors"] = int(column.map(lambda v: isinstance(v, str)).sum())
        return result


def smallest_width(G: TypedGraph, family: Family) -> int:
    """Smallest k for which the family's builder accepts G"""
    for k in range(0, len(G.vertices) + 1):
        try:
            build_expression(G, k, family)
            return k
        except NoneWithinBound:
            continue
    return len(G.vertices)


def verdicts(G: TypedGraph, f: Formula, k: int, family: Family,
             engines: Sequence[EngineKind] = ENGINES) -> Dict[str, Outcome]:
    """Oracle and engine verdicts.

    None marks an engine that gave up on a budget, an error class name one that failed.
    """
    result: Dict[str, Outcome] = {"oracle": eval_circuit(f, G)}
    for engine in engines:
        try:
            result[engine.value], _ = check(G, f, k, family, engine=engine)
        except GIVE_UPS as e:
            logger.warning("%s engine gave up: %s", engine.value, e)
            result[engine.value] = None
        except CheckerError as e:
            logger.error("%s engine failed: %s", engine.value, e)
            result[engine.value] = type(e).__name__
    return result


def _agree(values: Dict[str, Outcome]) -> bool:
    if any(isinstance(v, str) for v in values.values()):
        return False
    return len({v for v in values.values() if v is not None}) <= 1


def _without_edge(G: TypedGraph, edge: str) -> TypedGraph:
    keep = [i for i, e in enumerate(G.edges) if e != edge]
    return TypedGraph(
        vertices=G.vertices,
        edges=tuple(G.edges[i] for i in keep),
        endpoints=tuple(G.endpoints[i] for i in keep),
        terminals=G.terminals,
        orientation=tuple(G.orientation[i] for i in keep) if G.orientation is not None else None,
        loops=G.loops,
    )


def _without_vertex(G: TypedGraph, vertex: str) -> TypedGraph:
    keep = [i for i, word in enumerate(G.endpoints) if vertex not in word]
    return TypedGraph(
        vertices=tuple(v for v in G.vertices if v != vertex),
        edges=tuple(G.edges[i] for i in keep),
        endpoints=tuple(G.endpoints[i] for i in keep),
        terminals=G.terminals,
        orientation=tuple(G.orientation[i] for i in keep) if G.orientation is not None else None,
        loops=G.loops,
    )


def shrink(G: TypedGraph, still_fails: Callable[[TypedGraph], bool]) -> TypedGraph:
    """Greedily drop edges, then non-terminal vertices, while the failure persists"""
    changed = True
    while changed:
        changed = False
        for edge in G.edges:
            smaller = _without_edge(G, edge)
            if still_fails(smaller):
                G, changed = smaller, True
                break
        if changed:
            continue
        for vertex in G.vertices:
            if vertex in G.terminals or len(G.vertices) == 1:
                continue
            smaller = _without_vertex(G, vertex)
            if still_fails(smaller):
                G, changed = smaller, True
                break
    return G


def fuzz(graphs: Optional[int] = None, sentences: Optional[int] = None, seed: int = 0,
         max_vertices: Optional[int] = None, out_dir: Optional[Path] = None,
         families: Sequence[Family] = (Family.TREE, Family.PATH),
         sentence_pool: Optional[Sequence[Formula]] = None) -> FuzzReport:
    """Cross-check engines and oracle on random graphs and sentences.

    ``sentence_pool`` replaces the random sentences with fixed ones.
    """
    graphs = settings.FUZZ_GRAPHS if graphs is None else graphs
    sentences = settings.FUZZ_SENTENCES if sentences is None else sentences
    max_vertices = settings.FUZZ_MAX_VERTICES if max_vertices is None else max_vertices
    rng = np.random.default_rng(seed)
    if sentence_pool is not None:
        pool = list(sentence_pool)
    else:
        pool = [random_sentence(rng, width=int(rng.integers(1, 3)), atoms=int(rng.integers(1, 4)))
                for _ in range(sentences)]
    rows = []
    disagreements: List[Disagreement] = []
    for case in range(graphs):
        n = int(rng.integers(1, max_vertices + 1))
        G = corpus.random_graph(rng, n, int(rng.integers(0, n + 2)), terminals=int(rng.integers(0, min(n, 2) + 1)))
        family = families[case % len(families)]
        k = smallest_width(G, family)
        f = pool[int(rng.integers(0, len(pool)))]
        try:
            values = verdicts(G, f, k, family)
        except SizeLimitExceeded:
            continue
        agree = _agree(values)
        rows.append({
            "case": case, "family": family.value, "k": k, "vertices": len(G.vertices), "edges": len(G.edges),
            "type": G.type, "sentence": to_text(f), "agree": agree, **{name: v for name, v in values.items()},
        })
        if not agree:
            fails = lambda H: not _agree(verdicts(H, f, smallest_width(H, family), family))
            small = shrink(G, fails)
            disagreements.append(Disagreement(G, f, family, k, values, small))
            logger.error("Disagreement on case %d: %s", case, values)
            if out_dir is not None:
                write_reproduction(out_dir, len(disagreements), small, f)
    table = pd.DataFrame(rows)
    logger.info("Fuzz: %d cases, %d disagreements", len(rows), len(disagreements))
    return FuzzReport(table, disagreements)


def write_reproduction(out_dir: Path, index: int, G: TypedGraph, f: Formula) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_handler.save_graph(G, out_dir / f"case{index}.graph.json")
    data_handler.save_formula(f, out_dir / f"case{index}.formula")


# Size scaling

@dataclass
class ScalingFit:
    slope: float
    intercept: float
    residual_ratio: float


def scaling_fit(sizes: Sequence[int], counts: Sequence[int]) -> ScalingFit:
    """Least-squares line through (size, count) and the worst ratio between a count and the line"""
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(counts, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ratio = np.maximum(y / fitted, fitted / y)
    return ScalingFit(float(slope), float(intercept), float(ratio.max()))


def size_table(make: Callable[[int], TypedGraph], lengths: Sequence[int], family: Family, k: int) -> pd.DataFrame:
    """Expression node counts of one graph family"""
    rows = []
    for length in lengths:
        G = make(length)
        e, _ = build_expression(G, k, family)
        rows.append({"length": length, "size": len(G.vertices) + len(G.edges), "nodes": e.size})
    return pd.DataFrame(rows)
