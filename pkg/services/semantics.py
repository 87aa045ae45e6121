"""Brute-force semantics of both formula languages, and formula metrics.

Sets are bitmasks over the vertex or edge universe of the graph. An element
variable holds a one-bit mask, so the direct and the circuitous language share
one evaluator.
"""
import logging
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from config import settings
from models.errors import AssignmentIncomplete, SizeLimitExceeded, SortError
from models.formulas import (
    And, Bottom, Card, Conn, Empty, Eq, Forall, Formula, Member, Not,
    SetTerm, Sgl, Sort, Sub, Top, Var,
)
from models.graph import TypedGraph
from models.schemas import FormulaMetrics

logger = logging.getLogger(__name__)

AssignmentValue = Union[str, Iterable[str]]
Assignment = Mapping[str, AssignmentValue]


class _Structure:
    """Bitmask view of a graph"""

    def __init__(self, G: TypedGraph):
        self.graph = G
        self.vertex_bit = {v: 1 << i for i, v in enumerate(G.vertices)}
        self.edge_bit = {e: 1 << i for i, e in enumerate(G.edges)}
        self.vertex_count = len(G.vertices)
        self.edge_count = len(G.edges)
        self.terminal_bits = [self.vertex_bit[t] for t in G.terminals]
        self.edge_words = [
            (self.edge_bit[e], tuple(self.vertex_bit[v] for v in word))
            for e, word in zip(G.edges, G.endpoints)
        ]

    def terminal_mask(self, K) -> int:
        mask = 0
        for i in K:
            if i <= len(self.terminal_bits):
                mask |= self.terminal_bits[i - 1]
        return mask

    def domain(self, sort: Sort) -> Iterable[int]:
        size = self.vertex_count if sort.is_vertex else self.edge_count
        if sort.is_element:
            return (1 << i for i in range(size))
        return range(1 << size)

    def encode(self, var: Var, value: AssignmentValue) -> int:
        bits = self.vertex_bit if var.sort.is_vertex else self.edge_bit
        members = [value] if isinstance(value, str) else list(value)
        if var.sort.is_element and len(members) != 1:
            raise SortError(f"Element variable {var.name} needs exactly one value, got {members}")
        mask = 0
        for x in members:
            if x not in bits:
                what = "vertex" if var.sort.is_vertex else "edge"
                raise SortError(f"{x!r} assigned to {var.name} is not a {what} of the graph")
            mask |= bits[x]
        return mask


def _term(s: _Structure, t: SetTerm, env: Dict[Var, int]) -> int:
    if isinstance(t, Var):
        return env[t]
    if isinstance(t, Empty):
        return 0
    base = _term(s, t.base, env)
    if isinstance(t.base, Var) and not t.base.sort.is_vertex:
        return base
    return base | s.terminal_mask(t.K)


def _holds(s: _Structure, f: Formula, env: Dict[Var, int]) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Sub) or isinstance(f, Member):
        left, right = f.terms()
        return _term(s, left, env) & ~_term(s, right, env) == 0
    if isinstance(f, Eq):
        return _term(s, f.left, env) == _term(s, f.right, env)
    if isinstance(f, Sgl):
        return bin(_term(s, f.arg, env)).count("1") == 1
    if isinstance(f, Card):
        return bin(_term(s, f.arg, env)).count("1") % f.m == f.r
    if isinstance(f, Conn):
        edges = _term(s, f.edge, env)
        if not edges:
            return False
        slots = [_term(s, a, env) for a in f.args]
        for bit, word in s.edge_words:
            if bit & edges and len(word) == len(slots) and all(v & slot for v, slot in zip(word, slots)):
                return True
        return False
    if isinstance(f, Not):
        return not _holds(s, f.body, env)
    if isinstance(f, And):
        return all(_holds(s, x, env) for x in f.items)
    if isinstance(f, Forall):
        saved = env.get(f.var)
        try:
            for value in s.domain(f.var.sort):
                env[f.var] = value
                if not _holds(s, f.body, env):
                    return False
            return True
        finally:
            if saved is None:
                env.pop(f.var, None)
            else:
                env[f.var] = saved
    raise TypeError(f"Cannot evaluate {type(f).__name__}")


def has_set_quantifier(f: Formula) -> bool:
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Forall) and not node.var.sort.is_element:
            return True
        stack.extend(node.children())
    return False


def _evaluate(f: Formula, G: TypedGraph, tau: Optional[Assignment], limit: Optional[int]) -> bool:
    limit = settings.ORACLE_SIZE_LIMIT if limit is None else limit
    size = len(G.vertices) + len(G.edges)
    if size > limit and has_set_quantifier(f):
        raise SizeLimitExceeded(f"Brute-force evaluation refused: |V|+|E| = {size} exceeds {limit}")
    tau = tau or {}
    s = _Structure(G)
    env: Dict[Var, int] = {}
    for var in f.free_vars:
        if var.name not in tau:
            raise AssignmentIncomplete(f"No value for free variable {var.name}")
        env[var] = s.encode(var, tau[var.name])
    return _holds(s, f, env)


def eval_direct(f: Formula, G: TypedGraph, tau: Optional[Assignment] = None,
                limit: Optional[int] = None) -> bool:
    """Truth of a direct-language formula on G under tau"""
    return _evaluate(f, G, tau, limit)


def eval_circuit(f: Formula, G: TypedGraph, tau: Optional[Assignment] = None,
                 limit: Optional[int] = None) -> bool:
    """Truth of a circuitous formula on G under tau"""
    return _evaluate(f, G, tau, limit)


def all_assignments(variables: Iterable[Var], G: TypedGraph) -> Iterable[Dict[str, Tuple[str, ...]]]:
    """Every full assignment of the given variables, as name -> tuple of ids"""
    variables = sorted(variables)
    s = _Structure(G)
    universes = {
        True: list(G.vertices),
        False: list(G.edges),
    }

    def decode(var: Var, mask: int) -> Tuple[str, ...]:
        ids = universes[var.sort.is_vertex]
        return tuple(x for i, x in enumerate(ids) if mask >> i & 1)

    def extend(i: int, partial: Dict[str, Tuple[str, ...]]):
        if i == len(variables):
            yield dict(partial)
            return
        var = variables[i]
        for mask in s.domain(var.sort):
            partial[var.name] = decode(var, mask)
            yield from extend(i + 1, partial)
        partial.pop(var.name, None)

    return extend(0, {})


# Metrics

def metrics(f: Formula) -> FormulaMetrics:
    """Width, height and the bounds that select the predicate family

    Variables are numbered from 1 in order of first appearance, so the largest index is the
    number of distinct names.
    """
    names = set()
    max_conn = 0
    max_modulus = 0
    # (node, quantifier depth); heights are filled in post-order
    heights: Dict[int, int] = {}
    width = 0
    stack = [(f, 0, False)]
    while stack:
        node, depth, done = stack.pop()
        if not done:
            stack.append((node, depth, True))
            if isinstance(node, Forall):
                names.add(node.var.name)
                depth += 1
                width = max(width, depth)
            for t in node.terms():
                names.update(v.name for v in t.free_vars)
            if isinstance(node, Conn):
                max_conn = max(max_conn, node.arity)
            if isinstance(node, Card):
                max_modulus = max(max_modulus, node.m)
            for child in node.children():
                stack.append((child, depth, False))
            continue
        child_heights = [heights[id(c)] for c in node.children()]
        if isinstance(node, Forall):
            heights[id(node)] = child_heights[0]
        elif isinstance(node, (Not, And)):
            heights[id(node)] = 1 + max(child_heights, default=0)
        else:
            heights[id(node)] = 0
    return FormulaMetrics(
        width=width,
        height=heights[id(f)],
        max_var_index=len(names),
        max_conn_arity=max_conn,
        max_card_modulus=max_modulus,
        free_vars=sorted(v.name for v in f.free_vars),
    )
