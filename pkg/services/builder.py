"""Compile graphs into algebra expressions.

``build_generic`` needs no decomposition. The width-bounded builders walk a
nice rooted decomposition bottom-up and remember, for every node, which bag
vertex each terminal of the node's expression stands for.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

from models.decompositions import Decomposition
from models.errors import DecompositionInvalid, JoinNodePresent
from models.expressions import (
    Bloom, EdgeConst, Expression, FnSymbol, Fuse, LoopConst, Redef, Sprout, Sum,
    Twine, VertexConst,
)
from models.graph import TypedGraph
from services import decomposer

logger = logging.getLogger(__name__)

Order = Tuple[str, ...]


def _node(symbol: FnSymbol, *children: Expression) -> Expression:
    return Expression(symbol, tuple(children))


def _redef(e: Expression, sigma: Sequence[int]) -> Expression:
    """Redefinition node, or e itself when sigma is the identity"""
    sigma = tuple(sigma)
    if sigma == tuple(range(1, e.out_type + 1)):
        return e
    return _node(Redef(sigma, e.out_type), e)


def _reorder(e: Expression, current: Order, target: Sequence[str]) -> Expression:
    """Redefine terminals so that they follow ``target`` instead of ``current``"""
    position = {v: i for i, v in enumerate(current, start=1)}
    return _redef(e, [position[v] for v in target])


def _edge_constant(G: TypedGraph, edge: str) -> Tuple[Expression, Order]:
    """Constant graph of one edge and the vertices its terminals stand for"""
    word = G.word(edge)
    support = tuple(dict.fromkeys(word))
    start = G.start(edge)
    if len(support) == len(word):
        return _node(EdgeConst(len(word), start)), support
    slot = {v: i for i, v in enumerate(support, start=1)}
    return _node(LoopConst(tuple(slot[v] for v in word), start)), support


# Generic

def build_generic(G: TypedGraph) -> Expression:
    """Sum of all vertices, then one sum, fusions and a redefinition per edge"""
    expression = _node(VertexConst())
    for _ in G.vertices[1:]:
        expression = _node(Sum(expression.out_type, 1), expression, _node(VertexConst()))
    n = len(G.vertices)
    position = {v: i for i, v in enumerate(G.vertices, start=1)}
    for edge in G.edges:
        constant, support = _edge_constant(G, edge)
        s = len(support)
        expression = _node(Sum(n, s), expression, constant)
        for i, v in enumerate(support, start=1):
            expression = _node(Fuse(position[v], n + i, n + s), expression)
        expression = _node(Redef(tuple(range(1, n + 1)), n + s), expression)
    expression = _reorder(expression, G.vertices, G.terminals)
    logger.info("Generic expression: %d nodes for %d vertices, %d edges",
                expression.size, len(G.vertices), len(G.edges))
    return expression


# Decomposition walks

def _introduced(D: Decomposition, node: str) -> Optional[str]:
    kids = D.children[node]
    if not kids:
        return min(D.bags[node])
    if len(kids) == 1:
        extra = D.bags[node] - D.bags[kids[0]]
        return min(extra) if extra else None
    return None


def assign_edges(G: TypedGraph, D: Decomposition) -> Dict[str, List[str]]:
    """Edges attached at each node.

    An edge goes to the first node in pre-order that introduces one of its
    vertices while its bag holds all of them. Pre-order visits left subtrees
    first, so an edge that fits both sides of a join belongs to the left one.
    """
    incident: Dict[str, List[str]] = {v: [] for v in G.vertices}
    for edge, word in zip(G.edges, G.endpoints):
        for v in dict.fromkeys(word):
            incident[v].append(edge)
    owner: Dict[str, List[str]] = {node: [] for node in D.nodes}
    placed = set()
    for node in D.preorder():
        v = _introduced(D, node)
        if v is None:
            continue
        bag = D.bags[node]
        for edge in incident[v]:
            if edge not in placed and set(G.word(edge)) <= bag:
                placed.add(edge)
                owner[node].append(edge)
    missing = [e for e in G.edges if e not in placed]
    if missing:
        raise DecompositionInvalid(f"Edges {missing} are never introduced")
    return owner


def _require_nice(D: Decomposition) -> None:
    if not D.is_nice():
        raise DecompositionInvalid("The decomposition is not nice")


def _attach_twine(G: TypedGraph, edge: str, expression: Expression, order: Order) -> Expression:
    constant, support = _edge_constant(G, edge)
    slot = {v: i for i, v in enumerate(support, start=1)}
    L = len(order)
    # Right terminals outside K repeat an edge vertex and add nothing
    right = _redef(constant, [slot.get(v, 1) for v in order])
    K = tuple(i for i, v in enumerate(order, start=1) if v in slot)
    return _node(Twine(L, L, K, L), expression, right)


def build_treewidth(G: TypedGraph, D: Decomposition, k: int) -> Expression:
    """Expression of the tree-width profile evaluating to G, from a nice k-verdant decomposition"""
    decomposer.require_valid(D, G)
    decomposer.check_verdant(D, G, k)
    _require_nice(D)
    owner = assign_edges(G, D)
    built: Dict[str, Tuple[Expression, Order]] = {}
    for node in reversed(D.preorder()):
        kids = D.children[node]
        bag = D.bags[node]
        if not kids:
            expression, order = _node(VertexConst()), tuple(bag)
        elif len(kids) == 2:
            left, left_order = built.pop(kids[0])
            right, right_order = built.pop(kids[1])
            right = _reorder(right, right_order, left_order)
            L = len(left_order)
            expression = _node(Twine(L, L, tuple(range(1, L + 1)), L), left, right)
            order = left_order
        else:
            child, child_order = built.pop(kids[0])
            if bag < set(child_order):
                order = tuple(v for v in child_order if v in bag)
                expression = _reorder(child, child_order, order)
            else:
                (v,) = bag - set(child_order)
                L = len(child_order)
                expression = _node(Twine(L, 1, (), L + 1), child, _node(VertexConst()))
                order = child_order + (v,)
        for edge in owner[node]:
            expression = _attach_twine(G, edge, expression, order)
        built[node] = (expression, order)
    expression, order = built.pop(D.root)
    expression = _reorder(expression, order, G.terminals)
    logger.info("Tree-width expression: %d nodes from %d bags", expression.size, len(D.nodes))
    return expression


def _attach_bloom(G: TypedGraph, edge: str, expression: Expression, order: Order) -> Tuple[Expression, Order]:
    word = G.word(edge)
    support = tuple(dict.fromkeys(word))
    rest = tuple(v for v in order if v not in support)
    start = G.start(edge)
    arranged = support + rest
    if len(support) == len(word):
        expression = _reorder(expression, order, arranged)
        return _node(Bloom(len(arranged), len(word), start), expression), arranged
    # Loops: repeat support terminals to spell the word, bloom, then drop the repeats
    expanded = word + rest
    expression = _reorder(expression, order, expanded)
    expression = _node(Bloom(len(expanded), len(word), start), expression)
    return _reorder(expression, expanded, arranged), arranged


def build_pathwidth(G: TypedGraph, D: Decomposition, k: int) -> Expression:
    """Expression of the path-width profile evaluating to G, from a nice k-verdurous decomposition"""
    decomposer.require_valid(D, G)
    if any(len(D.children[node]) > 1 for node in D.nodes):
        raise JoinNodePresent("Path building needs a decomposition without join nodes")
    decomposer.check_verdurous(D, G, k)
    _require_nice(D)
    owner = assign_edges(G, D)
    expression: Optional[Expression] = None
    order: Order = ()
    previous = frozenset()
    for node in reversed(D.preorder()):
        bag = D.bags[node]
        if expression is None:
            expression, order = _node(VertexConst()), tuple(bag)
        elif bag < previous:
            kept = tuple(v for v in order if v in bag)
            # An emptied bag keeps its last vertex as a stale terminal
            if kept or k == 0:
                expression = _reorder(expression, order, kept)
                order = kept
        else:
            (v,) = bag - previous
            expression = _node(Sprout(expression.out_type), expression)
            order = order + (v,)
            if order[0] not in bag:
                expression = _reorder(expression, order, order[1:])
                order = order[1:]
        for edge in owner[node]:
            expression, order = _attach_bloom(G, edge, expression, order)
        previous = bag
    expression = _reorder(expression, order, G.terminals)
    logger.info("Path-width expression: %d nodes from %d bags", expression.size, len(D.nodes))
    return expression
