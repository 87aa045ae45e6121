"""Tree- and path-decompositions: validation, search, rooting and nice-ification.

Tree search runs the networkx elimination heuristics first and falls back to
an exact subset search at desk scale. Path search tries bandwidth orderings
first and then an exact search over vertex-separation prefixes. Terminals can
be forced into one bag (a root bag for trees, an end bag for paths).
"""
import logging
from collections import deque
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_degree, treewidth_min_fill_in

from config import settings
from models.decompositions import Decomposition, NodeKind
from models.errors import (
    DecompositionInvalid, NoneWithinBound, NotRooted, NotVerdant, NotVerdurous, SizeLimitExceeded,
    TerminalsNotCoBagged,
)
from models.graph import TypedGraph
from models.schemas import DecompositionKind
from services.graph_ops import primal_graph

logger = logging.getLogger(__name__)


# Validation

def validate(D: Decomposition, G: TypedGraph) -> List[str]:
    """Diagnostics for every violated decomposition condition, first violation first"""
    diagnostics: List[str] = []
    vertices = set(G.vertices)
    for node in D.nodes:
        stray = sorted(D.bags[node] - vertices)
        if stray:
            diagnostics.append(f"bag of {node} contains unknown vertices {stray}")
    tree = nx.Graph()
    tree.add_nodes_from(D.nodes)
    tree.add_edges_from(D.edges)
    if len(D.edges) != len(D.nodes) - 1 or not nx.is_connected(tree):
        diagnostics.append("nodes do not form a tree")
    elif D.kind == DecompositionKind.PATH and any(d > 2 for _, d in tree.degree()):
        diagnostics.append("nodes do not form a path")
    covered = set().union(*D.bags.values())
    missing = [v for v in G.vertices if v not in covered]
    if missing:
        diagnostics.append(f"vertices {missing} lie in no bag")
    for edge, word in zip(G.edges, G.endpoints):
        ends = set(word)
        if not any(ends <= bag for bag in D.bags.values()):
            diagnostics.append(f"no bag holds all endpoints of edge {edge}")
    is_tree = "nodes do not form a tree" not in diagnostics
    if is_tree:
        for v in G.vertices:
            holders = [node for node in D.nodes if v in D.bags[node]]
            if len(holders) > 1 and not nx.is_connected(tree.subgraph(holders)):
                diagnostics.append(f"bags holding {v} are not connected: {holders}")
    return diagnostics


def require_valid(D: Decomposition, G: TypedGraph) -> None:
    problems = validate(D, G)
    if problems:
        raise DecompositionInvalid("; ".join(problems))


# Search helpers

def _search_graph(G: TypedGraph, terminals_together: bool) -> nx.Graph:
    P = primal_graph(G)
    if terminals_together:
        distinct = list(dict.fromkeys(G.terminals))
        P.add_edges_from(combinations(distinct, 2))
    return P


def from_networkx(tree: nx.Graph, kind: DecompositionKind = DecompositionKind.TREE) -> Decomposition:
    """Convert a networkx decomposition whose nodes are bags"""
    bags = sorted(tree.nodes, key=lambda b: sorted(b))
    ids = {bag: f"b{i}" for i, bag in enumerate(bags)}
    return Decomposition(
        kind=kind,
        nodes=tuple(ids[b] for b in bags),
        bags={ids[b]: frozenset(b) for b in bags},
        edges=tuple((ids[a], ids[b]) for a, b in tree.edges),
    )


def from_elimination_order(P: nx.Graph, order: Sequence[str]) -> Decomposition:
    """Tree-decomposition induced by eliminating vertices in order"""
    position = {v: i for i, v in enumerate(order)}
    adjacency = {v: set(P[v]) - {v} for v in P}
    bags: Dict[str, FrozenSet[str]] = {}
    parent: Dict[str, Optional[str]] = {}
    for v in order:
        later = adjacency[v]
        bags[v] = frozenset(later | {v})
        parent[v] = min(later, key=position.__getitem__) if later else None
        for a in later:
            adjacency[a] |= later - {a}
            adjacency[a].discard(v)
    roots = [v for v in order if parent[v] is None]
    # Components are chained through their last eliminated vertices
    for a, b in zip(roots, roots[1:]):
        parent[a] = b
    ids = {v: f"b{i}" for i, v in enumerate(order)}
    return Decomposition(
        kind=DecompositionKind.TREE,
        nodes=tuple(ids[v] for v in order),
        bags={ids[v]: bags[v] for v in order},
        edges=tuple((ids[v], ids[p]) for v, p in parent.items() if p is not None),
    )


def _exact_tree_order(P: nx.Graph, k: int) -> Optional[List[str]]:
    """Elimination order of width at most k, by search over eliminated sets"""
    vertices = sorted(P.nodes)
    index = {v: i for i, v in enumerate(vertices)}
    neighbours = [sum(1 << index[u] for u in P[v] if u != v) for v in vertices]
    full = (1 << len(vertices)) - 1

    def reach(eliminated: int, v: int) -> int:
        """Vertices outside eliminated ∪ {v} reachable from v through eliminated"""
        seen = 1 << v
        frontier = [v]
        outside = 0
        while frontier:
            x = frontier.pop()
            for y in range(len(vertices)):
                bit = 1 << y
                if neighbours[x] & bit and not seen & bit:
                    seen |= bit
                    if eliminated & bit:
                        frontier.append(y)
                    else:
                        outside |= bit
        return outside

    previous: Dict[int, Optional[Tuple[int, int]]] = {0: None}
    layer = [0]
    for _ in range(len(vertices)):
        following = []
        for eliminated in layer:
            for v in range(len(vertices)):
                if eliminated >> v & 1:
                    continue
                nxt = eliminated | 1 << v
                if nxt in previous:
                    continue
                if bin(reach(eliminated, v)).count("1") <= k:
                    previous[nxt] = (eliminated, v)
                    following.append(nxt)
        layer = following
    if full not in previous:
        return None
    order = []
    state = full
    while previous[state] is not None:
        state, v = previous[state]
        order.append(vertices[v])
    return order[::-1]


def _order_width(P: nx.Graph, order: Sequence[str], pinned: Set[str]) -> int:
    """Width of the path-decomposition induced by a vertex order"""
    return max(len(bag) for bag in _path_bags(P, order, pinned)) - 1


def _path_bags(P: nx.Graph, order: Sequence[str], pinned: Set[str]) -> List[FrozenSet[str]]:
    """Bag i is the boundary of the first i-1 vertices plus vertex i; pinned vertices never leave"""
    position = {v: i for i, v in enumerate(order)}
    last_needed = {}
    for v in order:
        later = [position[u] for u in P[v] if u != v]
        last_needed[v] = len(order) if v in pinned else max([position[v]] + later)
    bags = []
    active: Set[str] = set()
    for i, v in enumerate(order):
        active.add(v)
        bags.append(frozenset(active))
        active = {u for u in active if last_needed[u] > i}
    return bags


def _exact_path_order(P: nx.Graph, k: int, pinned: Set[str]) -> Optional[List[str]]:
    vertices = sorted(P.nodes)
    index = {v: i for i, v in enumerate(vertices)}
    neighbours = [sum(1 << index[u] for u in P[v] if u != v) for v in vertices]
    pinned_mask = sum(1 << index[v] for v in pinned)
    full = (1 << len(vertices)) - 1

    def boundary(placed: int) -> int:
        result = placed & pinned_mask
        for v in range(len(vertices)):
            if placed >> v & 1 and neighbours[v] & ~placed & full:
                result |= 1 << v
        return result

    previous: Dict[int, Optional[Tuple[int, int]]] = {0: None}
    queue = deque([0])
    while queue:
        placed = queue.popleft()
        edge = boundary(placed)
        for v in range(len(vertices)):
            if placed >> v & 1:
                continue
            nxt = placed | 1 << v
            if nxt in previous:
                continue
            if bin(edge | 1 << v).count("1") - 1 <= k:
                previous[nxt] = (placed, v)
                queue.append(nxt)
    if full not in previous:
        return None
    order = []
    state = full
    while previous[state] is not None:
        state, v = previous[state]
        order.append(vertices[v])
    return order[::-1]


def path_from_order(G: TypedGraph, order: Sequence[str], terminals_together: bool = True) -> Decomposition:
    """Path-decomposition of G induced by a vertex order; its last bag holds every terminal"""
    P = _search_graph(G, terminals_together)
    pinned = set(G.terminals) if terminals_together else set()
    bags = _path_bags(P, order, pinned)
    ids = [f"p{i}" for i in range(len(bags))]
    return Decomposition(
        kind=DecompositionKind.PATH,
        nodes=tuple(ids),
        bags=dict(zip(ids, bags)),
        edges=tuple(zip(ids, ids[1:])),
    )


def _heuristic_orders(P: nx.Graph) -> Iterable[List[str]]:
    for component_order in (nx.utils.cuthill_mckee_ordering, nx.utils.reverse_cuthill_mckee_ordering):
        yield list(component_order(P))


# Search

def decompose(G: TypedGraph, k: int, kind: DecompositionKind = DecompositionKind.TREE,
              terminals_together: bool = False, exact_limit: Optional[int] = None) -> Decomposition:
    """A decomposition of width at most k, or NoneWithinBound when the search finds none"""
    exact_limit = settings.EXACT_DECOMPOSITION_LIMIT if exact_limit is None else exact_limit
    P = _search_graph(G, terminals_together)
    if kind == DecompositionKind.TREE:
        return _decompose_tree(G, P, k, exact_limit)
    return _decompose_path(G, P, k, exact_limit, terminals_together)


def _decompose_tree(G: TypedGraph, P: nx.Graph, k: int, exact_limit: int) -> Decomposition:
    best = None
    for name, heuristic in (("min-degree", treewidth_min_degree), ("min-fill-in", treewidth_min_fill_in)):
        width, tree = heuristic(P)
        logger.debug("%s heuristic found width %d", name, width)
        if best is None or width < best[0]:
            best = (width, tree)
    if best[0] <= k:
        logger.info("Heuristic tree-decomposition of width %d", best[0])
        return from_networkx(best[1])
    if len(G.vertices) > exact_limit:
        raise NoneWithinBound(
            f"Heuristics reached width {best[0]} > {k}; exact search is limited to {exact_limit} vertices")
    logger.warning("Heuristics reached width %d > %d, running exact search", best[0], k)
    order = _exact_tree_order(P, k)
    if order is None:
        raise NoneWithinBound(f"No tree-decomposition of width {k} exists")
    return from_elimination_order(P, order)


def _decompose_path(G: TypedGraph, P: nx.Graph, k: int, exact_limit: int,
                    terminals_together: bool) -> Decomposition:
    pinned = set(G.terminals) if terminals_together else set()
    for order in _heuristic_orders(P):
        width = _order_width(P, order, pinned)
        if width <= k:
            logger.info("Heuristic path-decomposition of width %d", width)
            return path_from_order(G, order, terminals_together)
    if len(G.vertices) > exact_limit:
        raise SizeLimitExceeded(f"Exact path search is limited to {exact_limit} vertices")
    logger.warning("Bandwidth orderings exceed width %d, running exact search", k)
    order = _exact_path_order(P, k, pinned)
    if order is None:
        raise NoneWithinBound(f"No path-decomposition of width {k} exists")
    return path_from_order(G, order, terminals_together)


def exact_treewidth(G: TypedGraph) -> int:
    """Smallest k with a tree-decomposition of width k (desk scale only)"""
    P = primal_graph(G)
    if len(G.vertices) > settings.EXACT_DECOMPOSITION_LIMIT:
        raise SizeLimitExceeded(f"Exact tree-width is limited to {settings.EXACT_DECOMPOSITION_LIMIT} vertices")
    for k in range(len(G.vertices)):
        if _exact_tree_order(P, k) is not None:
            return k
    return len(G.vertices) - 1


# Rooting

def verdant_root(D: Decomposition, G: TypedGraph) -> Decomposition:
    """Root at the first bag that holds every terminal"""
    terminals = set(G.terminals)
    for node in D.nodes:
        if terminals <= D.bags[node]:
            return D.rooted_at(node)
    raise TerminalsNotCoBagged(f"No bag holds all terminals {sorted(terminals)}")


def verdurous_root(D: Decomposition, G: TypedGraph) -> Decomposition:
    """Root a path-decomposition at an end node whose bag holds every terminal"""
    if D.kind != DecompositionKind.PATH:
        raise NotVerdurous("Only path-decompositions can be rooted at a path end")
    terminals = set(G.terminals)
    ends = [node for node in D.nodes if len(D.adjacency[node]) <= 1]
    for node in ends:
        if terminals <= D.bags[node]:
            return D.rooted_at(node)
    raise TerminalsNotCoBagged(f"No end bag holds all terminals {sorted(terminals)}")


def check_verdant(D: Decomposition, G: TypedGraph, k: int) -> None:
    if D.root is None:
        raise NotRooted("A verdant decomposition must be rooted")
    if D.width > k:
        raise NotVerdant(f"Decomposition width {D.width} exceeds {k}")
    if not set(G.terminals) <= D.bags[D.root]:
        raise NotVerdant("The root bag does not hold every terminal")


def check_verdurous(D: Decomposition, G: TypedGraph, k: int) -> None:
    if D.kind != DecompositionKind.PATH:
        raise NotVerdurous("Not a path-decomposition")
    check_verdant(D, G, k)
    if len(D.adjacency[D.root]) > 1:
        raise NotVerdurous("The root is not an end of the path")


# Nice decompositions

def _prune_empty_leaves(D: Decomposition) -> Decomposition:
    nodes = list(D.nodes)
    edges = list(D.edges)
    while True:
        degree = {v: 0 for v in nodes}
        for a, b in edges:
            degree[a] += 1
            degree[b] += 1
        doomed = {v for v in nodes if not D.bags[v] and degree[v] <= 1 and v != D.root}
        if not doomed or len(doomed) == len(nodes):
            break
        nodes = [v for v in nodes if v not in doomed]
        edges = [(a, b) for a, b in edges if a not in doomed and b not in doomed]
    if len(nodes) == len(D.nodes):
        return D
    return Decomposition(D.kind, tuple(nodes), {v: D.bags[v] for v in nodes}, tuple(edges), D.root)


class _NiceBuilder:

    def __init__(self, kind: DecompositionKind):
        self.kind = kind
        self.nodes: List[str] = []
        self.bags: Dict[str, FrozenSet[str]] = {}
        self.edges: List[Tuple[str, str]] = []

    def add(self, bag: FrozenSet[str], parent: Optional[str]) -> str:
        node = f"t{len(self.nodes)}"
        self.nodes.append(node)
        self.bags[node] = bag
        if parent is not None:
            self.edges.append((parent, node))
        return node

    def chain(self, top: str, target: FrozenSet[str]) -> str:
        """Nodes below ``top`` down to a node whose bag is ``target``"""
        current = top
        bag = self.bags[top]
        for v in sorted(bag - target):
            bag = bag - {v}
            current = self.add(bag, current)
        for v in sorted(target - bag):
            bag = bag | {v}
            current = self.add(bag, current)
        return current

    def result(self, root: str) -> Decomposition:
        return Decomposition(self.kind, tuple(self.nodes), dict(self.bags), tuple(self.edges), root)


def make_nice(D: Decomposition) -> Decomposition:
    """Nice decomposition of the same width with the same root bag"""
    if D.root is None:
        raise NotRooted("Only rooted decompositions can be made nice")
    D = _prune_empty_leaves(D)
    out = _NiceBuilder(D.kind)
    root = out.add(D.bags[D.root], None)
    pending = [(D.root, root)]
    while pending:
        original, anchor = pending.pop()
        kids = D.children[original]
        bag = D.bags[original]
        if not kids:
            if len(bag) > 1:
                out.chain(anchor, frozenset(sorted(bag)[:1]))
            continue
        slots = []
        current = anchor
        for _ in kids[:-1]:
            left = out.add(bag, current)
            right = out.add(bag, current)
            slots.append(left)
            current = right
        slots.append(current)
        for child, slot in zip(kids, slots):
            pending.append((child, out.chain(slot, D.bags[child])))
    nice = out.result(root)
    logger.info("Nice decomposition: %d nodes, %d joins", len(nice.nodes), nice.count(NodeKind.JOIN))
    return nice
