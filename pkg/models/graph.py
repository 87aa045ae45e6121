from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Optional, Tuple

from models.errors import InvalidGraph, LoopCreated


@dataclass(frozen=True)
class TypedGraph:
    """Finite hypergraph with ordered edge words and a terminal sequence.

    ``endpoints`` and ``orientation`` are aligned with ``edges``. An edge's
    orientation is its split index: the first ``start`` endpoints are heads,
    the rest tails. ``orientation`` is None for undirected graphs.
    """
    vertices: Tuple[str, ...]
    edges: Tuple[str, ...] = ()
    endpoints: Tuple[Tuple[str, ...], ...] = ()
    terminals: Tuple[str, ...] = ()
    orientation: Optional[Tuple[int, ...]] = None
    loops: bool = False
    _index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.vertices:
            raise InvalidGraph("A graph needs at least one vertex")
        vertex_set = set(self.vertices)
        if len(vertex_set) != len(self.vertices):
            raise InvalidGraph("Duplicate vertex identifiers")
        edge_set = set(self.edges)
        if len(edge_set) != len(self.edges):
            raise InvalidGraph("Duplicate edge identifiers")
        if vertex_set & edge_set:
            raise InvalidGraph(f"Identifiers used for both vertices and edges: {sorted(vertex_set & edge_set)}")
        if len(self.endpoints) != len(self.edges):
            raise InvalidGraph("Every edge needs exactly one endpoint word")
        for edge, word in zip(self.edges, self.endpoints):
            if not word:
                raise InvalidGraph(f"Edge {edge} has no endpoints")
            missing = [v for v in word if v not in vertex_set]
            if missing:
                raise InvalidGraph(f"Edge {edge} uses unknown vertices {missing}")
            if not self.loops and len(set(word)) != len(word):
                raise LoopCreated(f"Edge {edge} visits a vertex twice in a loop-free graph")
        for terminal in self.terminals:
            if terminal not in vertex_set:
                raise InvalidGraph(f"Terminal {terminal} is not a vertex")
        if self.orientation is not None:
            if len(self.orientation) != len(self.edges):
                raise InvalidGraph("Orientation must cover every edge")
            for edge, word, start in zip(self.edges, self.endpoints, self.orientation):
                if not 0 < start < len(word):
                    raise InvalidGraph(f"Split index {start} of edge {edge} outside 1..{len(word) - 1}")
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(self.edges)})

    @property
    def type(self) -> int:
        return len(self.terminals)

    @property
    def directed(self) -> bool:
        return self.orientation is not None

    def word(self, edge: str) -> Tuple[str, ...]:
        """The endpoint word of an edge"""
        return self.endpoints[self._index[edge]]

    def start(self, edge: str) -> Optional[int]:
        if self.orientation is None:
            return None
        return self.orientation[self._index[edge]]

    def terminal(self, i: int) -> str:
        """1-based terminal lookup"""
        return self.terminals[i - 1]

    @cached_property
    def vertex_position(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def has_edge_id(self, edge: str) -> bool:
        return edge in self._index

    def summary(self) -> str:
        return f"{len(self.vertices)} vertices, {len(self.edges)} edges, type {self.type}"
