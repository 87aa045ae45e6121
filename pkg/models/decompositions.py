"""Tree- and path-decompositions"""
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from models.errors import DecompositionInvalid, NotRooted
from models.schemas import DecompositionKind


class NodeKind(str, Enum):
    """Node kinds of a nice decomposition"""
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Bags over the vertices of a graph, arranged in a tree or a path.

    ``edges`` are the undirected tree edges. When ``root`` is set the tree is
    rooted there and children keep the order of ``nodes``.
    """
    kind: DecompositionKind
    nodes: Tuple[str, ...]
    bags: Mapping[str, FrozenSet[str]]
    edges: Tuple[Tuple[str, str], ...] = ()
    root: Optional[str] = None

    def __post_init__(self):
        if not self.nodes:
            raise DecompositionInvalid("A decomposition needs at least one node")
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise DecompositionInvalid("Duplicate node ids")
        if set(self.bags) != known:
            raise DecompositionInvalid("Every node needs exactly one bag")
        for a, b in self.edges:
            if a not in known or b not in known:
                raise DecompositionInvalid(f"Tree edge ({a}, {b}) uses an unknown node")
        if self.root is not None and self.root not in known:
            raise DecompositionInvalid(f"Root {self.root} is not a node")

    @property
    def width(self) -> int:
        return max(len(bag) for bag in self.bags.values()) - 1

    @property
    def rooted(self) -> bool:
        return self.root is not None

    @cached_property
    def adjacency(self) -> Dict[str, List[str]]:
        position = {v: i for i, v in enumerate(self.nodes)}
        result: Dict[str, List[str]] = {v: [] for v in self.nodes}
        for a, b in self.edges:
            result[a].append(b)
            result[b].append(a)
        for neighbours in result.values():
            neighbours.sort(key=position.__getitem__)
        return result

    @cached_property
    def parent(self) -> Dict[str, Optional[str]]:
        if self.root is None:
            raise NotRooted("The decomposition has no root")
        result: Dict[str, Optional[str]] = {self.root: None}
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            for other in self.adjacency[node]:
                if other not in result:
                    result[other] = node
                    queue.append(other)
        return result

    @cached_property
    def children(self) -> Dict[str, List[str]]:
        parent = self.parent
        return {v: [c for c in self.adjacency[v] if parent.get(c) == v] for v in self.nodes}

    def preorder(self) -> List[str]:
        """Rooted pre-order, children in stored order"""
        if self.root is None:
            raise NotRooted("The decomposition has no root")
        order = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            order.append(node)
            stack.extend(reversed(self.children[node]))
        return order

    def rooted_at(self, root: str) -> "Decomposition":
        return Decomposition(self.kind, self.nodes, self.bags, self.edges, root)

    def node_kind(self, node: str) -> Optional[NodeKind]:
        """Kind of a node in a nice decomposition, None when the node fits no kind"""
        bag = self.bags[node]
        kids = self.children[node]
        if not kids:
            return NodeKind.LEAF if len(bag) == 1 else None
        if len(kids) == 2:
            if all(self.bags[c] == bag for c in kids):
                return NodeKind.JOIN
            return None
        if len(kids) != 1:
            return None
        below = self.bags[kids[0]]
        if below < bag and len(bag - below) == 1:
            return NodeKind.INTRODUCE
        if bag < below and len(below - bag) == 1:
            return NodeKind.FORGET
        return None

    def is_nice(self) -> bool:
        return all(self.node_kind(v) is not None for v in self.nodes)

    def count(self, kind: NodeKind) -> int:
        return sum(1 for v in self.nodes if self.node_kind(v) == kind)
