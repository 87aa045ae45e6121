"""Deterministic bottom-up finite tree automata over expression trees"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import FrozenSet, List, Mapping, Optional, Protocol, Tuple

from models.errors import MissingTransition
from models.expressions import Expression, FnSymbol
from services.algebra import symbol_head

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Letter(FnSymbol):
    """Ranked letter of an alphabet that is not a graph algebra"""
    name: str
    rank: int = 0

    @property
    def in_types(self) -> Tuple[int, ...]:
        return (0,) * self.rank

    @property
    def out_type(self) -> int:
        return 0


class Stepper(Protocol):
    def step(self, symbol: FnSymbol, children: Tuple[int, ...]) -> int: ...

    def is_accepting(self, state: int) -> bool: ...


@dataclass(frozen=True)
class TreeAutomaton:
    """States are 0..len(labels)-1; ``state_types`` gives the out-type each state inhabits"""
    alphabet: Tuple[FnSymbol, ...]
    labels: Tuple[str, ...]
    state_types: Tuple[int, ...]
    transitions: Mapping[Tuple[FnSymbol, Tuple[int, ...]], int]
    accepting: FrozenSet[int]
    sink: Optional[int] = None
    _letters: FrozenSet[FnSymbol] = field(default=frozenset(), init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_letters", frozenset(self.alphabet))

    @property
    def size(self) -> int:
        return len(self.labels)

    def step(self, symbol: FnSymbol, children: Tuple[int, ...]) -> int:
        target = self.transitions.get((symbol, children))
        if target is not None:
            return target
        if symbol not in self._letters:
            raise MissingTransition(f"({_letter_text(symbol)}) is not in the alphabet")
        if self.sink is not None:
            return self.sink
        raise MissingTransition(f"No transition for ({_letter_text(symbol)}) on states {list(children)}")

    def is_accepting(self, state: int) -> bool:
        return state in self.accepting


def _letter_text(symbol: FnSymbol) -> str:
    if isinstance(symbol, Letter):
        return symbol.name
    return symbol_head(symbol)


def run(A: Stepper, e: Expression) -> List[int]:
    """States of all nodes, aligned with ``e.nodes`` (pre-order).

    Nodes are labelled first-in first-out, starting from the leaves; a node
    joins the queue once all of its children carry a state.
    """
    nodes = e.nodes
    index = {id(node): i for i, node in enumerate(nodes)}
    parent = [-1] * len(nodes)
    pending = [len(node.children) for node in nodes]
    for i, node in enumerate(nodes):
        for child in node.children:
            parent[index[id(child)]] = i
    states: List[Optional[int]] = [None] * len(nodes)
    queue = deque(i for i, node in enumerate(nodes) if not node.children)
    while queue:
        i = queue.popleft()
        node = nodes[i]
        children = tuple(states[index[id(c)]] for c in node.children)
        states[i] = A.step(node.symbol, children)
        p = parent[i]
        if p >= 0:
            pending[p] -= 1
            if pending[p] == 0:
                queue.append(p)
    return states


def accepts(A: Stepper, e: Expression) -> bool:
    return A.is_accepting(run(A, e)[0])


def dump(A: TreeAutomaton) -> str:
    """Text listing of states, transitions and accepting states"""
    lines = [f"states {A.size}"]
    for state, (label, t) in enumerate(zip(A.labels, A.state_types)):
        lines.append(f"  q{state} : {t} {label}")
    lines.append(f"transitions {len(A.transitions)}")
    rows = sorted(
        (_letter_text(symbol), children, target)
        for (symbol, children), target in A.transitions.items()
    )
    for name, children, target in rows:
        args = " ".join(f"q{c}" for c in children)
        lines.append(f"  ({name}{' ' + args if args else ''}) -> q{target}")
    lines.append("accepting " + " ".join(f"q{s}" for s in sorted(A.accepting)))
    if A.sink is not None:
        lines.append(f"sink q{A.sink}")
    return "\n".join(lines) + "\n"
