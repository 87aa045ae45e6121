"""Tree automata built from the decomposition closure of a sentence.

The closure of a sentence holds, per type, every formula that decompositions
along the alphabet can ask a child about. A state is a type together with the
closure formulas of that type that hold; transitions evaluate skeletons on the
children's states. States are discovered lazily, so only reachable subsets
are ever built.
"""
import logging
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from config import settings
from models.errors import ClosureBudgetExceeded, MissingTransition, SizeLimitExceeded
from models.expressions import Bloom, Expression, FnSymbol, SignatureProfile
from models.formulas import Formula
from models.graph import TypedGraph
from services import algebra
from services.automata import TreeAutomaton
from services.corpus import has_loop
from services.inductive import constant_truth, decompose_symbol, literals
from services.normalizer import mk_and, mk_not, normalize
from services.semantics import eval_circuit

logger = logging.getLogger(__name__)

State = Tuple[int, FrozenSet[Formula]]


def closure_formulas(f: Formula, alphabet: Sequence[FnSymbol], root_type: int,
                     budget: Optional[int] = None) -> Dict[int, Tuple[Formula, ...]]:
    """Per type, the formulas reachable from f by decomposing along the alphabet"""
    budget = settings.CLOSURE_BUDGET if budget is None else budget
    producers: Dict[int, List[FnSymbol]] = {}
    for symbol in alphabet:
        if symbol.arity:
            producers.setdefault(symbol.out_type, []).append(symbol)
    found: Dict[int, Dict[Formula, None]] = {root_type: {normalize(f, root_type): None}}
    queue = deque([(root_type, normalize(f, root_type))])
    total = 1
    while queue:
        t, psi = queue.popleft()
        for symbol in producers.get(t, ()):
            d = decompose_symbol(psi, symbol)
            for literal in literals(d.skeleton):
                child_type = symbol.in_types[literal.child]
                bucket = found.setdefault(child_type, {})
                if literal.formula in bucket:
                    continue
                bucket[literal.formula] = None
                queue.append((child_type, literal.formula))
                total += 1
                if total > budget:
                    raise ClosureBudgetExceeded(f"Closure exceeds {budget} formulas")
    closure = {t: tuple(bucket) for t, bucket in sorted(found.items())}
    logger.info("Closure: %s", {t: len(fs) for t, fs in closure.items()})
    return closure


class ClosureAutomaton:
    """Deterministic automaton whose states are discovered on demand"""

    def __init__(self, formula: Formula, closure: Mapping[int, Sequence[Formula]],
                 alphabet: Sequence[FnSymbol], root_type: int, state_budget: Optional[int] = None):
        self.root_type = root_type
        self.formula = normalize(formula, root_type)
        self.closure = {t: tuple(fs) for t, fs in closure.items()}
        self.alphabet = tuple(alphabet)
        self.state_budget = settings.STATE_BUDGET if state_budget is None else state_budget
        self._letters = frozenset(self.alphabet)
        self.states: List[State] = []
        self._index: Dict[State, int] = {}
        self.transitions: Dict[Tuple[FnSymbol, Tuple[int, ...]], int] = {}

    @property
    def closure_size(self) -> int:
        return sum(len(fs) for fs in self.closure.values())

    @property
    def size(self) -> int:
        return len(self.states)

    def state_type(self, state: int) -> int:
        return self.states[state][0]

    def truths(self, state: int) -> FrozenSet[Formula]:
        return self.states[state][1]

    def _intern(self, state: State) -> int:
        index = self._index.get(state)
        if index is None:
            if len(self.states) >= self.state_budget:
                raise ClosureBudgetExceeded(f"Automaton exceeds {self.state_budget} states")
            index = len(self.states)
            self.states.append(state)
            self._index[state] = index
        return index

    def step(self, symbol: FnSymbol, children: Tuple[int, ...]) -> int:
        key = (symbol, children)
        target = self.transitions.get(key)
        if target is not None:
            return target
        if symbol not in self._letters:
            raise MissingTransition(f"({algebra.symbol_head(symbol)}) is not in the alphabet")
        if len(children) != symbol.arity or any(
                self.state_type(c) != t for c, t in zip(children, symbol.in_types)):
            raise MissingTransition(f"({algebra.symbol_head(symbol)}) is not defined on states {list(children)}")
        candidates = self.closure.get(symbol.out_type, ())
        if not children:
            holding = frozenset(psi for psi in candidates if constant_truth(psi, symbol))
        else:
            value = lambda i, chi: chi in self.states[children[i]][1]
            holding = frozenset(
                psi for psi in candidates if decompose_symbol(psi, symbol).evaluate(value))
        target = self._intern((symbol.out_type, holding))
        self.transitions[key] = target
        return target

    def is_accepting(self, state: int) -> bool:
        t, holding = self.states[state]
        return t == self.root_type and self.formula in holding

    def label(self, state: int) -> str:
        t, holding = self.states[state]
        return f"{t} {{{'; '.join(sorted(str(psi) for psi in holding))}}}"

    def explore(self) -> Iterator[Tuple[int, FnSymbol, Tuple[int, ...]]]:
        """Yield (state, symbol, children) for each newly reached state, breadth first.

        A combination of states is tried once, when the last of its members
        is taken from the queue.
        """
        nullary = [s for s in self.alphabet if not s.arity]
        ranked = [s for s in self.alphabet if s.arity]
        processed: Dict[int, List[int]] = {}
        seen = set()
        queue = deque()

        def reach(symbol: FnSymbol, children: Tuple[int, ...]):
            state = self.step(symbol, children)
            if state not in seen:
                seen.add(state)
                queue.append(state)
                return state
            return None

        for symbol in nullary:
            state = reach(symbol, ())
            if state is not None:
                yield state, symbol, ()
        while queue:
            q = queue.popleft()
            tq = self.state_type(q)
            processed.setdefault(tq, []).append(q)
            for symbol in ranked:
                for children in _combinations(symbol.in_types, q, tq, processed):
                    state = reach(symbol, children)
                    if state is not None:
                        yield state, symbol, children

    def freeze(self) -> TreeAutomaton:
        """Explore every reachable state and return the finished automaton"""
        for _ in self.explore():
            pass
        sink = len(self.states)
        return TreeAutomaton(
            alphabet=self.alphabet,
            labels=tuple(self.label(s) for s in range(len(self.states))) + ("?",),
            state_types=tuple(t for t, _ in self.states) + (-1,),
            transitions=dict(self.transitions),
            accepting=frozenset(s for s in range(len(self.states)) if self.is_accepting(s)),
            sink=sink,
        )


def _combinations(in_types: Tuple[int, ...], q: int, tq: int,
                  processed: Mapping[int, List[int]]) -> Iterator[Tuple[int, ...]]:
    """Children tuples over processed states whose first occurrence of q is at some position i"""
    for i, t in enumerate(in_types):
        if t != tq:
            continue
        pools = []
        for j, tj in enumerate(in_types):
            if j == i:
                pools.append((q,))
            elif j < i:
                pools.append([s for s in processed.get(tj, ()) if s != q])
            else:
                pools.append(processed.get(tj, ()))
        yield from product(*pools)


def build_closure(f: Formula, profile: Optional[SignatureProfile] = None, root_type: Optional[int] = None,
                  alphabet: Optional[Sequence[FnSymbol]] = None) -> ClosureAutomaton:
    """Closure automaton of a sentence over a profile's alphabet, or over an explicit one"""
    if alphabet is None:
        if profile is None:
            raise ValueError("Either a profile or an alphabet is required")
        alphabet = profile.alphabet()
    if root_type is None:
        root_type = profile.n if profile is not None else 0
    closure = closure_formulas(f, alphabet, root_type)
    return ClosureAutomaton(f, closure, alphabet, root_type)


# Emptiness

@dataclass
class EmptinessResult:
    empty: bool
    witness: Optional[Expression] = None
    graph: Optional[TypedGraph] = None
    verified: Optional[bool] = None
    states: int = 0
    closure_size: int = 0


def _max_edge_arity(alphabet: Sequence[FnSymbol]) -> int:
    arities = [s.out_type for s in alphabet if not s.arity]
    arities += [s.m for s in alphabet if isinstance(s, Bloom)]
    return max(arities, default=1)


def _rebuild(records: Mapping[int, Tuple[FnSymbol, Tuple[int, ...]]], state: int) -> Expression:
    """Expression that reaches a state, from first-discovery records; subtrees are never shared"""
    stack = [(state, False)]
    nodes = []
    while stack:
        s, expanded = stack.pop()
        symbol, children = records[s]
        if expanded:
            nodes.append(Expression(symbol, tuple(nodes.pop() for _ in children)[::-1]))
            continue
        stack.append((s, True))
        stack.extend((c, False) for c in reversed(children))
    return nodes.pop()


def emptiness(f: Formula, profile: SignatureProfile) -> EmptinessResult:
    """Whether some expression over the profile evaluates to a type-n graph satisfying f"""
    alphabet = profile.alphabet()
    target = f
    if not profile.loops:
        target = mk_and((f, mk_not(has_loop(_max_edge_arity(alphabet)))))
    A = ClosureAutomaton(target, closure_formulas(target, alphabet, profile.n), alphabet, profile.n)
    records: Dict[int, Tuple[FnSymbol, Tuple[int, ...]]] = {}
    for state, symbol, children in A.explore():
        records[state] = (symbol, children)
        if A.is_accepting(state):
            witness = _rebuild(records, state)
            graph = algebra.evaluate(witness, loops=profile.loops)
            try:
                verified: Optional[bool] = eval_circuit(f, graph)
            except SizeLimitExceeded:
                verified = None
            logger.info("Emptiness: witness with %d nodes after %d states", witness.size, A.size)
            return EmptinessResult(False, witness, graph, verified, A.size, A.closure_size)
    logger.info("Emptiness: empty after %d states", A.size)
    return EmptinessResult(True, states=A.size, closure_size=A.closure_size)
