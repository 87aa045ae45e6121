"""Inductive decompositions of circuitous formulas along the algebra's symbols.

For a symbol f of arity r and a formula φ of f's out-type, a decomposition is a
propositional skeleton over literals (i, ψ): "child i satisfies ψ". Evaluating
the skeleton on the children's truth values gives φ on f(children).

Sums split every free set into its parts on each operand. Redefinitions rename
terminal indices. Fusions read every child set as the expansion of a parent
set: t(b) joins a set whenever t(a) is in it. Quantifiers over a sum go
through disjunctive normal form; the unary rules rewrite the formula itself.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from config import settings
from models.errors import BoundExceeded
from models.expressions import Expression, FnSymbol, Fuse, Hole, Redef, Sum, NULLARY
from models.formulas import (
    EMPTY, And, Bottom, Card, Conn, Forall, Formula, Not, SetTerm, Sgl, Sub, Top, Var,
)
from services import algebra
from services.normalizer import (
    mk_and, mk_card, mk_conn, mk_exists, mk_forall, mk_iff, mk_implies, mk_not, mk_or,
    mk_sgl, mk_sub, mk_term, normalize, split_term,
)
from services.semantics import eval_circuit

logger = logging.getLogger(__name__)


# Propositional skeletons

class Prop:
    """Boolean combination of child literals"""


@dataclass(frozen=True)
class PConst(Prop):
    value: bool


@dataclass(frozen=True)
class PLit(Prop):
    child: int
    formula: Formula


@dataclass(frozen=True)
class PNot(Prop):
    body: Prop


@dataclass(frozen=True)
class PAnd(Prop):
    items: Tuple[Prop, ...]


@dataclass(frozen=True)
class POr(Prop):
    items: Tuple[Prop, ...]


P_TRUE = PConst(True)
P_FALSE = PConst(False)


def lit(child: int, formula: Formula, n: Optional[int] = None) -> Prop:
    """Literal for a child formula; constants fold and negations move outside"""
    formula = normalize(formula, n)
    if isinstance(formula, Top):
        return P_TRUE
    if isinstance(formula, Bottom):
        return P_FALSE
    if isinstance(formula, Not):
        return PNot(PLit(child, formula.body))
    return PLit(child, formula)


def p_not(p: Prop) -> Prop:
    if isinstance(p, PConst):
        return PConst(not p.value)
    if isinstance(p, PNot):
        return p.body
    return PNot(p)


def _gather(items, kind, unit: PConst, zero: PConst) -> Prop:
    flat = []
    stack = list(items)[::-1]
    while stack:
        p = stack.pop()
        if p == unit:
            continue
        if p == zero:
            return zero
        if isinstance(p, kind):
            stack.extend(reversed(p.items))
            continue
        flat.append(p)
    flat = list(dict.fromkeys(flat))
    if not flat:
        return unit
    if len(flat) == 1:
        return flat[0]
    return kind(tuple(flat))


def p_and(items) -> Prop:
    return _gather(items, PAnd, P_TRUE, P_FALSE)


def p_or(items) -> Prop:
    return _gather(items, POr, P_FALSE, P_TRUE)


def evaluate_prop(p: Prop, value: Callable[[int, Formula], bool]) -> bool:
    if isinstance(p, PConst):
        return p.value
    if isinstance(p, PLit):
        return value(p.child, p.formula)
    if isinstance(p, PNot):
        return not evaluate_prop(p.body, value)
    if isinstance(p, PAnd):
        return all(evaluate_prop(x, value) for x in p.items)
    return any(evaluate_prop(x, value) for x in p.items)


def literals(p: Prop) -> List[PLit]:
    """Distinct literals in first-occurrence order"""
    found: Dict[PLit, None] = {}
    stack = [p]
    while stack:
        node = stack.pop()
        if isinstance(node, PLit):
            found.setdefault(node)
        elif isinstance(node, PNot):
            stack.append(node.body)
        elif isinstance(node, (PAnd, POr)):
            stack.extend(reversed(node.items))
    return list(found)


def substitute(p: Prop, replace: Callable[[PLit], Prop]) -> Prop:
    if isinstance(p, PLit):
        return replace(p)
    if isinstance(p, PNot):
        return p_not(substitute(p.body, replace))
    if isinstance(p, PAnd):
        return p_and(substitute(x, replace) for x in p.items)
    if isinstance(p, POr):
        return p_or(substitute(x, replace) for x in p.items)
    return p


Literal = Tuple[int, Formula, bool]
Clause = FrozenSet[Literal]


def to_dnf(p: Prop, budget: Optional[int] = None) -> List[Clause]:
    """Clauses of an equivalent disjunctive normal form, contradictions dropped"""
    budget = settings.DNF_BUDGET if budget is None else budget

    def check(clauses: List[Clause]) -> List[Clause]:
        if len(clauses) > budget:
            raise BoundExceeded(f"Disjunctive normal form exceeds {budget} clauses")
        return clauses

    def walk(node: Prop, positive: bool) -> List[Clause]:
        if isinstance(node, PConst):
            return [frozenset()] if node.value == positive else []
        if isinstance(node, PLit):
            return [frozenset({(node.child, node.formula, positive)})]
        if isinstance(node, PNot):
            return walk(node.body, not positive)
        conjunctive = isinstance(node, PAnd) == positive
        parts = [walk(x, positive) for x in node.items]
        if not conjunctive:
            return check(list(dict.fromkeys(c for part in parts for c in part)))
        clauses: List[Clause] = [frozenset()]
        for part in parts:
            merged = {}
            for left in clauses:
                for right in part:
                    clause = left | right
                    if not any((i, f, not s) in clause for i, f, s in clause):
                        merged[clause] = None
            clauses = check(list(merged))
        return clauses

    clauses = walk(p, True)
    logger.debug("DNF with %d clauses", len(clauses))
    return clauses


@dataclass(frozen=True)
class Decomp:
    """Skeleton over the children of one symbol"""
    skeleton: Prop
    arity: int

    @property
    def children(self) -> Tuple[Tuple[Formula, ...], ...]:
        """Child formulas the skeleton references, per child position"""
        per_child: List[List[Formula]] = [[] for _ in range(self.arity)]
        for literal in literals(self.skeleton):
            per_child[literal.child].append(literal.formula)
        return tuple(tuple(fs) for fs in per_child)

    def evaluate(self, value: Callable[[int, Formula], bool]) -> bool:
        return evaluate_prop(self.skeleton, value)


# Sums

def _split(t: SetTerm, a: int, b: int) -> Tuple[SetTerm, SetTerm]:
    K, base = split_term(t)
    left = mk_term({i for i in K if i <= a}, base, a)
    right = mk_term({i - a for i in K if i > a}, base, b)
    return left, right


def _exists_split(var: Var, body: Prop, types: Sequence[int]) -> Prop:
    """∃var over a sum, given the skeleton of its body"""
    a, b = types
    groups: Dict[Formula, List[Formula]] = {}
    for clause in to_dnf(body):
        sides = ([], [])
        for child, formula, positive in clause:
            sides[child].append(formula if positive else mk_not(formula))
        groups.setdefault(mk_and(sides[1]), []).append(mk_and(sides[0]))
    return p_or(
        p_and((lit(0, mk_exists(var, mk_or(lefts)), a), lit(1, mk_exists(var, right), b)))
        for right, lefts in groups.items()
    )


def _sum(f: Formula, a: int, b: int) -> Prop:
    if isinstance(f, Top):
        return P_TRUE
    if isinstance(f, Bottom):
        return P_FALSE
    if isinstance(f, Sub):
        (la, lb), (ra, rb) = _split(f.left, a, b), _split(f.right, a, b)
        return p_and((lit(0, mk_sub(la, ra, a), a), lit(1, mk_sub(lb, rb, b), b)))
    if isinstance(f, Sgl):
        xa, xb = _split(f.arg, a, b)
        return p_or((
            p_and((lit(0, mk_sgl(xa, a), a), lit(1, mk_sub(xb, EMPTY, b), b))),
            p_and((lit(1, mk_sgl(xb, b), b), lit(0, mk_sub(xa, EMPTY, a), a))),
        ))
    if isinstance(f, Conn):
        parts = [_split(t, a, b) for t in f.terms()]
        return p_or((
            lit(0, mk_conn(parts[0][0], [p[0] for p in parts[1:]], a), a),
            lit(1, mk_conn(parts[0][1], [p[1] for p in parts[1:]], b), b),
        ))
    if isinstance(f, Card):
        xa, xb = _split(f.arg, a, b)
        p = f.m
        return p_or(
            p_and((lit(0, mk_card(xa, j, p, a), a), lit(1, mk_card(xb, f.r - j, p, b), b)))
            for j in range(p)
        )
    if isinstance(f, Not):
        return p_not(_sum(f.body, a, b))
    if isinstance(f, And):
        return p_and(_sum(x, a, b) for x in f.items)
    if isinstance(f, Forall):
        return p_not(_exists_split(f.var, _sum(mk_not(f.body), a, b), (a, b)))
    raise TypeError(f"Cannot decompose {type(f).__name__} over a sum")


@lru_cache(maxsize=100_000)
def decompose_sum(f: Formula, a: int, b: int) -> Decomp:
    """Decomposition of f over the sum of a type-a and a type-b graph"""
    return Decomp(_sum(normalize(f, a + b), a, b), 2)


# Redefinitions

def _rename(t: SetTerm, sigma: Sequence[int], n: int) -> SetTerm:
    K, base = split_term(t)
    return mk_term({sigma[i - 1] for i in K if i <= len(sigma)}, base, n)


def redef_rewrite(f: Formula, sigma: Sequence[int], n: int) -> Formula:
    """Formula on the old graph equivalent to f on its redefinition by sigma"""
    r = lambda t: _rename(t, sigma, n)
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Sub):
        return mk_sub(r(f.left), r(f.right), n)
    if isinstance(f, Sgl):
        return mk_sgl(r(f.arg), n)
    if isinstance(f, Conn):
        return mk_conn(r(f.edge), [r(x) for x in f.args], n)
    if isinstance(f, Card):
        return mk_card(r(f.arg), f.r, f.m, n)
    if isinstance(f, Not):
        return mk_not(redef_rewrite(f.body, sigma, n))
    if isinstance(f, And):
        return mk_and(redef_rewrite(x, sigma, n) for x in f.items)
    if isinstance(f, Forall):
        return mk_forall(f.var, redef_rewrite(f.body, sigma, n))
    raise TypeError(f"Cannot rename terminals in {type(f).__name__}")


@lru_cache(maxsize=100_000)
def decompose_redef(f: Formula, sigma: Tuple[int, ...], from_type: int) -> Decomp:
    child = redef_rewrite(normalize(f, len(sigma)), sigma, from_type)
    return Decomp(lit(0, child, from_type), 1)


# Fusions

def _hits(t: SetTerm, a: int, b: int) -> bool:
    K, _ = split_term(t)
    return bool(K & {a, b})


def _grow(t: SetTerm, a: int, b: int, n: int) -> SetTerm:
    K, base = split_term(t)
    return mk_term(K | {a, b}, base, n)


def _edge_sorted(t: SetTerm) -> bool:
    return t.sort is not None and not t.sort.is_vertex


def _fuse_atom(f: Formula, grown: Callable[[SetTerm], SetTerm], a: int, b: int, n: int) -> Formula:
    pair = mk_term({a, b}, EMPTY, n)
    if isinstance(f, Sub):
        return mk_sub(grown(f.left), grown(f.right), n)
    if isinstance(f, Sgl):
        x = grown(f.arg)
        if _edge_sorted(x):
            return mk_sgl(x, n)
        return mk_or((mk_sgl(x, n), mk_and((mk_sub(x, pair, n), mk_sub(pair, x, n)))))
    if isinstance(f, Conn):
        return mk_conn(grown(f.edge), [grown(x) for x in f.args], n)
    if isinstance(f, Card):
        x = grown(f.arg)
        if _edge_sorted(x):
            return mk_card(x, f.r, f.m, n)
        same = mk_sgl(pair, n)
        holds = mk_sub(pair, x, n)
        proper = mk_or((
            mk_and((mk_not(holds), mk_card(x, f.r, f.m, n))),
            mk_and((holds, mk_card(x, f.r + 1, f.m, n))),
        ))
        return mk_or((mk_and((same, mk_card(x, f.r, f.m, n))), mk_and((mk_not(same), proper))))
    raise TypeError(f"Cannot fuse terminals in {type(f).__name__}")


def fuse_rewrite(f: Formula, a: int, b: int, n: int) -> Formula:
    """Formula on the unfused graph equivalent to f on the fusion of t(a) and t(b)"""
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Not):
        return mk_not(fuse_rewrite(f.body, a, b, n))
    if isinstance(f, And):
        return mk_and(fuse_rewrite(x, a, b, n) for x in f.items)
    if isinstance(f, Forall):
        body = fuse_rewrite(f.body, a, b, n)
        if not f.var.sort.is_vertex:
            return mk_forall(f.var, body)
        guard = mk_iff(mk_sub(mk_term({a}, EMPTY, n), f.var, n), mk_sub(mk_term({b}, EMPTY, n), f.var, n))
        return mk_forall(f.var, mk_implies(guard, body))
    # Terms that name neither a nor b still grow when one of their terminals
    # coincides with t(a) or t(b)
    pair = mk_term({a, b}, EMPTY, n)
    open_terms = list(dict.fromkeys(
        t for t in f.terms()
        if not _hits(t, a, b) and split_term(t)[0] and (t.sort is None or t.sort.is_vertex)
    ))
    cases = []
    for pattern in product((False, True), repeat=len(open_terms)):
        chosen = {t for t, on in zip(open_terms, pattern) if on}
        guards = []
        for t, on in zip(open_terms, pattern):
            touches = mk_or(mk_sub(mk_term({c}, EMPTY, n), pair, n) for c in sorted(split_term(t)[0]))
            guards.append(touches if on else mk_not(touches))
        grown = lambda t: _grow(t, a, b, n) if _hits(t, a, b) or t in chosen else t
        cases.append(mk_and(guards + [_fuse_atom(f, grown, a, b, n)]))
    return mk_or(cases)


@lru_cache(maxsize=100_000)
def decompose_fuse(f: Formula, a: int, b: int, n: int) -> Decomp:
    child = fuse_rewrite(normalize(f, n), a, b, n)
    return Decomp(lit(0, child, n), 1)


# Dispatch

def _basic(f: Formula, symbol: FnSymbol) -> Decomp:
    if isinstance(symbol, Sum):
        return decompose_sum(f, symbol.n, symbol.m)
    if isinstance(symbol, Redef):
        return decompose_redef(f, symbol.sigma, symbol.from_type)
    if isinstance(symbol, Fuse):
        return decompose_fuse(f, symbol.a, symbol.b, symbol.n)
    if isinstance(symbol, NULLARY):
        return Decomp(PConst(constant_truth(f, symbol)), 0)
    raise TypeError(f"No decomposition rule for {type(symbol).__name__}")


@lru_cache(maxsize=100_000)
def constant_truth(f: Formula, symbol: FnSymbol) -> bool:
    """Truth of a sentence on the constant graph of a nullary symbol"""
    return eval_circuit(f, algebra.constant_graph(symbol, loops=True))


def _through_template(node: Expression, f: Formula) -> Prop:
    symbol = node.symbol
    if isinstance(symbol, Hole):
        return lit(symbol.index, f, symbol.type)
    d = _basic(normalize(f, symbol.out_type), symbol)
    return substitute(d.skeleton, lambda l: _through_template(node.children[l.child], l.formula))


@lru_cache(maxsize=100_000)
def decompose_symbol(f: Formula, symbol: FnSymbol) -> Decomp:
    """Decomposition of f along any letter; composite letters go through their expansion"""
    f = normalize(f, symbol.out_type)
    if not symbol.composite:
        return _basic(f, symbol)
    return Decomp(_through_template(algebra.expand_symbol(symbol), f), symbol.arity)


def clear_caches() -> None:
    """Forget memoized decompositions, e.g. after patching a rule"""
    for cached in (decompose_sum, decompose_redef, decompose_fuse, decompose_symbol, constant_truth):
        cached.cache_clear()
