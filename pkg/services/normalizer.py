"""Canonical forms of circuitous formulas.

Every rewrite in the engine builds its output through the smart constructors
below, so results are normalized by construction. ``normalize`` rebuilds a
formula bottom-up with the same constructors, which makes it idempotent.

Terminal-dependent folds are only applied when the graph type ``n`` is known:
once every index set is pruned to ``{1..n}``, ``term{K}(empty)`` with nonempty
``K`` denotes a nonempty set.
"""
import logging
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Optional, Tuple

from models.formulas import (
    BOTTOM, TOP, And, Bottom, Card, Conn, Empty, Eq, Forall, Formula,
    Member, Not, SetTerm, Sgl, Sub, Term, Top, Var,
)

logger = logging.getLogger(__name__)


# Terms

def split_term(t: SetTerm) -> Tuple[FrozenSet[int], SetTerm]:
    """(K, base) with base a variable or empty"""
    if isinstance(t, Term):
        return t.K, t.base
    return frozenset(), t


def mk_term(K: Iterable[int], base: SetTerm, n: Optional[int] = None) -> SetTerm:
    K = frozenset(K)
    if isinstance(base, Term):
        K = K | base.K
        base = base.base
    if n is not None:
        K = frozenset(i for i in K if i <= n)
    if not K:
        return base
    if isinstance(base, Var) and not base.sort.is_vertex:
        return base
    return Term(K, base)


def norm_term(t: SetTerm, n: Optional[int] = None) -> SetTerm:
    if isinstance(t, Term):
        return mk_term(t.K, t.base, n)
    return t


# Atoms

def mk_sub(left: SetTerm, right: SetTerm, n: Optional[int] = None) -> Formula:
    left, right = norm_term(left, n), norm_term(right, n)
    K, base = split_term(left)
    K2, base2 = split_term(right)
    if K <= K2 and (isinstance(base, Empty) or base == base2):
        return TOP
    if n is not None and K and isinstance(right, Empty):
        return BOTTOM
    return Sub(left, right)


def mk_sgl(arg: SetTerm, n: Optional[int] = None) -> Formula:
    arg = norm_term(arg, n)
    if isinstance(arg, Empty):
        return BOTTOM
    if n is not None and isinstance(arg, Term) and isinstance(arg.base, Empty) and len(arg.K) == 1:
        return TOP
    return Sgl(arg)


def mk_conn(edge: SetTerm, args: Iterable[SetTerm], n: Optional[int] = None) -> Formula:
    edge = norm_term(edge, n)
    args = tuple(norm_term(a, n) for a in args)
    if isinstance(edge, Empty) or any(isinstance(a, Empty) for a in args):
        return BOTTOM
    return Conn(edge, args)


def mk_card(arg: SetTerm, r: int, m: int, n: Optional[int] = None) -> Formula:
    arg = norm_term(arg, n)
    r %= m
    if m == 1:
        return TOP
    if isinstance(arg, Empty):
        return TOP if r == 0 else BOTTOM
    return Card(arg, r, m)


# Connectives

def mk_not(f: Formula) -> Formula:
    if isinstance(f, Top):
        return BOTTOM
    if isinstance(f, Bottom):
        return TOP
    if isinstance(f, Not):
        return f.body
    return Not(f)


def mk_and(items: Iterable[Formula]) -> Formula:
    flat = set()
    stack = list(items)
    while stack:
        f = stack.pop()
        if isinstance(f, Top):
            continue
        if isinstance(f, Bottom):
            return BOTTOM
        if isinstance(f, And):
            stack.extend(f.items)
            continue
        flat.add(f)
    for f in flat:
        if isinstance(f, Not) and f.body in flat:
            return BOTTOM
    if not flat:
        return TOP
    if len(flat) == 1:
        return next(iter(flat))
    return And(tuple(sorted(flat)))


def mk_or(items: Iterable[Formula]) -> Formula:
    return mk_not(mk_and(mk_not(f) for f in items))


def mk_implies(premise: Formula, conclusion: Formula) -> Formula:
    return mk_not(mk_and((premise, mk_not(conclusion))))


def mk_iff(left: Formula, right: Formula) -> Formula:
    return mk_and((mk_implies(left, right), mk_implies(right, left)))


def mk_forall(var: Var, body: Formula) -> Formula:
    if var not in body.free_vars:
        # Set quantifiers always range over a nonempty domain
        if not var.sort.is_element:
            return body
        return Forall(var, body)
    if isinstance(body, And):
        return mk_and(mk_forall(var, f) for f in body.items)
    if isinstance(body, Not) and isinstance(body.body, And):
        outer: List[Formula] = []
        inner: List[Formula] = []
        for f in body.body.items:
            (inner if var in f.free_vars else outer).append(f)
        if outer:
            scoped = mk_forall(var, mk_not(mk_and(inner)))
            return mk_not(mk_and(outer + [mk_not(scoped)]))
    return Forall(var, body)


def mk_exists(var: Var, body: Formula) -> Formula:
    return mk_not(mk_forall(var, mk_not(body)))


# Whole formulas

@lru_cache(maxsize=200_000)
def normalize(f: Formula, n: Optional[int] = None) -> Formula:
    """The canonical type-n equivalent of f"""
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Sub):
        return mk_sub(f.left, f.right, n)
    if isinstance(f, Sgl):
        return mk_sgl(f.arg, n)
    if isinstance(f, Conn):
        return mk_conn(f.edge, f.args, n)
    if isinstance(f, Card):
        return mk_card(f.arg, f.r, f.m, n)
    if isinstance(f, Eq):
        return Eq(norm_term(f.left, n), norm_term(f.right, n))
    if isinstance(f, Member):
        return Member(f.element, norm_term(f.target, n))
    if isinstance(f, Not):
        return mk_not(normalize(f.body, n))
    if isinstance(f, And):
        return mk_and(normalize(x, n) for x in f.items)
    if isinstance(f, Forall):
        return mk_forall(f.var, normalize(f.body, n))
    raise TypeError(f"Cannot normalize {type(f).__name__}")
