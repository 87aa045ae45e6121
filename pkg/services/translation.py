"""Translation from the direct language into the circuitous language.

Element variables become singleton set variables of the same name; their
quantifiers are relativized by ``sgl``. Equality becomes mutual inclusion and
membership becomes inclusion. Formulas that are already circuitous come back
unchanged.
"""
import logging
from typing import Dict, Optional

from models.formulas import (
    And, Card, Conn, Eq, Forall, Formula, Member, Not, SetTerm, Sgl,
    Sub, Term, Var, implication,
)
from services.semantics import Assignment

logger = logging.getLogger(__name__)


def lift_var(var: Var) -> Var:
    if var.sort.is_element:
        return Var(var.name, var.sort.as_set())
    return var


def _term(t: SetTerm) -> SetTerm:
    if isinstance(t, Var):
        return lift_var(t)
    if isinstance(t, Term):
        return Term(t.K, _term(t.base))
    return t


def translate(f: Formula) -> Formula:
    """A circuitous formula agreeing with f under the induced assignment"""
    if isinstance(f, Eq):
        left, right = _term(f.left), _term(f.right)
        return And((Sub(left, right), Sub(right, left)))
    if isinstance(f, Member):
        return Sub(_term(f.element), _term(f.target))
    if isinstance(f, Sub):
        return Sub(_term(f.left), _term(f.right))
    if isinstance(f, Sgl):
        return Sgl(_term(f.arg))
    if isinstance(f, Conn):
        return Conn(_term(f.edge), tuple(_term(a) for a in f.args))
    if isinstance(f, Card):
        return Card(_term(f.arg), f.r, f.m)
    if isinstance(f, Not):
        return Not(translate(f.body))
    if isinstance(f, And):
        return And(tuple(translate(x) for x in f.items))
    if isinstance(f, Forall):
        body = translate(f.body)
        if f.var.sort.is_element:
            lifted = lift_var(f.var)
            return Forall(lifted, implication(Sgl(lifted), body))
        return Forall(f.var, body)
    return f


def induced_assignment(tau: Optional[Assignment]) -> Dict[str, object]:
    """Element values become singleton sets; set values are kept"""
    result: Dict[str, object] = {}
    for name, value in (tau or {}).items():
        result[name] = (value,) if isinstance(value, str) else tuple(value)
    return result


def is_circuitous(f: Formula) -> bool:
    """True when f uses set sorts only and no equality or membership atoms"""
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (Eq, Member)):
            return False
        if isinstance(node, Forall) and node.var.sort.is_element:
            return False
        for t in node.terms():
            if any(v.sort.is_element for v in t.free_vars):
                return False
        stack.extend(node.children())
    return True
