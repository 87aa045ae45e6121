"""Formula ASTs for the direct and circuitous MSO languages.

One node family serves both languages. The direct language additionally uses
element sorts, ``Eq`` and ``Member``; the circuitous language uses set sorts
only. The stored core is Top, Bottom, atoms, Not, And and Forall; the parser
and the rewriters build disjunction and existential quantification from these.
"""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Tuple


class Sort(str, Enum):
    """Variable sorts"""
    VSET = "V"
    ESET = "E"
    VERTEX = "v"
    EDGE = "e"

    @property
    def is_element(self) -> bool:
        return self in (Sort.VERTEX, Sort.EDGE)

    @property
    def is_vertex(self) -> bool:
        return self in (Sort.VSET, Sort.VERTEX)

    def as_set(self) -> "Sort":
        return Sort.VSET if self.is_vertex else Sort.ESET


class Node:
    """Structural identity: equality, hashing and ordering go through ``key``"""
    TAG = 0

    @cached_property
    def key(self) -> tuple:
        raise NotImplementedError

    @cached_property
    def _hash(self) -> int:
        return hash(self.key)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(other) is not type(self):
            return False
        return self._hash == other._hash and self.key == other.key

    def __lt__(self, other: "Node") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        from services.formula_parser import to_text
        return to_text(self)


# Terms

class SetTerm(Node):
    @cached_property
    def free_vars(self) -> FrozenSet["Var"]:
        return frozenset()

    @property
    def sort(self):
        return None


@dataclass(frozen=True, eq=False)
class Var(SetTerm):
    name: str
    sort_: Sort
    TAG = 1

    @property
    def sort(self) -> Sort:
        return self.sort_

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.name, self.sort_.value)

    @cached_property
    def free_vars(self) -> FrozenSet["Var"]:
        return frozenset({self})


@dataclass(frozen=True, eq=False)
class Empty(SetTerm):
    TAG = 2

    @cached_property
    def key(self) -> tuple:
        return (self.TAG,)


@dataclass(frozen=True, eq=False)
class Term(SetTerm):
    """base ∪ {t(i) : i ∈ K} on vertex sets, identity on edge sets"""
    K: FrozenSet[int]
    base: SetTerm
    TAG = 3

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, tuple(sorted(self.K)), self.base.key)

    @cached_property
    def free_vars(self) -> FrozenSet["Var"]:
        return self.base.free_vars

    @property
    def sort(self):
        if isinstance(self.base, Var):
            return self.base.sort.as_set()
        return Sort.VSET


EMPTY = Empty()


# Formulas

class Formula(Node):
    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        return frozenset()

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def terms(self) -> Tuple[SetTerm, ...]:
        return ()


@dataclass(frozen=True, eq=False)
class Top(Formula):
    TAG = 10

    @cached_property
    def key(self) -> tuple:
        return (self.TAG,)


@dataclass(frozen=True, eq=False)
class Bottom(Formula):
    TAG = 11

    @cached_property
    def key(self) -> tuple:
        return (self.TAG,)


TOP = Top()
BOTTOM = Bottom()


class Atom(Formula):
    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        result = frozenset()
        for t in self.terms():
            result |= t.free_vars
        return result


@dataclass(frozen=True, eq=False)
class Sub(Atom):
    left: SetTerm
    right: SetTerm
    TAG = 20

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.left.key, self.right.key)

    def terms(self) -> Tuple[SetTerm, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class Sgl(Atom):
    arg: SetTerm
    TAG = 21

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.arg.key)

    def terms(self) -> Tuple[SetTerm, ...]:
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Conn(Atom):
    """Some edge of ``edge`` has word v1…vn with vi drawn from the i-th argument"""
    edge: SetTerm
    args: Tuple[SetTerm, ...]
    TAG = 22

    @property
    def arity(self) -> int:
        return len(self.args)

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.edge.key, tuple(a.key for a in self.args))

    def terms(self) -> Tuple[SetTerm, ...]:
        return (self.edge,) + self.args


@dataclass(frozen=True, eq=False)
class Card(Atom):
    """|arg| ≡ r (mod m)"""
    arg: SetTerm
    r: int
    m: int
    TAG = 23

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.arg.key, self.r, self.m)

    def terms(self) -> Tuple[SetTerm, ...]:
        return (self.arg,)


@dataclass(frozen=True, eq=False)
class Eq(Atom):
    left: SetTerm
    right: SetTerm
    TAG = 24

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.left.key, self.right.key)

    def terms(self) -> Tuple[SetTerm, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, eq=False)
class Member(Atom):
    element: SetTerm
    target: SetTerm
    TAG = 25

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.element.key, self.target.key)

    def terms(self) -> Tuple[SetTerm, ...]:
        return (self.element, self.target)


@dataclass(frozen=True, eq=False)
class Not(Formula):
    body: Formula
    TAG = 30

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.body.key)

    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        return self.body.free_vars

    def children(self) -> Tuple[Formula, ...]:
        return (self.body,)


@dataclass(frozen=True, eq=False)
class And(Formula):
    items: Tuple[Formula, ...]
    TAG = 31

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, tuple(f.key for f in self.items))

    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        result = frozenset()
        for f in self.items:
            result |= f.free_vars
        return result

    def children(self) -> Tuple[Formula, ...]:
        return self.items


@dataclass(frozen=True, eq=False)
class Forall(Formula):
    var: Var
    body: Formula
    TAG = 32

    @cached_property
    def key(self) -> tuple:
        return (self.TAG, self.var.key, self.body.key)

    @cached_property
    def free_vars(self) -> FrozenSet[Var]:
        return self.body.free_vars - {self.var}

    def children(self) -> Tuple[Formula, ...]:
        return (self.body,)


# Sugar used by the parser and the rewriters. These build core nodes only.

def disjunction(*items: Formula) -> Formula:
    return Not(And(tuple(Not(f) for f in items)))


def implication(premise: Formula, conclusion: Formula) -> Formula:
    return Not(And((premise, Not(conclusion))))


def exists(var: Var, body: Formula) -> Formula:
    return Not(Forall(var, Not(body)))
