"""Tokenizer, recursive-descent parser and printer for the formula grammar.

Both languages share one grammar. ``parse_circuit`` rejects element sorts,
``=`` and ``in``. Disjunction, implication, equivalence and ``exists`` are
desugared while parsing; the printer puts the sugar back so that printing a
parsed formula and parsing it again gives the same tree.
"""
import logging
import re
from typing import Dict, List, Mapping, Optional, Tuple, Union

from models.errors import FormulaSyntaxError, SortError
from models.formulas import (
    BOTTOM, EMPTY, TOP, And, Bottom, Card, Conn, Empty, Eq, Forall, Formula,
    Member, Node, Not, SetTerm, Sgl, Sort, Sub, Term, Top, Var,
    disjunction, exists, implication,
)

logger = logging.getLogger(__name__)

DIRECT = "direct"
CIRCUIT = "circuit"

KEYWORDS = {"forall", "exists", "sub", "sgl", "card", "in", "empty", "term", "true", "false"}

_TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow><->|->)
  | (?P<number>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[()!&|{},.:=])
""", re.VERBOSE)

_CONN = re.compile(r"conn(\d+)$")


def tokenize(text: str) -> List[Tuple[str, str, int]]:
    """Split text into (kind, value, offset) triples, ending with an 'end' token"""
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise FormulaSyntaxError(f"Unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind not in ("space", "comment"):
            tokens.append((kind, match.group(), pos))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _kind_of(term: SetTerm) -> Optional[str]:
    """'vertex', 'edge', or None for the empty set which fits both"""
    if isinstance(term, Empty):
        return None
    if isinstance(term, Term):
        return _kind_of(term.base) or "vertex"
    return "vertex" if term.sort.is_vertex else "edge"


class _Parser:

    def __init__(self, text: str, language: str, free: Mapping[str, Sort]):
        self.text = text
        self.language = language
        self.tokens = tokenize(text)
        self.pos = 0
        self.scope: List[Dict[str, Sort]] = [dict(free)]

    # Token helpers

    @property
    def current(self) -> Tuple[str, str, int]:
        return self.tokens[self.pos]

    def fail(self, message: str, offset: Optional[int] = None):
        raise FormulaSyntaxError(message, self.current[2] if offset is None else offset)

    def peek(self, value: str) -> bool:
        kind, text, _ = self.current
        return kind != "end" and text == value

    def advance(self) -> Tuple[str, str, int]:
        token = self.current
        self.pos += 1
        return token

    def expect(self, value: str) -> Tuple[str, str, int]:
        if not self.peek(value):
            found = self.current[1] or "end of input"
            self.fail(f"Expected {value!r}, found {found!r}")
        return self.advance()

    def number(self) -> int:
        kind, text, _ = self.current
        if kind != "number":
            self.fail(f"Expected a number, found {text or 'end of input'!r}")
        self.advance()
        return int(text)

    # Scopes

    def lookup(self, name: str, offset: int) -> Var:
        for frame in reversed(self.scope):
            if name in frame:
                return Var(name, frame[name])
        raise SortError(f"Variable {name} at position {offset} is neither bound nor declared free")

    def parse_sort(self) -> Sort:
        kind, text, offset = self.advance()
        try:
            sort = Sort(text)
        except ValueError:
            self.fail(f"Unknown sort {text!r}, expected one of V, E, v, e", offset)
        if sort.is_element and self.language == CIRCUIT:
            raise SortError(f"Element sort :{text} at position {offset} is not part of the circuitous language")
        return sort

    # Grammar

    def parse(self) -> Formula:
        formula = self.iff()
        if self.current[0] != "end":
            self.fail(f"Unexpected {self.current[1]!r}")
        return formula

    def iff(self) -> Formula:
        left = self.imp()
        while self.peek("<->"):
            self.advance()
            right = self.imp()
            left = And((implication(left, right), implication(right, left)))
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek("->"):
            self.advance()
            return implication(left, self.imp())
        return left

    def disj(self) -> Formula:
        items = [self.conj()]
        while self.peek("|"):
            self.advance()
            items.append(self.conj())
        return items[0] if len(items) == 1 else disjunction(*items)

    def conj(self) -> Formula:
        items = [self.unary()]
        while self.peek("&"):
            self.advance()
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self) -> Formula:
        if self.peek("!"):
            self.advance()
            return Not(self.unary())
        if self.peek("forall") or self.peek("exists"):
            return self.quantifier()
        return self.primary()

    def quantifier(self) -> Formula:
        _, word, _ = self.advance()
        kind, name, offset = self.advance()
        if kind != "ident" or name in KEYWORDS:
            self.fail(f"Expected a variable name after {word}", offset)
        self.expect(":")
        sort = self.parse_sort()
        self.expect(".")
        var = Var(name, sort)
        self.scope.append({name: sort})
        body = self.iff()
        self.scope.pop()
        return Forall(var, body) if word == "forall" else exists(var, body)

    def primary(self) -> Formula:
        kind, text, offset = self.current
        if text == "(":
            self.advance()
            inner = self.iff()
            self.expect(")")
            return inner
        if text == "true":
            self.advance()
            return TOP
        if text == "false":
            self.advance()
            return BOTTOM
        if text == "sub":
            self.advance()
            left, right = self.arguments(2)
            self.same_kind(left, right, offset)
            return Sub(left, right)
        if text == "sgl":
            self.advance()
            (arg,) = self.arguments(1)
            return Sgl(arg)
        if text == "card":
            self.advance()
            self.expect("(")
            arg = self.term()
            self.expect(",")
            r = self.number()
            self.expect(",")
            m = self.number()
            self.expect(")")
            if not 0 <= r < m:
                self.fail(f"card needs 0 <= r < m, got r={r}, m={m}", offset)
            return Card(arg, r, m)
        if text == "in":
            self.direct_only("in", offset)
            self.advance()
            element, target = self.arguments(2)
            if not (isinstance(element, Var) and element.sort.is_element):
                raise SortError(f"First argument of in at position {offset} must be an element variable")
            self.same_kind(element, target, offset)
            return Member(element, target)
        conn = _CONN.match(text) if kind == "ident" else None
        if conn:
            arity = int(conn.group(1))
            if arity < 1:
                self.fail("conn needs at least one vertex argument", offset)
            self.advance()
            args = self.arguments(arity + 1)
            if _kind_of(args[0]) == "vertex":
                raise SortError(f"First argument of {text} at position {offset} must have edge sort")
            for arg in args[1:]:
                if _kind_of(arg) == "edge":
                    raise SortError(f"Arguments 2.. of {text} at position {offset} must have vertex sort")
            return Conn(args[0], tuple(args[1:]))
        if kind == "ident":
            left = self.term()
            if self.peek("="):
                self.direct_only("=", self.current[2])
                self.advance()
                right = self.term()
                self.same_kind(left, right, offset)
                return Eq(left, right)
            self.fail("Expected an atom", offset)
        self.fail(f"Unexpected {text or 'end of input'!r}", offset)

    def arguments(self, count: int) -> List[SetTerm]:
        self.expect("(")
        args = [self.term()]
        while self.peek(","):
            self.advance()
            args.append(self.term())
        if len(args) != count:
            self.fail(f"Expected {count} arguments, found {len(args)}")
        self.expect(")")
        return args

    def term(self) -> SetTerm:
        kind, text, offset = self.current
        if text == "empty":
            self.advance()
            return EMPTY
        if text == "term":
            self.advance()
            self.expect("{")
            K = []
            if not self.peek("}"):
                K.append(self.number())
                while self.peek(","):
                    self.advance()
                    K.append(self.number())
            self.expect("}")
            if any(i < 1 for i in K):
                self.fail("Terminal indices start at 1", offset)
            self.expect("(")
            base = self.term()
            self.expect(")")
            if isinstance(base, Term):
                self.fail("Nested term(...) is not allowed; merge the index sets", offset)
            if isinstance(base, Var) and base.sort.is_element:
                raise SortError(f"term(...) at position {offset} needs a set variable or empty")
            return Term(frozenset(K), base)
        if kind == "ident" and text not in KEYWORDS and not _CONN.match(text):
            self.advance()
            return self.lookup(text, offset)
        self.fail(f"Expected a term, found {text or 'end of input'!r}", offset)

    def same_kind(self, left: SetTerm, right: SetTerm, offset: int) -> None:
        a, b = _kind_of(left), _kind_of(right)
        if a is not None and b is not None and a != b:
            raise SortError(f"Mixing vertex and edge sorts at position {offset}")

    def direct_only(self, what: str, offset: int) -> None:
        if self.language == CIRCUIT:
            raise SortError(f"{what!r} at position {offset} is not part of the circuitous language")


def _free_sorts(free: Optional[Mapping[str, Union[Sort, str]]]) -> Dict[str, Sort]:
    return {name: Sort(sort) for name, sort in (free or {}).items()}


def parse_formula(text: str, language: str = DIRECT,
                  free: Optional[Mapping[str, Union[Sort, str]]] = None) -> Formula:
    """Parse a formula; ``free`` declares the sorts of its free variables"""
    if language not in (DIRECT, CIRCUIT):
        raise ValueError(f"Unknown language: {language}")
    free_sorts = _free_sorts(free)
    if language == CIRCUIT and any(s.is_element for s in free_sorts.values()):
        raise SortError("Element sorts are not part of the circuitous language")
    formula = _Parser(text, language, free_sorts).parse()
    logger.debug("Parsed %s formula with %d free variables", language, len(formula.free_vars))
    return formula


def parse_direct(text: str, free: Optional[Mapping[str, Union[Sort, str]]] = None) -> Formula:
    return parse_formula(text, DIRECT, free)


def parse_circuit(text: str, free: Optional[Mapping[str, Union[Sort, str]]] = None) -> Formula:
    return parse_formula(text, CIRCUIT, free)


# Printer

_ATOM, _UNARY, _AND, _OR, _IMP = 5, 4, 3, 2, 1


def term_text(term: SetTerm) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Empty):
        return "empty"
    return f"term{{{','.join(map(str, sorted(term.K)))}}}({term_text(term.base)})"


def _args(*terms: SetTerm) -> str:
    return ", ".join(term_text(t) for t in terms)


def _wrap(f: Formula, level: int, allow_open: bool = False) -> str:
    text, precedence, open_ended = _render(f)
    if precedence < level or (open_ended and not allow_open):
        return f"({text})"
    return text


def _render(f: Formula) -> Tuple[str, int, bool]:
    """(text, precedence, whether the text ends in a greedy quantifier body)"""
    if isinstance(f, Top):
        return "true", _ATOM, False
    if isinstance(f, Bottom):
        return "false", _ATOM, False
    if isinstance(f, Sub):
        return f"sub({_args(f.left, f.right)})", _ATOM, False
    if isinstance(f, Sgl):
        return f"sgl({_args(f.arg)})", _ATOM, False
    if isinstance(f, Conn):
        return f"conn{f.arity}({_args(f.edge, *f.args)})", _ATOM, False
    if isinstance(f, Card):
        return f"card({_args(f.arg)}, {f.r}, {f.m})", _ATOM, False
    if isinstance(f, Member):
        return f"in({_args(f.element, f.target)})", _ATOM, False
    if isinstance(f, Eq):
        return f"{term_text(f.left)} = {term_text(f.right)}", _ATOM, False
    if isinstance(f, Forall):
        return f"forall {f.var.name}:{f.var.sort.value}. {_render(f.body)[0]}", _UNARY, True
    if isinstance(f, And):
        if not f.items:
            return "true", _ATOM, False
        if len(f.items) == 1:
            return _render(f.items[0])
        return " & ".join(_wrap(x, _UNARY) for x in f.items), _AND, False
    if isinstance(f, Not):
        body = f.body
        if isinstance(body, Forall) and isinstance(body.body, Not):
            var = body.var
            return f"exists {var.name}:{var.sort.value}. {_render(body.body.body)[0]}", _UNARY, True
        if isinstance(body, And) and len(body.items) >= 2:
            items = body.items
            if all(isinstance(x, Not) for x in items):
                return " | ".join(_wrap(x.body, _AND) for x in items), _OR, False
            if len(items) == 2 and not isinstance(items[0], Not) and isinstance(items[1], Not):
                return f"{_wrap(items[0], _OR)} -> {_wrap(items[1].body, _IMP)}", _IMP, False
        text, precedence, open_ended = _render(body)
        if precedence < _UNARY:
            return f"!({text})", _UNARY, False
        return f"!{text}", _UNARY, open_ended
    raise TypeError(f"Cannot print {type(f).__name__}")


def to_text(node: Node) -> str:
    """Print a formula or a term in the surface syntax"""
    if isinstance(node, SetTerm):
        return term_text(node)
    return _render(node)[0]
