"""Expressions over the graph algebras: text format, validation, evaluation,
locality, and expansion of composite symbols into basic ones.
"""
import logging
import re
from typing import Dict, List, Optional, Sequence, Set, Tuple

from models.errors import ExpressionSyntaxError, InvalidExpression
from models.expressions import (
    Bloom, EdgeConst, Expression, FnSymbol, Fuse, Hole, LoopConst, Redef,
    SignatureProfile, Sprout, Sum, Twine, VertexConst,
)
from models.graph import TypedGraph
from services import graph_ops

logger = logging.getLogger(__name__)


# Text format

_TOKEN = re.compile(r"""
    (?P<space>\s+)
  | (?P<string>"[^"]*")
  | (?P<number>\d+)
  | (?P<word>[a-z]+)
  | (?P<punct>[(){},:])
""", re.VERBOSE)

_ARITY = {"v": 0, "e": 0, "loop": 0, "sum": 2, "redef": 1, "fuse": 1, "twine": 2, "sprout": 1, "bloom": 1}


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ExpressionSyntaxError(f"Unexpected character {text[pos]!r}", pos)
        if match.lastgroup != "space":
            tokens.append((match.lastgroup, match.group(), pos))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Frame:
    """An open parenthesis whose children are still being read"""

    def __init__(self, head: str, params: dict, offset: int):
        self.head = head
        self.params = params
        self.offset = offset
        self.children: List[Expression] = []


class _ExpressionParser:

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Tuple[str, str, int]:
        return self.tokens[self.pos]

    def fail(self, message: str, offset: Optional[int] = None):
        raise ExpressionSyntaxError(message, self.current[2] if offset is None else offset)

    def take(self, value: str) -> None:
        if self.current[1] != value:
            self.fail(f"Expected {value!r}, found {self.current[1] or 'end of input'!r}")
        self.pos += 1

    def number(self) -> int:
        kind, text, _ = self.current
        if kind != "number":
            self.fail(f"Expected a number, found {text or 'end of input'!r}")
        self.pos += 1
        return int(text)

    def optional_number(self) -> Optional[int]:
        return self.number() if self.current[0] == "number" else None

    def index_set(self) -> List[int]:
        self.take("{")
        values = []
        if self.current[1] != "}":
            values.append(self.number())
            while self.current[1] == ",":
                self.pos += 1
                values.append(self.number())
        self.take("}")
        return values

    def mapping(self) -> Dict[int, int]:
        self.take("{")
        pairs: Dict[int, int] = {}
        while self.current[1] != "}":
            if pairs:
                self.take(",")
            offset = self.current[2]
            key = self.number()
            self.take(":")
            if key in pairs:
                self.fail(f"Index {key} mapped twice", offset)
            pairs[key] = self.number()
        self.take("}")
        if sorted(pairs) != list(range(1, len(pairs) + 1)):
            self.fail("A redefinition must map exactly 1..k")
        return pairs

    def params(self, head: str, offset: int) -> dict:
        if head == "e":
            return {"n": self.number(), "start": self.optional_number()}
        if head == "loop":
            kind, text, where = self.current
            if kind != "string":
                self.fail("Expected a quoted loop word")
            self.pos += 1
            try:
                word = tuple(int(x) for x in text.strip('"').split())
            except ValueError:
                self.fail(f"Loop word {text} must list terminal indices", where)
            return {"word": word, "start": self.optional_number()}
        if head == "redef":
            return {"sigma": self.mapping()}
        if head == "fuse":
            return {"a": self.number(), "b": self.number()}
        if head == "twine":
            return {"k": self.number(), "K": self.index_set()}
        if head == "bloom":
            return {"m": self.number(), "start": self.optional_number()}
        if head in ("v", "sum", "sprout"):
            return {}
        self.fail(f"Unknown symbol {head!r}", offset)

    def parse(self) -> Expression:
        stack: List[_Frame] = []
        result: Optional[Expression] = None
        while True:
            kind, text, offset = self.current
            if text == "(":
                if result is not None and not stack:
                    self.fail("Trailing input after the expression")
                self.pos += 1
                head_kind, head, head_offset = self.current
                if head_kind != "word":
                    self.fail("Expected a symbol name")
                self.pos += 1
                stack.append(_Frame(head, self.params(head, head_offset), offset))
            elif text == ")":
                if not stack:
                    self.fail("Unbalanced ')'")
                self.pos += 1
                frame = stack.pop()
                node = _build(frame)
                if stack:
                    stack[-1].children.append(node)
                else:
                    result = node
            elif kind == "end":
                if stack:
                    self.fail("Unclosed '('")
                if result is None:
                    self.fail("Empty expression")
                return result
            else:
                self.fail(f"Unexpected {text!r}")


def _build(frame: _Frame) -> Expression:
    expected = _ARITY[frame.head]
    kids = tuple(frame.children)
    if len(kids) != expected:
        raise ExpressionSyntaxError(
            f"{frame.head} takes {expected} subexpressions, found {len(kids)}", frame.offset)
    p = frame.params
    types = [c.out_type for c in kids]
    if frame.head == "v":
        symbol: FnSymbol = VertexConst()
    elif frame.head == "e":
        symbol = EdgeConst(p["n"], p["start"])
    elif frame.head == "loop":
        symbol = LoopConst(p["word"], p["start"])
    elif frame.head == "sum":
        symbol = Sum(types[0], types[1])
    elif frame.head == "redef":
        sigma = p["sigma"]
        symbol = Redef(tuple(sigma[i] for i in range(1, len(sigma) + 1)), types[0])
    elif frame.head == "fuse":
        symbol = Fuse(p["a"], p["b"], types[0])
    elif frame.head == "twine":
        symbol = Twine(types[0], types[1], tuple(sorted(set(p["K"]))), p["k"])
    elif frame.head == "sprout":
        symbol = Sprout(types[0])
    else:
        symbol = Bloom(types[0], p["m"], p["start"])
    return Expression(symbol, kids)


def parse_expression(text: str) -> Expression:
    """Parse the s-expression format"""
    expression = _ExpressionParser(text).parse()
    logger.debug("Parsed expression with %d nodes", expression.size)
    return expression


def symbol_head(symbol: FnSymbol) -> str:
    """Head of a node in the text format, parameters included"""
    start = lambda s: "" if s is None else f" {s}"
    if isinstance(symbol, VertexConst):
        return "v"
    if isinstance(symbol, EdgeConst):
        return f"e {symbol.n}{start(symbol.start)}"
    if isinstance(symbol, LoopConst):
        return f'loop "{" ".join(map(str, symbol.word))}"{start(symbol.start)}'
    if isinstance(symbol, Sum):
        return "sum"
    if isinstance(symbol, Redef):
        return "redef {" + ",".join(f"{i}:{s}" for i, s in enumerate(symbol.sigma, start=1)) + "}"
    if isinstance(symbol, Fuse):
        return f"fuse {symbol.a} {symbol.b}"
    if isinstance(symbol, Twine):
        return f"twine {symbol.k} {{{','.join(map(str, symbol.K))}}}"
    if isinstance(symbol, Sprout):
        return "sprout"
    if isinstance(symbol, Bloom):
        return f"bloom {symbol.m}{start(symbol.start)}"
    if isinstance(symbol, Hole):
        return f"hole {symbol.index} {symbol.type}"
    raise TypeError(f"Unknown symbol {symbol!r}")


def symbol_text(symbol: FnSymbol) -> str:
    """Letter name with its typing, used in automaton dumps"""
    return f"{symbol_head(symbol)} : {list(symbol.in_types)} -> {symbol.out_type}"


def to_sexpr(e: Expression) -> str:
    parts = []
    stack = [(e, False)]
    while stack:
        node, closing = stack.pop()
        if closing:
            parts.append(")")
            continue
        parts.append("(" + symbol_head(node.symbol))
        stack.append((node, True))
        stack.extend((c, False) for c in reversed(node.children))
    return " ".join(parts).replace(" )", ")")


# Validation and evaluation

def validate(e: Expression, profile: Optional[SignatureProfile] = None) -> List[str]:
    """Arity, typing and admissibility diagnostics; empty when the expression is valid"""
    diagnostics = []
    stack: List[Tuple[Expression, str]] = [(e, "root")]
    while stack:
        node, path = stack.pop()
        symbol = node.symbol
        name = symbol_head(symbol)
        if isinstance(symbol, Hole):
            diagnostics.append(f"{path}: unfilled hole")
        for issue in symbol.problems():
            diagnostics.append(f"{path}: ({name}) {issue}")
        if len(node.children) != symbol.arity:
            diagnostics.append(
                f"{path}: ({name}) expects {symbol.arity} children, found {len(node.children)}")
        for i, (child, expected) in enumerate(zip(node.children, symbol.in_types)):
            if child.out_type != expected:
                diagnostics.append(
                    f"{path}/{i}: expected type {expected}, found {child.out_type}")
        if profile is not None and not isinstance(symbol, Hole):
            reason = profile.problem(symbol)
            if reason:
                diagnostics.append(f"{path}: ({name}) not admitted: {reason}")
        for i, child in reversed(list(enumerate(node.children))):
            stack.append((child, f"{path}/{i}"))
    return diagnostics


def constant_graph(symbol: FnSymbol, loops: bool = False) -> TypedGraph:
    if isinstance(symbol, VertexConst):
        return graph_ops.vertex_graph(loops)
    if isinstance(symbol, EdgeConst):
        return graph_ops.edge_graph(symbol.n, start=symbol.start, loops=loops)
    if isinstance(symbol, LoopConst):
        return graph_ops.loop_graph(symbol.word, start=symbol.start)
    raise InvalidExpression(f"({symbol_head(symbol)}) is not a constant")


def apply_symbol(symbol: FnSymbol, args: Sequence[TypedGraph], loops: bool = False) -> TypedGraph:
    """The graph operation named by a symbol"""
    if isinstance(symbol, (VertexConst, EdgeConst, LoopConst)):
        return constant_graph(symbol, loops)
    if isinstance(symbol, Sum):
        return graph_ops.disjoint_sum(args[0], args[1])
    if isinstance(symbol, Redef):
        return graph_ops.redefine(args[0], symbol.sigma)
    if isinstance(symbol, Fuse):
        return graph_ops.fuse(args[0], symbol.a, symbol.b)
    if isinstance(symbol, Twine):
        return graph_ops.twine(args[0], args[1], symbol.K, symbol.k)
    if isinstance(symbol, Sprout):
        return graph_ops.sprout(args[0])
    if isinstance(symbol, Bloom):
        return graph_ops.bloom(args[0], symbol.m, start=symbol.start)
    raise InvalidExpression(f"Cannot apply ({symbol_head(symbol)})")


def evaluate(e: Expression, loops: bool = False) -> TypedGraph:
    """Value of an expression in the graph algebra, with canonical identifiers"""
    problems = validate(e)
    if problems:
        raise InvalidExpression("; ".join(problems[:5]))
    values: Dict[int, TypedGraph] = {}
    for index, node in enumerate(e.postorder()):
        if node.symbol.arity == 0:
            # Distinct ids per leaf keep disjoint sums free of renaming
            values[id(node)] = graph_ops.canonicalize_ids(
                constant_graph(node.symbol, loops), f"n{index}v", f"n{index}e")
            continue
        args = [values[id(c)] for c in node.children]
        values[id(node)] = apply_symbol(node.symbol, args, loops)
    return graph_ops.canonicalize_ids(values[id(e)])


def locality(e: Expression) -> Set[int]:
    """Out-types of all nodes"""
    return {node.out_type for node in e.nodes}


def symbols_of(e: Expression) -> Set[FnSymbol]:
    return {node.symbol for node in e.nodes}


# Composite symbols

def _hole(i: int, t: int) -> Expression:
    return Expression(Hole(i, t))


def expand_symbol(symbol: FnSymbol) -> Expression:
    """A template over basic symbols whose holes take the symbol's arguments"""
    if isinstance(symbol, Twine):
        n, m = symbol.n, symbol.m
        node = Expression(Sum(n, m), (_hole(0, n), _hole(1, m)))
        for l in symbol.K:
            node = Expression(Fuse(l, l + n, n + m), (node,))
        sigma = graph_ops.twine_sigma(n, m, symbol.K, symbol.k)
        return Expression(Redef(sigma, n + m), (node,))
    if isinstance(symbol, Sprout):
        return Expression(Sum(symbol.n, 1), (_hole(0, symbol.n), Expression(VertexConst())))
    if isinstance(symbol, Bloom):
        n, m = symbol.n, symbol.m
        node = Expression(Sum(n, m), (_hole(0, n), Expression(EdgeConst(m, symbol.start))))
        for i in range(1, m + 1):
            node = Expression(Fuse(i, n + i, n + m), (node,))
        return Expression(Redef(tuple(range(1, n + 1)), n + m), (node,))
    return Expression(symbol, tuple(_hole(i, t) for i, t in enumerate(symbol.in_types)))


def plug(template: Expression, args: Sequence[Expression]) -> Expression:
    """Replace hole i of a template by args[i]"""
    built: Dict[int, Expression] = {}
    for node in template.postorder():
        if isinstance(node.symbol, Hole):
            built[id(node)] = args[node.symbol.index]
        else:
            built[id(node)] = Expression(node.symbol, tuple(built[id(c)] for c in node.children))
    return built[id(template)]


def expand_expression(e: Expression) -> Expression:
    """Replace every composite symbol by its basic template"""
    built: Dict[int, Expression] = {}
    for node in e.postorder():
        kids = [built[id(c)] for c in node.children]
        if node.symbol.composite:
            built[id(node)] = plug(expand_symbol(node.symbol), kids)
        else:
            built[id(node)] = Expression(node.symbol, tuple(kids))
    return built[id(e)]
