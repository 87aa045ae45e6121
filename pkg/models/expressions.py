"""Function symbols of the graph algebras, expressions and signature profiles"""
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import List, Optional, Tuple

from models.schemas import Family


@dataclass(frozen=True)
class FnSymbol:
    """Base class of all letters. Subclasses fix the typing ⟨f⟩ = (in_types, out_type)."""
    composite = False

    @property
    def in_types(self) -> Tuple[int, ...]:
        return ()

    @property
    def out_type(self) -> int:
        raise NotImplementedError

    @property
    def arity(self) -> int:
        return len(self.in_types)

    @property
    def sort_key(self) -> tuple:
        return (type(self).__name__,) + tuple(
            -1 if v is None else v for v in self.__dict__.values()
        )

    def problems(self) -> List[str]:
        """Violations of the symbol's own parameter constraints"""
        return []


@dataclass(frozen=True)
class Sum(FnSymbol):
    n: int
    m: int

    @property
    def in_types(self) -> Tuple[int, ...]:
        return (self.n, self.m)

    @property
    def out_type(self) -> int:
        return self.n + self.m


@dataclass(frozen=True)
class Redef(FnSymbol):
    """New terminal i is old terminal sigma[i-1]"""
    sigma: Tuple[int, ...]
    from_type: int

    @property
    def in_types(self) -> Tuple[int, ...]:
        return (self.from_type,)

    @property
    def out_type(self) -> int:
        return len(self.sigma)

    @property
    def is_identity(self) -> bool:
        return self.sigma == tuple(range(1, self.from_type + 1))

    def problems(self) -> List[str]:
        bad = [s for s in self.sigma if not 1 <= s <= self.from_type]
        return [f"redef values {bad} outside 1..{self.from_type}"] if bad else []


@dataclass(frozen=True)
class Fuse(FnSymbol):
    a: int
    b: int
    n: int

    @property
    def in_types(self) -> Tuple[int, ...]:
        return (self.n,)

    @property
    def out_type(self) -> int:
        return self.n

    def problems(self) -> List[str]:
        if not (1 <= self.a <= self.n and 1 <= self.b <= self.n):
            return [f"fuse indices {self.a}, {self.b} outside 1..{self.n}"]
        return []


@dataclass(frozen=True)
class VertexConst(FnSymbol):

    @property
    def out_type(self) -> int:
        return 1


@dataclass(frozen=True)
class EdgeConst(FnSymbol):
    n: int
    start: Optional[int] = None

    @property
    def out_type(self) -> int:
        return self.n

    def problems(self) -> List[str]:
        issues = [] if self.n >= 1 else [f"edge constant of arity {self.n}"]
        if self.start is not None and not 0 < self.start < self.n:
            issues.append(f"split index {self.start} outside 1..{self.n - 1}")
        return issues


@dataclass(frozen=True)
class LoopConst(FnSymbol):
    word: Tuple[int, ...]
    start: Optional[int] = None

    @property
    def out_type(self) -> int:
        return max(self.word) if self.word else 0

    def problems(self) -> List[str]:
        issues = []
        if not self.word or set(self.word) != set(range(1, max(self.word) + 1)):
            issues.append(f"loop word {list(self.word)} does not cover 1..n")
        if self.start is not None and not 0 < self.start < len(self.word):
            issues.append(f"split index {self.start} outside 1..{len(self.word) - 1}")
        return issues


@dataclass(frozen=True)
class Twine(FnSymbol):
    n: int
    m: int
    K: Tuple[int, ...]
    k: int
    composite = True

    @property
    def in_types(self) -> Tuple[int, ...]:
        return (self.n, self.m)

    @property
    def out_type(self) -> int:
        return self.k

    def problems(self) -> List[str]:
        issues = []
        if any(not 1 <= l <= min(self.n, self.m) for l in self.K):
            issues.append(f"twine set {list(self.K)} outside 1..{min(self.n, self.m)}")
        if self.k > self.n + self.m - len(self.K):
            issues.append(f"twine output type {self.k} exceeds {self.n + self.m - len(self.K)}")
        return issues


@dataclass(frozen=True)
class Sprout(FnSymbol):
    n: int
    composite = True

    @property
    def in_types(self) -> Tuple[int, ...]:
        return (self.n,)

    @property
    def out_type(self) -> int:
        return self.n + 1


@dataclass(frozen=True)
class Bloom(FnSymbol):
    n: int
    m: int
    start: Optional[int] = None
    composite = True

    @property
    def in_types(self) -> Tuple[int, ...]:
        return (self.n,)

    @property
    def out_type(self) -> int:
        return self.n

    def problems(self) -> List[str]:
        issues = [] if 1 <= self.m <= self.n else [f"bloom arity {self.m} outside 1..{self.n}"]
        if self.start is not None and not 0 < self.start < self.m:
            issues.append(f"split index {self.start} outside 1..{self.m - 1}")
        return issues


@dataclass(frozen=True)
class Hole(FnSymbol):
    """Input slot of an expanded composite symbol"""
    index: int
    type: int

    @property
    def out_type(self) -> int:
        return self.type


NULLARY = (VertexConst, EdgeConst, LoopConst)


@dataclass(frozen=True, eq=False)
class Expression:
    """Ordered tree of symbols, compared by identity"""
    symbol: FnSymbol
    children: Tuple["Expression", ...] = ()

    @property
    def out_type(self) -> int:
        return self.symbol.out_type

    @cached_property
    def nodes(self) -> List["Expression"]:
        """Pre-order, left child first"""
        order = []
        stack = [self]
        while stack:
            node = stack.pop()
            order.append(node)
            stack.extend(reversed(node.children))
        return order

    @property
    def size(self) -> int:
        return len(self.nodes)

    def postorder(self) -> List["Expression"]:
        """Children before parents, left subtree first"""
        order = []
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            stack.append((node, True))
            stack.extend((c, False) for c in reversed(node.children))
        return order

    def signature(self) -> Tuple[FnSymbol, ...]:
        """Pre-order symbol sequence; with fixed arities it determines the tree"""
        return tuple(node.symbol for node in self.nodes)

    def same_as(self, other: "Expression") -> bool:
        return self.signature() == other.signature()


@dataclass(frozen=True)
class SignatureProfile:
    """Admissible letters and the finite type set of one algebra"""
    family: Family
    k: int
    loops: bool = False
    c: Optional[int] = None
    n: int = 0

    @property
    def max_edge(self) -> int:
        """Longest loop word"""
        return self.k + 1 if self.c is None else self.c

    @property
    def bound(self) -> int:
        return max(self.k + 1, self.n)

    @cached_property
    def types(self) -> frozenset:
        if self.family == Family.TREE:
            return frozenset(range(0, self.bound + 1))
        if self.family == Family.PATH:
            top = self.bound + (self.max_edge - 1 if self.loops else 0)
            return frozenset(range(1, top + 1)) | {self.n}
        return frozenset(range(0, self.bound + 1))

    def problem(self, symbol: FnSymbol) -> Optional[str]:
        """Why the symbol is not a letter of this profile, or None"""
        name = type(symbol).__name__
        if isinstance(symbol, Hole):
            return "holes are not letters"
        typed = set(symbol.in_types) | {symbol.out_type}
        if not typed <= self.types:
            return f"{name} uses types {sorted(typed - self.types)} outside the profile"
        k1 = self.k + 1
        if isinstance(symbol, VertexConst):
            return None
        if isinstance(symbol, EdgeConst):
            limit = k1 if self.family != Family.GENERIC else self.bound
            return None if symbol.n <= limit else f"edge constant of arity {symbol.n} exceeds {limit}"
        if isinstance(symbol, LoopConst):
            if not self.loops or self.family == Family.PATH:
                return "loop constants need a tree or generic profile in loop mode"
            if len(symbol.word) > self.max_edge:
                return f"loop word longer than {self.max_edge}"
            return None if symbol.out_type <= k1 else f"loop support exceeds {k1}"
        if isinstance(symbol, Redef):
            if self.family == Family.TREE and symbol.is_identity:
                return "identity redefinitions are not letters of the tree-width profile"
            return None
        if isinstance(symbol, (Sum, Fuse)):
            return None if self.family == Family.GENERIC else f"{name} belongs to the generic profile only"
        if isinstance(symbol, Twine):
            if self.family != Family.TREE:
                return "twines belong to the tree-width profile"
            return None if symbol.k <= k1 else f"twine output type {symbol.k} exceeds {k1}"
        if isinstance(symbol, Sprout):
            if self.family != Family.PATH:
                return "sprouts belong to the path-width profile"
            return None if symbol.n <= self.k else f"sprout input type {symbol.n} exceeds {self.k}"
        if isinstance(symbol, Bloom):
            if self.family != Family.PATH:
                return "blooms belong to the path-width profile"
            limit = self.max_edge if self.loops else k1
            return None if symbol.m <= limit else f"bloom arity {symbol.m} exceeds {limit}"
        return f"unknown symbol {name}"

    def admits(self, symbol: FnSymbol) -> bool:
        return not symbol.problems() and self.problem(symbol) is None

    def alphabet(self) -> List[FnSymbol]:
        """Every undirected letter of the profile, in a fixed order"""
        candidates: List[FnSymbol] = [VertexConst()]
        types = sorted(self.types)
        candidates += [EdgeConst(i) for i in range(1, self.bound + 1)]
        if self.loops:
            for size in range(2, self.max_edge + 1):
                for word in product(range(1, self.k + 2), repeat=size):
                    if len(set(word)) < size:
                        candidates.append(LoopConst(word))
        for source in types:
            for target in types:
                for sigma in product(range(1, source + 1), repeat=target):
                    candidates.append(Redef(sigma, source))
        if self.family == Family.GENERIC:
            for a in types:
                for b in types:
                    candidates.append(Sum(a, b))
                for x in range(1, a + 1):
                    for y in range(1, a + 1):
                        if x != y:
                            candidates.append(Fuse(x, y, a))
        if self.family == Family.TREE:
            for a in types:
                for b in types:
                    for size in range(0, min(a, b) + 1):
                        for K in combinations(range(1, min(a, b) + 1), size):
                            for out in range(0, min(a + b - size, self.k + 1) + 1):
                                candidates.append(Twine(a, b, K, out))
        if self.family == Family.PATH:
            for a in types:
                candidates.append(Sprout(a))
                for m in range(1, a + 1):
                    candidates.append(Bloom(a, m))
        return sorted((s for s in dict.fromkeys(candidates) if self.admits(s)), key=lambda s: s.sort_key)
