import hashlib
import json
import logging
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from models.decompositions import Decomposition
from models.errors import DecompositionInvalid, InvalidGraph
from models.expressions import Expression
from models.formulas import Formula
from models.graph import TypedGraph
from models.schemas import (
    DecompositionFile, EdgeSpec, GraphFile, GraphMode, Language, NodeSpec, RunReport,
)
from services.algebra import parse_expression, to_sexpr
from services.formula_parser import parse_formula, to_text

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class DataHandler:
    """Reads and writes graph, decomposition, formula and expression files"""

    # Graphs

    def parse_graph(self, text: str) -> TypedGraph:
        """Validate a graph file and convert it to a TypedGraph"""
        try:
            spec = GraphFile.model_validate_json(text)
        except ValidationError as e:
            raise InvalidGraph(f"Invalid graph file: {e.errors()[0]['msg']}") from e
        edges = spec.edges
        return TypedGraph(
            vertices=tuple(spec.vertices),
            edges=tuple(edge.id for edge in edges),
            endpoints=tuple(tuple(edge.endpoints) for edge in edges),
            terminals=tuple(spec.terminals),
            orientation=tuple(edge.start for edge in edges) if spec.directed else None,
            loops=spec.mode == GraphMode.LOOPS,
        )

    def graph_to_file(self, G: TypedGraph) -> GraphFile:
        return GraphFile(
            mode=GraphMode.LOOPS if G.loops else GraphMode.LOOPFREE,
            directed=G.directed,
            vertices=list(G.vertices),
            edges=[
                EdgeSpec(id=edge, endpoints=list(G.word(edge)), start=G.start(edge))
                for edge in G.edges
            ],
            terminals=list(G.terminals),
        )

    def dump_graph(self, G: TypedGraph) -> str:
        return self.graph_to_file(G).model_dump_json(indent=2, exclude_none=True) + "\n"

    def load_graph(self, path: PathLike) -> TypedGraph:
        G = self.parse_graph(self._read(path))
        logger.info("Loaded graph %s: %s", path, G.summary())
        return G

    def save_graph(self, G: TypedGraph, path: PathLike) -> None:
        Path(path).write_text(self.dump_graph(G))

    # Decompositions

    def parse_decomposition(self, text: str) -> Decomposition:
        try:
            spec = DecompositionFile.model_validate_json(text)
        except ValidationError as e:
            raise DecompositionInvalid(f"Invalid decomposition file: {e.errors()[0]['msg']}") from e
        known = {node.id for node in spec.nodes}
        for node in spec.nodes:
            if node.parent is not None and node.parent not in known:
                raise DecompositionInvalid(f"Node {node.id} has unknown parent {node.parent}")
        return Decomposition(
            kind=spec.kind,
            nodes=tuple(node.id for node in spec.nodes),
            bags={node.id: frozenset(node.bag) for node in spec.nodes},
            edges=tuple((node.parent, node.id) for node in spec.nodes if node.parent is not None),
            root=spec.root,
        )

    def decomposition_to_file(self, D: Decomposition) -> DecompositionFile:
        """Parent links follow the root when there is one, the stored tree edges otherwise"""
        if D.root is not None:
            parent = D.parent
        else:
            parent = {node: None for node in D.nodes}
            for a, b in D.edges:
                parent[b] = a
        position = {v: i for i, v in enumerate(D.nodes)}
        return DecompositionFile(
            kind=D.kind,
            root=D.root,
            nodes=[
                NodeSpec(id=node, parent=parent.get(node),
                         bag=sorted(D.bags[node], key=lambda v: (len(v), v)))
                for node in sorted(D.nodes, key=position.__getitem__)
            ],
        )

    def dump_decomposition(self, D: Decomposition) -> str:
        return self.decomposition_to_file(D).model_dump_json(indent=2) + "\n"

    def load_decomposition(self, path: PathLike) -> Decomposition:
        return self.parse_decomposition(self._read(path))

    def save_decomposition(self, D: Decomposition, path: PathLike) -> None:
        Path(path).write_text(self.dump_decomposition(D))

    # Formulas and expressions

    def load_formula(self, path: PathLike, language: Language = Language.DIRECT) -> Formula:
        return parse_formula(self._read(path), language.value)

    def save_formula(self, f: Formula, path: PathLike) -> None:
        Path(path).write_text(to_text(f) + "\n")

    def load_expression(self, path: PathLike) -> Expression:
        return parse_expression(self._read(path))

    def save_expression(self, e: Expression, path: PathLike) -> None:
        Path(path).write_text(to_sexpr(e) + "\n")

    # Reports

    def dump_report(self, report: RunReport) -> str:
        """Deterministic JSON: keys sorted, no whitespace variation"""
        return json.dumps(report.model_dump(mode="json", exclude_none=True), sort_keys=True, indent=2)

    def digest(self, path: PathLike) -> str:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()

    def _read(self, path: PathLike) -> str:
        try:
            return Path(path).read_text()
        except OSError as e:
            raise ValueError(f"Error loading file {path}: {e.strerror}") from e


# Singleton instance
data_handler = DataHandler()
