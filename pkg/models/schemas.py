from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Any, Dict, List, Optional
from enum import Enum


class GraphMode(str, Enum):
    """Loop policy of a graph"""
    LOOPFREE = "loopfree"
    LOOPS = "loops"


class Family(str, Enum):
    """Signature families"""
    TREE = "tree"
    PATH = "path"
    GENERIC = "generic"


class DecompositionKind(str, Enum):
    TREE = "tree"
    PATH = "path"


class Language(str, Enum):
    DIRECT = "direct"
    CIRCUIT = "circuit"


class EngineKind(str, Enum):
    """How a sentence is evaluated on a graph"""
    INDUCTIVE = "inductive"
    AUTOMATON = "automaton"
    ORACLE = "oracle"


class Verdict(str, Enum):
    TRUE = "true"
    FALSE = "false"
    EMPTY = "empty"
    WITNESS = "witness"


class EdgeSpec(BaseModel):
    """One edge of a graph file"""
    model_config = ConfigDict(extra="forbid")

    id: str
    endpoints: List[str] = Field(..., min_length=1)
    start: Optional[int] = None


class GraphFile(BaseModel):
    """Graph file contents"""
    model_config = ConfigDict(extra="forbid")

    mode: GraphMode = GraphMode.LOOPFREE
    directed: bool = False
    vertices: List[str] = Field(..., min_length=1)
    edges: List[EdgeSpec] = []
    terminals: List[str] = []

    @model_validator(mode="after")
    def orientation_matches_direction(self):
        for edge in self.edges:
            if self.directed and edge.start is None:
                raise ValueError(f"Edge {edge.id} of a directed graph needs a start index")
            if not self.directed and edge.start is not None:
                raise ValueError(f"Edge {edge.id} has a start index but the graph is undirected")
        return self


class NodeSpec(BaseModel):
    """One bag of a decomposition file"""
    model_config = ConfigDict(extra="forbid")

    id: str
    parent: Optional[str] = None
    bag: List[str]


class DecompositionFile(BaseModel):
    """Decomposition file contents"""
    model_config = ConfigDict(extra="forbid")

    kind: DecompositionKind = DecompositionKind.TREE
    root: Optional[str] = None
    nodes: List[NodeSpec] = Field(..., min_length=1)

    @field_validator("nodes")
    def unique_ids(cls, v):
        ids = [node.id for node in v]
        if len(set(ids)) != len(ids):
            raise ValueError("Duplicate node ids")
        return v


class FormulaMetrics(BaseModel):
    """Bounds that select the predicate family of a formula"""
    width: int
    height: int
    max_var_index: int
    max_conn_arity: int
    max_card_modulus: int
    free_vars: List[str] = []


class RunReport(BaseModel):
    """Machine-readable result of one command"""
    tool: str
    version: str
    command: str
    verdict: Optional[Verdict] = None
    engine: Optional[EngineKind] = None
    family: Optional[Family] = None
    width_bound: Optional[int] = None
    decomposition_width: Optional[int] = None
    expression_nodes: Optional[int] = None
    memo_entries: Optional[int] = None
    memo_lookups: Optional[int] = None
    distinct_formulas: Optional[int] = None
    closure_formulas: Optional[int] = None
    automaton_states: Optional[int] = None
    metrics: Optional[FormulaMetrics] = None
    timings: Dict[str, float] = {}
    input_digests: Dict[str, str] = {}
    details: Dict[str, Any] = {}
