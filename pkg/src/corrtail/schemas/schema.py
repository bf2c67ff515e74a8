from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, computed_field, field_serializer, model_validator
from sympy.polys.matrices import DomainMatrix

OMEGA = "omega"

# Edge multiplicity: a positive count or the symbol "omega" for an infinite emitter
Multiplicity = Union[PositiveInt, Literal["omega"]]

# Dense rational matrix as numerator/denominator pairs
RationalMatrix = List[List[Tuple[int, int]]]

# Graph schemas
class Edge(BaseModel):
    id: str
    src: str
    rng: str
    mult: Multiplicity = 1

    model_config = ConfigDict(frozen=True)

class Tail(BaseModel):
    """Symbolic infinite ray attach -> attach_1 -> attach_2 -> ..."""
    id: str
    attach: str

    model_config = ConfigDict(frozen=True)

class Graph(BaseModel):
    vertices: Tuple[str, ...] = ()
    edges: Tuple[Edge, ...] = ()
    tails: Tuple[Tail, ...] = ()

    model_config = ConfigDict(frozen=True)

class VertexSet(BaseModel):
    """Ordinary vertices plus whole rays; doubles as the ideal C_0(support) of A."""
    base: FrozenSet[str] = frozenset()
    rays: FrozenSet[str] = frozenset()

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="before")
    @classmethod
    def accept_plain_list(cls, data: Any) -> Any:
        # A bare JSON list names ordinary vertices only
        if isinstance(data, (list, tuple, set, frozenset)):
            return {"base": list(data)}
        return data

    @field_serializer("base", "rays")
    def serialize_sorted(self, value: FrozenSet[str]) -> List[str]:
        return sorted(value)

    @classmethod
    def of(cls, base: Iterable[str] = (), rays: Iterable[str] = ()) -> "VertexSet":
        return cls(base=frozenset(base), rays=frozenset(rays))

    def size(self) -> int:
        return len(self.base) + len(self.rays)

    def sort_key(self) -> Tuple[int, List[str], List[str]]:
        return (self.size(), sorted(self.base), sorted(self.rays))

    def label(self) -> str:
        items = sorted(self.base) + [f"ray({r})" for r in sorted(self.rays)]
        return "{" + ",".join(items) + "}"

    def issubset(self, other: "VertexSet") -> bool:
        return self.base <= other.base and self.rays <= other.rays

    def union(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.of(self.base | other.base, self.rays | other.rays)

    def intersection(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.of(self.base & other.base, self.rays & other.rays)

    def difference(self, other: "VertexSet") -> "VertexSet":
        return VertexSet.of(self.base - other.base, self.rays - other.rays)

class IdealOfA(BaseModel):
    support: VertexSet = VertexSet()

    model_config = ConfigDict(frozen=True)

# Classification schemas
class VertexTag(str, Enum):
    SINK = "sink"
    REGULAR = "regular"
    INFINITE_EMITTER = "infinite-emitter"

class VertexClass(BaseModel):
    tags: Dict[str, VertexTag]
    ray_tags: Dict[str, VertexTag] = {}
    sources: FrozenSet[str] = frozenset()

    @field_serializer("sources")
    def serialize_sources(self, value: FrozenSet[str]) -> List[str]:
        return sorted(value)

    def with_tag(self, tag: VertexTag) -> List[str]:
        return sorted(v for v, t in self.tags.items() if t == tag)

class Violation(BaseModel):
    code: str
    detail: str

class ValidationReport(BaseModel):
    violations: List[Violation] = []

    @computed_field
    @property
    def ok(self) -> bool:
        return not self.violations

class PropertyTable(BaseModel):
    compact_action: Dict[str, bool]  # per vertex: phi(delta_v) is compact
    row_finite: bool
    phi_injective: bool
    full: bool
    essential: bool = True

class QuotientGraph(BaseModel):
    graph: Graph
    b_h: VertexSet
    relative_set: VertexSet

# Correspondence schemas
class GraphCorrespondence(BaseModel):
    graph: Graph
    out_mult: Dict[str, Dict[str, Multiplicity]]
    in_mult: Dict[str, Dict[str, Multiplicity]]
    tails: Dict[str, str] = {}  # attachment vertex -> ray id
    properties: PropertyTable

class CorrespondenceIdeals(BaseModel):
    ker_phi: IdealOfA
    j_big: IdealOfA
    j_x: IdealOfA
    consistent: bool = True

class QuotientCorrespondence(BaseModel):
    quotient: GraphCorrespondence
    b_h: VertexSet
    relative_set: VertexSet
    q_jx: IdealOfA
    j_quotient: IdealOfA
    inclusion_holds: bool
    equality_holds: bool
    hypotheses: Dict[str, bool]
    violated_hypotheses: List[str] = []

class TailBlock(BaseModel):
    vertex: str  # sink of the base graph, i.e. a generator of ker phi
    ray: str

class TailedCorrespondence(BaseModel):
    base: GraphCorrespondence
    blocks: List[TailBlock]
    tailed: GraphCorrespondence

# Report schemas
class CheckItem(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    witnesses: List[str] = []

class CheckReport(BaseModel):
    title: str
    checks: List[CheckItem] = []
    notes: List[str] = []
    data: Dict[str, Any] = {}

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, name: str, passed: bool, detail: str = "", witnesses: Optional[Iterable[str]] = None) -> bool:
        self.checks.append(CheckItem(name=name, passed=bool(passed), detail=detail, witnesses=list(witnesses or [])))
        return bool(passed)

    def failures(self) -> List[CheckItem]:
        return [check for check in self.checks if not check.passed]

# Lattice schemas
class IdealLattice(BaseModel):
    elements: List[VertexSet]
    order: List[Tuple[int, int]]  # (i, j) with elements[i] contained in elements[j]
    meet: List[List[int]]
    join: List[List[int]]
    row_finite: bool = True
    complete_tables: bool = True

class LatticeIso(BaseModel):
    source: IdealLattice
    target: IdealLattice
    pairs: List[Tuple[VertexSet, VertexSet]]

class LatticeReport(BaseModel):
    count: int
    elements: List[str]
    hasse: List[Tuple[str, str]]
    meet: List[List[str]]
    join: List[List[str]]
    notes: List[str] = []

# Representation schemas
class GaugeGrading(BaseModel):
    degree: Tuple[int, ...]

    model_config = ConfigDict(frozen=True)

class CKRep(BaseModel):
    """Exact matrix Cuntz-Krieger (E,V)-family on a labelled basis."""
    graph: Graph
    relative: VertexSet
    basis: Tuple[str, ...]
    grading: GaugeGrading
    projections: Dict[str, DomainMatrix]
    isometries: Dict[str, DomainMatrix]  # keyed by edge-copy label

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def size(self) -> int:
        return len(self.basis)

class HomSpec(BaseModel):
    kind: Literal["identity", "quotient", "collapse", "matrices"] = "identity"
    vertices: Optional[VertexSet] = None
    projections: Optional[Dict[str, RationalMatrix]] = None
    isometries: Optional[Dict[str, RationalMatrix]] = None
    degrees: Optional[List[int]] = None

# Suite schemas
class CorpusSpec(BaseModel):
    fixtures: bool = True
    exhaustive: bool = True
    max_vertices: int = Field(3, ge=0, le=6)
    max_mult: int = Field(2, ge=1)
    omega: bool = True
    max_edges: Optional[int] = Field(3, ge=0)
    random_count: int = Field(50, ge=0)
    random_min_vertices: int = Field(2, ge=1)
    random_max_vertices: int = Field(8, ge=1)
    edge_probability: float = Field(0.3, ge=0.0, le=1.0)
    omega_probability: float = Field(0.05, ge=0.0, le=1.0)
    seed: int = 20240601
    depths: Tuple[int, ...] = (1, 2, 3)
    inject_fault: Optional[Literal["saturation"]] = None

class CorpusInstance(BaseModel):
    id: str
    origin: Literal["fixture", "exhaustive", "random"]
    graph: Graph

class InstanceResult(BaseModel):
    id: str
    origin: str
    checks: List[CheckItem] = []
    skipped: List[str] = []

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

class SuiteReport(BaseModel):
    corpus: CorpusSpec
    results: List[InstanceResult]
    counts: Dict[str, int]
    metrics: Dict[str, Union[bool, str]] = {}

    @computed_field
    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)
