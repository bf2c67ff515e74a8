"""Graph corpora for the verification suite: bundled fixtures, the exhaustive grid and seeded random graphs."""
import itertools
import logging
import os
import random
from typing import Callable, Dict, Iterator, List

import networkx as nx

from ..schemas.schema import OMEGA, CorpusInstance, CorpusSpec, Edge, Graph, VertexSet
from .transforms import is_saturated

logger = logging.getLogger(__name__)

DEFAULT_SEED = int(os.getenv("CORRTAIL_SEED", "20240601"))

# Fixtures
FIXTURES: Dict[str, Graph] = {
    "E1": Graph(
        vertices=("u", "v", "w"),
        edges=(Edge(id="e", src="u", rng="v"), Edge(id="f", src="u", rng="w"), Edge(id="g", src="v", rng="w")),
    ),
    "E2": Graph(vertices=("v", "w"), edges=(Edge(id="e", src="v", rng="w"),)),
    "E3": Graph(
        vertices=("v", "w1", "w2"),
        edges=(Edge(id="e1", src="v", rng="w1", mult=OMEGA), Edge(id="e2", src="v", rng="w2")),
    ),
    "C5": Graph(vertices=("v",), edges=(Edge(id="e", src="v", rng="v"),)),
    "z": Graph(vertices=("z",)),
}

def fixture_instances() -> List[CorpusInstance]:
    return [CorpusInstance(id=f"fixture:{name}", origin="fixture", graph=g) for name, g in sorted(FIXTURES.items())]

# Exhaustive grid
def _multiplicities(spec: CorpusSpec) -> List:
    options = list(range(1, spec.max_mult + 1))
    if spec.omega:
        options.append(OMEGA)
    return options

def exhaustive_graphs(spec: CorpusSpec) -> Iterator[CorpusInstance]:
    """Every graph on n labelled vertices (1 <= n <= max_vertices) with at most max_edges edge slots."""
    mults = _multiplicities(spec)
    for n in range(1, spec.max_vertices + 1):
        vertices = tuple(f"v{i}" for i in range(n))
        pairs = list(itertools.product(vertices, repeat=2))
        limit = len(pairs) if spec.max_edges is None else min(spec.max_edges, len(pairs))
        counter = 0
        for k in range(limit + 1):
            for chosen in itertools.combinations(pairs, k):
                for assignment in itertools.product(mults, repeat=k):
                    edges = tuple(
                        Edge(id=f"e{i}", src=src, rng=rng, mult=mult)
                        for i, ((src, rng), mult) in enumerate(zip(chosen, assignment))
                    )
                    yield CorpusInstance(
                        id=f"exhaustive:n{n}:{counter:06d}",
                        origin="exhaustive",
                        graph=Graph(vertices=vertices, edges=edges),
                    )
                    counter += 1

# Random graphs
def random_graphs(spec: CorpusSpec) -> List[CorpusInstance]:
    rng = random.Random(spec.seed)
    instances = []
    for index in range(spec.random_count):
        n = rng.randint(spec.random_min_vertices, max(spec.random_min_vertices, spec.random_max_vertices))
        digraph = nx.gnp_random_graph(n, spec.edge_probability, seed=rng.randrange(2**32), directed=True)
        edges = []
        for i, (src, rng_vertex) in enumerate(sorted(digraph.edges())):
            mult = OMEGA if spec.omega and rng.random() < spec.omega_probability else rng.choice([1, 2])
            edges.append(Edge(id=f"e{i}", src=f"v{src}", rng=f"v{rng_vertex}", mult=mult))
        g = Graph(vertices=tuple(f"v{i}" for i in range(n)), edges=tuple(edges))
        instances.append(CorpusInstance(id=f"random:{index:04d}", origin="random", graph=g))
    return instances

def build_corpus(spec: CorpusSpec) -> List[CorpusInstance]:
    instances: List[CorpusInstance] = []
    if spec.fixtures:
        instances.extend(fixture_instances())
    if spec.exhaustive:
        instances.extend(exhaustive_graphs(spec))
    instances.extend(random_graphs(spec))
    logger.info(f"Corpus built: {len(instances)} instances (seed {spec.seed})")
    return instances

# Fault injection
SaturationPredicate = Callable[[Graph, VertexSet], bool]

def saturation_predicate(fault: str = None) -> SaturationPredicate:
    """The graph-side saturation oracle, or a broken one that accepts every set."""
    if fault == "saturation":
        logger.warning("Fault injected: the saturation rule accepts every vertex set")
        return lambda g, h: True
    return is_saturated
