"""The orchestrated verification suite run over a graph corpus."""
import itertools
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional

import psutil

from ..schemas.schema import (
    CheckItem,
    CheckReport,
    CorpusInstance,
    CorpusSpec,
    Graph,
    HomSpec,
    IdealOfA,
    InstanceResult,
    SuiteReport,
    VertexSet,
)
from .ck_family import AlgebraCache, defect_and_TK, verify_ck_relations, verify_extension
from .corpus import build_corpus, saturation_predicate
from .correspondence import (
    add_tail_correspondence,
    build_graph_correspondence,
    check_tail_lemmas,
    compute_ideals,
    is_X_invariant,
    is_X_saturated,
    quotient_correspondence,
)
from .errors import CorrtailError, VerificationError
from .giu import giu_test
from .graph_core import canonical_graph, has_omega, is_acyclic, regular_vertices, sinks
from .lattice import enumerate_saturated_hereditary, tails_lattice_map
from .serialization import graph_to_json, load_graph
from .transforms import add_tails, build_relative_graph, is_hereditary
from .verify import (
    TailPicture,
    ideal_map_check,
    verify_corner,
    verify_quotient,
    verify_relgas,
    verify_tail_relation_lemmas,
)

logger = logging.getLogger(__name__)

# Suite process pool size
WORKERS = int(os.getenv("CORRTAIL_WORKERS", "1"))
# Vertex subsets are enumerated for the oracle comparison up to this many vertices
ORACLE_MAX_VERTICES = 12
# Above this many subsets of R(E), only the boundary relative sets are checked
MAX_RELATIVE_SETS = int(os.getenv("CORRTAIL_SUITE_MAX_RELATIVE_SETS", "16"))
# Wall-clock target for one suite run, in seconds
TIME_BUDGET = float(os.getenv("CORRTAIL_SUITE_TIME_BUDGET", "60"))

class InstanceRunner:
    """Collects check outcomes for one corpus graph; budget errors become skips."""

    def __init__(self, instance: CorpusInstance):
        self.instance = instance
        self.result = InstanceResult(id=instance.id, origin=instance.origin)

    def record(self, name: str, passed: bool, detail: str = "", witnesses: Optional[List[str]] = None) -> None:
        self.result.checks.append(CheckItem(name=name, passed=passed, detail=detail, witnesses=list(witnesses or [])))

    def skip(self, name: str, reason: str, budget: bool = False) -> None:
        """Budget skips are warnings; checks out of scope for the graph are routine."""
        self.result.skipped.append(f"{name}: {reason}")
        level = logging.WARNING if budget else logging.INFO
        logger.log(level, f"{self.instance.id}: skipped {name} ({reason})")

    def run(self, name: str, check: Callable[[], object]) -> object:
        try:
            outcome = check()
        except VerificationError as e:
            self.record(name, False, detail=f"{e.detail}; counterexample {e.counterexample}")
            return None
        except CorrtailError as e:
            if e.status_code == 413:
                self.skip(name, e.detail, budget=True)
            else:
                self.record(name, False, detail=f"{e.status_code}: {e.detail}")
            return None
        if isinstance(outcome, CheckReport):
            failures = outcome.failures()
            self.record(
                name,
                outcome.passed,
                detail="; ".join(f"{c.name} {c.detail}".strip() for c in failures),
                witnesses=[w for c in failures for w in c.witnesses],
            )
        elif isinstance(outcome, bool):
            self.record(name, outcome)
        return outcome

# Per-module check groups
def _transform_checks(runner: InstanceRunner, g: Graph) -> None:
    def tails_remove_sinks() -> bool:
        return not sinks(add_tails(g))

    def tails_idempotent() -> bool:
        tailed = add_tails(g)
        return add_tails(tailed) == tailed

    def full_relative_set_is_identity() -> bool:
        return build_relative_graph(g, regular_vertices(g)) == g

    def relative_counts() -> bool:
        regular = regular_vertices(g).base
        relative = build_relative_graph(g, VertexSet())
        primed_edges = sum(1 for e in g.edges if e.rng in regular)
        return len(relative.vertices) == len(g.vertices) + len(regular) and len(relative.edges) == len(g.edges) + primed_edges

    def json_round_trip() -> bool:
        return load_graph(graph_to_json(g)) == canonical_graph(g)

    runner.run("add_tails leaves no sinks", tails_remove_sinks)
    runner.run("add_tails is idempotent", tails_idempotent)
    runner.run("E_R(E) equals E", full_relative_set_is_identity)
    runner.run("E_V vertex and edge counts", relative_counts)
    runner.run("canonical JSON round trip", json_round_trip)

def _oracle_checks(runner: InstanceRunner, g: Graph, fault: Optional[str]) -> None:
    if len(g.vertices) > ORACLE_MAX_VERTICES:
        runner.skip("correspondence oracle", f"more than {ORACLE_MAX_VERTICES} vertices", budget=True)
        return
    saturated = saturation_predicate(fault)
    x = build_graph_correspondence(g)
    invariant_breaks, saturated_breaks = [], []
    for k in range(len(g.vertices) + 1):
        for subset in itertools.combinations(sorted(g.vertices), k):
            w = VertexSet.of(subset)
            ideal = IdealOfA(support=w)
            if is_X_invariant(x, ideal) != is_hereditary(g, w):
                invariant_breaks.append(w.label())
            if is_X_saturated(x, ideal) != saturated(g, w):
                saturated_breaks.append(w.label())
    runner.record("X-invariant iff hereditary", not invariant_breaks, witnesses=invariant_breaks)
    runner.record("X-saturated iff saturated", not saturated_breaks, witnesses=saturated_breaks)

def _correspondence_checks(runner: InstanceRunner, g: Graph, lattice) -> None:
    x = build_graph_correspondence(g)
    runner.run("ideals agree with the vertex classification", lambda: compute_ideals(x).consistent)
    runner.run("tail correspondence lemmas", lambda: check_tail_lemmas(add_tail_correspondence(x)))

    def quotients() -> bool:
        for h in lattice.elements:
            quotient_correspondence(x, IdealOfA(support=h))
        return True

    runner.run("quotient correspondences", quotients)

def _relative_sets(runner: InstanceRunner, regular: List[str]) -> List[VertexSet]:
    """Every subset of R(E), or the empty set, R(E) and the sets one vertex away from either."""
    if 2 ** len(regular) <= MAX_RELATIVE_SETS:
        return [VertexSet.of(subset) for k in range(len(regular) + 1) for subset in itertools.combinations(regular, k)]
    runner.skip(
        "relative sets beyond the boundary layers",
        f"{2 ** len(regular)} relative sets exceed CORRTAIL_SUITE_MAX_RELATIVE_SETS={MAX_RELATIVE_SETS}",
        budget=True,
    )
    chosen = [VertexSet(), VertexSet.of(regular)]
    chosen += [VertexSet.of([v]) for v in regular]
    chosen += [VertexSet.of(set(regular) - {v}) for v in regular]
    return list(dict.fromkeys(chosen))

def _representation_checks(runner: InstanceRunner, g: Graph, lattice, depths) -> None:
    regular = sorted(regular_vertices(g).base)
    full = VertexSet.of(regular)
    cache = AlgebraCache(g)

    for V in _relative_sets(runner, regular):
        label = V.label()
        runner.run(f"CK relations of the path representation, V={label}", lambda: verify_ck_relations(cache.rep(V), V))
        runner.run(f"relative graph algebra is a graph algebra, V={label}", lambda: verify_relgas(g, V, cache))
        runner.run(f"T_K homomorphism, V={label}", lambda: defect_and_TK(cache.rep(V), full))
        runner.run(f"GIU identity, V={label}", lambda: giu_test(g, V, HomSpec(kind="identity"), cache))
        if V != full:
            runner.run(
                f"GIU collapse onto R(E), V={label}",
                lambda: giu_test(g, V, HomSpec(kind="collapse", vertices=full), cache),
            )

    for h in lattice.elements:
        if h.size() == 0:
            continue
        label = h.label()

        def quotient_map() -> bool:
            report = giu_test(g, full, HomSpec(kind="quotient", vertices=h), cache)
            failing = report.data["failing"]
            fails_vertex_condition = any(name.startswith("(1)") or name.startswith("(2)") for name in failing)
            return fails_vertex_condition and report.data["kernel_dimension"] > 0

        runner.run(f"GIU quotient by {label} has a kernel", quotient_map)
        runner.run(f"quotient dimension for {label}", lambda: verify_quotient(g, h, cache))

    runner.run("ideal map on the lattice", lambda: ideal_map_check(g, cache))
    for depth in depths:
        picture = None
        if sinks(g):
            picture = runner.run(f"tail picture, depth {depth}", lambda: TailPicture(g, depth))
            if picture is None:
                continue
        runner.run(f"tail relation lemmas, depth {depth}", lambda: verify_tail_relation_lemmas(g, depth, picture))
        runner.run(f"corner, depth {depth}", lambda: verify_corner(g, depth, picture))
        runner.run(f"tail extension, depth {depth}", lambda: verify_extension(cache.rep(full), depth))

def run_instance(instance: CorpusInstance, spec: CorpusSpec) -> InstanceResult:
    runner = InstanceRunner(instance)
    g = instance.graph

    _transform_checks(runner, g)
    _oracle_checks(runner, g, spec.inject_fault)

    lattice = runner.run("saturated hereditary lattice", lambda: enumerate_saturated_hereditary(g))
    runner.run("tails lattice isomorphism", lambda: tails_lattice_map(g) is not None)
    if lattice is None:
        runner.skip("correspondence and representation checks", "no lattice")
        return runner.result
    _correspondence_checks(runner, g, lattice)

    if has_omega(g):
        runner.skip("representation checks", "omega edges have no finite-dimensional representation")
    elif not is_acyclic(g):
        runner.skip("representation checks", "graph has a cycle")
    else:
        _representation_checks(runner, g, lattice, spec.depths)
    return runner.result

def _run_one(args) -> InstanceResult:
    instance, spec = args
    return run_instance(instance, spec)

def _metrics(process: psutil.Process, started: float) -> dict:
    elapsed = time.perf_counter() - started
    memory = process.memory_info()
    if elapsed > TIME_BUDGET:
        logger.warning(f"Suite took {elapsed:.2f} s, over the {TIME_BUDGET:g} s budget")
    return {
        "elapsed": f"{elapsed:.2f} s",
        "time_budget": f"{TIME_BUDGET:g} s",
        "within_time_budget": elapsed <= TIME_BUDGET,
        "cpu_usage": f"{process.cpu_percent(None)}%",
        "memory_rss": f"{memory.rss / (1024 * 1024):.2f} MB",
        "system_memory_usage": f"{psutil.virtual_memory().percent}%",
    }

def cmd_suite(corpus: CorpusSpec, workers: int = None) -> SuiteReport:
    started = time.perf_counter()
    process = psutil.Process()
    # the first reading only sets the reference point for the next one
    process.cpu_percent(None)
    workers = WORKERS if workers is None else workers
    instances = build_corpus(corpus)
    logger.info(f"Running suite on {len(instances)} instances with {workers} worker(s)")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, [(instance, corpus) for instance in instances], chunksize=16))
    else:
        results = [run_instance(instance, corpus) for instance in instances]
    results.sort(key=lambda r: r.id)

    failed = [r for r in results if not r.passed]
    counts = {
        "instances": len(results),
        "passed": len(results) - len(failed),
        "failed": len(failed),
        "checks": sum(len(r.checks) for r in results),
        "skipped": sum(len(r.skipped) for r in results),
    }
    for r in failed:
        logger.error(f"{r.id} failed: {', '.join(c.name for c in r.checks if not c.passed)}")
    logger.info(f"Suite finished: {counts['passed']}/{counts['instances']} instances passed")
    return SuiteReport(corpus=corpus, results=results, counts=counts, metrics=_metrics(process, started))
