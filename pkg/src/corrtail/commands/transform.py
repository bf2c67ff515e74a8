import argparse
import logging

from ..services.errors import CorrtailError
from ..services.graph_core import canonical_graph, regular_vertices
from ..services.serialization import dump_json, graph_to_dot, graph_to_json, read_graph, read_vertex_set, write_text
from ..services.transforms import (
    add_tails,
    build_relative_graph,
    hereditary_closure,
    quotient_graph,
    saturation_closure,
    subgraph_relative_set,
    truncate_tails,
)

logger = logging.getLogger(__name__)

OPS = ["add-tails", "truncate", "relative", "quotient", "hereditary-closure", "saturation-closure", "subgraph"]

def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "transform",
        help="Graph constructions: tails, truncation, E_V, quotients, closures",
        description="Apply one graph construction and write the resulting graph (or vertex set) as JSON.",
    )
    parser.add_argument("--op", required=True, choices=OPS)
    parser.add_argument("--in", dest="input", required=True, help="Graph JSON")
    parser.add_argument("--set", dest="vertex_set", help="Vertex set JSON (V for relative, H for quotient, S for closures)")
    parser.add_argument("--sub", help="Subgraph JSON for --op subgraph")
    parser.add_argument("--depth", type=int, help="Truncation depth for --op truncate")
    parser.add_argument("--out", help="Output path; stdout when omitted")
    parser.add_argument("--dot", help="Also write the resulting graph as DOT")
    parser.set_defaults(handler=handle)

def _require(value, flag: str, op: str):
    if value is None:
        raise CorrtailError(status_code=400, detail=f"--op {op} needs {flag}")
    return value

def handle(args: argparse.Namespace) -> int:
    g = read_graph(args.input)
    vertex_set = read_vertex_set(args.vertex_set)
    logger.info(f"transform {args.op} on {args.input}")

    graph = None
    if args.op == "add-tails":
        graph = add_tails(g)
        text = graph_to_json(graph)
    elif args.op == "truncate":
        graph = truncate_tails(g, _require(args.depth, "--depth", args.op))
        text = graph_to_json(graph)
    elif args.op == "relative":
        V = vertex_set if vertex_set is not None else regular_vertices(g)
        graph = build_relative_graph(g, V)
        text = graph_to_json(graph)
    elif args.op == "quotient":
        quotient = quotient_graph(g, _require(vertex_set, "--set", args.op))
        graph = quotient.graph
        text = dump_json(quotient.model_copy(update={"graph": canonical_graph(quotient.graph)}))
    elif args.op == "hereditary-closure":
        text = dump_json(hereditary_closure(g, _require(vertex_set, "--set", args.op)))
    elif args.op == "saturation-closure":
        text = dump_json(saturation_closure(g, _require(vertex_set, "--set", args.op)))
    else:
        f = read_graph(_require(args.sub, "--sub", args.op))
        text = dump_json(subgraph_relative_set(g, f))

    if args.dot and graph is None:
        raise CorrtailError(status_code=400, detail=f"--op {args.op} produces a vertex set, not a graph")
    write_text(text, args.out)
    if args.dot:
        write_text(graph_to_dot(graph), args.dot)
    return 0
