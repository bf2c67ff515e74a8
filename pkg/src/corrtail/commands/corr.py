import argparse
import logging

from ..schemas.schema import IdealOfA, VertexSet
from ..services.correspondence import (
    add_tail_correspondence,
    build_graph_correspondence,
    check_tail_lemmas,
    compute_ideals,
    is_X_invariant,
    is_X_saturated,
    quotient_correspondence,
)
from ..services.errors import CorrtailError
from ..services.serialization import dump_json, read_graph, read_vertex_set, write_text

logger = logging.getLogger(__name__)

OPS = ["properties", "ideals", "invariant", "saturated", "quotient", "add-tail", "check-lemmas"]

def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "corr",
        help="The graph correspondence X(E) and its ideals",
        description="Compute ideals, invariance, quotients and tails of the graph correspondence.",
    )
    parser.add_argument("--op", required=True, choices=OPS)
    parser.add_argument("--in", dest="input", required=True, help="Graph JSON")
    parser.add_argument("--set", dest="vertex_set", help="Support of the ideal I of A")
    parser.add_argument("--out", help="Output path; stdout when omitted")
    parser.set_defaults(handler=handle)

def _ideal(vertex_set: VertexSet, op: str) -> IdealOfA:
    if vertex_set is None:
        raise CorrtailError(status_code=400, detail=f"--op {op} needs --set")
    return IdealOfA(support=vertex_set)

def handle(args: argparse.Namespace) -> int:
    x = build_graph_correspondence(read_graph(args.input))
    vertex_set = read_vertex_set(args.vertex_set)
    exit_code = 0

    if args.op == "properties":
        payload = x.properties.model_dump(mode="json")
    elif args.op == "ideals":
        payload = compute_ideals(x).model_dump(mode="json")
    elif args.op == "invariant":
        payload = {"invariant": is_X_invariant(x, _ideal(vertex_set, args.op))}
    elif args.op == "saturated":
        payload = {"saturated": is_X_saturated(x, _ideal(vertex_set, args.op))}
    elif args.op == "quotient":
        payload = quotient_correspondence(x, _ideal(vertex_set, args.op)).model_dump(mode="json")
    elif args.op == "add-tail":
        payload = add_tail_correspondence(x).model_dump(mode="json")
    else:
        report = check_tail_lemmas(add_tail_correspondence(x))
        payload = report.model_dump(mode="json")
        exit_code = 0 if report.passed else 1

    write_text(dump_json(payload), args.out)
    return exit_code
