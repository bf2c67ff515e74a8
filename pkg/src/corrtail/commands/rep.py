import argparse
import logging

from ..schemas.schema import HomSpec
from ..services.ck_family import (
    defect_and_TK,
    extend_representation,
    graph_rep,
    path_space_rep,
    verify_ck_relations,
    verify_extension,
)
from ..services.errors import CorrtailError
from ..services.giu import giu_test
from ..services.graph_core import regular_vertices
from ..services.serialization import dump_json, load_hom_spec, read_graph, read_text, read_vertex_set, rep_to_dict, write_text
from ..services.verify import (
    CORNER_NOTES,
    verify_corner,
    verify_quotient,
    verify_relgas,
    verify_subalgebra,
    verify_tail_relation_lemmas,
)

logger = logging.getLogger(__name__)

OPS = ["build", "verify", "relgas", "corner", "giu", "tk", "tail-lemmas", "extend", "quotient", "subalgebra"]

def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "rep",
        help="Exact matrix Cuntz-Krieger families and the checks built on them",
        description="Build path-space representations and run the representation-level checks.",
    )
    parser.add_argument("--op", required=True, choices=OPS)
    parser.add_argument("--in", dest="input", required=True, help="Graph JSON")
    parser.add_argument("--set", dest="vertex_set", help="Relative set V (default R(E)); H for --op quotient")
    parser.add_argument("--depth", type=int, help="Tail truncation depth")
    parser.add_argument("--hom", help="Homomorphism JSON for --op giu (default: identity)")
    parser.add_argument("--sub", help="Subgraph JSON for --op subalgebra")
    parser.add_argument("--out", help="Output path; stdout when omitted")
    parser.set_defaults(handler=handle)

def _depth(args: argparse.Namespace) -> int:
    if args.depth is None:
        raise CorrtailError(status_code=400, detail=f"--op {args.op} needs --depth")
    return args.depth

def handle(args: argparse.Namespace) -> int:
    g = read_graph(args.input)
    given = read_vertex_set(args.vertex_set)
    V = given if given is not None else regular_vertices(g)
    logger.info(f"rep {args.op} on {args.input} with set {V.label()}")

    if args.op == "build":
        write_text(dump_json(rep_to_dict(path_space_rep(g, V, args.depth))), args.out)
        return 0
    if args.op == "extend":
        rep = graph_rep(g)
        report = verify_extension(rep, _depth(args))
        payload = {"report": report.model_dump(mode="json")}
        if report.passed:
            payload["representation"] = rep_to_dict(extend_representation(rep, args.depth))
        write_text(dump_json(payload), args.out)
        return 0 if report.passed else 1

    if args.op == "verify":
        rep = path_space_rep(g, V, args.depth)
        report = verify_ck_relations(rep, rep.relative)
    elif args.op == "relgas":
        report = verify_relgas(g, V)
    elif args.op == "corner":
        report = verify_corner(g, _depth(args))
    elif args.op == "giu":
        hom = load_hom_spec(read_text(args.hom)) if args.hom else HomSpec()
        report = giu_test(g, V, hom)
    elif args.op == "tk":
        report = defect_and_TK(path_space_rep(g, V), regular_vertices(g))
    elif args.op == "tail-lemmas":
        report = verify_tail_relation_lemmas(g, _depth(args))
    elif args.op == "quotient":
        if given is None:
            raise CorrtailError(status_code=400, detail="--op quotient needs --set")
        report = verify_quotient(g, given)
    else:
        if args.sub is None:
            raise CorrtailError(status_code=400, detail="--op subalgebra needs --sub")
        report = verify_subalgebra(g, read_graph(args.sub))

    if args.op in ("verify", "tail-lemmas"):
        report.notes.extend(note for note in CORNER_NOTES if note not in report.notes)
    write_text(dump_json(report), args.out)
    return 0 if report.passed else 1
