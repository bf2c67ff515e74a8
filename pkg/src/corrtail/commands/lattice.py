import argparse
import logging

from ..services.lattice import enumerate_saturated_hereditary, lattice_report, tails_lattice_map
from ..services.serialization import dump_json, read_graph, write_text
from ..services.verify import ideal_map_check

logger = logging.getLogger(__name__)

def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "lattice",
        help="Saturated hereditary vertex sets and their lattice",
        description="Enumerate the lattice of saturated hereditary sets, with optional cross-checks.",
    )
    parser.add_argument("--in", dest="input", required=True, help="Graph JSON")
    parser.add_argument("--verify-tails", action="store_true", help="Check the order isomorphism with the tail-added graph")
    parser.add_argument("--verify-ideal-map", action="store_true", help="Check H -> I_H against the path representation")
    parser.add_argument("--out", help="Output path; stdout when omitted")
    parser.set_defaults(handler=handle)

def handle(args: argparse.Namespace) -> int:
    g = read_graph(args.input)
    lattice = enumerate_saturated_hereditary(g)
    payload = {"report": lattice_report(lattice).model_dump(mode="json")}

    if args.verify_tails:
        iso = tails_lattice_map(g)
        payload["tails"] = [[a.label(), b.label()] for a, b in iso.pairs]
    if args.verify_ideal_map:
        payload["ideal_map"] = ideal_map_check(g).model_dump(mode="json")

    logger.info(f"Lattice of {args.input}: {len(lattice.elements)} elements")
    write_text(dump_json(payload), args.out)
    return 0
