import argparse

from ..services.serialization import cmd_export, read_graph, write_text

def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "export",
        help="Write a graph as canonical JSON or DOT",
        description="Deterministic export; canonical JSON sorts vertices, edges and tails by id.",
    )
    parser.add_argument("--in", dest="input", required=True, help="Graph JSON")
    parser.add_argument("--format", default="json", help="json or dot")
    parser.add_argument("--out", help="Output path; stdout when omitted")
    parser.set_defaults(handler=handle)

def handle(args: argparse.Namespace) -> int:
    write_text(cmd_export(read_graph(args.input), args.format), args.out)
    return 0
