import json
import logging
import os
import sys
from argparse import ArgumentParser, RawDescriptionHelpFormatter
from typing import List, Optional

from dotenv import load_dotenv

# Environment must be loaded before the service modules read their settings
load_dotenv()

# Set up logging
logging.basicConfig(
    level=os.getenv("CORRTAIL_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

from .commands import corr, export, lattice, rep, suite, transform
from .services.errors import CorrtailError, VerificationError

description = """
Exact-arithmetic toolkit for graph algebras with tails.

Subcommands:
  transform  graph constructions (tails, truncation, E_V, quotients, closures)
  lattice    saturated hereditary sets and the tails isomorphism
  corr       the graph correspondence X(E), its ideals and tail lemmas
  rep        exact Cuntz-Krieger families and representation-level checks
  suite      every check over the fixture, exhaustive and random corpora
  export     canonical JSON or DOT
"""

def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="corrtail", description=description, formatter_class=RawDescriptionHelpFormatter)
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Include commands
    transform.register(subparsers)
    lattice.register(subparsers)
    corr.register(subparsers)
    rep.register(subparsers)
    suite.register(subparsers)
    export.register(subparsers)
    return parser

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except VerificationError as e:
        logger.error(f"Verification failed: {e.detail}")
        print(json.dumps(e.to_dict(), indent=2, sort_keys=True, default=str), file=sys.stderr)
        return 1
    except CorrtailError as e:
        logger.error(f"{args.command} rejected input ({e.status_code}): {e.detail}")
        print(json.dumps(e.to_dict(), indent=2, sort_keys=True, default=str), file=sys.stderr)
        return 2

if __name__ == "__main__":
    sys.exit(main())
