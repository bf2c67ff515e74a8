import argparse
import logging

from pydantic import ValidationError

from ..schemas.schema import CorpusSpec
from ..services.corpus import DEFAULT_SEED
from ..services.errors import CorrtailError
from ..services.serialization import dump_json, write_text
from ..services.suite import cmd_suite

logger = logging.getLogger(__name__)

def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "suite",
        help="Run every check over the fixture, exhaustive and random corpora",
        description="Run the verification suite; exits 0 only when every instance passes.",
    )
    parser.add_argument("--fixtures-only", action="store_true", help="Skip the exhaustive and random corpora")
    parser.add_argument("--max-vertices", type=int, default=3)
    parser.add_argument("--max-mult", type=int, default=2)
    parser.add_argument("--no-omega", action="store_true", help="Leave omega edges out of the generated graphs")
    parser.add_argument("--max-edges", type=int, default=3)
    parser.add_argument("--random-count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random corpus seed (env CORRTAIL_SEED)")
    parser.add_argument("--inject-fault", choices=["saturation"], help="Break one rule on purpose")
    parser.add_argument("--workers", type=int, help="Process pool size (env CORRTAIL_WORKERS)")
    parser.add_argument("--out", help="Output path; stdout when omitted")
    parser.set_defaults(handler=handle)

def corpus_from_args(args: argparse.Namespace) -> CorpusSpec:
    try:
        return _corpus(args)
    except ValidationError as e:
        raise CorrtailError(status_code=400, detail=f"Invalid corpus options: {e.errors(include_url=False)}")

def _corpus(args: argparse.Namespace) -> CorpusSpec:
    return CorpusSpec(
        fixtures=True,
        exhaustive=not args.fixtures_only,
        max_vertices=args.max_vertices,
        max_mult=args.max_mult,
        omega=not args.no_omega,
        max_edges=args.max_edges,
        random_count=0 if args.fixtures_only else args.random_count,
        seed=args.seed,
        inject_fault=args.inject_fault,
    )

def handle(args: argparse.Namespace) -> int:
    report = cmd_suite(corpus_from_args(args), workers=args.workers)
    write_text(dump_json(report), args.out)
    logger.info(f"Suite counts: {report.counts}")
    return 0 if report.passed else 1
