"""
PosetGrid Workbench
Command-line entry point: widths, partitions, extremal searches, detection,
constant schedules, bound catalogs and verify-bounds campaigns
"""
import argparse
import sys

from dotenv import load_dotenv

# Load environment variables before the config singleton is built
load_dotenv()

from pydantic import ValidationError  # noqa: E402

from src.core import commands  # noqa: E402
from src.core.config import CONF, VERSION  # noqa: E402
from src.core.errors import PosetGridError  # noqa: E402
from src.core.report import write_csv_rows, write_json_report  # noqa: E402
from src.utils.io_utils import load_family, load_poset, load_suite, parse_shape  # noqa: E402
from src.utils.logger import get_logger  # noqa: E402

logger = get_logger("posetgrid.cli")

EXIT_INPUT = 4
MODES = ("weak", "induced", "strong")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, help="Search node budget (env PGL_BUDGET)")
    common.add_argument("--threads", type=int, help="Worker threads (env PGL_THREADS)")
    common.add_argument("--seed", type=int, help="Seed for randomized suites (env PGL_SEED)")
    common.add_argument("--out", help="Report file; stdout when omitted")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--quiet", action="store_true", help="No progress bars")
    common.add_argument("--timing", action="store_true", help="Add wall time to the report body")

    parser = argparse.ArgumentParser(prog="posetgrid", description="PosetGrid Workbench " + VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("width", parents=[common], help="Exact width of a grid")
    p.add_argument("--shape", required=True)

    p = sub.add_parser("partition", parents=[common], help="Long-chain or grid partition")
    p.add_argument("--shape", required=True)
    p.add_argument("--mode", choices=("chains", "grids"), default="chains")
    p.add_argument("--d", type=int)
    p.add_argument("--partition-out", dest="partition_out")

    p = sub.add_parser("extremal", parents=[common], help="Largest family avoiding a structure")
    p.add_argument("--shape", required=True)
    p.add_argument("--structure", choices=("copy", "boolean", "join"), default="copy")
    p.add_argument("--poset", help="Poset file or chain:N, antichain:N, K:r1,r2,.., bool:N")
    p.add_argument("--mode", choices=MODES, default="weak")
    p.add_argument("--d", type=int)

    p = sub.add_parser("detect", parents=[common], help="Find a structure in a family")
    p.add_argument("--family", required=True, help="Family file (.json or .bin)")
    p.add_argument("--structure", choices=("join", "boolean", "copy", "strong-chain"), required=True)
    p.add_argument("--poset")
    p.add_argument("--mode", choices=MODES, default="weak")
    p.add_argument("--d", type=int)
    p.add_argument("--h", type=int)

    p = sub.add_parser("constants", parents=[common], help="Constant schedules of a poset")
    p.add_argument("--poset", required=True)

    p = sub.add_parser("bounds", parents=[common], help="Catalog of bounds for a poset")
    p.add_argument("--poset", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2, help="Boolean algebra dimension")

    p = sub.add_parser("verify-bounds", parents=[common], help="Run a verify-bounds suite")
    p.add_argument("suite", nargs="?", default="suites/acceptance.json")
    return parser


def dispatch(args: argparse.Namespace) -> commands.CommandResult:
    conf = CONF.with_overrides(budget=args.budget, threads=args.threads, seed=args.seed)
    poset = load_poset(args.poset) if getattr(args, "poset", None) else None
    opts = {"conf": conf, "timing": args.timing}
    if args.command == "width":
        return commands.cmd_width(parse_shape(args.shape), **opts)
    if args.command == "partition":
        return commands.cmd_partition(parse_shape(args.shape), args.mode, args.d, args.partition_out, **opts)
    if args.command == "extremal":
        return commands.cmd_extremal(parse_shape(args.shape), args.structure, poset, args.mode, args.d, **opts)
    if args.command == "detect":
        return commands.cmd_detect(load_family(args.family), args.structure, poset, args.mode,
                                   args.d, args.h, **opts)
    if args.command == "constants":
        return commands.cmd_constants(poset, **opts)
    if args.command == "bounds":
        return commands.cmd_bounds(poset, args.n, args.k, args.d, **opts)
    return commands.cmd_verify_bounds(load_suite(args.suite), quiet=args.quiet, **opts)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = dispatch(args)
    except PosetGridError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    except (ValidationError, FileNotFoundError) as e:
        logger.error("invalid input: %s", e)
        return EXIT_INPUT
    if args.format == "csv":
        write_csv_rows(result.rows, args.out)
    else:
        write_json_report(result.report, args.out)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
