"""
Command line router that combines all subcommand modules
"""

import argparse
import re
import sys
from typing import List, Optional

from coxcell.api.endpoints import assoc, compare, coverage, distance, figure, links
from coxcell.core.config import settings
from coxcell.core.exceptions import CoxCellException
from coxcell.core.logging import get_logger

logger = get_logger(__name__)

SUBCOMMANDS = (assoc, distance, coverage, links, figure, compare)

# argparse usage errors share the configuration exit code
USAGE_EXIT_CODE = 3

# values such as "-5,0,5" that argparse would take for an option
_NEGATIVE_VALUE = re.compile(r"^-\.?\d")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT_CODE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog=settings.APP_NAME,
        description="Coverage of planar plus road-borne base stations: nested quadrature and Monte Carlo",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for module in SUBCOMMANDS:
        module.register(subparsers)
    return parser


def glue_negative_values(argv: List[str]) -> List[str]:
    """Rewrite `--flag -5,0` as `--flag=-5,0` so negative grids and thresholds parse"""
    glued: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if (
            token.startswith("--")
            and token != "--"
            and "=" not in token
            and i + 1 < len(argv)
            and _NEGATIVE_VALUE.match(argv[i + 1])
        ):
            glued.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        glued.append(token)
        i += 1
    return glued


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Parse, run and map failures onto exit codes"""
    args = build_parser().parse_args(glue_negative_values(sys.argv[1:] if argv is None else argv))
    try:
        return args.handler(args)
    except CoxCellException as e:
        logger.error(f"{args.command} failed: [{e.code}] {e.message}")
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        logger.error(f"{args.command} interrupted")
        return 130
