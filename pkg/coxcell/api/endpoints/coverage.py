"""
coverage: joint coverage P(SIR > T, event) for a typical user, or the user mixture
"""

import argparse

from coxcell.api.endpoints.common import add_common_arguments, merged_values, run_single
from coxcell.services.config_service import ConfigService
from coxcell.services.experiment_service import QUANTITY_EVENTS, Quantity


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("coverage", help="coverage probability (default sweep: threshold_db)")
    add_common_arguments(parser)
    parser.add_argument(
        "--event",
        choices=QUANTITY_EVENTS[Quantity.COVERAGE],
        help="serving tier; same_line/other_line need --scenario vehicular, mixture averages both users",
    )
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    spec = ConfigService().build_spec(Quantity.COVERAGE, merged_values(args))
    return run_single(args, spec)
