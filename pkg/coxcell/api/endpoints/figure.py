"""
figure: regenerate the data behind a named figure, one CSV per curve
"""

import argparse
from pathlib import Path

from coxcell.api.endpoints.common import add_common_arguments, explicit_values, merged_values, run_specs
from coxcell.core.logging import get_logger
from coxcell.services.config_service import FIGURE_ALIASES, FIGURE_PRESETS, FIGURES, ConfigService

logger = get_logger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("figure", help="figure presets; --out names a directory")
    parser.add_argument("figure", choices=FIGURES + tuple(FIGURE_ALIASES), help="figure to regenerate")
    add_common_arguments(parser, with_sweep=False)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    figure = FIGURE_ALIASES.get(args.figure, args.figure)
    out_dir = Path(args.out or "figures")
    values = merged_values(args, preset=FIGURE_PRESETS.get(figure))
    values.pop("out", None)

    specs = ConfigService().figure_specs(figure, values, explicit=explicit_values(args))
    specs = [spec.model_copy(update={"output": str(out_dir / f"{spec.name}.csv")}) for spec in specs]
    logger.info(f"Figure {figure}: {len(specs)} curves into {out_dir}")
    return run_specs(specs)
