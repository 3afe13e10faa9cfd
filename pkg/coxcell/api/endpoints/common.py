"""
Flags and run plumbing shared by every subcommand
"""

import argparse
import asyncio
import sys
from typing import Any, Dict, List, Optional

from coxcell.core.logging import get_logger
from coxcell.core.model import AngularMeasure, PalmScenario
from coxcell.services.config_service import PARAMETER_KEYS, ConfigService, parse_config_file
from coxcell.services.experiment_service import (
    CSV_HEADER,
    Engine,
    ExperimentResult,
    ExperimentService,
    ExperimentSpec,
    summary_line,
)
from coxcell.services.sampling_service import SamplingService
from coxcell.utils.file_utils import ResultWriter, dump_realization, sidecar_path
from coxcell.utils.rng import trial_stream, validate_seed

logger = get_logger(__name__)

_RUN_FLAGS = ("name", "engine", "scenario", "angular", "event", "link", "sweep", "grid", "trials", "seed", "out")


def add_common_arguments(parser: argparse.ArgumentParser, with_sweep: bool = True) -> None:
    parser.add_argument("--config", metavar="PATH", help="key=value or flat YAML config file")
    parser.add_argument("--preset", choices=("3gpp", "equal"), help="named parameter set")
    parser.add_argument("--name", help="experiment name recorded in the sidecar")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    parser.add_argument("--engine", choices=[e.value for e in Engine], help="analytic (default), mc or both")
    parser.add_argument("--out", metavar="PATH", help="CSV path; stdout when omitted")
    parser.add_argument("--scenario", choices=[s.value for s in PalmScenario], help="typical user")
    parser.add_argument("--angular", choices=[a.value for a in AngularMeasure], help="road directions (mc only)")
    if with_sweep:
        parser.add_argument("--sweep", help="swept variable, e.g. threshold_db or mu_b")
        parser.add_argument("--grid", help="comma separated sweep values")
    parser.add_argument(
        "--dump-realization", metavar="PATH", help="also write one sampled network snapshot as CSV"
    )

    params = parser.add_argument_group("model parameters")
    params.add_argument("--lambda-b", type=float, help="planar BS intensity, 1/km^2")
    params.add_argument("--lambda-u", type=float, help="planar user intensity, 1/km^2")
    params.add_argument("--lambda-l", type=float, help="road intensity, 1/km")
    params.add_argument("--mu-b", type=float, help="vehicular BSs per km of road")
    params.add_argument("--mu-u", type=float, help="vehicular users per km of road")
    params.add_argument("--alpha", type=float, help="path-loss exponent")
    params.add_argument("--tx-power", type=float, help="transmit power (cancels in the SIR)")
    params.add_argument("--threshold-db", type=float, help="SIR threshold in dB")


def overrides_from(args: argparse.Namespace) -> Dict[str, Any]:
    """Flags the user actually passed, keyed the way config files spell them"""
    keys = PARAMETER_KEYS + _RUN_FLAGS
    return {key: getattr(args, key) for key in keys if getattr(args, key, None) is not None}


def explicit_values(args: argparse.Namespace) -> Dict[str, Any]:
    """Config file values plus flags, without defaults or presets"""
    values = parse_config_file(args.config) if args.config else {}
    values.update(overrides_from(args))
    return values


def merged_values(args: argparse.Namespace, preset: Optional[str] = None) -> Dict[str, Any]:
    return ConfigService().merge(
        preset=args.preset or preset, config_path=args.config, overrides=overrides_from(args)
    )


def write_result(result: ExperimentResult, out: Optional[str]) -> None:
    writer = ResultWriter()
    writer.write_csv(CSV_HEADER, [row.csv_fields() for row in result.rows], out)
    if out is not None:
        writer.write_sidecar(result.metadata(), sidecar_path(out))


def maybe_dump_realization(args: argparse.Namespace, spec: ExperimentSpec) -> None:
    path = getattr(args, "dump_realization", None)
    if path is None:
        return
    sampling = SamplingService()
    seed = validate_seed(spec.seed)
    window = sampling.window_for(spec.config)
    realization = sampling.sample(
        spec.config, spec.effective_scenario, spec.angular, window, trial_stream(seed, 0), seed=seed
    )
    dump_realization(realization, path)
    logger.info(f"Realization written to {path}")


def run_specs(specs: List[ExperimentSpec], compare: bool = False) -> int:
    """Run specs in order, writing each CSV before moving on.

    A failed point still leaves the rows before it on disk; its error is then raised.
    """
    service = ExperimentService()
    exit_code = 0
    for spec in specs:
        runner = service.compare if compare else service.run
        result = asyncio.run(runner(spec))
        write_result(result, spec.output)
        if result.failure is not None:
            raise result.failure
        if compare:
            print(summary_line(result), file=sys.stderr)
            if not result.passed:
                exit_code = 1
    return exit_code


def run_single(args: argparse.Namespace, spec: ExperimentSpec) -> int:
    maybe_dump_realization(args, spec)
    return run_specs([spec])
