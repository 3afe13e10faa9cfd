"""
Experiment runner: parameter sweeps through either engine, comparison rows
and the z-score report
"""

import asyncio
import math
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from functools import partial
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from coxcell.core.config import settings
from coxcell.core.exceptions import CoxCellException, ExperimentException, ValidationException
from coxcell.core.logging import LoggerMixin
from coxcell.core.model import (
    AngularMeasure,
    LinkType,
    NetworkConfig,
    PalmScenario,
    config_summary,
    threshold_from_db,
)
from coxcell.services.analytic_service import AnalyticService, AnalyticValue
from coxcell.services.simulation_service import MonteCarloService, TrialBatch
from coxcell.utils.stats import EstimateWithCI, z_score
from coxcell.utils.validation import validate_grid

CSV_HEADER = ("sweep", "analytic", "analytic_err", "mc", "mc_stderr", "n_trials", "z")

SWEEP_VARIABLES = (
    "threshold_db",
    "lambda_b",
    "lambda_u",
    "lambda_l",
    "mu_b",
    "mu_u",
    "alpha",
    "tx_power",
    "radius",
)


class Engine(str, Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "mc"
    BOTH = "both"

    @property
    def analytic(self) -> bool:
        return self in (Engine.ANALYTIC, Engine.BOTH)

    @property
    def monte_carlo(self) -> bool:
        return self in (Engine.MONTE_CARLO, Engine.BOTH)


class Quantity(str, Enum):
    ASSOCIATION = "assoc"
    DISTANCE = "distance"
    COVERAGE = "coverage"
    LINKS = "links"


QUANTITY_EVENTS = {
    Quantity.ASSOCIATION: ("planar", "vehicular"),
    Quantity.DISTANCE: ("cdf",),
    Quantity.COVERAGE: ("planar", "vehicular", "same_line", "other_line", "total", "mixture"),
    Quantity.LINKS: ("link",),
}


class ExperimentSpec(BaseModel):
    """One sweep: a quantity, one swept variable over a grid, fixed everything else"""

    model_config = ConfigDict(frozen=True)

    name: str = "experiment"
    quantity: Quantity
    engine: Engine = Engine.ANALYTIC
    scenario: PalmScenario = PalmScenario.TYPICAL_PLANAR_USER
    event: str = "total"
    link: Optional[LinkType] = None
    sweep: str = "threshold_db"
    grid: List[float]
    config: NetworkConfig
    n_trials: int = Field(default_factory=lambda: settings.DEFAULT_TRIALS, ge=1)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=1 << 64)
    angular: AngularMeasure = AngularMeasure.ISOTROPIC
    output: Optional[str] = None

    @field_validator("grid")
    @classmethod
    def validate_grid_values(cls, v):
        return validate_grid(v)

    @field_validator("sweep")
    @classmethod
    def validate_sweep(cls, v):
        if v not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {', '.join(SWEEP_VARIABLES)}")
        return v

    @model_validator(mode="after")
    def validate_combination(self):
        if self.event not in QUANTITY_EVENTS[self.quantity]:
            raise ValueError(
                f"event {self.event!r} invalid for {self.quantity.value}; "
                f"choose from {', '.join(QUANTITY_EVENTS[self.quantity])}"
            )
        if self.quantity is Quantity.LINKS and self.link is None:
            raise ValueError("links experiments need a link type")
        if self.event in ("same_line", "other_line") and self.scenario is not PalmScenario.TYPICAL_VEHICULAR_USER:
            raise ValueError(f"event {self.event} needs the vehicular scenario")
        if (self.quantity is Quantity.DISTANCE) != (self.sweep == "radius"):
            raise ValueError("distance experiments sweep the radius, and only they do")
        if self.angular is AngularMeasure.MANHATTAN and self.engine is not Engine.MONTE_CARLO:
            raise ValueError("the manhattan road layout is only available with --engine mc")
        return self

    @property
    def effective_scenario(self) -> PalmScenario:
        if self.quantity is Quantity.LINKS:
            return self.link.scenario
        return self.scenario


class ComparisonRow(BaseModel):
    """One grid point: analytic value and error, MC value and std err, and their z-score"""

    sweep: float
    analytic: Optional[float] = None
    analytic_err: Optional[float] = None
    mc: Optional[float] = None
    mc_stderr: Optional[float] = None
    n_trials: Optional[int] = None
    z: Optional[float] = None

    @classmethod
    def build(
        cls, sweep: float, analytic: Optional[AnalyticValue], estimate: Optional[EstimateWithCI]
    ) -> "ComparisonRow":
        row = cls(sweep=sweep)
        if analytic is not None:
            row.analytic, row.analytic_err = analytic.value, analytic.error_bound
        if estimate is not None:
            row.mc, row.mc_stderr, row.n_trials = estimate.value, estimate.std_err, estimate.n_trials
        if analytic is not None and estimate is not None:
            row.z = z_score(analytic.value, analytic.error_bound, estimate.value, estimate.std_err, estimate.n_trials)
        return row

    def csv_fields(self) -> List[str]:
        return [_fmt(getattr(self, name)) for name in CSV_HEADER]


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


class ExperimentResult(BaseModel):
    """Rows in grid order (a prefix of the grid if a point failed) plus sidecar metadata"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: ExperimentSpec
    rows: List[ComparisonRow] = []
    records: List[Dict[str, Any]] = []
    extras: Dict[str, Any] = {}
    wall_time: float = 0.0
    failure: Optional[Exception] = None

    @property
    def max_abs_z(self) -> Optional[float]:
        scores = [row.z for row in self.rows if row.z is not None]
        return max(scores) if scores else None

    @property
    def passed(self) -> bool:
        score = self.max_abs_z
        return self.failure is None and (score is None or score <= settings.COMPARE_MAX_ABS_Z)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def metadata(self) -> Dict[str, Any]:
        spec = self.spec
        return {
            "name": spec.name,
            "quantity": spec.quantity.value,
            "engine": spec.engine.value,
            "scenario": spec.effective_scenario.value,
            "event": spec.event,
            "link": spec.link.value if spec.link else None,
            "sweep": spec.sweep,
            "grid": spec.grid,
            "config": config_summary(spec.config),
            "seed": spec.seed,
            "n_trials": spec.n_trials,
            "angular": spec.angular.value,
            "versions": {
                "coxcell": settings.VERSION,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "wall_time_s": self.wall_time,
            "max_abs_z": self.max_abs_z,
            "status": self.status,
            "error": str(self.failure) if self.failure else None,
            "mc_records": self.records,
            "extras": self.extras,
        }


def point_config(spec: ExperimentSpec, value: float) -> NetworkConfig:
    """The fixed config with the swept variable set to ``value``"""
    if spec.sweep == "radius":
        return spec.config
    if spec.sweep == "threshold_db":
        return spec.config.with_updates(threshold=threshold_from_db(value))
    return spec.config.with_updates(**{spec.sweep: value})


class ExperimentService(LoggerMixin):
    """Evaluates ExperimentSpecs; grid points run concurrently, rows come back in grid order"""

    def __init__(
        self,
        analytic: Optional[AnalyticService] = None,
        monte_carlo: Optional[MonteCarloService] = None,
        max_workers: Optional[int] = None,
    ):
        self.analytic = analytic or AnalyticService()
        self.monte_carlo = monte_carlo or MonteCarloService()
        self.max_workers = max_workers or settings.COXCELL_THREADS

    # -- single points ------------------------------------------------------

    def analytic_point(self, spec: ExperimentSpec, value: float) -> AnalyticValue:
        config = point_config(spec, value)
        scenario = spec.effective_scenario
        if spec.quantity is Quantity.ASSOCIATION:
            planar, vehicular = self.analytic.association(config, scenario)
            return planar if spec.event == "planar" else vehicular
        if spec.quantity is Quantity.DISTANCE:
            return self.analytic.nearest_dist_cdf(config, scenario, value)
        if spec.quantity is Quantity.LINKS:
            return self.analytic.link_coverage(config, spec.link)
        if spec.event == "mixture":
            return self.analytic.theorem1_total_coverage(config)
        return self.analytic.joint_coverage(config, scenario, spec.event)

    def _simulate(
        self, spec: ExperimentSpec, config: NetworkConfig, scenario: PalmScenario, workers: Optional[int]
    ) -> TrialBatch:
        return self.monte_carlo.simulate(
            config, scenario, spec.n_trials, spec.seed, spec.angular, max_workers=workers
        )

    def mc_points(
        self, spec: ExperimentSpec, values: List[float], workers: Optional[int] = None
    ) -> Tuple[List[EstimateWithCI], List[Dict[str, Any]]]:
        """MC estimates for grid values that share one config (thresholds or radii).

        ``workers`` caps the trial threads of this call; None keeps the
        Monte Carlo service's own setting.
        """
        config = point_config(spec, values[0])
        scenario = spec.effective_scenario
        mc = self.monte_carlo

        if spec.quantity is Quantity.DISTANCE:
            report = mc.estimate_nearest_distance_cdf(
                config,
                scenario,
                spec.n_trials,
                spec.seed,
                values,
                spec.angular,
                batch=self._simulate(spec, config, scenario, workers),
            )
            return report.cdf, report.to_records(config)

        thresholds = [point_config(spec, v).threshold for v in values]
        if spec.quantity is Quantity.ASSOCIATION:
            planar, vehicular = mc.estimate_association(
                config,
                scenario,
                spec.n_trials,
                spec.seed,
                spec.angular,
                batch=self._simulate(spec, config, scenario, workers),
            )
            estimate = planar if spec.event == "planar" else vehicular
            record = estimate.to_record(
                scenario=scenario.value, params=config_summary(config), event=spec.event, seed=spec.seed
            )
            return [estimate] * len(values), [record]
        if spec.quantity is Quantity.LINKS:
            estimates = mc.estimate_link_coverage(
                config, spec.link, spec.n_trials, spec.seed, thresholds, spec.angular,
                batch=self._simulate(spec, config, scenario, workers),
            )
            records = [
                e.to_record(link=spec.link.value, params=config_summary(config), threshold=t, seed=spec.seed)
                for e, t in zip(estimates, thresholds)
            ]
            return estimates, records
        if spec.event == "mixture":
            estimates = mc.estimate_mixture_coverage_grid(
                config, spec.n_trials, spec.seed, thresholds, spec.angular, max_workers=workers
            )
            records = [
                e.to_record(event="mixture", params=config_summary(config), threshold=t, seed=spec.seed)
                for e, t in zip(estimates, thresholds)
            ]
            return estimates, records
        report = mc.estimate_coverage(
            config, scenario, spec.n_trials, spec.seed, thresholds, spec.angular,
            batch=self._simulate(spec, config, scenario, workers),
        )
        return report.joint[spec.event], report.to_records(config)

    # -- sweeps -------------------------------------------------------------

    async def _gather(self, executor: ThreadPoolExecutor, calls: List[partial]) -> List[Any]:
        loop = asyncio.get_running_loop()
        return await asyncio.gather(*(loop.run_in_executor(executor, call) for call in calls), return_exceptions=True)

    async def run(self, spec: ExperimentSpec) -> ExperimentResult:
        """Evaluate every grid point with the requested engines"""
        started = time.perf_counter()
        grid = spec.grid
        self.log_operation(
            "Running experiment",
            experiment=spec.name,
            quantity=spec.quantity.value,
            engine=spec.engine.value,
            sweep=spec.sweep,
            points=len(grid),
        )

        analytic: List[Any] = [None] * len(grid)
        estimates: List[Any] = [None] * len(grid)
        records: List[Dict[str, Any]] = []
        shared_mc = spec.sweep in ("threshold_db", "radius")

        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            if spec.engine.analytic:
                analytic = await self._gather(executor, [partial(self.analytic_point, spec, v) for v in grid])
            if spec.engine.monte_carlo:
                if shared_mc:
                    outcome = (await self._gather(executor, [partial(self.mc_points, spec, list(grid))]))[0]
                    if isinstance(outcome, BaseException):
                        estimates = [outcome] * len(grid)
                    else:
                        estimates, records = outcome[0], outcome[1]
                else:
                    # points already run in parallel; each one simulates on its own thread
                    inner = 1 if len(grid) > 1 else None
                    outcomes = await self._gather(executor, [partial(self.mc_points, spec, [v], inner) for v in grid])
                    estimates = []
                    for outcome in outcomes:
                        if isinstance(outcome, BaseException):
                            estimates.append(outcome)
                        else:
                            estimates.append(outcome[0][0])
                            records.extend(outcome[1])

        rows: List[ComparisonRow] = []
        failure: Optional[BaseException] = None
        for value, a, m in zip(grid, analytic, estimates):
            error = a if isinstance(a, BaseException) else m if isinstance(m, BaseException) else None
            if error is not None:
                failure = error
                break
            rows.append(ComparisonRow.build(value, a, m))

        result = ExperimentResult(
            spec=spec,
            rows=rows,
            records=records,
            wall_time=time.perf_counter() - started,
            failure=_as_domain_error(failure, spec) if failure is not None else None,
        )
        if spec.quantity is Quantity.DISTANCE and result.failure is None and spec.engine.analytic:
            result.extras["analytic_means_km"] = self._mean_distances(spec)

        if result.failure is not None:
            self.log_error("Experiment", result.failure, experiment=spec.name, completed=len(rows))
        else:
            self.log_operation(
                "Experiment finished",
                experiment=spec.name,
                seconds=f"{result.wall_time:.2f}",
                max_abs_z=result.max_abs_z,
            )
        return result

    def _mean_distances(self, spec: ExperimentSpec) -> Dict[str, Any]:
        means = self.analytic.mean_nearest_distances(spec.config, spec.effective_scenario)
        return {name: value.value for name, value in means}

    async def compare(self, spec: ExperimentSpec) -> ExperimentResult:
        """Run both engines and grade max |z| against COMPARE_MAX_ABS_Z"""
        if spec.engine is not Engine.BOTH:
            raise ValidationException("compare needs both engines", field="engine")
        result = await self.run(spec)
        self.log_operation("Comparison", experiment=spec.name, max_abs_z=result.max_abs_z, status=result.status)
        return result


def _as_domain_error(error: BaseException, spec: ExperimentSpec) -> CoxCellException:
    if isinstance(error, CoxCellException):
        return error
    return ExperimentException(f"{spec.name} failed: {error}", experiment=spec.name)


def summary_line(result: ExperimentResult) -> str:
    score = result.max_abs_z
    shown = "n/a" if score is None or math.isnan(score) else f"{score:.3f}"
    return f"{result.spec.name}: max |z| = {shown} over {len(result.rows)} points -> {result.status}"
