"""
Monte Carlo estimators: association, nearest distance, joint and conditional
coverage, Palm mixture coverage
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from coxcell.core.config import settings
from coxcell.core.exceptions import (
    CoxCellException,
    DegenerateConditioningException,
    EmptyRealizationException,
    ExperimentException,
)
from coxcell.core.logging import LoggerMixin
from coxcell.core.model import (
    AngularMeasure,
    AssociationEvent,
    LinkType,
    NetworkConfig,
    PalmScenario,
    config_summary,
    threshold_to_db,
)
from coxcell.services.sampling_service import ORIGIN_LINE, Realization, SamplingService, SimulationWindow
from coxcell.utils.retry_utils import empty_realization_retrying
from coxcell.utils.rng import derived_seed, trial_stream, validate_seed
from coxcell.utils.stats import EstimateWithCI, MeanWithCI, bernoulli_estimate, indicator_estimate, mean_estimate
from coxcell.utils.validation import validate_radii, validate_trials

PLANAR_EVENTS = ("planar", "vehicular", "total")
VEHICULAR_EVENTS = ("planar", "vehicular", "same_line", "other_line", "total")


class TrialOutcome(BaseModel):
    """Result of one snapshot as seen by the typical user"""

    model_config = ConfigDict(frozen=True)

    nearest_dist: float
    association: AssociationEvent
    same_line: Optional[bool] = None
    sir: float
    nearest_planar_dist: float = math.inf
    nearest_vehicular_dist: float = math.inf


class TrialBatch(BaseModel):
    """Column-wise outcomes of consecutive trials"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    scenario: PalmScenario
    seed: int
    window_radius: float
    nearest_dist: np.ndarray
    vehicular: np.ndarray
    same_line: np.ndarray
    sir: np.ndarray
    nearest_planar_dist: np.ndarray
    nearest_vehicular_dist: np.ndarray

    @property
    def n_trials(self) -> int:
        return int(self.sir.size)

    @classmethod
    def from_outcomes(
        cls, scenario: PalmScenario, seed: int, window_radius: float, outcomes: Sequence[TrialOutcome]
    ) -> "TrialBatch":
        return cls(
            scenario=scenario,
            seed=seed,
            window_radius=window_radius,
            nearest_dist=np.array([o.nearest_dist for o in outcomes], dtype=float),
            vehicular=np.array([o.association is AssociationEvent.TO_VEHICULAR for o in outcomes], dtype=bool),
            same_line=np.array([bool(o.same_line) for o in outcomes], dtype=bool),
            sir=np.array([o.sir for o in outcomes], dtype=float),
            nearest_planar_dist=np.array([o.nearest_planar_dist for o in outcomes], dtype=float),
            nearest_vehicular_dist=np.array([o.nearest_vehicular_dist for o in outcomes], dtype=float),
        )

    @classmethod
    def concatenate(cls, batches: Sequence["TrialBatch"]) -> "TrialBatch":
        first = batches[0]
        fields = ("nearest_dist", "vehicular", "same_line", "sir", "nearest_planar_dist", "nearest_vehicular_dist")
        data = {name: np.concatenate([getattr(b, name) for b in batches]) for name in fields}
        return cls(scenario=first.scenario, seed=first.seed, window_radius=first.window_radius, **data)

    def event_mask(self, event: str) -> np.ndarray:
        if event == "planar":
            return ~self.vehicular
        if event == "vehicular":
            return self.vehicular.copy()
        if event == "same_line":
            return self.vehicular & self.same_line
        if event == "other_line":
            return self.vehicular & ~self.same_line
        if event == "total":
            return np.ones(self.sir.size, dtype=bool)
        raise ExperimentException(f"unknown event {event!r}")

    def joint(self, event: str, threshold: float) -> EstimateWithCI:
        return indicator_estimate((self.sir > threshold) & self.event_mask(event))

    def conditional(self, event: str, threshold: float) -> EstimateWithCI:
        """Coverage among trials in the event; std err over those k trials"""
        mask = self.event_mask(event)
        return bernoulli_estimate(int(np.count_nonzero((self.sir > threshold) & mask)), int(np.count_nonzero(mask)))


class CoverageReport(BaseModel):
    """Joint coverage P(SIR > T, event) per threshold, plus association frequencies"""

    scenario: PalmScenario
    thresholds: List[float]
    joint: Dict[str, List[EstimateWithCI]]
    association: Dict[str, EstimateWithCI]
    seed: int
    window_radius: float

    @property
    def total(self) -> List[EstimateWithCI]:
        return self.joint["total"]

    def to_records(self, config: NetworkConfig) -> List[Dict[str, Any]]:
        params = config_summary(config)
        records = []
        for event, estimates in self.joint.items():
            for threshold, estimate in zip(self.thresholds, estimates):
                records.append(
                    estimate.to_record(
                        scenario=self.scenario.value,
                        params=params,
                        event=event,
                        threshold_db=threshold_to_db(threshold),
                        seed=self.seed,
                        window_radius=self.window_radius,
                    )
                )
        return records


class DistanceReport(BaseModel):
    """Empirical nearest-distance CDF plus unconditional and association-conditioned means"""

    scenario: PalmScenario
    grid: List[float]
    cdf: List[EstimateWithCI]
    mean: MeanWithCI
    mean_planar: MeanWithCI
    mean_vehicular: MeanWithCI
    mean_given_planar: MeanWithCI
    mean_given_vehicular: MeanWithCI
    seed: int
    window_radius: float

    def to_records(self, config: NetworkConfig) -> List[Dict[str, Any]]:
        context = dict(
            scenario=self.scenario.value,
            params=config_summary(config),
            seed=self.seed,
            window_radius=self.window_radius,
        )
        records = [
            self.mean.to_record(event="mean", **context),
            self.mean_planar.to_record(event="mean_planar", **context),
            self.mean_vehicular.to_record(event="mean_vehicular", **context),
            self.mean_given_planar.to_record(event="mean_given_planar", **context),
            self.mean_given_vehicular.to_record(event="mean_given_vehicular", **context),
        ]
        for r, estimate in zip(self.grid, self.cdf):
            records.append(estimate.to_record(event="cdf", radius=r, **context))
        return records


def evaluate_realization(
    realization: Realization, rng: np.random.Generator, alpha: float, tx_power: float = 1.0
) -> TrialOutcome:
    """Serve the origin from the nearest base station and draw Rayleigh fades for all of them"""
    planar_d2 = np.einsum("ij,ij->i", realization.planar_xy, realization.planar_xy)
    vehicular_d2 = np.einsum("ij,ij->i", realization.vbs_xy, realization.vbs_xy)
    d2 = np.concatenate((planar_d2, vehicular_d2))
    n_planar = planar_d2.size

    # ties go to the lowest index
    k = int(np.argmin(d2))
    fading = rng.exponential(1.0, size=d2.size)
    received = tx_power * fading * d2 ** (-0.5 * alpha)
    interference = float(np.sum(np.delete(received, k)))
    sir = math.inf if interference <= 0.0 else float(received[k] / interference)

    vehicular = k >= n_planar
    same_line = None
    if realization.origin_line is not None and vehicular:
        same_line = bool(realization.vbs_line[k - n_planar] == ORIGIN_LINE)

    return TrialOutcome(
        nearest_dist=math.sqrt(d2[k]),
        association=AssociationEvent.TO_VEHICULAR if vehicular else AssociationEvent.TO_PLANAR,
        same_line=same_line,
        sir=sir,
        nearest_planar_dist=math.sqrt(planar_d2.min()) if n_planar else math.inf,
        nearest_vehicular_dist=math.sqrt(vehicular_d2.min()) if vehicular_d2.size else math.inf,
    )


class MonteCarloService(LoggerMixin):
    """Monte Carlo engine over per-trial Philox streams"""

    def __init__(
        self,
        sampling: Optional[SamplingService] = None,
        max_workers: Optional[int] = None,
        chunk_size: Optional[int] = None,
        max_attempts: Optional[int] = None,
    ):
        self.sampling = sampling or SamplingService()
        self.max_workers = max_workers or settings.COXCELL_THREADS
        self.chunk_size = chunk_size or settings.TRIAL_CHUNK_SIZE
        self.max_attempts = max_attempts

    def run_trial(
        self,
        config: NetworkConfig,
        scenario: PalmScenario,
        window: SimulationWindow,
        rng: np.random.Generator,
        angular: AngularMeasure = AngularMeasure.ISOTROPIC,
        seed: int = 0,
        trial: int = 0,
    ) -> TrialOutcome:
        """One snapshot; empty windows are redrawn from the same stream"""

        def draw() -> Realization:
            realization = self.sampling.sample(config, scenario, angular, window, rng, seed=seed, trial=trial)
            if realization.n_base_stations == 0:
                raise EmptyRealizationException("no base station in window")
            return realization

        realization = empty_realization_retrying(self.max_attempts)(draw)
        return evaluate_realization(realization, rng, config.alpha, config.tx_power)

    def _run_chunk(
        self,
        config: NetworkConfig,
        scenario: PalmScenario,
        angular: AngularMeasure,
        window: SimulationWindow,
        seed: int,
        start: int,
        stop: int,
    ) -> TrialBatch:
        outcomes = [
            self.run_trial(config, scenario, window, trial_stream(seed, t), angular, seed=seed, trial=t)
            for t in range(start, stop)
        ]
        return TrialBatch.from_outcomes(scenario, seed, window.radius, outcomes)

    def simulate(
        self,
        config: NetworkConfig,
        scenario: PalmScenario,
        n_trials: int,
        seed: int,
        angular: AngularMeasure = AngularMeasure.ISOTROPIC,
        window: Optional[SimulationWindow] = None,
        max_workers: Optional[int] = None,
    ) -> TrialBatch:
        """Run trials 0..n_trials-1 in contiguous chunks; output is in trial order.

        ``max_workers`` overrides the service's thread count for this call.
        """
        workers = self.max_workers if max_workers is None else max_workers
        n_trials = validate_trials(n_trials)
        seed = validate_seed(seed)
        window = window or self.sampling.window_for(config)
        chunks = [(s, min(s + self.chunk_size, n_trials)) for s in range(0, n_trials, self.chunk_size)]

        self.log_operation(
            "Simulating",
            scenario=scenario.value,
            trials=n_trials,
            seed=seed,
            angular=angular.value,
            window=f"{window.radius:.4g}",
        )
        try:
            if workers > 1 and len(chunks) > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    futures = [
                        pool.submit(self._run_chunk, config, scenario, angular, window, seed, a, b) for a, b in chunks
                    ]
                    batches = [f.result() for f in futures]
            else:
                batches = [self._run_chunk(config, scenario, angular, window, seed, a, b) for a, b in chunks]
        except CoxCellException:
            raise
        except Exception as e:
            self.log_error("Simulation", e, scenario=scenario.value, seed=seed)
            raise ExperimentException(f"simulation failed: {e}")

        return TrialBatch.concatenate(batches)

    def estimate_association(
        self,
        config: NetworkConfig,
        scenario: PalmScenario,
        n_trials: int,
        seed: int,
        angular: AngularMeasure = AngularMeasure.ISOTROPIC,
        batch: Optional[TrialBatch] = None,
    ) -> Tuple[EstimateWithCI, EstimateWithCI]:
        """(to planar, to vehicular); the two values sum to one"""
        batch = batch or self.simulate(config, scenario, n_trials, seed, angular)
        vehicular = indicator_estimate(batch.vehicular)
        planar = EstimateWithCI(value=1.0 - vehicular.value, std_err=vehicular.std_err, n_trials=vehicular.n_trials)
        return planar, vehicular

    def estimate_nearest_distance_cdf(
        self,
        config: NetworkConfig,
        scenario: PalmScenario,
        n_trials: int,
        seed: int,
        grid: Sequence[float],
        angular: AngularMeasure = AngularMeasure.ISOTROPIC,
        batch: Optional[TrialBatch] = None,
    ) -> DistanceReport:
        grid = validate_radii(grid)
        batch = batch or self.simulate(config, scenario, n_trials, seed, angular)
        nearest = np.sort(batch.nearest_dist)
        cdf = [bernoulli_estimate(int(np.searchsorted(nearest, r, side="right")), batch.n_trials) for r in grid]
        return DistanceReport(
            scenario=scenario,
            grid=grid,
            cdf=cdf,
            mean=mean_estimate(batch.nearest_dist),
            mean_planar=mean_estimate(batch.nearest_planar_dist),
            mean_vehicular=mean_estimate(batch.nearest_vehicular_dist),
            mean_given_planar=mean_estimate(batch.nearest_dist[~batch.vehicular]),
            mean_given_vehicular=mean_estimate(batch.nearest_dist[batch.vehicular]),
            seed=batch.seed,
            window_radius=batch.window_radius,
        )

    def estimate_coverage(
        self,
        config: NetworkConfig,
        scenario: PalmScenario,
        n_trials: int,
        seed: int,
        thresholds: Optional[Sequence[float]] = None,
        angular: AngularMeasure = AngularMeasure.ISOTROPIC,
        batch: Optional[TrialBatch] = None,
    ) -> CoverageReport:
        """Joint coverage per association event; all thresholds share the same snapshots"""
        thresholds = list(thresholds) if thresholds is not None else [config.threshold]
        batch = batch or self.simulate(config, scenario, n_trials, seed, angular)
        events = VEHICULAR_EVENTS if scenario is PalmScenario.TYPICAL_VEHICULAR_USER else PLANAR_EVENTS
        joint = {event: [batch.joint(event, t) for t in thresholds] for event in events}
        association = {event: indicator_estimate(batch.event_mask(event)) for event in events}
        return CoverageReport(
            scenario=scenario,
            thresholds=thresholds,
            joint=joint,
            association=association,
            seed=batch.seed,
            window_radius=batch.window_radius,
        )

    def estimate_link_coverage(
        self,
        config: NetworkConfig,
        link: LinkType,
        n_trials: int,
        seed: int,
        thresholds: Optional[Sequence[float]] = None,
        angular: AngularMeasure = AngularMeasure.ISOTROPIC,
        batch: Optional[TrialBatch] = None,
    ) -> List[EstimateWithCI]:
        """P(SIR > T | user tier, serving tier) for one link type"""
        thresholds = list(thresholds) if thresholds is not None else [config.threshold]
        batch = batch or self.simulate(config, link.scenario, n_trials, seed, angular)
        event = link.association.value
        if not np.any(batch.event_mask(event)):
            raise DegenerateConditioningException(
                f"no trial fell in the {link.value} conditioning event", link=link.value, probability=0.0
            )
        return [batch.conditional(event, t) for t in thresholds]

    def estimate_mixture_coverage_grid(
        self,
        config: NetworkConfig,
        n_trials: int,
        seed: int,
        thresholds: Sequence[float],
        angular: AngularMeasure = AngularMeasure.ISOTROPIC,
        max_workers: Optional[int] = None,
    ) -> List[EstimateWithCI]:
        """Palm mixture of the two typical users, weighted by user intensities.

        The vehicular user runs on ``derived_seed(seed, 1)``, so the two parts
        are independent and their variances add.
        """
        w_planar, w_vehicular = config.user_weights
        parts = []
        for weight, scenario, run_seed in (
            (w_planar, PalmScenario.TYPICAL_PLANAR_USER, seed),
            (w_vehicular, PalmScenario.TYPICAL_VEHICULAR_USER, derived_seed(seed, 1)),
        ):
            if weight == 0.0:
                continue
            batch = self.simulate(config, scenario, n_trials, run_seed, angular, max_workers=max_workers)
            report = self.estimate_coverage(config, scenario, n_trials, run_seed, thresholds, angular, batch=batch)
            parts.append((weight, report.total))

        if len(parts) == 1:
            return parts[0][1]
        (w1, planar_part), (w2, vehicular_part) = parts
        return [
            EstimateWithCI(
                value=min(max(w1 * e1.value + w2 * e2.value, 0.0), 1.0),
                std_err=math.hypot(w1 * e1.std_err, w2 * e2.std_err),
                n_trials=e1.n_trials + e2.n_trials,
            )
            for e1, e2 in zip(planar_part, vehicular_part)
        ]

    def estimate_mixture_coverage(
        self,
        config: NetworkConfig,
        n_trials: int,
        seed: int,
        angular: AngularMeasure = AngularMeasure.ISOTROPIC,
    ) -> EstimateWithCI:
        """Coverage of the typical user of the whole network at config.threshold"""
        return self.estimate_mixture_coverage_grid(config, n_trials, seed, [config.threshold], angular)[0]
