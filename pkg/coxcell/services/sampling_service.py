"""
Finite-window sampling of the planar PPP, the Poisson line process and the
Cox processes on its lines, with Palm conditioning per typical user
"""

import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from coxcell.core.config import settings
from coxcell.core.exceptions import ConfigurationException
from coxcell.core.logging import LoggerMixin
from coxcell.core.model import (
    AngularMeasure,
    CoxPoint,
    LineParams,
    NetworkConfig,
    PalmScenario,
    line_point,
    line_points,
)

# Line index recorded for vehicular base stations on the road through the origin
ORIGIN_LINE = -1


class WindowPolicy(str, Enum):
    FIXED_RADIUS = "fixed"
    TAIL_BOUNDED = "tail_bounded"


class SimulationWindow(BaseModel):
    """Disc B(0, radius) that every sample lives in"""

    model_config = ConfigDict(frozen=True)

    radius: float = Field(..., gt=0.0)
    policy: WindowPolicy = WindowPolicy.FIXED_RADIUS
    epsilon: Optional[float] = None

    @classmethod
    def fixed(cls, radius: float) -> "SimulationWindow":
        if not (math.isfinite(radius) and radius > 0):
            raise ConfigurationException("window radius must be positive", config_field="radius")
        return cls(radius=radius)

    @classmethod
    def tail_bounded(cls, config: NetworkConfig, epsilon: Optional[float] = None) -> "SimulationWindow":
        """Smallest radius whose Campbell tail interference is an epsilon fraction of the in-window part.

        The in-window part is measured from r0 = 1/(2 sqrt(lambda)), the mean
        nearest-BS distance at total intensity lambda. With mean interference
        density proportional to u^(1-alpha) the ratio is
        R^(2-alpha) / (r0^(2-alpha) - R^(2-alpha)), solved exactly for R.
        """
        epsilon = settings.TAIL_EPSILON if epsilon is None else epsilon
        if not 0.0 < epsilon < 1.0:
            raise ConfigurationException("tail epsilon must lie in (0, 1)", config_field="epsilon")
        density = config.total_bs_intensity
        if density <= 0:
            raise ConfigurationException("no base stations: lambda_b + lambda_l*mu_b is zero", config_field="lambda_b")

        r0 = reference_radius(config)
        # 0.5% margin keeps the strict bound clear of rounding
        radius = 1.005 * r0 * (epsilon / (1.0 + epsilon)) ** (-1.0 / (config.alpha - 2.0))
        expected_points = density * math.pi * radius ** 2
        if expected_points > settings.MAX_WINDOW_POINTS:
            raise ConfigurationException(
                f"window of radius {radius:.3g} km holds {expected_points:.3g} base stations on average "
                f"(limit {settings.MAX_WINDOW_POINTS:.3g}); raise alpha or epsilon",
                config_field="alpha",
            )
        window = cls(radius=radius, policy=WindowPolicy.TAIL_BOUNDED, epsilon=epsilon)
        ratio = window.tail_ratio(config)
        if not ratio < epsilon:
            raise ConfigurationException(f"tail ratio {ratio:.3g} not below {epsilon}", config_field="epsilon")
        return window

    def tail_ratio(self, config: NetworkConfig) -> float:
        """Campbell mean interference beyond the window over that between r0 and the window edge"""
        r0 = reference_radius(config)
        exponent = 2.0 - config.alpha
        outside = self.radius ** exponent
        inside = r0 ** exponent - outside
        if inside <= 0:
            return math.inf
        return outside / inside


def reference_radius(config: NetworkConfig) -> float:
    return 1.0 / (2.0 * math.sqrt(config.total_bs_intensity))


class Realization(BaseModel):
    """One network snapshot stored as arrays.

    ``vbs_line`` indexes ``line_r``/``line_theta``; ORIGIN_LINE marks the road
    through the origin.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    line_r: np.ndarray
    line_theta: np.ndarray
    vbs_t: np.ndarray
    vbs_line: np.ndarray
    vbs_xy: np.ndarray
    planar_xy: np.ndarray
    origin_line: Optional[LineParams] = None
    window_radius: float
    rng_seed: int = 0
    trial: int = 0

    @property
    def n_base_stations(self) -> int:
        return int(self.vbs_t.size + self.planar_xy.shape[0])

    def line_of(self, index: int) -> LineParams:
        j = int(self.vbs_line[index])
        if j == ORIGIN_LINE:
            return self.origin_line
        return LineParams(r=float(self.line_r[j]), theta=float(self.line_theta[j]))

    def vehicular_points(self) -> List[CoxPoint]:
        return [line_point(self.line_of(i), float(t)) for i, t in enumerate(self.vbs_t)]


def sample_planar_ppp(intensity: float, window: SimulationWindow, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP in the window disc, as an (n, 2) array"""
    if intensity < 0:
        raise ConfigurationException("intensity must be ≥ 0", config_field="intensity")
    if intensity == 0:
        return np.empty((0, 2))
    radius = window.radius
    n = rng.poisson(intensity * math.pi * radius ** 2)
    rho = radius * np.sqrt(rng.random(n))
    phi = 2.0 * math.pi * rng.random(n)
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi)))


def _draw_angles(n: int, angular: AngularMeasure, rng: np.random.Generator) -> np.ndarray:
    if angular is AngularMeasure.MANHATTAN:
        return 0.5 * math.pi * rng.integers(0, 2, size=n)
    return math.pi * rng.random(n)


def sample_line_process(
    lambda_l: float,
    angular: AngularMeasure,
    window: SimulationWindow,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Lines hitting the window: count ~ Poisson(2 lambda_l R), r ~ U(-R, R)"""
    if lambda_l < 0:
        raise ConfigurationException("lambda_l must be ≥ 0", config_field="lambda_l")
    if lambda_l == 0:
        return np.empty(0), np.empty(0)
    radius = window.radius
    n = rng.poisson(2.0 * lambda_l * radius)
    r = rng.uniform(-radius, radius, size=n)
    theta = _draw_angles(n, angular, rng)
    return r, theta


def sample_cox_on_lines(
    line_r: np.ndarray,
    line_theta: np.ndarray,
    mu: float,
    window: SimulationWindow,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """1-D PPP(mu) on each line's chord through the window.

    Returns (t, line index, xy) with t the offset from the line's foot point.
    """
    if mu < 0:
        raise ConfigurationException("mu must be ≥ 0", config_field="mu_b")
    line_r = np.asarray(line_r, dtype=float)
    if mu == 0 or line_r.size == 0:
        return np.empty(0), np.empty(0, dtype=np.int64), np.empty((0, 2))
    half = np.sqrt(np.maximum(window.radius ** 2 - line_r ** 2, 0.0))
    counts = rng.poisson(2.0 * mu * half)
    index = np.repeat(np.arange(line_r.size, dtype=np.int64), counts)
    t = rng.uniform(-half[index], half[index])
    xy = line_points(line_r[index], np.asarray(line_theta, dtype=float)[index], t)
    return t, index, xy


def sample_realization(
    config: NetworkConfig,
    scenario: PalmScenario,
    angular: AngularMeasure,
    window: SimulationWindow,
    rng: np.random.Generator,
    seed: int = 0,
    trial: int = 0,
) -> Realization:
    """Draw lines, their base stations and the planar base stations; the
    vehicular scenario adds the road through the origin with its own PPP(mu_b)."""
    line_r, line_theta = sample_line_process(config.lambda_l, angular, window, rng)
    vbs_t, vbs_line, vbs_xy = sample_cox_on_lines(line_r, line_theta, config.mu_b, window, rng)
    planar_xy = sample_planar_ppp(config.lambda_b, window, rng)

    origin_line = None
    if scenario is PalmScenario.TYPICAL_VEHICULAR_USER:
        origin_line = LineParams(r=0.0, theta=float(_draw_angles(1, angular, rng)[0]))
        t0, _, xy0 = sample_cox_on_lines(
            np.zeros(1), np.array([origin_line.theta]), config.mu_b, window, rng
        )
        vbs_t = np.concatenate((vbs_t, t0))
        vbs_line = np.concatenate((vbs_line, np.full(t0.size, ORIGIN_LINE, dtype=np.int64)))
        vbs_xy = np.vstack((vbs_xy, xy0))

    return Realization(
        line_r=line_r,
        line_theta=line_theta,
        vbs_t=vbs_t,
        vbs_line=vbs_line,
        vbs_xy=vbs_xy,
        planar_xy=planar_xy,
        origin_line=origin_line,
        window_radius=window.radius,
        rng_seed=seed,
        trial=trial,
    )


class SamplingService(LoggerMixin):
    """Window selection and logged realization draws"""

    def __init__(self, epsilon: Optional[float] = None):
        self.epsilon = settings.TAIL_EPSILON if epsilon is None else epsilon

    def window_for(self, config: NetworkConfig, radius: Optional[float] = None) -> SimulationWindow:
        if radius is not None:
            return SimulationWindow.fixed(radius)
        window = SimulationWindow.tail_bounded(config, self.epsilon)
        self.log_debug(
            "Window chosen",
            radius=f"{window.radius:.4g}",
            tail_ratio=f"{window.tail_ratio(config):.3g}",
            expected_bs=f"{config.total_bs_intensity * math.pi * window.radius ** 2:.1f}",
        )
        return window

    def sample(
        self,
        config: NetworkConfig,
        scenario: PalmScenario,
        angular: AngularMeasure,
        window: SimulationWindow,
        rng: np.random.Generator,
        seed: int = 0,
        trial: int = 0,
    ) -> Realization:
        realization = sample_realization(config, scenario, angular, window, rng, seed=seed, trial=trial)
        self.log_debug(
            "Realization drawn",
            trial=trial,
            lines=realization.line_r.size,
            vehicular=realization.vbs_t.size,
            planar=realization.planar_xy.shape[0],
        )
        return realization
