"""
Monte Carlo estimates with standard errors, and the analytic-vs-MC z-score
"""

import math
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator


class EstimateWithCI(BaseModel):
    """Bernoulli-mean estimate: value, standard error and trial count"""

    value: float
    std_err: float = Field(..., ge=0.0)
    n_trials: int = Field(..., ge=0)

    @field_validator("value")
    @classmethod
    def validate_probability(cls, v):
        if not 0.0 <= v <= 1.0:
            raise ValueError("probability estimate must lie in [0, 1]")
        return v

    def to_record(self, **context: Any) -> Dict[str, Any]:
        record = dict(context)
        record.update(value=self.value, std_err=self.std_err, n_trials=self.n_trials)
        return record


class MeanWithCI(BaseModel):
    """Sample mean of an unbounded quantity (e.g. a distance)"""

    value: float
    std_err: float = Field(..., ge=0.0)
    n_samples: int = Field(..., ge=0)

    def to_record(self, **context: Any) -> Dict[str, Any]:
        record = dict(context)
        record.update(value=self.value, std_err=self.std_err, n_samples=self.n_samples)
        return record


def bernoulli_estimate(successes: int, n_trials: int) -> EstimateWithCI:
    if n_trials <= 0:
        return EstimateWithCI(value=0.0, std_err=0.0, n_trials=0)
    p = successes / n_trials
    return EstimateWithCI(value=p, std_err=math.sqrt(p * (1.0 - p) / n_trials), n_trials=n_trials)


def indicator_estimate(indicator: np.ndarray) -> EstimateWithCI:
    """Fraction of True entries"""
    return bernoulli_estimate(int(np.count_nonzero(indicator)), int(indicator.size))


def mean_estimate(samples: np.ndarray) -> MeanWithCI:
    samples = np.asarray(samples, dtype=float)
    samples = samples[np.isfinite(samples)]
    n = int(samples.size)
    if n == 0:
        return MeanWithCI(value=math.nan, std_err=math.inf, n_samples=0)
    value = float(np.sum(samples) / n)
    std_err = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return MeanWithCI(value=value, std_err=std_err, n_samples=n)


def z_score(
    analytic: float,
    analytic_err: float,
    mc: float,
    mc_std_err: float,
    n_trials: Optional[int] = None,
) -> float:
    """|a - m| / sqrt(sigma_m^2 + err_a^2).

    A Bernoulli estimate sitting at 0 or 1 reports sigma_m = 0; the null
    variance a(1-a)/n is used instead so the score stays finite.
    """
    variance = mc_std_err ** 2 + analytic_err ** 2
    if mc_std_err == 0.0 and n_trials:
        p = min(max(analytic, 0.0), 1.0)
        variance = p * (1.0 - p) / n_trials + analytic_err ** 2
    diff = abs(analytic - mc)
    if variance <= 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / math.sqrt(variance)
