"""
Shared fixtures: parameter sets, services and seeded streams
"""

import pytest

from coxcell.core.model import NetworkConfig
from coxcell.services.analytic_service import AnalyticService
from coxcell.services.sampling_service import SamplingService
from coxcell.services.simulation_service import MonteCarloService
from coxcell.utils.rng import trial_stream

SEED = 20180417


@pytest.fixture
def three_gpp() -> NetworkConfig:
    return NetworkConfig(lambda_b=6.15, lambda_l=5.34, mu_b=5.0, lambda_u=10.0, mu_u=2.0)


@pytest.fixture
def equal_intensity() -> NetworkConfig:
    return NetworkConfig(lambda_b=25.0, lambda_l=5.0, mu_b=5.0, lambda_u=10.0, mu_u=2.0)


@pytest.fixture
def poisson_only() -> NetworkConfig:
    """No vehicular base stations: the classical single-tier Poisson network"""
    return NetworkConfig(lambda_b=1.0, lambda_l=5.0, mu_b=0.0, lambda_u=10.0, mu_u=2.0)


@pytest.fixture
def analytic() -> AnalyticService:
    return AnalyticService()


@pytest.fixture
def sampling() -> SamplingService:
    return SamplingService()


@pytest.fixture
def monte_carlo(sampling) -> MonteCarloService:
    return MonteCarloService(sampling=sampling, max_workers=1, chunk_size=250)


@pytest.fixture
def rng():
    return trial_stream(SEED, 0)
