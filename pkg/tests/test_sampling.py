"""
Tests for window selection and the point process samplers
"""

import math

import numpy as np
import pytest
from scipy import stats

from coxcell.core.exceptions import ConfigurationException
from coxcell.core.model import AngularMeasure, LineParams, NetworkConfig, PalmScenario
from coxcell.services.sampling_service import (
    ORIGIN_LINE,
    SimulationWindow,
    WindowPolicy,
    sample_cox_on_lines,
    sample_line_process,
    sample_planar_ppp,
    sample_realization,
)
from coxcell.utils.rng import trial_stream


def _on_road(line, x, y):
    return abs(-x * math.sin(line.theta) + y * math.cos(line.theta) - line.r) < 1e-12


class TestWindow:
    def test_tail_bounded_window_meets_epsilon(self, three_gpp):
        window = SimulationWindow.tail_bounded(three_gpp, 1e-3)
        assert window.policy is WindowPolicy.TAIL_BOUNDED
        assert window.tail_ratio(three_gpp) < 1e-3
        # without the margin the bound is met with equality
        assert SimulationWindow.fixed(window.radius / 1.005).tail_ratio(three_gpp) == pytest.approx(1e-3, rel=1e-9)

    def test_looser_epsilon_gives_smaller_window(self, three_gpp):
        tight = SimulationWindow.tail_bounded(three_gpp, 1e-3)
        loose = SimulationWindow.tail_bounded(three_gpp, 1e-2)
        assert loose.radius < tight.radius

    def test_no_base_stations(self):
        config = NetworkConfig(lambda_b=0.0, lambda_l=1.0, mu_b=0.0)
        with pytest.raises(ConfigurationException):
            SimulationWindow.tail_bounded(config)

    def test_point_budget_guard(self, three_gpp):
        with pytest.raises(ConfigurationException) as exc:
            SimulationWindow.tail_bounded(three_gpp.with_updates(alpha=2.05), 1e-3)
        assert exc.value.config_field == "alpha"

    @pytest.mark.parametrize("radius", [0.0, -1.0, math.inf])
    def test_fixed_radius_must_be_positive(self, radius):
        with pytest.raises(ConfigurationException):
            SimulationWindow.fixed(radius)


class TestSamplers:
    def test_planar_points_inside_window(self, rng):
        window = SimulationWindow.fixed(2.0)
        points = sample_planar_ppp(50.0, window, rng)
        assert points.shape[1] == 2
        assert np.all(np.hypot(points[:, 0], points[:, 1]) <= 2.0)

    def test_zero_intensity_is_empty(self, rng):
        assert sample_planar_ppp(0.0, SimulationWindow.fixed(1.0), rng).shape == (0, 2)
        r, theta = sample_line_process(0.0, AngularMeasure.ISOTROPIC, SimulationWindow.fixed(1.0), rng)
        assert r.size == theta.size == 0

    def test_lines_hit_the_window(self, rng):
        r, theta = sample_line_process(20.0, AngularMeasure.ISOTROPIC, SimulationWindow.fixed(1.5), rng)
        assert r.size > 0
        assert np.all(np.abs(r) <= 1.5)
        assert np.all((theta >= 0.0) & (theta < math.pi))

    def test_manhattan_angles(self, rng):
        _, theta = sample_line_process(50.0, AngularMeasure.MANHATTAN, SimulationWindow.fixed(1.0), rng)
        assert set(np.unique(theta)) <= {0.0, 0.5 * math.pi}

    def test_cox_points_lie_on_their_roads(self, rng):
        window = SimulationWindow.fixed(1.0)
        r, theta = sample_line_process(10.0, AngularMeasure.ISOTROPIC, window, rng)
        t, index, xy = sample_cox_on_lines(r, theta, 8.0, window, rng)
        assert xy.shape == (t.size, 2)
        assert np.all(np.hypot(xy[:, 0], xy[:, 1]) <= 1.0 + 1e-12)
        for k in range(t.size):
            line = LineParams(r=float(r[index[k]]), theta=float(theta[index[k]]))
            assert _on_road(line, *xy[k])

    def test_vehicular_scenario_adds_origin_road(self, three_gpp):
        realization = sample_realization(
            three_gpp,
            PalmScenario.TYPICAL_VEHICULAR_USER,
            AngularMeasure.ISOTROPIC,
            SimulationWindow.fixed(1.0),
            trial_stream(11, 0),
        )
        assert realization.origin_line is not None
        assert realization.origin_line.r == 0.0
        on_origin_road = realization.vbs_line == ORIGIN_LINE
        for x, y in realization.vbs_xy[on_origin_road]:
            assert _on_road(realization.origin_line, x, y)
        points = realization.vehicular_points()
        assert len(points) == realization.vbs_t.size

    def test_planar_scenario_has_no_origin_road(self, three_gpp):
        realization = sample_realization(
            three_gpp,
            PalmScenario.TYPICAL_PLANAR_USER,
            AngularMeasure.ISOTROPIC,
            SimulationWindow.fixed(1.0),
            trial_stream(11, 0),
        )
        assert realization.origin_line is None
        assert not np.any(realization.vbs_line == ORIGIN_LINE)

    def test_draws_are_reproducible(self, three_gpp):
        def draw():
            return sample_realization(
                three_gpp,
                PalmScenario.TYPICAL_PLANAR_USER,
                AngularMeasure.ISOTROPIC,
                SimulationWindow.fixed(1.0),
                trial_stream(5, 9),
            )

        first, second = draw(), draw()
        assert np.array_equal(first.vbs_xy, second.vbs_xy)
        assert np.array_equal(first.planar_xy, second.planar_xy)


@pytest.mark.slow
@pytest.mark.parametrize("lambda_l, mu_b", [(5.0, 5.0), (10.0, 1.0)])
def test_cox_intensity_matches_lambda_l_mu_b(lambda_l, mu_b):
    window = SimulationWindow.fixed(1.0)
    area = math.pi
    counts = np.empty(10_000)
    for i in range(counts.size):
        rng = trial_stream(2024, i)
        r, theta = sample_line_process(lambda_l, AngularMeasure.ISOTROPIC, window, rng)
        t, _, _ = sample_cox_on_lines(r, theta, mu_b, window, rng)
        counts[i] = t.size / area
    std_err = counts.std(ddof=1) / math.sqrt(counts.size)
    assert abs(counts.mean() - lambda_l * mu_b) < 3.0 * std_err


@pytest.mark.slow
def test_line_and_planar_counts_have_the_right_means():
    window = SimulationWindow.fixed(1.0)
    lines = np.empty(10_000)
    planar = np.empty(10_000)
    for i in range(lines.size):
        rng = trial_stream(77, i)
        lines[i] = sample_line_process(10.0, AngularMeasure.ISOTROPIC, window, rng)[0].size
        planar[i] = sample_planar_ppp(10.0, window, rng).shape[0]
    assert abs(lines.mean() - 20.0) < 3.0 * math.sqrt(20.0 / lines.size)
    assert abs(planar.mean() - 10.0 * math.pi) < 3.0 * math.sqrt(10.0 * math.pi / planar.size)


def _nearest_cox_points(n: int, seed: int) -> np.ndarray:
    window = SimulationWindow.fixed(1.0)
    nearest = []
    for i in range(n):
        rng = trial_stream(seed, i)
        r, theta = sample_line_process(5.0, AngularMeasure.ISOTROPIC, window, rng)
        _, _, xy = sample_cox_on_lines(r, theta, 5.0, window, rng)
        if xy.shape[0]:
            nearest.append(xy[np.argmin(np.hypot(xy[:, 0], xy[:, 1]))])
    return np.array(nearest)


@pytest.mark.slow
def test_isotropic_roads_are_rotation_invariant():
    points = _nearest_cox_points(4_000, 31)
    bearing = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * math.pi) / (2.0 * math.pi)
    assert stats.kstest(bearing, "uniform").pvalue > 1e-3
    # a quarter turn maps x onto y; disjoint halves keep the samples independent
    half = points.shape[0] // 2
    assert stats.ks_2samp(points[:half, 0], points[half:, 1]).pvalue > 1e-3
