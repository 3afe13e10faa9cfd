"""
Tests for the network model vocabulary
"""

import math

import numpy as np
import pytest

from coxcell.core.exceptions import ConfigurationException, DegenerateWeightsException
from coxcell.core.model import (
    AssociationEvent,
    LineParams,
    LinkType,
    NetworkConfig,
    PalmScenario,
    config_summary,
    line_point,
    line_points,
    threshold_from_db,
    threshold_to_db,
    validate_config,
)


def test_threshold_conversions():
    assert threshold_from_db(0.0) == 1.0
    assert threshold_from_db(10.0) == pytest.approx(10.0)
    assert threshold_to_db(100.0) == pytest.approx(20.0)
    assert threshold_to_db(threshold_from_db(-7.5)) == pytest.approx(-7.5)


@pytest.mark.parametrize(
    "changes, field, message",
    [
        ({"lambda_b": -1.0}, "lambda_b", "lambda_b must be ≥ 0"),
        ({"mu_u": -0.1}, "mu_u", "mu_u must be ≥ 0"),
        ({"alpha": 2.0}, "alpha", "alpha must exceed 2"),
        ({"threshold": 0.0}, "threshold", "threshold must be > 0"),
    ],
)
def test_validate_config_names_the_violated_field(changes, field, message):
    raw = {"lambda_b": 1.0, "lambda_l": 1.0, "mu_b": 1.0, **changes}
    with pytest.raises(ConfigurationException) as exc:
        validate_config(raw)
    assert exc.value.config_field == field
    assert exc.value.message == message
    assert exc.value.exit_code == 3


def test_unknown_parameter_is_rejected():
    with pytest.raises(ConfigurationException) as exc:
        validate_config({"lambda_b": 1.0, "lambda_l": 1.0, "mu_b": 1.0, "noise": 1.0})
    assert exc.value.config_field == "noise"


def test_derived_intensities_and_weights(three_gpp):
    assert three_gpp.vehicular_bs_intensity == pytest.approx(26.7)
    assert three_gpp.total_bs_intensity == pytest.approx(32.85)
    w_planar, w_vehicular = three_gpp.user_weights
    assert w_planar + w_vehicular == pytest.approx(1.0)
    assert w_vehicular == pytest.approx(5.34 * 2.0 / (10.0 + 5.34 * 2.0))


def test_user_weights_collapse_and_degenerate_case(three_gpp):
    assert three_gpp.with_updates(mu_u=0.0).user_weights == (1.0, 0.0)
    assert three_gpp.with_updates(lambda_u=0.0).user_weights == (0.0, 1.0)
    with pytest.raises(DegenerateWeightsException):
        three_gpp.with_updates(lambda_u=0.0, mu_u=0.0).user_weights


def test_with_updates_validates(three_gpp):
    assert three_gpp.with_updates(mu_b=10.0).mu_b == 10.0
    with pytest.raises(ConfigurationException):
        three_gpp.with_updates(alpha=1.5)


def test_config_summary_reports_threshold_in_db():
    config = NetworkConfig(lambda_b=1.0, lambda_l=1.0, mu_b=1.0, threshold=10.0)
    assert config_summary(config)["threshold_db"] == pytest.approx(10.0)


def _on_road(line, x, y):
    return abs(-x * math.sin(line.theta) + y * math.cos(line.theta) - line.r) < 1e-12


def test_line_point_lies_on_its_road():
    line = LineParams(r=-0.3, theta=1.1)
    point = line_point(line, 0.7)
    assert _on_road(line, *point.xy)
    assert math.hypot(*point.xy) == pytest.approx(math.hypot(0.3, 0.7))
    assert line_point(line, 0.0).xy == pytest.approx((0.3 * math.sin(1.1), -0.3 * math.cos(1.1)))


@pytest.mark.parametrize(
    "r, theta, t, xy, norm",
    [
        (0.0, 0.0, 1.0, (1.0, 0.0), 1.0),
        (1.0, 0.5 * math.pi, 0.0, None, 1.0),
        (3.0, 0.7, 4.0, None, 5.0),
    ],
)
def test_line_point_examples(r, theta, t, xy, norm):
    point = line_point(LineParams(r=r, theta=theta), t)
    if xy is not None:
        assert point.xy == pytest.approx(xy)
    assert abs(math.hypot(*point.xy) - norm) < 1e-12 * (1.0 + norm)


def test_norm_identity_to_machine_precision():
    rng = np.random.default_rng(3)
    for r, theta, t in zip(rng.uniform(-50, 50, 200), rng.uniform(0, math.pi, 200), rng.uniform(-50, 50, 200)):
        point = line_point(LineParams(r=float(r), theta=float(theta)), float(t))
        expected = math.sqrt(t * t + r * r)
        assert abs(math.hypot(*point.xy) - expected) < 1e-12 * (1.0 + expected)


def test_line_points_matches_scalar_form():
    r = np.array([0.2, -1.0, 0.0])
    theta = np.array([0.0, 0.5 * math.pi, 2.0])
    t = np.array([1.0, -0.5, 0.25])
    xy = line_points(r, theta, t)
    for i in range(3):
        assert tuple(xy[i]) == pytest.approx(line_point(LineParams(r=r[i], theta=theta[i]), t[i]).xy)


def test_theta_range():
    with pytest.raises(ValueError):
        LineParams(r=0.0, theta=math.pi)


def test_link_types_map_to_scenario_and_association():
    assert LinkType.V2V.scenario is PalmScenario.TYPICAL_VEHICULAR_USER
    assert LinkType.V2V.association is AssociationEvent.TO_VEHICULAR
    assert LinkType.I2V.scenario is PalmScenario.TYPICAL_VEHICULAR_USER
    assert LinkType.I2V.association is AssociationEvent.TO_PLANAR
    assert LinkType.V2I.scenario is PalmScenario.TYPICAL_PLANAR_USER
    assert LinkType.V2I.association is AssociationEvent.TO_VEHICULAR
    assert LinkType.I2I.association.complement is AssociationEvent.TO_VEHICULAR
