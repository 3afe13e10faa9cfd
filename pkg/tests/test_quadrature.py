"""
Tests for the nested adaptive quadrature
"""

import math
import time

import pytest

from coxcell.core.exceptions import IntegrandException, NonConvergenceException, ValidationException
from coxcell.utils.quadrature import (
    EndpointClass,
    Integrand1D,
    NestedContext,
    integrate,
    integrate_nested,
    truncation_radius,
)

REGULAR = EndpointClass.REGULAR
SQRT = EndpointClass.INVERSE_SQRT_SINGULARITY
INF = EndpointClass.SEMI_INFINITE

BATTERY = [
    ("x^2 on [0,1]", lambda x: x * x, 0.0, 1.0, REGULAR, 1.0 / 3.0),
    ("sin on [0,pi]", math.sin, 0.0, math.pi, REGULAR, 2.0),
    ("cos on [0,pi/2]", math.cos, 0.0, 0.5 * math.pi, REGULAR, 1.0),
    ("1/sqrt(1-x) on [0,1]", lambda x: 1.0 / math.sqrt(1.0 - x), 0.0, 1.0, SQRT, 2.0),
    ("arcsin derivative on [0,1]", lambda x: 1.0 / math.sqrt(1.0 - x * x), 0.0, 1.0, SQRT, 0.5 * math.pi),
    ("exp(-x) on [0,inf)", lambda x: math.exp(-x), 0.0, math.inf, INF, 1.0),
    ("1/(1+x^2) on [0,inf)", lambda x: 1.0 / (1.0 + x * x), 0.0, math.inf, INF, 0.5 * math.pi),
    ("1/x^2 on [1,inf)", lambda x: 1.0 / (x * x), 1.0, math.inf, INF, 1.0),
    ("gaussian on [0,inf)", lambda x: math.exp(-x * x), 0.0, math.inf, INF, 0.5 * math.sqrt(math.pi)),
    ("x exp(-x) on [0,inf)", lambda x: x * math.exp(-x), 0.0, math.inf, INF, 1.0),
]


@pytest.mark.parametrize("name, func, a, b, endpoint, exact", BATTERY, ids=[case[0] for case in BATTERY])
def test_closed_form_battery(name, func, a, b, endpoint, exact):
    result = integrate(Integrand1D(func=func, endpoint=endpoint), a, b, rel_tol=1e-10, abs_tol=1e-14)
    assert abs(result.value - exact) / abs(exact) < 1e-6
    assert result.abs_error < 1e-6 * abs(exact)


def test_battery_is_fast():
    started = time.perf_counter()
    for _, func, a, b, endpoint, _ in BATTERY:
        integrate(Integrand1D(func=func, endpoint=endpoint), a, b, rel_tol=1e-10, abs_tol=1e-14)
    assert time.perf_counter() - started < 1.0


def test_empty_interval_is_zero():
    result = integrate(Integrand1D(func=math.exp), 2.0, 2.0)
    assert result.value == 0.0
    assert result.abs_error == 0.0


def test_reversed_limits_rejected():
    with pytest.raises(ValidationException):
        integrate(Integrand1D(func=math.exp), 1.0, 0.0)


def test_limits_must_match_classification():
    with pytest.raises(ValidationException):
        integrate(Integrand1D(func=math.exp, endpoint=INF), 0.0, 1.0)
    with pytest.raises(ValidationException):
        integrate(Integrand1D(func=math.exp), 0.0, math.inf)


def test_nan_integrand_raises():
    with pytest.raises(IntegrandException) as exc:
        integrate(Integrand1D(func=lambda x: math.nan), 0.0, 1.0)
    assert exc.value.exit_code == 2


def test_exhausted_budget_raises_with_level():
    oscillating = Integrand1D(func=lambda x: math.sin(200.0 * x))
    with pytest.raises(NonConvergenceException) as exc:
        integrate(oscillating, 0.0, 50.0 * math.pi, rel_tol=1e-12, abs_tol=1e-14, level=2, limit=1)
    assert exc.value.level == 2
    assert exc.value.exit_code == 2


def test_nested_double_integral():
    def builder(ctx: NestedContext) -> Integrand1D:
        return Integrand1D(func=lambda x: ctx.inner(2, lambda y: x + y, 0.0, 1.0))

    result = integrate_nested(builder, 0.0, 1.0, tolerances=(1e-8, 1e-9))
    assert result.value == pytest.approx(1.0, rel=1e-7)
    assert result.abs_error >= 0.0


def test_nested_triple_integral_with_semi_infinite_inner():
    def builder(ctx: NestedContext) -> Integrand1D:
        def middle(y: float) -> float:
            return ctx.inner(3, lambda z: math.exp(-z), 0.0, math.inf, endpoint=INF) * y

        return Integrand1D(func=lambda x: ctx.inner(2, middle, 0.0, 1.0) * 2.0 * x)

    result = integrate_nested(builder, 0.0, 1.0)
    assert result.value == pytest.approx(0.5, rel=1e-6)


def test_nested_split_matches_unsplit():
    def builder(ctx: NestedContext) -> Integrand1D:
        return Integrand1D(func=lambda x: math.exp(-x), endpoint=INF)

    whole = integrate_nested(builder, 0.0, math.inf, tolerances=(1e-9,))
    split = integrate_nested(builder, 0.0, math.inf, tolerances=(1e-9,), split=5.0)
    assert whole.value == pytest.approx(1.0, rel=1e-8)
    assert split.value == pytest.approx(1.0, rel=1e-8)


def test_nested_tolerances_must_tighten():
    def builder(ctx: NestedContext) -> Integrand1D:
        return Integrand1D(func=lambda x: 1.0)

    with pytest.raises(ValidationException):
        integrate_nested(builder, 0.0, 1.0, tolerances=(1e-6, 1e-6))
    with pytest.raises(ValidationException):
        integrate_nested(builder, 0.0, 1.0, tolerances=(1e-3, 1e-4, 1e-5, 1e-6))


def test_memo_evaluates_once():
    ctx = NestedContext((1e-6, 1e-7))
    calls = []

    def thunk():
        calls.append(1)
        return 42.0

    assert ctx.memo("key", thunk) == 42.0
    assert ctx.memo("key", thunk) == 42.0
    assert len(calls) == 1


def test_inner_level_bounds():
    ctx = NestedContext((1e-6, 1e-7))
    with pytest.raises(ValidationException):
        ctx.inner(3, lambda x: x, 0.0, 1.0)


def test_truncation_radius():
    r = truncation_radius(lambda r: r * r, cutoff=1e-16)
    assert r == pytest.approx(math.sqrt(-math.log(1e-16)), rel=1e-8)
    assert truncation_radius(lambda r: 0.0) == math.inf
