"""
Analytic engine: association, nearest-distance laws and SIR coverage of the
planar-plus-Cox network, evaluated by nested quadrature.

All coverage integrals are written in the serving distance r. With the
Rayleigh Laplace kernel K(q) = T / (q^(alpha/2) + T), q = (u/r)^2, every
interference term is r times (or r^2 times) a scale-free integral:

    planar tier        pi lambda_b r^2 c_p,   c_p = 2 int_1^inf s K(s^2) ds
    road through 0     2 mu_b r c_l,          c_l = int_1^inf K(s^2) ds
    other roads        E(r) = E_far(r) + E_near(r), built on
                       J(h, s) = int_s^inf K(h^2 + b^2) db
"""

import math
from typing import Callable, Dict, Optional, Sequence, Tuple

from pydantic import BaseModel, Field
from scipy import special

from coxcell.core.config import settings
from coxcell.core.exceptions import (
    CoxCellException,
    DegenerateConditioningException,
    ExperimentException,
    NonConvergenceException,
)
from coxcell.core.logging import LoggerMixin
from coxcell.core.model import AssociationEvent, LinkType, NetworkConfig, PalmScenario
from coxcell.utils.quadrature import (
    EndpointClass,
    Integrand1D,
    NestedContext,
    QuadResult,
    default_tolerances,
    integrate_nested,
    truncation_radius,
)

HALF_PI = 0.5 * math.pi
SQRT3 = math.sqrt(3.0)
# exp(-x) is below every prefactor's resolution past this
UNDERFLOW_EXPONENT = 700.0


class AnalyticValue(BaseModel):
    """Quadrature value with its propagated error bound"""

    value: float
    error_bound: float = Field(0.0, ge=0.0)

    @classmethod
    def exact(cls, value: float) -> "AnalyticValue":
        return cls(value=value, error_bound=0.0)

    @classmethod
    def from_quad(cls, result: QuadResult) -> "AnalyticValue":
        return cls(value=result.value, error_bound=result.abs_error)

    def __add__(self, other: "AnalyticValue") -> "AnalyticValue":
        return AnalyticValue(value=self.value + other.value, error_bound=self.error_bound + other.error_bound)

    def scaled(self, weight: float) -> "AnalyticValue":
        return AnalyticValue(value=weight * self.value, error_bound=abs(weight) * self.error_bound)

    def complement(self) -> "AnalyticValue":
        return AnalyticValue(value=1.0 - self.value, error_bound=self.error_bound)


class NearestDistanceMeans(BaseModel):
    """Mean distances (km) to the nearest base station, overall, per tier, and per association event"""

    nearest: AnalyticValue
    planar: AnalyticValue
    vehicular: AnalyticValue
    planar_given_planar: AnalyticValue
    vehicular_given_vehicular: AnalyticValue


def planar_interference_closed_form(threshold: float, alpha: float) -> float:
    """c_p via 2T/(alpha-2) 2F1(1, 1-2/alpha; 2-2/alpha; -T)"""
    delta = 2.0 / alpha
    return 2.0 * threshold / (alpha - 2.0) * float(special.hyp2f1(1.0, 1.0 - delta, 2.0 - delta, -threshold))


def poisson_cellular_coverage(threshold: float, alpha: float) -> float:
    """Coverage of a single-tier Poisson network with nearest-BS association"""
    return 1.0 / (1.0 + planar_interference_closed_form(threshold, alpha))


class _Kernel:
    """Interference integrals for one (T, alpha), memoised in the call's context"""

    def __init__(self, config: NetworkConfig, ctx: NestedContext):
        self.config = config
        self.ctx = ctx
        self.threshold = config.threshold
        self.half_alpha = 0.5 * config.alpha

    def k(self, q: float) -> float:
        return self.threshold / (q ** self.half_alpha + self.threshold)

    def j(self, h: float, s: float, scale: float = 1.0) -> float:
        return self.ctx.memo(
            ("J", h, s),
            lambda: self.ctx.inner(
                3, lambda b: self.k(h * h + b * b), s, math.inf, scale=scale, endpoint=EndpointClass.SEMI_INFINITE
            ),
        )

    def planar_constant(self) -> float:
        return self.ctx.memo(
            "c_p",
            lambda: self.ctx.inner(
                2, lambda s: 2.0 * s * self.k(s * s), 1.0, math.inf, endpoint=EndpointClass.SEMI_INFINITE
            ),
        )

    def line_constant(self) -> float:
        return self.ctx.memo(
            "c_l",
            lambda: self.ctx.inner(2, lambda s: self.k(s * s), 1.0, math.inf, endpoint=EndpointClass.SEMI_INFINITE),
        )

    def line_exponent(self, r: float) -> float:
        """-log PGFL of the roads not through the origin, including their empty chords.

        Roads at distance a*r, a > 1, only interfere; roads at distance
        r sin(phi) < r must also leave their chord of half-length r cos(phi)
        empty.
        """
        lam_l, mu = self.config.lambda_l, self.config.mu_b
        if lam_l == 0.0 or mu == 0.0 or r == 0.0:
            return 0.0
        m = 2.0 * mu * r
        scale = 2.0 * lam_l * r
        far = self.ctx.inner(
            2,
            lambda a: -math.expm1(-m * self.j(a, 0.0, scale * m)),
            1.0,
            math.inf,
            scale=scale,
            endpoint=EndpointClass.SEMI_INFINITE,
        )
        near = self.ctx.inner(
            2,
            lambda phi: -math.expm1(-m * (math.cos(phi) + self.j(math.sin(phi), math.cos(phi), scale * m)))
            * math.cos(phi),
            0.0,
            HALF_PI,
            scale=scale,
        )
        return scale * (far + near)

    def serving_line_factor(self, r: float) -> float:
        """int_0^(pi/2) exp(-2 mu_b r (sin t + J(cos t, sin t))) dt for a serving BS on another road"""
        m = 2.0 * self.config.mu_b * r
        if m == 0.0:
            return HALF_PI
        return self.ctx.inner(
            2,
            lambda t: math.exp(-m * (math.sin(t) + self.j(math.cos(t), math.sin(t), m))),
            0.0,
            HALF_PI,
            scale=1.0 + m,
        )


def _void_exponent(config: NetworkConfig, r: float, inner: Callable[..., float]) -> float:
    """A(r): -log P(no Cox point of the other roads in B(0, r))"""
    lam_l, mu = config.lambda_l, config.mu_b
    if lam_l == 0.0 or mu == 0.0 or r == 0.0:
        return 0.0
    m = 2.0 * mu * r
    scale = 2.0 * lam_l * r
    return scale * inner(lambda phi: -math.expm1(-m * math.cos(phi)) * math.cos(phi), 0.0, HALF_PI, scale)


def _void_exponent_derivative(config: NetworkConfig, r: float, inner: Callable[..., float]) -> float:
    """A'(r) = 4 lambda_l mu_b r int_0^(pi/2) exp(-2 mu_b r cos t) dt"""
    lam_l, mu = config.lambda_l, config.mu_b
    if lam_l == 0.0 or mu == 0.0 or r == 0.0:
        return 0.0
    m = 2.0 * mu * r
    scale = 4.0 * lam_l * mu * r
    return scale * inner(lambda t: math.exp(-m * math.cos(t)), 0.0, HALF_PI, scale)


def survival_log_bound(config: NetworkConfig, scenario: PalmScenario, planar: bool = True) -> Callable[[float], float]:
    """Lower bound on -log P(no BS in B(0, r)).

    Chords of roads at distance below r sqrt(3)/2 are at least r long, so
    A(r) >= sqrt(3) lambda_l r (1 - exp(-mu_b r)).
    """
    lam_b = config.lambda_b if planar else 0.0
    lam_l, mu = config.lambda_l, config.mu_b
    own_road = 2.0 * mu if scenario is PalmScenario.TYPICAL_VEHICULAR_USER else 0.0

    def bound(r: float) -> float:
        return math.pi * lam_b * r * r + own_road * r + SQRT3 * lam_l * r * -math.expm1(-mu * r)

    return bound


class AnalyticService(LoggerMixin):
    """Closed-form-by-quadrature counterpart of the Monte Carlo engine"""

    def __init__(
        self,
        tolerances: Optional[Sequence[float]] = None,
        cutoff: Optional[float] = None,
        floor: Optional[float] = None,
    ):
        self.tolerances = tuple(tolerances) if tolerances is not None else default_tolerances()
        self.cutoff = settings.OUTER_SURVIVAL_CUTOFF if cutoff is None else cutoff
        self.floor = settings.DEGENERATE_CONDITIONING_FLOOR if floor is None else floor

    # -- plumbing -----------------------------------------------------------

    def _radial(
        self,
        name: str,
        make_integrand: Callable[[NestedContext], Callable[[float], float]],
        log_bound: Callable[[float], float],
    ) -> AnalyticValue:
        """int_0^inf over the serving distance, split where the survival bound falls below the cut-off"""
        r_cut = truncation_radius(log_bound, self.cutoff)

        def builder(ctx: NestedContext) -> Integrand1D:
            integrand = make_integrand(ctx)

            def guarded(r: float) -> float:
                if log_bound(r) > UNDERFLOW_EXPONENT:
                    return 0.0
                return integrand(r)

            return Integrand1D(func=guarded, endpoint=EndpointClass.SEMI_INFINITE)

        try:
            result = integrate_nested(
                builder,
                0.0,
                math.inf,
                tolerances=self.tolerances,
                split=r_cut if math.isfinite(r_cut) else None,
            )
        except CoxCellException as e:
            self.log_error(name, e, r_cut=r_cut)
            raise
        except Exception as e:
            self.log_error(name, e, r_cut=r_cut)
            raise ExperimentException(f"{name} failed: {e}")

        self.log_debug(name, value=f"{result.value:.8g}", error=f"{result.abs_error:.3g}", evals=result.function_evals)
        return AnalyticValue.from_quad(result)

    def _point_context(self) -> NestedContext:
        return NestedContext(self.tolerances)

    @staticmethod
    def _level2(ctx: NestedContext) -> Callable[..., float]:
        def inner(func, a, b, scale=1.0):
            return ctx.inner(2, func, a, b, scale=scale)

        return inner

    def _checked_probability(self, name: str, result: AnalyticValue) -> AnalyticValue:
        slack = result.error_bound + 1e-12
        if not -slack <= result.value <= 1.0 + slack:
            raise NonConvergenceException(
                f"{name} = {result.value} lies outside [0, 1] beyond its error bound {result.error_bound:.3g}",
                level=1,
                best_estimate=result.value,
                abs_error=result.error_bound,
            )
        return result

    # -- association --------------------------------------------------------

    def _association(self, config: NetworkConfig, scenario: PalmScenario) -> Tuple[AnalyticValue, AnalyticValue]:
        vehicular_user = scenario is PalmScenario.TYPICAL_VEHICULAR_USER
        lam_b, mu = config.lambda_b, config.mu_b
        if lam_b == 0.0:
            planar = AnalyticValue.exact(0.0)
            return planar, planar.complement()
        if mu == 0.0 or (config.lambda_l == 0.0 and not vehicular_user):
            planar = AnalyticValue.exact(1.0)
            return planar, planar.complement()
        own_road = 2.0 * mu if vehicular_user else 0.0
        log_bound = survival_log_bound(config, scenario)

        def make(to_planar: bool) -> Callable[[NestedContext], Callable[[float], float]]:
            def build(ctx: NestedContext) -> Callable[[float], float]:
                inner = self._level2(ctx)

                def f(r: float) -> float:
                    exponent = math.pi * lam_b * r * r + own_road * r + _void_exponent(config, r, inner)
                    if to_planar:
                        rate = 2.0 * math.pi * lam_b * r
                    else:
                        rate = own_road + _void_exponent_derivative(config, r, inner)
                    return rate * math.exp(-exponent)

                return f

            return build

        # each tier from its own serving density, so the pair sums to one only up to quadrature error
        planar = self._radial(f"assoc_{scenario.value}_user", make(True), log_bound)
        vehicular = self._radial(f"assoc_{scenario.value}_user_vehicular", make(False), log_bound)
        return self._checked_probability("association", planar), self._checked_probability("association", vehicular)
    def assoc_planar_user(self, config: NetworkConfig) -> Tuple[AnalyticValue, AnalyticValue]:
        """(P(X* planar), P(X* vehicular)) for the typical planar user, each integrated separately"""
        self.log_operation("Association", scenario="planar", **_brief(config))
        return self._association(config, PalmScenario.TYPICAL_PLANAR_USER)

    def assoc_vehicular_user(self, config: NetworkConfig) -> Tuple[AnalyticValue, AnalyticValue]:
        """Same for the typical vehicular user, whose own road adds exp(-2 mu_b r)"""
        self.log_operation("Association", scenario="vehicular", **_brief(config))
        return self._association(config, PalmScenario.TYPICAL_VEHICULAR_USER)

    def association(self, config: NetworkConfig, scenario: PalmScenario) -> Tuple[AnalyticValue, AnalyticValue]:
        if scenario is PalmScenario.TYPICAL_VEHICULAR_USER:
            return self.assoc_vehicular_user(config)
        return self.assoc_planar_user(config)

    # -- nearest distance ---------------------------------------------------

    def _density(self, config: NetworkConfig, scenario: PalmScenario, r: float) -> AnalyticValue:
        if r <= 0:
            return AnalyticValue.exact(0.0)
        ctx = self._point_context()
        inner = self._level2(ctx)
        own_road = 2.0 * config.mu_b if scenario is PalmScenario.TYPICAL_VEHICULAR_USER else 0.0
        lam_b = config.lambda_b
        void = _void_exponent(config, r, inner)
        slope = _void_exponent_derivative(config, r, inner)
        survival = math.exp(-(math.pi * lam_b * r * r + own_road * r + void))
        value = (2.0 * math.pi * lam_b * r + own_road + slope) * survival
        return AnalyticValue(value=value, error_bound=abs(value) * ctx.propagated_error)

    def nearest_dist_pdf_planar_user(self, config: NetworkConfig, r: float) -> AnalyticValue:
        """Density of the nearest-BS distance: (2 pi lambda_b r + A'(r)) exp(-pi lambda_b r^2 - A(r))"""
        return self._density(config, PalmScenario.TYPICAL_PLANAR_USER, r)

    def nearest_dist_pdf_vehicular_user(self, config: NetworkConfig, r: float) -> AnalyticValue:
        """Density with the own road: (2 pi lambda_b r + 2 mu_b + A'(r)) exp(-pi lambda_b r^2 - 2 mu_b r - A(r))"""
        return self._density(config, PalmScenario.TYPICAL_VEHICULAR_USER, r)

    def nearest_dist_pdf(self, config: NetworkConfig, scenario: PalmScenario, r: float) -> AnalyticValue:
        return self._density(config, scenario, r)

    def nearest_dist_cdf(self, config: NetworkConfig, scenario: PalmScenario, r: float) -> AnalyticValue:
        """P(nearest BS within r) = 1 - exp(-pi lambda_b r^2 - A(r) [- 2 mu_b r])"""
        if r <= 0:
            return AnalyticValue.exact(0.0)
        ctx = self._point_context()
        own_road = 2.0 * config.mu_b if scenario is PalmScenario.TYPICAL_VEHICULAR_USER else 0.0
        exponent = math.pi * config.lambda_b * r * r + own_road * r + _void_exponent(config, r, self._level2(ctx))
        survival = math.exp(-exponent)
        return AnalyticValue(value=-math.expm1(-exponent), error_bound=survival * ctx.propagated_error)

    def mean_nearest_distances(self, config: NetworkConfig, scenario: PalmScenario) -> NearestDistanceMeans:
        """Unconditional, per-tier and association-conditioned mean distances"""
        self.log_operation("Mean distances", scenario=scenario.value, **_brief(config))
        vehicular_user = scenario is PalmScenario.TYPICAL_VEHICULAR_USER
        lam_b, mu = config.lambda_b, config.mu_b
        own_road = 2.0 * mu if vehicular_user else 0.0
        has_vehicular = mu > 0.0 and (config.lambda_l > 0.0 or vehicular_user)
        infinite = AnalyticValue(value=math.inf, error_bound=0.0)

        planar = AnalyticValue.exact(0.5 / math.sqrt(lam_b)) if lam_b > 0 else infinite

        def survival_integrand(include_planar: bool):
            def make(ctx: NestedContext) -> Callable[[float], float]:
                inner = self._level2(ctx)
                b = lam_b if include_planar else 0.0

                def f(r: float) -> float:
                    return math.exp(-(math.pi * b * r * r + own_road * r + _void_exponent(config, r, inner)))

                return f

            return make

        if has_vehicular:
            vehicular = self._radial(
                "mean_vehicular_distance",
                survival_integrand(False),
                survival_log_bound(config, scenario, planar=False),
            )
        else:
            vehicular = infinite

        if lam_b == 0.0 and not has_vehicular:
            return NearestDistanceMeans(
                nearest=infinite,
                planar=infinite,
                vehicular=infinite,
                planar_given_planar=infinite,
                vehicular_given_vehicular=infinite,
            )

        nearest = self._radial("mean_nearest_distance", survival_integrand(True), survival_log_bound(config, scenario))
        p_planar, p_vehicular = self._association(config, scenario)

        def conditional(make_density, probability: AnalyticValue, name: str) -> AnalyticValue:
            if probability.value < self.floor:
                return AnalyticValue(value=math.nan, error_bound=math.inf)
            moment = self._radial(name, make_density, survival_log_bound(config, scenario))
            return _ratio(moment, probability)

        def planar_first(ctx: NestedContext) -> Callable[[float], float]:
            inner = self._level2(ctx)

            def f(r: float) -> float:
                exponent = math.pi * lam_b * r * r + own_road * r + _void_exponent(config, r, inner)
                return r * 2.0 * math.pi * lam_b * r * math.exp(-exponent)

            return f

        def vehicular_first(ctx: NestedContext) -> Callable[[float], float]:
            inner = self._level2(ctx)

            def f(r: float) -> float:
                exponent = math.pi * lam_b * r * r + own_road * r + _void_exponent(config, r, inner)
                rate = own_road + _void_exponent_derivative(config, r, inner)
                return r * rate * math.exp(-exponent)

            return f

        return NearestDistanceMeans(
            nearest=nearest,
            planar=planar,
            vehicular=vehicular,
            planar_given_planar=conditional(planar_first, p_planar, "mean_distance_given_planar"),
            vehicular_given_vehicular=conditional(vehicular_first, p_vehicular, "mean_distance_given_vehicular"),
        )

    # -- coverage -----------------------------------------------------------

    def _coverage(self, config: NetworkConfig, scenario: PalmScenario, serving: str) -> AnalyticValue:
        """Joint coverage for one (typical user, serving base station) pair.

        ``serving`` is ``planar``, ``other_line`` (a road not through the
        origin) or ``same_line`` (the road through the origin).
        """
        lam_b, lam_l, mu = config.lambda_b, config.lambda_l, config.mu_b
        vehicular_user = scenario is PalmScenario.TYPICAL_VEHICULAR_USER
        if serving == "planar" and lam_b == 0.0:
            return AnalyticValue.exact(0.0)
        if serving == "other_line" and lam_l * mu == 0.0:
            return AnalyticValue.exact(0.0)
        if serving == "same_line" and (mu == 0.0 or not vehicular_user):
            return AnalyticValue.exact(0.0)

        def make(ctx: NestedContext) -> Callable[[float], float]:
            kernel = _Kernel(config, ctx)
            planar_rate = math.pi * lam_b * (1.0 + kernel.planar_constant()) if lam_b > 0 else 0.0
            own_road_rate = 2.0 * mu * (1.0 + kernel.line_constant()) if vehicular_user and mu > 0 else 0.0

            def f(r: float) -> float:
                exponent = planar_rate * r * r + own_road_rate * r + kernel.line_exponent(r)
                if exponent > UNDERFLOW_EXPONENT:
                    return 0.0
                decay = math.exp(-exponent)
                if serving == "planar":
                    return 2.0 * math.pi * lam_b * r * decay
                if serving == "same_line":
                    return 2.0 * mu * decay
                if r == 0.0:
                    return 0.0
                return 4.0 * lam_l * mu * r * kernel.serving_line_factor(r) * decay

            return f

        name = f"coverage_{scenario.value}_user_{serving}"
        return self._checked_probability(name, self._radial(name, make, survival_log_bound(config, scenario)))

    def cov_planar_user_planar_bs(self, config: NetworkConfig) -> AnalyticValue:
        """P(SIR > T, X* planar) for the typical planar user"""
        self.log_operation("Coverage", scenario="planar", serving="planar", **_brief(config))
        return self._coverage(config, PalmScenario.TYPICAL_PLANAR_USER, "planar")

    def cov_planar_user_vehicular_bs(self, config: NetworkConfig) -> AnalyticValue:
        """P(SIR > T, X* vehicular) for the typical planar user"""
        self.log_operation("Coverage", scenario="planar", serving="vehicular", **_brief(config))
        return self._coverage(config, PalmScenario.TYPICAL_PLANAR_USER, "other_line")

    def cov_planar_user_vehicular_bs_appendix(self, config: NetworkConfig) -> AnalyticValue:
        """Same quantity by Campbell-Mecke over the serving Cox point.

        Nothing here goes through the scaled kernels of the direct route. Every
        term is integrated in km along the roads themselves:

        - planar tier: pi lambda_b rho^2 plus the damped points beyond rho;
        - other roads: 2 lambda_l int_0^inf (1 - exp(-mu_b G(h))) dh, where a road
          at distance h must leave its chord inside B(0, rho) empty and damps
          the rest, G(h) = 2 (chord + int_chord^inf L(h^2 + t^2) dt);
        - serving road: from the serving point at distance rho with angle t
          between road and radial direction, offset w sits at squared distance
          w^2 + 2 w rho sin t + rho^2, and offsets in [-2 rho sin t, 0] are
          closer than rho. The road angle is averaged over [0, pi).
        """
        self.log_operation("Coverage (Campbell-Mecke form)", scenario="planar", **_brief(config))
        lam_b, lam_l, mu = config.lambda_b, config.lambda_l, config.mu_b
        threshold, alpha = config.threshold, config.alpha
        if lam_l * mu == 0.0:
            return AnalyticValue.exact(0.0)

        def damping(d2: float, rho: float) -> float:
            # 1 - E[exp(-T (rho^2/d2)^(alpha/2) H)] for unit-mean exponential H
            ratio = (d2 / (rho * rho)) ** (0.5 * alpha)
            return threshold / (ratio + threshold)

        def make(ctx: NestedContext) -> Callable[[float], float]:
            def planar_exponent(rho: float) -> float:
                if lam_b == 0.0:
                    return 0.0
                interference = ctx.inner(
                    2,
                    lambda u: damping(u * u, rho) * u,
                    rho,
                    math.inf,
                    scale=2.0 * math.pi * lam_b,
                    endpoint=EndpointClass.SEMI_INFINITE,
                )
                return math.pi * lam_b * rho * rho + 2.0 * math.pi * lam_b * interference

            def road_measure(h: float, rho: float) -> float:
                chord = math.sqrt(max(rho * rho - h * h, 0.0))
                tail = ctx.inner(
                    3,
                    lambda t: damping(h * h + t * t, rho),
                    chord,
                    math.inf,
                    scale=2.0 * mu,
                    endpoint=EndpointClass.SEMI_INFINITE,
                )
                return 2.0 * mu * (chord + tail)

            def other_roads(rho: float) -> float:
                crossing = ctx.inner(2, lambda h: -math.expm1(-road_measure(h, rho)), 0.0, rho, scale=2.0 * lam_l)
                passing = ctx.inner(
                    2,
                    lambda h: -math.expm1(-road_measure(h, rho)),
                    rho,
                    math.inf,
                    scale=2.0 * lam_l,
                    endpoint=EndpointClass.SEMI_INFINITE,
                )
                return 2.0 * lam_l * (crossing + passing)

            def road_tail(s: float) -> float:
                return ctx.memo(
                    ("road", s),
                    lambda: ctx.inner(
                        3,
                        lambda w: damping(w * w + 2.0 * s * w + 1.0, 1.0),
                        0.0,
                        math.inf,
                        scale=2.0 * mu,
                        endpoint=EndpointClass.SEMI_INFINITE,
                    ),
                )

            def serving_road(rho: float) -> float:
                m = 2.0 * mu * rho
                average = ctx.inner(
                    2,
                    lambda t: math.exp(-m * (math.sin(t) + road_tail(math.sin(t)))),
                    0.0,
                    math.pi,
                    scale=1.0 + m,
                )
                return average / math.pi

            def f(rho: float) -> float:
                if rho == 0.0:
                    return 0.0
                exponent = planar_exponent(rho)
                if exponent > UNDERFLOW_EXPONENT:
                    return 0.0
                exponent += other_roads(rho)
                if exponent > UNDERFLOW_EXPONENT:
                    return 0.0
                return lam_l * mu * 2.0 * math.pi * rho * math.exp(-exponent) * serving_road(rho)

            return f

        name = "coverage_planar_user_vehicular_campbell"
        return self._checked_probability(
            name, self._radial(name, make, survival_log_bound(config, PalmScenario.TYPICAL_PLANAR_USER))
        )

    def cov_vehicular_user_planar_bs(self, config: NetworkConfig) -> AnalyticValue:
        """P(SIR > T, X* planar) for the typical vehicular user"""
        self.log_operation("Coverage", scenario="vehicular", serving="planar", **_brief(config))
        return self._coverage(config, PalmScenario.TYPICAL_VEHICULAR_USER, "planar")

    def cov_vehicular_user_vehicular_bs(
        self, config: NetworkConfig
    ) -> Tuple[AnalyticValue, AnalyticValue, AnalyticValue]:
        """(same road, other road, total) joint coverage by a vehicular BS for the typical vehicular user"""
        self.log_operation("Coverage", scenario="vehicular", serving="vehicular", **_brief(config))
        same = self._coverage(config, PalmScenario.TYPICAL_VEHICULAR_USER, "same_line")
        other = self._coverage(config, PalmScenario.TYPICAL_VEHICULAR_USER, "other_line")
        return same, other, same + other

    def joint_coverage(self, config: NetworkConfig, scenario: PalmScenario, event: str) -> AnalyticValue:
        """Joint coverage for an event name: planar, vehicular, same_line, other_line or total"""
        vehicular_user = scenario is PalmScenario.TYPICAL_VEHICULAR_USER
        if event == "total":
            return self.scenario_coverage(config, scenario)
        if event == "planar":
            if vehicular_user:
                return self.cov_vehicular_user_planar_bs(config)
            return self.cov_planar_user_planar_bs(config)
        if event == "vehicular":
            if vehicular_user:
                return self.cov_vehicular_user_vehicular_bs(config)[2]
            return self.cov_planar_user_vehicular_bs(config)
        if event in ("same_line", "other_line"):
            if not vehicular_user:
                raise ExperimentException(f"event {event} needs the vehicular typical user")
            same, other, _ = self.cov_vehicular_user_vehicular_bs(config)
            return same if event == "same_line" else other
        raise ExperimentException(f"unknown coverage event {event!r}")

    def scenario_coverage(self, config: NetworkConfig, scenario: PalmScenario) -> AnalyticValue:
        """Coverage of one typical user: sum of its two joint coverages"""
        if scenario is PalmScenario.TYPICAL_VEHICULAR_USER:
            return self.cov_vehicular_user_planar_bs(config) + self.cov_vehicular_user_vehicular_bs(config)[2]
        return self.cov_planar_user_planar_bs(config) + self.cov_planar_user_vehicular_bs(config)

    def theorem1_total_coverage(self, config: NetworkConfig) -> AnalyticValue:
        """Coverage of the typical user of the whole network: user-intensity mixture of both scenarios"""
        w_planar, w_vehicular = config.user_weights
        total = AnalyticValue.exact(0.0)
        if w_planar > 0.0:
            total = total + self.scenario_coverage(config, PalmScenario.TYPICAL_PLANAR_USER).scaled(w_planar)
        if w_vehicular > 0.0:
            total = total + self.scenario_coverage(config, PalmScenario.TYPICAL_VEHICULAR_USER).scaled(w_vehicular)
        return total

    def link_coverage(self, config: NetworkConfig, link: LinkType) -> AnalyticValue:
        """Coverage conditioned on the user tier and the serving tier"""
        self.log_operation("Link coverage", link=link.value, **_brief(config))
        p_planar, p_vehicular = self.association(config, link.scenario)
        probability = p_vehicular if link.association is AssociationEvent.TO_VEHICULAR else p_planar
        if probability.value < self.floor:
            raise DegenerateConditioningException(
                f"{link.value} conditioning event has probability {probability.value:.3g}",
                link=link.value,
                probability=probability.value,
            )
        joint = self.joint_coverage(config, link.scenario, link.association.value)
        return _ratio(joint, probability)

    def planar_interference_constant(self, config: NetworkConfig) -> AnalyticValue:
        """c_p by quadrature, for checks against the closed form"""
        ctx = self._point_context()
        value = _Kernel(config, ctx).planar_constant()
        return AnalyticValue(value=value, error_bound=ctx.propagated_error)


def _ratio(numerator: AnalyticValue, denominator: AnalyticValue) -> AnalyticValue:
    value = numerator.value / denominator.value
    error = (numerator.error_bound + abs(value) * denominator.error_bound) / denominator.value
    return AnalyticValue(value=value, error_bound=error)


def _brief(config: NetworkConfig) -> Dict[str, str]:
    return {
        "lambda_b": f"{config.lambda_b:g}",
        "lambda_l": f"{config.lambda_l:g}",
        "mu_b": f"{config.mu_b:g}",
        "alpha": f"{config.alpha:g}",
        "T_dB": f"{config.threshold_db:.3g}",
    }
