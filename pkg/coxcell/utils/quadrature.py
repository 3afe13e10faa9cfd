"""
Adaptive quadrature for nested integrals with semi-infinite ranges and
inverse square-root endpoints
"""

import math
from enum import Enum
from typing import Any, Callable, Dict, Hashable, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate as scipy_integrate
from scipy import optimize

from coxcell.core.config import settings
from coxcell.core.exceptions import IntegrandException, NonConvergenceException, ValidationException
from coxcell.core.logging import get_logger

logger = get_logger(__name__)

MAX_NESTING_LEVELS = 3


class EndpointClass(str, Enum):
    """How the integration range is mapped before the Gauss-Kronrod rule sees it"""

    REGULAR = "regular"
    INVERSE_SQRT_SINGULARITY = "inverse_sqrt"
    SEMI_INFINITE = "semi_infinite"


class Integrand1D(BaseModel):
    """Real function on an interval plus its endpoint classification.

    INVERSE_SQRT_SINGULARITY means f behaves like 1/sqrt(b - z) at the upper
    limit; SEMI_INFINITE means the upper limit is +inf.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    func: Callable[[float], float]
    endpoint: EndpointClass = EndpointClass.REGULAR


class QuadResult(BaseModel):
    """Value, absolute error estimate and evaluation count"""

    value: float
    abs_error: float = Field(..., ge=0.0)
    function_evals: int = 0

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            value=self.value + other.value,
            abs_error=self.abs_error + other.abs_error,
            function_evals=self.function_evals + other.function_evals,
        )


def _checked(func: Callable[[float], float]) -> Callable[[float], float]:
    def wrapper(x: float) -> float:
        y = func(x)
        if not math.isfinite(y):
            raise IntegrandException(f"integrand returned {y} at {x!r}", point=x)
        return y

    return wrapper


def _transformed(f: Integrand1D, a: float, b: float):
    """Return (g, lo, hi) such that the integral of g over [lo, hi] equals the original"""
    func = f.func
    if f.endpoint is EndpointClass.SEMI_INFINITE:
        # u = a + s/(1-s), du = ds/(1-s)^2
        def g(s: float) -> float:
            w = 1.0 - s
            return func(a + s / w) / (w * w)

        return g, 0.0, 1.0

    if f.endpoint is EndpointClass.INVERSE_SQRT_SINGULARITY:
        width = b - a

        # z = a + (b-a) sin(phi), dz = (b-a) cos(phi) dphi
        def g(phi: float) -> float:
            return func(a + width * math.sin(phi)) * width * math.cos(phi)

        return g, 0.0, 0.5 * math.pi

    return func, a, b


def integrate(
    f: Integrand1D,
    a: float,
    b: float,
    rel_tol: Optional[float] = None,
    abs_tol: Optional[float] = None,
    level: int = 1,
    limit: Optional[int] = None,
) -> QuadResult:
    """Integrate f over [a, b] to max(abs_tol, rel_tol*|I|).

    Raises NonConvergenceException (tagged with ``level``) when the subdivision
    budget runs out before the tolerance is met, and IntegrandException when f
    produces NaN or an infinity.
    """
    rel_tol = settings.QUAD_OUTER_REL_TOL if rel_tol is None else rel_tol
    abs_tol = settings.QUAD_ABS_TOL if abs_tol is None else abs_tol
    limit = settings.QUAD_SUBDIVISION_LIMIT if limit is None else limit

    if f.endpoint is EndpointClass.SEMI_INFINITE:
        if not math.isinf(b) or b < 0:
            raise ValidationException("semi-infinite integrand needs b = +inf", field="b")
        if not math.isfinite(a):
            raise ValidationException("lower limit must be finite", field="a")
    else:
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValidationException(
                "infinite limit requires the SEMI_INFINITE classification", field="endpoint"
            )
        if a > b:
            raise ValidationException(f"lower limit {a} exceeds upper limit {b}", field="a")
        if a == b:
            return QuadResult(value=0.0, abs_error=0.0, function_evals=0)

    g, lo, hi = _transformed(f, a, b)
    out = scipy_integrate.quad(
        _checked(g), lo, hi, epsabs=abs_tol, epsrel=rel_tol, limit=limit, full_output=1
    )
    value, abs_error, info = out[0], abs(out[1]), out[2]
    evals = int(info.get("neval", 0))

    if len(out) > 3:
        target = max(abs_tol, rel_tol * abs(value))
        if not math.isfinite(value) or abs_error > target:
            raise NonConvergenceException(
                f"quadrature did not converge at level {level}: {out[3]}",
                level=level,
                best_estimate=float(value),
                abs_error=float(abs_error),
                details={"a": a, "b": b, "evaluations": evals},
            )
        logger.debug(f"quad warning at level {level} accepted, error {abs_error:.3g} within target")

    return QuadResult(value=float(value), abs_error=float(abs_error), function_evals=evals)


class NestedContext:
    """Per-call state handed to a nested integrand builder.

    ``inner`` runs a level-2 or level-3 integral at that level's tolerance and
    records ``scale * abs_error``, the sensitivity of the outer integrand to the
    inner value. ``memo`` caches inner results for the lifetime of the call.
    """

    def __init__(
        self,
        tolerances: Sequence[float],
        abs_tol: Optional[float] = None,
        limit: Optional[int] = None,
    ):
        self.tolerances = tuple(tolerances)
        self.abs_tol = settings.QUAD_ABS_TOL if abs_tol is None else abs_tol
        self.limit = limit
        self.function_evals = 0
        self._errors: Dict[int, float] = {}
        self._memo: Dict[Hashable, Any] = {}

    def inner(
        self,
        level: int,
        func: Callable[[float], float],
        a: float,
        b: float,
        scale: float = 1.0,
        endpoint: EndpointClass = EndpointClass.REGULAR,
    ) -> float:
        if not 2 <= level <= len(self.tolerances):
            raise ValidationException(f"nesting level {level} outside 2..{len(self.tolerances)}", field="level")
        result = integrate(
            Integrand1D(func=func, endpoint=endpoint),
            a,
            b,
            rel_tol=self.tolerances[level - 1],
            abs_tol=self.abs_tol,
            level=level,
            limit=self.limit,
        )
        self.function_evals += result.function_evals
        self._errors[level] = max(self._errors.get(level, 0.0), abs(scale) * result.abs_error)
        return result.value

    def memo(self, key: Hashable, thunk: Callable[[], Any]) -> Any:
        try:
            return self._memo[key]
        except KeyError:
            value = self._memo[key] = thunk()
            return value

    @property
    def propagated_error(self) -> float:
        return sum(self._errors.values())


def default_tolerances() -> tuple:
    return (settings.QUAD_OUTER_REL_TOL, settings.QUAD_MIDDLE_REL_TOL, settings.QUAD_INNER_REL_TOL)


def integrate_nested(
    builder: Callable[[NestedContext], Integrand1D],
    a: float,
    b: float,
    tolerances: Optional[Sequence[float]] = None,
    abs_tol: Optional[float] = None,
    split: Optional[float] = None,
    limit: Optional[int] = None,
) -> QuadResult:
    """Integrate an outer integrand whose evaluation calls ``ctx.inner``.

    ``tolerances`` lists the relative tolerance per level, outermost first; each
    must be at least ten times tighter than the one above it. With ``split`` the
    outer range is integrated as [a, split] (regular) plus [split, b] (with the
    builder's classification). The error estimate adds the outer rule error and
    the propagated inner errors.
    """
    tolerances = tuple(default_tolerances() if tolerances is None else tolerances)
    if not 1 <= len(tolerances) <= MAX_NESTING_LEVELS:
        raise ValidationException(f"at most {MAX_NESTING_LEVELS} nesting levels are supported", field="tolerances")
    for outer_tol, inner_tol in zip(tolerances, tolerances[1:]):
        if inner_tol > outer_tol / 10.0 * (1.0 + 1e-9):
            raise ValidationException(
                f"inner tolerance {inner_tol} must be at least 10x tighter than {outer_tol}",
                field="tolerances",
            )

    ctx = NestedContext(tolerances, abs_tol=abs_tol, limit=limit)
    outer = builder(ctx)

    if split is not None and a < split < b:
        head = integrate(
            Integrand1D(func=outer.func), a, split, rel_tol=tolerances[0], abs_tol=ctx.abs_tol, limit=limit
        )
        tail = integrate(outer, split, b, rel_tol=tolerances[0], abs_tol=ctx.abs_tol, limit=limit)
        result = head + tail
    else:
        result = integrate(outer, a, b, rel_tol=tolerances[0], abs_tol=ctx.abs_tol, limit=limit)

    total_error = result.abs_error + abs(result.value) * ctx.propagated_error
    return QuadResult(
        value=result.value,
        abs_error=total_error,
        function_evals=result.function_evals + ctx.function_evals,
    )


def truncation_radius(log_survival: Callable[[float], float], cutoff: Optional[float] = None) -> float:
    """Smallest r with log_survival(r) >= ln(1/cutoff); +inf if never reached.

    ``log_survival`` must be non-decreasing with log_survival(0) = 0.
    """
    cutoff = settings.OUTER_SURVIVAL_CUTOFF if cutoff is None else cutoff
    target = -math.log(cutoff)
    hi = 1.0
    for _ in range(200):
        if log_survival(hi) >= target:
            break
        hi *= 2.0
    else:
        return math.inf
    return float(optimize.brentq(lambda r: log_survival(r) - target, 0.0, hi, xtol=1e-12, rtol=1e-10))
