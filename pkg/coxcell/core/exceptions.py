"""
Custom exceptions for coxcell
"""

from typing import Any, Dict, Optional


class CoxCellException(Exception):
    """Base exception for coxcell"""

    exit_code: int = 3

    def __init__(
        self,
        message: str,
        code: str = "COXCELL_ERROR",
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.code = code
        self.details = details or {}
        super().__init__(self.message)


class ConfigurationException(CoxCellException):
    """Exception for invalid model or run configuration"""

    def __init__(self, message: str, config_field: Optional[str] = None, **kwargs):
        super().__init__(message, code="CONFIGURATION_ERROR", **kwargs)
        self.config_field = config_field


class ValidationException(CoxCellException):
    """Exception for malformed experiment specs and grids"""

    def __init__(self, message: str, field: Optional[str] = None, **kwargs):
        super().__init__(message, code="VALIDATION_ERROR", **kwargs)
        self.field = field


class NonConvergenceException(CoxCellException):
    """Quadrature budget exhausted before the requested tolerance was met"""

    exit_code = 2

    def __init__(
        self,
        message: str,
        level: int = 1,
        best_estimate: float = float("nan"),
        abs_error: float = float("inf"),
        **kwargs
    ):
        super().__init__(message, code="NON_CONVERGENCE", **kwargs)
        self.level = level
        self.best_estimate = best_estimate
        self.abs_error = abs_error


class IntegrandException(CoxCellException):
    """Integrand returned NaN or an infinity inside the open interval"""

    exit_code = 2

    def __init__(self, message: str, point: Optional[float] = None, **kwargs):
        super().__init__(message, code="INTEGRAND_ERROR", **kwargs)
        self.point = point


class EmptyRealizationException(CoxCellException):
    """No base station fell inside the simulation window"""

    exit_code = 4

    def __init__(self, message: str, attempts: int = 1, **kwargs):
        super().__init__(message, code="EMPTY_REALIZATION", **kwargs)
        self.attempts = attempts


class DegenerateConditioningException(CoxCellException):
    """Conditioning event probability below the configured floor"""

    def __init__(
        self,
        message: str,
        link: Optional[str] = None,
        probability: Optional[float] = None,
        **kwargs
    ):
        super().__init__(message, code="DEGENERATE_CONDITIONING", **kwargs)
        self.link = link
        self.probability = probability


class DegenerateWeightsException(CoxCellException):
    """Both user intensities vanish, so the typical-user mixture is undefined"""

    def __init__(self, message: str = "lambda_u + lambda_l*mu_u must be positive", **kwargs):
        super().__init__(message, code="DEGENERATE_WEIGHTS", **kwargs)


class ExperimentException(CoxCellException):
    """Exception for experiment execution errors"""

    def __init__(self, message: str, experiment: Optional[str] = None, **kwargs):
        super().__init__(message, code="EXPERIMENT_ERROR", **kwargs)
        self.experiment = experiment
