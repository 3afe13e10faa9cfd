"""
Network model vocabulary: parameters, roads, Cox points, Palm scenarios
"""

import math
from enum import Enum
from typing import Any, Dict, Mapping, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from coxcell.core.exceptions import ConfigurationException, DegenerateWeightsException


class PalmScenario(str, Enum):
    """Which typical user sits at the origin"""

    TYPICAL_PLANAR_USER = "planar"
    TYPICAL_VEHICULAR_USER = "vehicular"


class AssociationEvent(str, Enum):
    """Tier of the nearest base station X*"""

    TO_PLANAR = "planar"
    TO_VEHICULAR = "vehicular"

    @property
    def complement(self) -> "AssociationEvent":
        if self is AssociationEvent.TO_PLANAR:
            return AssociationEvent.TO_VEHICULAR
        return AssociationEvent.TO_PLANAR


class AngularMeasure(str, Enum):
    """Distribution of road directions"""

    ISOTROPIC = "isotropic"
    MANHATTAN = "manhattan"


class LinkType(str, Enum):
    """Downlink type, named serving tier first then user tier"""

    V2V = "V2V"
    I2V = "I2V"
    V2I = "V2I"
    I2I = "I2I"

    @property
    def scenario(self) -> PalmScenario:
        if self in (LinkType.V2V, LinkType.I2V):
            return PalmScenario.TYPICAL_VEHICULAR_USER
        return PalmScenario.TYPICAL_PLANAR_USER

    @property
    def association(self) -> AssociationEvent:
        if self in (LinkType.V2V, LinkType.V2I):
            return AssociationEvent.TO_VEHICULAR
        return AssociationEvent.TO_PLANAR


def threshold_from_db(db: float) -> float:
    """Convert an SIR threshold from dB to linear"""
    return float(10.0 ** (db / 10.0))


def threshold_to_db(linear: float) -> float:
    """Convert a linear SIR threshold to dB"""
    return float(10.0 * math.log10(linear))


_INTENSITY_FIELDS = ("lambda_b", "lambda_u", "lambda_l", "mu_b", "mu_u")


class NetworkConfig(BaseModel):
    """Model parameters. Lengths in km, intensities per km or per km^2, threshold linear."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_b: float = Field(..., description="planar BS intensity, 1/km^2")
    lambda_u: float = Field(0.0, description="planar user intensity, 1/km^2")
    lambda_l: float = Field(..., description="line process intensity, 1/km")
    mu_b: float = Field(..., description="vehicular BS intensity per line, 1/km")
    mu_u: float = Field(0.0, description="vehicular user intensity per line, 1/km")
    alpha: float = Field(4.0, description="path-loss exponent")
    tx_power: float = Field(1.0, description="transmit power, linear")
    threshold: float = Field(1.0, description="SIR threshold, linear")

    @field_validator(*_INTENSITY_FIELDS)
    @classmethod
    def validate_intensity(cls, v, info):
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"{info.field_name} must be ≥ 0")
        return v

    @field_validator("alpha")
    @classmethod
    def validate_alpha(cls, v):
        if not math.isfinite(v) or v <= 2:
            raise ValueError("alpha must exceed 2")
        return v

    @field_validator("threshold")
    @classmethod
    def validate_threshold(cls, v):
        if not v > 0:
            raise ValueError("threshold must be > 0")
        return v

    @field_validator("tx_power")
    @classmethod
    def validate_tx_power(cls, v):
        if not v > 0:
            raise ValueError("tx_power must be > 0")
        return v

    @property
    def vehicular_bs_intensity(self) -> float:
        return self.lambda_l * self.mu_b

    @property
    def total_bs_intensity(self) -> float:
        return self.lambda_b + self.lambda_l * self.mu_b

    @property
    def threshold_db(self) -> float:
        return threshold_to_db(self.threshold)

    @property
    def user_weights(self) -> Tuple[float, float]:
        """Palm mixture weights (planar user, vehicular user)"""
        vehicular = self.lambda_l * self.mu_u
        total = self.lambda_u + vehicular
        if total <= 0:
            raise DegenerateWeightsException()
        return self.lambda_u / total, vehicular / total

    def with_updates(self, **changes: Any) -> "NetworkConfig":
        """Validated copy with some fields replaced"""
        data = self.model_dump()
        data.update(changes)
        return validate_config(data)


def validate_config(config: Union[NetworkConfig, Mapping[str, Any]]) -> NetworkConfig:
    """Validate a raw parameter set, reporting the first violated constraint by name"""
    if isinstance(config, NetworkConfig):
        return config
    try:
        return NetworkConfig(**dict(config))
    except ValidationError as e:
        first = e.errors()[0]
        field = str(first["loc"][0]) if first.get("loc") else None
        message = str(first.get("msg", e)).removeprefix("Value error, ")
        raise ConfigurationException(message, config_field=field, details={"errors": len(e.errors())})


class LineParams(BaseModel):
    """Point (r, theta) of the cylinder R x [0, pi) encoding one road"""

    model_config = ConfigDict(frozen=True)

    r: float
    theta: float

    @field_validator("theta")
    @classmethod
    def validate_theta(cls, v):
        if not 0.0 <= v < math.pi:
            raise ValueError("theta must lie in [0, pi)")
        return v


class CoxPoint(BaseModel):
    """Vehicular base station: road plus signed arc offset from the road's foot point"""

    model_config = ConfigDict(frozen=True)

    line: LineParams
    t: float
    xy: Tuple[float, float]


def line_point(line: LineParams, t: float) -> CoxPoint:
    """Rotate (t, r) by the road angle: the foot point sits at distance |r|, so ||xy||^2 = t^2 + r^2"""
    c, s = math.cos(line.theta), math.sin(line.theta)
    xy = (t * c - line.r * s, t * s + line.r * c)
    return CoxPoint(line=line, t=t, xy=xy)


def line_points(r: np.ndarray, theta: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Vectorised line_point returning an (n, 2) array of coordinates"""
    c, s = np.cos(theta), np.sin(theta)
    return np.column_stack((t * c - r * s, t * s + r * c))


def config_summary(config: NetworkConfig) -> Dict[str, float]:
    """Flat parameter record with the threshold in dB"""
    data = config.model_dump()
    data["threshold_db"] = config.threshold_db
    return data
