"""
Validation utilities for experiment inputs
"""

import math
from typing import Any, Iterable, List, Sequence, Union

import yaml

from coxcell.core.exceptions import ValidationException


def parse_grid(raw: Union[str, Iterable[Any]], field: str = "grid") -> List[float]:
    """Parse '1,2,3' (or a YAML list) into floats"""
    if isinstance(raw, str):
        text = raw.strip()
        if not text:
            raise ValidationException("grid is empty", field=field)
        if text.startswith("["):
            try:
                raw = yaml.safe_load(text)
            except yaml.YAMLError as e:
                raise ValidationException(f"malformed grid {text!r}: {e}", field=field)
        else:
            raw = [part for part in text.split(",") if part.strip()]
    try:
        values = [float(v) for v in raw]
    except (TypeError, ValueError):
        raise ValidationException(f"grid values must be numbers: {raw!r}", field=field)
    return validate_grid(values, field=field)


def validate_grid(grid: Sequence[float], field: str = "grid") -> List[float]:
    """Grids are non-empty, finite and strictly increasing"""
    values = list(grid)
    if not values:
        raise ValidationException("grid is empty", field=field)
    if not all(math.isfinite(v) for v in values):
        raise ValidationException("grid values must be finite", field=field)
    for lo, hi in zip(values, values[1:]):
        if not hi > lo:
            raise ValidationException(f"grid must be strictly increasing ({lo} then {hi})", field=field)
    return values


def linear_grid(start: float, stop: float, count: int) -> List[float]:
    if count < 1:
        raise ValidationException("grid needs at least one point", field="grid")
    if count == 1:
        return [float(start)]
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]


def log_grid(start: float, stop: float, count: int) -> List[float]:
    if start <= 0 or stop <= 0:
        raise ValidationException("log grid needs positive limits", field="grid")
    return [10.0 ** v for v in linear_grid(math.log10(start), math.log10(stop), count)]


def validate_trials(n_trials: Any) -> int:
    try:
        n = int(n_trials)
    except (TypeError, ValueError):
        raise ValidationException(f"trial count must be an integer, got {n_trials!r}", field="trials")
    if n < 1:
        raise ValidationException("trial count must be at least 1", field="trials")
    return n


def validate_radii(grid: Sequence[float]) -> List[float]:
    values = validate_grid(grid, field="radius")
    if values[0] <= 0:
        raise ValidationException("radii must be positive", field="radius")
    return values
