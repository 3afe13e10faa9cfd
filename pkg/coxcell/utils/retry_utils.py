"""
Retry policies for Monte Carlo resampling
"""

import logging
from typing import Optional

from tenacity import (
    RetryCallState,
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
)

from coxcell.core.config import settings
from coxcell.core.exceptions import EmptyRealizationException
from coxcell.core.logging import get_logger

logger = get_logger(__name__)


def _exhausted(retry_state: RetryCallState) -> None:
    attempts = retry_state.attempt_number
    logger.error(f"No base station in window after {attempts} attempts")
    raise EmptyRealizationException(
        f"realization empty after {attempts} attempts; intensities too small for the window",
        attempts=attempts,
    )


def empty_realization_retrying(max_attempts: Optional[int] = None) -> Retrying:
    """Resample immediately (no wait) while the draw raises EmptyRealizationException"""
    attempts = settings.MAX_RESAMPLE_ATTEMPTS if max_attempts is None else max_attempts
    return Retrying(
        stop=stop_after_attempt(attempts),
        retry=retry_if_exception_type(EmptyRealizationException),
        before_sleep=before_sleep_log(logger, logging.DEBUG),
        retry_error_callback=_exhausted,
    )

