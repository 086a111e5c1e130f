"""Column statistics shared by the sortability metrics and the learners."""
from __future__ import annotations

import logging

import numpy as np

logger = logging.getLogger(__name__)

# Values closer than this are treated as ties; standardized columns have
# variances equal to 1 only up to rounding.
VARIANCE_RTOL = 1e-9
R2_ATOL = 1e-9
RIDGE_COND_LIMIT = 1e12
RIDGE_FACTOR = 1e-6


def is_close(a: float, b: float, atol: float = 0.0, rtol: float = 0.0) -> bool:
    return abs(a - b) <= atol + rtol * max(abs(a), abs(b))


def strictly_less(
    a: float, b: float, atol: float = 0.0, rtol: float = 0.0
) -> bool:
    return a < b and not is_close(a, b, atol, rtol)


def ascending_order(
    values: np.ndarray, atol: float = 0.0, rtol: float = 0.0
) -> tuple[int, ...]:
    """Indices sorted by value; near-equal runs keep index order."""
    values = np.asarray(values, dtype=float)
    by_value = np.argsort(values, kind="stable")
    group = np.empty(values.size, dtype=int)
    current = 0
    for position, node in enumerate(by_value):
        previous = by_value[position - 1] if position else None
        if previous is not None and not is_close(
            values[previous], values[node], atol, rtol
        ):
            current += 1
        group[node] = current
    order = np.lexsort((np.arange(values.size), group))
    return tuple(int(node) for node in order)


def column_variances(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 2:
        return np.zeros(values.shape[1])
    return values.var(axis=0, ddof=1)


def r2_coefficients(values: np.ndarray) -> np.ndarray:
    """R² of regressing each column on all others (with intercept).

    Uses ``R²_i = 1 - 1 / (S_ii * P_ii)`` with ``P`` the inverse sample
    covariance; a ridge of ``1e-6 * trace / d`` is added when the
    covariance is badly conditioned. Constant columns get R² 0 and are left
    out of the other regressions.
    """
    values = np.asarray(values, dtype=float)
    d = values.shape[1]
    if d < 2 or values.shape[0] < 2:
        return np.zeros(d)
    covariance = np.atleast_2d(np.cov(values, rowvar=False))
    live = np.diag(covariance) > 0
    r2 = np.zeros(d)
    if not live.all():
        logger.warning("Constant column in R² computation; R² set to 0.")
    if live.sum() < 2:
        return r2
    # constant columns carry no information once an intercept is fitted
    covariance = covariance[np.ix_(live, live)]
    if np.linalg.cond(covariance) > RIDGE_COND_LIMIT:
        ridge = RIDGE_FACTOR * np.trace(covariance) / len(covariance)
        logger.debug("Near-singular covariance, adding ridge %.3g", ridge)
        covariance = covariance + ridge * np.eye(len(covariance))
    try:
        precision = np.linalg.inv(covariance)
    except np.linalg.LinAlgError:
        precision = np.linalg.pinv(covariance, hermitian=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2[live] = 1.0 - 1.0 / (np.diag(covariance) * np.diag(precision))
    return np.clip(np.nan_to_num(r2), 0.0, 1.0)
