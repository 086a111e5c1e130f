from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as slin
import scipy.optimize as sopt
from sklearn.linear_model import LinearRegression, lasso_path

from benchmark.exceptions import (
    CyclicGraphError,
    CyclicResultError,
    DimensionMismatchError,
    InvalidConfigError,
    InvalidParameterError,
)
from benchmark.graphs import (
    Dag,
    NodeOrder,
    sample_ordered_er_dag,
    topological_order,
)
from benchmark.simulation import Dataset, WeightedAdjacency
from benchmark.stats import (
    R2_ATOL,
    VARIANCE_RTOL,
    ascending_order,
    column_variances,
    r2_coefficients,
)

logger = logging.getLogger(__name__)

LASSO_PATH_LENGTH = 30
LASSO_PATH_RATIO = 1e-3


@dataclass(frozen=True, eq=False)
class DiscoveryResult:
    weights: WeightedAdjacency
    graph: Dag
    order: NodeOrder
    diagnostics: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class NoTearsParams:
    lambda1: float = 0.1
    prune_threshold: float = 0.3
    h_tol: float = 1e-8
    rho_max: float = 1e16
    max_dual_steps: int = 100
    max_inner_iters: int = 15000

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if value <= 0:
                raise InvalidParameterError(f"{name} must be positive.")


def var_sort_order(dataset: Dataset) -> NodeOrder:
    """Ascending marginal variance, ties in index order."""
    variances = column_variances(dataset.values)
    return NodeOrder(ascending_order(variances, rtol=VARIANCE_RTOL))


def r2_sort_order(dataset: Dataset) -> NodeOrder:
    """Ascending share of variance explained by all other variables."""
    return NodeOrder(
        ascending_order(r2_coefficients(dataset.values), atol=R2_ATOL)
    )


def lasso_bic_select(
    covariates: np.ndarray, target: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Support picked by BIC along a geometric lasso path, refit by OLS.

    Returns the selected column indices and their least-squares weights.
    """
    n = target.shape[0]
    x = covariates - covariates.mean(axis=0)
    y = target - target.mean()
    supports: list[tuple[int, ...]] = [()]
    alpha_max = float(np.max(np.abs(x.T @ y))) / n if x.size else 0.0
    if alpha_max > 0:
        alphas = np.geomspace(
            alpha_max, alpha_max * LASSO_PATH_RATIO, LASSO_PATH_LENGTH
        )
        _, coef_path, _ = lasso_path(x, y, alphas=alphas)
        for coefs in coef_path.T:
            support = tuple(int(i) for i in np.flatnonzero(coefs))
            if support not in supports:
                supports.append(support)

    best_bic, best_support, best_coefs = np.inf, (), np.zeros(0)
    regression = LinearRegression(fit_intercept=False)
    for support in supports:
        if support:
            regression.fit(x[:, support], y)
            coefs = regression.coef_.copy()
            residual = y - x[:, support] @ coefs
        else:
            coefs, residual = np.zeros(0), y
        rss = max(float(residual @ residual), np.finfo(float).tiny)
        bic = n * np.log(rss / n) + len(support) * np.log(n)
        if bic < best_bic:
            best_bic, best_support, best_coefs = bic, support, coefs
    return np.array(best_support, dtype=int), best_coefs


def sortnregress(
    dataset: Dataset, order: NodeOrder, prune: str = "lasso_bic"
) -> DiscoveryResult:
    """Regress every node on its predecessors in ``order``."""
    if prune != "lasso_bic":
        raise InvalidParameterError(f"Unknown pruning rule {prune!r}.")
    if len(order) != dataset.d:
        raise DimensionMismatchError("Order does not cover every variable.")
    values = dataset.values
    weights = np.zeros((dataset.d, dataset.d))
    perm = np.array(order.perm)
    for position in range(1, dataset.d):
        predecessors = perm[:position]
        target = perm[position]
        support, coefs = lasso_bic_select(
            values[:, predecessors], values[:, target]
        )
        weights[predecessors[support], target] = coefs
    estimate = WeightedAdjacency(weights)
    return DiscoveryResult(
        weights=estimate,
        graph=Dag(estimate.support()),
        order=order,
        diagnostics={"edges": float(np.count_nonzero(weights))},
    )


def r2_sortnregress(dataset: Dataset) -> DiscoveryResult:
    return sortnregress(dataset, r2_sort_order(dataset))


def var_sortnregress(dataset: Dataset) -> DiscoveryResult:
    return sortnregress(dataset, var_sort_order(dataset))


def h_acyclicity(weights: np.ndarray) -> tuple[float, np.ndarray]:
    """``tr(exp(W * W)) - d`` and its gradient ``exp(W * W)^T * 2W``.

    ``scipy.linalg.expm`` evaluates the exponential by scaling and squaring
    with a degree-13 Padé approximant.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise DimensionMismatchError(
            f"h(W) needs a square matrix, got shape {weights.shape}."
        )
    exp_hadamard = slin.expm(weights * weights)
    value = float(np.trace(exp_hadamard) - weights.shape[0])
    return value, exp_hadamard.T * weights * 2


def threshold_prune(weights: np.ndarray, tau: float) -> Dag:
    """Binary graph keeping entries with ``|w| > tau``."""
    if tau < 0:
        raise InvalidParameterError(f"Threshold {tau} must be >= 0.")
    return Dag(np.abs(np.asarray(weights, dtype=float)) > tau)


def notears_linear(
    dataset: Dataset, params: NoTearsParams | None = None
) -> DiscoveryResult:
    """Least-squares NoTears solved with the augmented Lagrangian method.

    The l1 term is made smooth by splitting ``W = W+ - W-`` with both parts
    nonnegative; L-BFGS-B handles the bounds and keeps the diagonal at 0.
    """
    params = params or NoTearsParams()
    n, d = dataset.n, dataset.d
    if n < 2 or d < 2:
        raise InvalidParameterError("NoTears needs n >= 2 and d >= 2.")
    x = dataset.values - dataset.values.mean(axis=0, keepdims=True)

    def _adj(w: np.ndarray) -> np.ndarray:
        return (w[: d * d] - w[d * d:]).reshape(d, d)

    def _loss(matrix: np.ndarray) -> tuple[float, np.ndarray]:
        residual = x - x @ matrix
        loss = 0.5 / n * float((residual ** 2).sum())
        return loss, -1.0 / n * x.T @ residual

    def _func(w: np.ndarray) -> tuple[float, np.ndarray]:
        matrix = _adj(w)
        loss, g_loss = _loss(matrix)
        h, g_h = h_acyclicity(matrix)
        objective = (
            loss + 0.5 * rho * h * h + alpha * h + params.lambda1 * w.sum()
        )
        g_smooth = g_loss + (rho * h + alpha) * g_h
        gradient = np.concatenate(
            (g_smooth + params.lambda1, -g_smooth + params.lambda1),
            axis=None,
        )
        return objective, gradient

    w_est, rho, alpha, h = np.zeros(2 * d * d), 1.0, 0.0, np.inf
    bounds = [
        (0, 0) if i == j else (0, None)
        for _ in range(2)
        for i in range(d)
        for j in range(d)
    ]
    dual_steps = 0
    for dual_steps in range(1, params.max_dual_steps + 1):
        w_new, h_new = w_est, h
        while rho < params.rho_max:
            solution = sopt.minimize(
                _func,
                w_est,
                method="L-BFGS-B",
                jac=True,
                bounds=bounds,
                options={"maxiter": params.max_inner_iters},
            )
            w_new = solution.x
            h_new, _ = h_acyclicity(_adj(w_new))
            logger.debug("rho=%.1e h=%.3e", rho, h_new)
            if h_new > 0.25 * h:
                rho *= 10
            else:
                break
        w_est, h = w_new, h_new
        alpha += rho * h
        if h <= params.h_tol or rho >= params.rho_max:
            break

    converged = h <= params.h_tol
    if not converged:
        logger.warning(
            "NoTears stopped with h=%.3e > %.1e (rho=%.1e)",
            h, params.h_tol, rho,
        )
    weights = _adj(w_est)
    np.fill_diagonal(weights, 0.0)
    loss, _ = _loss(weights)
    try:
        graph = threshold_prune(weights, params.prune_threshold)
    except CyclicGraphError as exc:
        raise CyclicResultError(
            "NoTears estimate is cyclic after thresholding."
        ) from exc
    return DiscoveryResult(
        weights=WeightedAdjacency(weights),
        graph=graph,
        order=topological_order(graph),
        diagnostics={
            "h": float(h),
            "dual_steps": float(dual_steps),
            "objective": loss + params.lambda1 * float(np.abs(weights).sum()),
            "rho": float(rho),
            "converged": float(converged),
        },
    )


def empty_baseline(dataset: Dataset) -> DiscoveryResult:
    d = dataset.d
    return DiscoveryResult(
        weights=WeightedAdjacency(np.zeros((d, d))),
        graph=Dag.empty(d),
        order=NodeOrder.identity(d),
    )


def fully_random_baseline(
    dataset: Dataset, rng: np.random.Generator, p: float = 0.2
) -> DiscoveryResult:
    """Random ER DAG at the run's edge density, with its random order."""
    graph, order = sample_ordered_er_dag(dataset.d, p, rng)
    return DiscoveryResult(
        weights=WeightedAdjacency(graph.adj.astype(float)),
        graph=graph,
        order=order,
    )


def truth_oracle(truth: Dag) -> DiscoveryResult:
    """Pseudo-learner returning the ground truth, the DOS ceiling."""
    return DiscoveryResult(
        weights=WeightedAdjacency(truth.adj.astype(float)),
        graph=truth,
        order=topological_order(truth),
    )


@dataclass(frozen=True, eq=False)
class LearnerContext:
    rng: np.random.Generator
    truth: Dag | None = None
    connectivity: float = 0.2
    notears: NoTearsParams = field(default_factory=NoTearsParams)


def _fit_truth(dataset: Dataset, context: LearnerContext) -> DiscoveryResult:
    if context.truth is None:
        raise InvalidConfigError("The truth oracle needs the true graph.")
    return truth_oracle(context.truth)


LEARNERS: dict[str, Callable[[Dataset, LearnerContext], DiscoveryResult]] = {
    "var_sortnregress": lambda ds, ctx: var_sortnregress(ds),
    "r2_sortnregress": lambda ds, ctx: r2_sortnregress(ds),
    "notears": lambda ds, ctx: notears_linear(ds, ctx.notears),
    "empty": lambda ds, ctx: empty_baseline(ds),
    "random": lambda ds, ctx: fully_random_baseline(
        ds, ctx.rng, ctx.connectivity
    ),
    "truth": _fit_truth,
}


def run_learner(
    name: str, dataset: Dataset, context: LearnerContext
) -> DiscoveryResult:
    try:
        learner = LEARNERS[name]
    except KeyError as exc:
        raise InvalidConfigError(f"Unknown learner {name!r}.") from exc
    return learner(dataset, context)
