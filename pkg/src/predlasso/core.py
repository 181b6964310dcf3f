"""Core types and the weighted L1 solver.

The central objective throughout the package is

    ||y - a*1 - W @ theta||^2 + lam * sum_j tau_j * |theta_j|

with an unpenalized intercept ``a`` (when requested) and nonnegative
per-coordinate weights ``tau``.  No ``1/n`` factor is applied to either
term, so ``lam`` here is the absolute penalty level.  The tuning layer
states its rate constants per unit of mean squared error and converts
them through ``tuning.penalty_level`` before calling in.  The solver is
cyclic coordinate descent on the centered problem, which is
algebraically equivalent to updating the intercept exactly at every
sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

import numba
import numpy as np

from .exceptions import DimensionMismatch, NonFiniteValue, SingularDesign

if TYPE_CHECKING:  # pragma: no cover
    from .dgp import TruthInfo

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100_000
KKT_TOL = 1e-6


class Family(str, Enum):
    """Estimator families understood by the fitting and tuning layers."""

    PLASSO = "plasso"
    SLASSO = "slasso"
    ALASSO = "alasso"
    TALASSO = "talasso"
    OLS = "ols"
    ORACLE = "oracle"
    RWWD = "rwwd"


#: Families whose penalty level is chosen by the tuning layer.
SHRINKAGE_FAMILIES = (Family.PLASSO, Family.SLASSO, Family.ALASSO, Family.TALASSO)


def _as_float_array(x, name: str, ndim: int) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if arr.ndim != ndim:
        raise DimensionMismatch(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeriesDataset:
    """A fixed design-and-response pair, ordered in time.

    Rows are observations in time order.  ``truth`` is populated by the
    simulators and is None for real data.
    """

    y: np.ndarray
    W: np.ndarray
    names: tuple[str, ...] | None = None
    truth: "TruthInfo | None" = None

    def __post_init__(self) -> None:
        y = _as_float_array(self.y, "y", 1)
        W = _as_float_array(self.W, "W", 2)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "W", W)
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"w{j}" for j in range(W.shape[1])))
        else:
            object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        n, p = W.shape
        if y.shape[0] != n:
            raise DimensionMismatch(f"y has {y.shape[0]} rows but W has {n}")
        if len(self.names) != p:
            raise DimensionMismatch(f"{len(self.names)} names for {p} columns")
        if n < p + 2:
            raise DimensionMismatch(f"need at least p + 2 = {p + 2} rows, got {n}")
        if not (np.isfinite(y).all() and np.isfinite(W).all()):
            raise NonFiniteValue("dataset contains non-finite entries")

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def p(self) -> int:
        return self.W.shape[1]

    def take_rows(self, rows) -> "TimeSeriesDataset":
        """New dataset restricted to the given row indexer (slice or index array)."""
        return TimeSeriesDataset(y=self.y[rows], W=self.W[rows], names=self.names, truth=self.truth)


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty for the weighted L1 objective.

    ``weights`` may contain ``+inf``: such coordinates are excluded from
    the model outright and their coefficients are exact zeros in any
    solution, regardless of ``lam``.
    """

    family: Family
    lam: float
    weights: np.ndarray
    gamma: float = 1.0

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise DimensionMismatch("weights must be a 1-d array")
        if np.isnan(w).any() or (w < 0).any():
            raise ValueError("weights must be nonnegative (inf allowed, NaN not)")
        object.__setattr__(self, "weights", w)
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lam must be finite and >= 0, got {self.lam}")
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of one fit.

    ``active_set`` lists the 0-based indices of exactly nonzero
    coefficients.  ``iterations`` is 0 for closed-form fits and the
    number of full coordinate sweeps otherwise.  ``stage_detail`` holds
    the first-stage result for two-stage estimators.
    """

    coefficients: np.ndarray
    intercept: float
    active_set: tuple[int, ...]
    objective: float
    iterations: int
    converged: bool
    stage_detail: "FitResult | None" = field(default=None, repr=False)

    def predict(self, W: np.ndarray) -> np.ndarray:
        """Fitted values ``intercept + W @ coefficients`` for rows of W."""
        W = np.asarray(W, dtype=np.float64)
        return self.intercept + W @ self.coefficients


def soft_threshold(z: float, t: float) -> float:
    """Soft-thresholding ``sign(z) * max(|z| - t, 0)`` for scalar inputs.

    >>> soft_threshold(3.0, 1.0)
    2.0
    >>> soft_threshold(-3.0, 1.0)
    -2.0
    >>> soft_threshold(0.5, 1.0)
    0.0
    """
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def sample_std(x) -> float:
    """Standard deviation with the 1/n divisor, ``sqrt(mean((x - mean(x))^2))``.

    >>> sample_std([2.0, 2.0, 2.0])
    0.0
    """
    arr = _as_float_array(x, "x", 1)
    if arr.size == 0:
        raise DimensionMismatch("need at least one observation")
    if not np.isfinite(arr).all():
        raise NonFiniteValue("non-finite entries")
    return float(np.std(arr))


@numba.njit(cache=True)
def _cd_sweeps(G, c, thresh, theta, tol, max_iter):  # pragma: no cover - compiled
    """Cyclic coordinate descent on the centered Gram system.

    G = Wc'Wc, c = Wc'yc, thresh_j = lam * tau_j / 2.  ``theta`` is
    updated in place.  Returns (sweeps, converged).  Stops when the
    largest coefficient change within a sweep falls below
    ``tol * max(1, ||theta||_inf)``.
    """
    p = G.shape[0]
    for it in range(1, max_iter + 1):
        max_delta = 0.0
        for j in range(p):
            gjj = G[j, j]
            if gjj <= 0.0:
                # zero column after centering: no effect on fit, keep at zero
                if theta[j] != 0.0:
                    d = abs(theta[j])
                    if d > max_delta:
                        max_delta = d
                    theta[j] = 0.0
                continue
            s = 0.0
            for k in range(p):
                s += G[j, k] * theta[k]
            rho = c[j] - s + gjj * theta[j]
            t = thresh[j]
            if rho > t:
                new = (rho - t) / gjj
            elif rho < -t:
                new = (rho + t) / gjj
            else:
                new = 0.0
            d = abs(new - theta[j])
            if d > max_delta:
                max_delta = d
            theta[j] = new
        max_abs = 1.0
        for j in range(p):
            a = abs(theta[j])
            if a > max_abs:
                max_abs = a
        if max_delta < tol * max_abs:
            return it, True
    return max_iter, False


def _center(W: np.ndarray, y: np.ndarray, include_intercept: bool):
    if include_intercept:
        xbar = W.mean(axis=0) if W.shape[1] else np.zeros(0)
        ybar = float(y.mean())
        return W - xbar, y - ybar, xbar, ybar
    return W, y, np.zeros(W.shape[1]), 0.0


def weighted_lasso_solve(
    data: TimeSeriesDataset,
    penalty: PenaltySpec,
    include_intercept: bool = True,
    *,
    theta0: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FitResult:
    """Minimize ``||y - a - W theta||^2 + lam * sum tau_j |theta_j|``.

    Coordinates with infinite weight are removed before solving and come
    back as exact zeros.  ``theta0`` warm-starts the sweeps (its entries
    at infinite-weight coordinates are ignored); the cold start is the
    zero vector.  The returned ``converged`` flag is False when the sweep
    budget ran out; the coefficients are still the last iterate.
    """
    tau = penalty.weights
    if tau.shape[0] != data.p:
        raise DimensionMismatch(f"{tau.shape[0]} weights for {data.p} columns")
    keep = np.isfinite(tau)
    Wk = np.ascontiguousarray(data.W[:, keep])
    Wc, yc, xbar, ybar = _center(Wk, data.y, include_intercept)

    k = Wk.shape[1]
    theta_sub = np.zeros(k)
    if theta0 is not None:
        t0 = _as_float_array(theta0, "theta0", 1)
        if t0.shape[0] != data.p:
            raise DimensionMismatch(f"theta0 has {t0.shape[0]} entries for {data.p} columns")
        if not np.isfinite(t0).all():
            raise NonFiniteValue("theta0 contains non-finite entries")
        theta_sub = t0[keep].copy()

    if k > 0:
        thresh = penalty.lam * tau[keep] / 2.0
        if not thresh.any():
            # nothing is penalized: the minimizer is plain least squares
            theta_sub, *_ = np.linalg.lstsq(Wc, yc, rcond=None)
            iterations, converged = 0, True
        else:
            G = Wc.T @ Wc
            cvec = Wc.T @ yc
            iterations, converged = _cd_sweeps(G, cvec, thresh, theta_sub, tol, int(max_iter))
            iterations, converged = int(iterations), bool(converged)
    else:
        iterations, converged = 0, True

    coefficients = np.zeros(data.p)
    coefficients[keep] = theta_sub
    intercept = float(ybar - xbar @ theta_sub) if include_intercept else 0.0
    resid = data.y - intercept - data.W @ coefficients
    pen = penalty.lam * float(np.sum(tau[keep] * np.abs(theta_sub)))
    return FitResult(
        coefficients=coefficients,
        intercept=intercept,
        active_set=tuple(int(j) for j in np.flatnonzero(coefficients)),
        objective=float(resid @ resid) + pen,
        iterations=iterations,
        converged=converged,
    )


def ols_fit(
    data: TimeSeriesDataset,
    subset=None,
    include_intercept: bool = True,
) -> FitResult:
    """Exact least squares on a column subset (all columns when None).

    Coefficients outside the subset are zero.  Raises
    :class:`SingularDesign` when the subset design is rank-deficient.
    An empty subset with an intercept gives the mean-only fit.
    """
    if subset is None:
        cols = np.arange(data.p)
    else:
        cols = np.unique(np.asarray(list(subset), dtype=np.int64))
        if cols.size and (cols[0] < 0 or cols[-1] >= data.p):
            raise DimensionMismatch(f"subset indices out of range for p={data.p}")
    A = data.W[:, cols]
    Ac, yc, xbar, ybar = _center(A, data.y, include_intercept)

    coefficients = np.zeros(data.p)
    if cols.size:
        sol, _, rank, _ = np.linalg.lstsq(Ac, yc, rcond=None)
        if rank < cols.size:
            raise SingularDesign(
                f"design with columns {cols.tolist()} has rank {rank} < {cols.size}"
            )
        coefficients[cols] = sol
        intercept = float(ybar - xbar @ sol) if include_intercept else 0.0
    else:
        intercept = ybar if include_intercept else 0.0
    resid = data.y - intercept - data.W @ coefficients
    return FitResult(
        coefficients=coefficients,
        intercept=intercept,
        active_set=tuple(int(j) for j in np.flatnonzero(coefficients)),
        objective=float(resid @ resid),
        iterations=0,
        converged=True,
    )


def kkt_scale(data: TimeSeriesDataset) -> float:
    """Problem scale ``max(1, ||2 W'y||_inf)`` used to normalize KKT checks."""
    if data.p == 0:
        return 1.0
    return max(1.0, float(np.abs(2.0 * data.W.T @ data.y).max()))


def kkt_violation(data: TimeSeriesDataset, fit: FitResult, penalty: PenaltySpec) -> float:
    """Largest stationarity violation of a fit, in objective-gradient units.

    For active coordinates this is ``|2 w_j'r - lam tau_j sign(theta_j)|``;
    for inactive ones, the excess of ``|2 w_j'r|`` over the allowance
    ``lam tau_j``.  Coordinates with infinite weight have infinite
    allowance at zero and infinite violation otherwise.  Compare against
    ``KKT_TOL * kkt_scale(data)``.
    """
    tau = penalty.weights
    if tau.shape[0] != data.p:
        raise DimensionMismatch(f"{tau.shape[0]} weights for {data.p} columns")
    theta = fit.coefficients
    r = data.y - fit.intercept - data.W @ theta
    g = 2.0 * data.W.T @ r
    allowance = np.where(np.isinf(tau), np.inf, penalty.lam * tau)
    worst = 0.0
    for j in range(data.p):
        if theta[j] != 0.0:
            if np.isinf(tau[j]):
                return float("inf")
            v = abs(g[j] - penalty.lam * tau[j] * np.sign(theta[j]))
        else:
            v = max(0.0, abs(g[j]) - allowance[j])
        if v > worst:
            worst = float(v)
    return worst
