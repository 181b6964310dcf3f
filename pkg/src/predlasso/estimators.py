"""Estimators built on the weighted L1 solver.

All regression estimators include an unpenalized intercept.  The
adaptive variants derive their weights from a pilot least-squares fit;
pilot coefficients indistinguishable from zero (|b| < ZERO_EPS) give an
infinite weight, which excludes the coordinate outright.
"""

from __future__ import annotations

import warnings

import numpy as np

from .core import (
    Family,
    FitResult,
    PenaltySpec,
    TimeSeriesDataset,
    ols_fit,
    weighted_lasso_solve,
)
from .exceptions import ConstantColumnWarning, EmptyWindow, MissingTruth, NonFiniteValue

ZERO_EPS = 1e-10


def _adaptive_weights(pilot_coef: np.ndarray, gamma: float) -> np.ndarray:
    absb = np.abs(pilot_coef)
    out = np.full(absb.shape, np.inf)
    big = absb >= ZERO_EPS
    out[big] = absb[big] ** (-gamma)
    return out


def plasso_fit(data: TimeSeriesDataset, lam: float, *, theta0=None, tol: float = 1e-8) -> FitResult:
    """LASSO with unit weights on every coordinate."""
    penalty = PenaltySpec(Family.PLASSO, lam, np.ones(data.p))
    return weighted_lasso_solve(data, penalty, theta0=theta0, tol=tol)


def slasso_fit(data: TimeSeriesDataset, lam: float, *, theta0=None, tol: float = 1e-8) -> FitResult:
    """LASSO weighted by each column's standard deviation (1/n divisor).

    Equivalent to a plain LASSO on standardized columns.  A constant
    column gets weight zero; its centered values vanish, the coefficient
    is forced to zero, and a ConstantColumnWarning is emitted.
    """
    sd = np.std(data.W, axis=0)
    if (sd == 0.0).any():
        cols = np.flatnonzero(sd == 0.0).tolist()
        warnings.warn(f"constant columns {cols}: coefficients forced to zero", ConstantColumnWarning)
    penalty = PenaltySpec(Family.SLASSO, lam, sd)
    return weighted_lasso_solve(data, penalty, theta0=theta0, tol=tol)


def alasso_fit(
    data: TimeSeriesDataset,
    lam: float,
    gamma: float = 1.0,
    *,
    pilot: FitResult | None = None,
    theta0=None,
    tol: float = 1e-8,
) -> FitResult:
    """Adaptive LASSO with weights ``|b_j|^-gamma`` from a pilot OLS fit.

    ``pilot`` may supply a precomputed full-design least-squares fit;
    otherwise one is computed here.
    """
    if pilot is None:
        pilot = ols_fit(data)
    penalty = PenaltySpec(Family.ALASSO, lam, _adaptive_weights(pilot.coefficients, gamma), gamma)
    return weighted_lasso_solve(data, penalty, theta0=theta0, tol=tol)


def talasso_fit(
    data: TimeSeriesDataset,
    lam: float,
    gamma: float = 1.0,
    *,
    pilot: FitResult | None = None,
    theta0=None,
    tol: float = 1e-8,
) -> FitResult:
    """Two-stage adaptive LASSO.

    Stage one is the adaptive LASSO.  Its selected columns are refit by
    least squares, the refit coefficients produce fresh adaptive weights,
    and a second weighted LASSO restricted to those columns runs with the
    same ``lam``.  An empty first-stage selection short-circuits to the
    mean-only fit.  ``stage_detail`` carries the stage-one result, and
    the final active set is always a subset of the stage-one one.
    """
    stage1 = alasso_fit(data, lam, gamma, pilot=pilot, theta0=theta0, tol=tol)
    if not stage1.active_set:
        intercept = float(np.mean(data.y))
        resid = data.y - intercept
        return FitResult(
            coefficients=np.zeros(data.p),
            intercept=intercept,
            active_set=(),
            objective=float(resid @ resid),
            iterations=0,
            converged=stage1.converged,
            stage_detail=stage1,
        )
    post = ols_fit(data, subset=stage1.active_set)
    weights = _adaptive_weights(post.coefficients, gamma)
    # columns outside the stage-one selection stay excluded
    mask = np.ones(data.p, dtype=bool)
    mask[list(stage1.active_set)] = False
    weights[mask] = np.inf
    penalty = PenaltySpec(Family.TALASSO, lam, weights, gamma)
    fit = weighted_lasso_solve(data, penalty, tol=tol)
    return FitResult(
        coefficients=fit.coefficients,
        intercept=fit.intercept,
        active_set=fit.active_set,
        objective=fit.objective,
        iterations=fit.iterations,
        converged=fit.converged and stage1.converged,
        stage_detail=stage1,
    )


def oracle_fit(data: TimeSeriesDataset) -> FitResult:
    """Least squares restricted to the true active set (simulated data only)."""
    if data.truth is None:
        raise MissingTruth("oracle_fit needs a dataset with truth attached")
    return ols_fit(data, subset=data.truth.active_set)


def rwwd_forecast(y_window) -> float:
    """Random-walk-with-drift benchmark: the window mean of the target.

    >>> rwwd_forecast([1.0, 2.0, 3.0])
    2.0
    """
    arr = np.asarray(y_window, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyWindow("forecast window must be a nonempty 1-d array")
    if not np.isfinite(arr).all():
        raise NonFiniteValue("forecast window contains non-finite entries")
    return float(arr.mean())


def fit_family(
    data: TimeSeriesDataset,
    family: Family,
    lam: float = 0.0,
    gamma: float = 1.0,
    *,
    pilot: FitResult | None = None,
    theta0=None,
) -> FitResult:
    """Dispatch a regression fit by family name.

    ``lam`` and ``gamma`` are ignored by OLS and the oracle.  The
    random-walk benchmark is not a regression and is rejected here.
    """
    family = Family(family)
    if family is Family.PLASSO:
        return plasso_fit(data, lam, theta0=theta0)
    if family is Family.SLASSO:
        return slasso_fit(data, lam, theta0=theta0)
    if family is Family.ALASSO:
        return alasso_fit(data, lam, gamma, pilot=pilot, theta0=theta0)
    if family is Family.TALASSO:
        return talasso_fit(data, lam, gamma, pilot=pilot, theta0=theta0)
    if family is Family.OLS:
        return ols_fit(data)
    if family is Family.ORACLE:
        return oracle_fit(data)
    raise ValueError(f"{family.value} does not define a regression fit")
