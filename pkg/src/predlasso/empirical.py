"""Rolling one-step-ahead forecasts of long-horizon returns on a monthly panel.

Timing contract: a window ending at month ``t`` fits long-horizon
returns whose constituent months all lie inside the window (start
indices ``t - window + 1 .. t - h_months + 1``), then forecasts the
return starting at month ``t + 1`` from that month's predictor row.
Nothing dated after the forecast-target start month enters the fit or
the tuning, so corrupting month ``s`` leaves every forecast with target
before ``s`` bit-identical.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from .core import Family, TimeSeriesDataset, ols_fit
from .estimators import fit_family, rwwd_forecast
from .exceptions import (
    DomainError,
    LengthMismatch,
    MissingColumn,
    NonFiniteValue,
    NonMonotoneDates,
    PredlassoError,
    SeriesTooShort,
)
from .metrics import mpae as _mean_abs
from .metrics import mpse as _mean_sq
from .tuning import TuningConfig, bic_select, cv_select, penalty_level

#: Predictor columns every canonical panel must carry, in canonical order.
REQUIRED_PREDICTORS = ("dp", "dy", "ep", "tms", "dfy", "dfr", "bm", "tbl", "ltr", "svar", "infl")


@dataclass(frozen=True)
class HorizonSpec:
    """Forecast horizon in years; must amount to a whole number of months."""

    years: float

    @property
    def months(self) -> int:
        m = self.years * 12.0
        r = round(m)
        if r < 1 or abs(m - r) > 1e-9:
            raise DomainError(f"horizon {self.years} years is not a whole positive month count")
        return int(r)


@dataclass(frozen=True, eq=False)
class ReturnPanel:
    """Monthly excess-return panel with aligned predictor rows."""

    dates: pd.PeriodIndex
    ex_return: np.ndarray
    predictors: np.ndarray
    names: tuple[str, ...]
    source: str = ""

    def __post_init__(self) -> None:
        dates = pd.PeriodIndex(self.dates, freq="M")
        ex = np.ascontiguousarray(np.asarray(self.ex_return, dtype=np.float64))
        X = np.ascontiguousarray(np.asarray(self.predictors, dtype=np.float64))
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "ex_return", ex)
        object.__setattr__(self, "predictors", X)
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        n = len(dates)
        if ex.ndim != 1 or ex.shape[0] != n or X.ndim != 2 or X.shape[0] != n:
            raise LengthMismatch("dates, ex_return and predictors must share their length")
        if X.shape[1] != len(self.names):
            raise LengthMismatch(f"{len(self.names)} names for {X.shape[1]} predictor columns")
        if n == 0:
            raise SeriesTooShort("panel is empty")
        steps = np.diff(dates.asi8)
        if (steps != 1).any():
            where = int(np.flatnonzero(steps != 1)[0])
            raise NonMonotoneDates(f"dates must advance by one month; break after {dates[where]}")
        if not (np.isfinite(ex).all() and np.isfinite(X).all()):
            raise NonFiniteValue("panel contains non-finite entries")

    @property
    def n(self) -> int:
        return len(self.dates)


def _parse_month_index(values) -> pd.PeriodIndex:
    s = pd.Series(values)
    if pd.api.types.is_integer_dtype(s):
        # yyyymm integers
        years, months = s // 100, s % 100
        if ((months < 1) | (months > 12)).any():
            raise NonMonotoneDates("integer dates must be yyyymm")
        return pd.PeriodIndex.from_fields(year=years, month=months, freq="M")
    return pd.PeriodIndex(pd.to_datetime(s.astype(str)), freq="M")


def load_panel(path, *, source: str | None = None) -> ReturnPanel:
    """Read a monthly panel CSV into a :class:`ReturnPanel`.

    The file needs a ``date`` column (yyyymm integers or ISO strings) and
    either an ``ex_return`` column or both ``index_return`` and ``tbill``
    (their difference becomes the excess return).  All canonical
    predictor columns must be present; any further numeric columns are
    kept as extra predictors, canonical ones first.
    """
    frame = pd.read_csv(path, comment="#")
    frame.columns = [str(c).strip().lower() for c in frame.columns]
    if "date" not in frame.columns:
        raise MissingColumn("date")
    dates = _parse_month_index(frame["date"])

    if "ex_return" in frame.columns:
        ex = frame["ex_return"].to_numpy(dtype=np.float64)
        consumed = {"date", "ex_return"}
    elif "index_return" in frame.columns and "tbill" in frame.columns:
        ex = frame["index_return"].to_numpy(dtype=np.float64) - frame["tbill"].to_numpy(dtype=np.float64)
        consumed = {"date", "index_return", "tbill"}
    else:
        raise MissingColumn("ex_return (or index_return with tbill)")

    for name in REQUIRED_PREDICTORS:
        if name not in frame.columns:
            raise MissingColumn(name)
    extras = [c for c in frame.columns if c not in consumed and c not in REQUIRED_PREDICTORS]
    names = tuple(REQUIRED_PREDICTORS) + tuple(extras)
    X = frame[list(names)].to_numpy(dtype=np.float64)
    return ReturnPanel(
        dates=dates,
        ex_return=ex,
        predictors=X,
        names=names,
        source=source if source is not None else str(path),
    )


def long_horizon_return(ex_return, horizon: HorizonSpec | float) -> np.ndarray:
    """Forward sums of the excess return over the horizon.

    Entry ``i`` sums months ``i .. i + months - 1``; the result has
    ``n - months + 1`` entries.
    """
    h = horizon if isinstance(horizon, HorizonSpec) else HorizonSpec(float(horizon))
    hm = h.months
    x = np.asarray(ex_return, dtype=np.float64)
    if x.ndim != 1:
        raise LengthMismatch("ex_return must be 1-d")
    if not np.isfinite(x).all():
        raise NonFiniteValue("ex_return contains non-finite entries")
    if x.shape[0] < hm:
        raise SeriesTooShort(f"{x.shape[0]} months cannot form a {hm}-month return")
    cs = np.concatenate([[0.0], np.cumsum(x)])
    return cs[hm:] - cs[:-hm]


def ar1_coefficient(x) -> float:
    """First-order autoregressive slope (with intercept) of a series."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 3:
        raise SeriesTooShort("need at least 3 observations")
    A = np.column_stack([np.ones(arr.shape[0] - 1), arr[:-1]])
    sol, _, _, _ = np.linalg.lstsq(A, arr[1:], rcond=None)
    return float(sol[1])


@dataclass(frozen=True, eq=False)
class ForecastResult:
    """All rolling forecasts of one (estimator, window, horizon) run.

    Arrays are aligned with ``target_dates``; windows whose fit failed
    carry NaN entries, are flagged False in ``ok``, and are excluded from
    the error summaries.
    """

    family: Family
    window: int
    horizon: HorizonSpec
    target_dates: pd.PeriodIndex
    realized: np.ndarray
    forecast: np.ndarray
    ok: np.ndarray
    c_lambda: np.ndarray
    coefficients: np.ndarray
    names: tuple[str, ...]

    @property
    def failed_windows(self) -> int:
        return int((~self.ok).sum())

    @property
    def mpse(self) -> float:
        return _mean_sq(self.forecast[self.ok], self.realized[self.ok])

    @property
    def rmpse_x100(self) -> float:
        """Root mean squared forecast error, percent-of-return scale."""
        return 100.0 * float(np.sqrt(self.mpse))

    @property
    def mpae_x100(self) -> float:
        return 100.0 * _mean_abs(self.forecast[self.ok], self.realized[self.ok])


def _forecast_windows(args):
    """Forecasts for a batch of window-end indices (worker function)."""
    (ends, lr, X, names, window, hm, family, selector, grid, folds, gamma, fixed_c) = args
    k = len(ends)
    p = X.shape[1]
    forecast = np.full(k, np.nan)
    c_used = np.full(k, np.nan)
    coefs = np.full((k, p + 1), np.nan)
    ok = np.zeros(k, dtype=bool)
    for w, t in enumerate(ends):
        lo = t - window + 1
        hi = t - hm + 1
        y_fit = lr[lo : hi + 1]
        W_fit = X[lo : hi + 1]
        try:
            if family is Family.RWWD:
                forecast[w] = rwwd_forecast(y_fit)
                coefs[w, 0] = forecast[w]
                ok[w] = True
                continue
            ds = TimeSeriesDataset(y=y_fit, W=W_fit, names=names)
            if family is Family.OLS:
                fit = ols_fit(ds)
            else:
                if selector == "cv":
                    c = cv_select(ds, family, grid, folds, gamma)
                elif selector == "bic":
                    c = bic_select(ds, family, grid, gamma)
                else:
                    c = fixed_c
                c_used[w] = c
                lam = penalty_level(c, ds.n, family)
                fit = fit_family(ds, family, lam, gamma)
            forecast[w] = fit.intercept + X[t + 1] @ fit.coefficients
            coefs[w, 0] = fit.intercept
            coefs[w, 1:] = fit.coefficients
            ok[w] = True
        except PredlassoError:
            continue
    return forecast, c_used, coefs, ok


def rolling_forecast(
    panel: ReturnPanel,
    horizon: HorizonSpec | float,
    family: Family,
    window: int,
    tuning: TuningConfig | None = None,
    *,
    jobs: int = 1,
) -> ForecastResult:
    """Roll a fixed-width window through the panel, forecasting one step out.

    Each window refits the estimator from scratch; shrinkage families
    also rechoose their penalty constant inside the window per
    ``tuning``.  The forecast target is the long-horizon return starting
    the month after the window ends.
    """
    h = horizon if isinstance(horizon, HorizonSpec) else HorizonSpec(float(horizon))
    hm = h.months
    family = Family(family)
    tuning = tuning or TuningConfig()
    window = int(window)
    N = panel.n
    p = panel.predictors.shape[1]
    n_fit = window - hm + 1
    if family is not Family.RWWD and n_fit < p + 2:
        raise SeriesTooShort(f"window {window} leaves {n_fit} fitting rows for {p} predictors")
    if n_fit < 2:
        raise SeriesTooShort(f"window {window} too short for a {hm}-month horizon")
    last_end = N - hm - 1
    if last_end < window - 1:
        raise SeriesTooShort(f"panel has no complete window of {window} months plus a target")

    lr = long_horizon_return(panel.ex_return, h)
    ends = np.arange(window - 1, last_end + 1)
    args_common = (lr, panel.predictors, panel.names, window, hm, family,
                   tuning.selector, tuning.grid, tuning.folds, tuning.gamma, tuning.c_lambda)

    if jobs > 1 and len(ends) > 1:
        chunks = [c for c in np.array_split(ends, min(jobs * 4, len(ends))) if c.size]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_forecast_windows, [(c, *args_common) for c in chunks]))
        forecast = np.concatenate([p_[0] for p_ in parts])
        c_used = np.concatenate([p_[1] for p_ in parts])
        coefs = np.concatenate([p_[2] for p_ in parts])
        ok = np.concatenate([p_[3] for p_ in parts])
    else:
        forecast, c_used, coefs, ok = _forecast_windows((ends, *args_common))

    targets = ends + 1
    return ForecastResult(
        family=family,
        window=window,
        horizon=h,
        target_dates=panel.dates[targets],
        realized=lr[targets],
        forecast=forecast,
        ok=ok,
        c_lambda=c_used,
        coefficients=coefs,
        names=panel.names,
    )


def _write_csv(path, header_lines, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def _fmt(v) -> str:
    return repr(float(v))


def write_forecast_csv(results: Sequence[ForecastResult], path, header_lines=None) -> None:
    """One row per forecast: estimator, window, horizon, target, values."""
    rows = []
    for res in results:
        for i, date in enumerate(res.target_dates):
            rows.append(
                [res.family.value, res.window, res.horizon.months, str(date),
                 _fmt(res.realized[i]), _fmt(res.forecast[i])]
            )
    _write_csv(path, header_lines,
               ["estimator", "window_months", "horizon_months", "target_month", "realized", "forecast"],
               rows)


def write_forecast_metrics_csv(results: Sequence[ForecastResult], path, header_lines=None) -> None:
    """Accuracy summary, one row per (window, horizon), estimators as columns."""
    families = []
    for res in results:
        if res.family not in families:
            families.append(res.family)
    keys = sorted({(res.window, res.horizon.months) for res in results})
    by_key = {(res.window, res.horizon.months, res.family): res for res in results}
    columns = ["window_months", "horizon_months"]
    for fam in families:
        columns += [f"rmpse_x100_{fam.value}", f"mpae_x100_{fam.value}"]
    rows = []
    for window, hm in keys:
        row = [window, hm]
        for fam in families:
            res = by_key.get((window, hm, fam))
            row += ["", ""] if res is None else [_fmt(res.rmpse_x100), _fmt(res.mpae_x100)]
        rows.append(row)
    _write_csv(path, header_lines, columns, rows)


def write_coefficient_csv(result: ForecastResult, path, header_lines=None) -> None:
    """Per-window coefficient trace of one rolling run."""
    columns = ["target_month", "c_lambda", "intercept", *result.names]
    rows = []
    for i, date in enumerate(result.target_dates):
        rows.append([str(date), _fmt(result.c_lambda[i]), *(_fmt(v) for v in result.coefficients[i])])
    _write_csv(path, header_lines, columns, rows)
