"""Panel loading, horizon arithmetic, and the rolling forecast harness."""

import numpy as np
import pandas as pd
import pytest

from predlasso import (
    REQUIRED_PREDICTORS,
    Family,
    HorizonSpec,
    ReturnPanel,
    TuningConfig,
    ar1_coefficient,
    load_panel,
    long_horizon_return,
    rolling_forecast,
    write_coefficient_csv,
    write_forecast_csv,
    write_forecast_metrics_csv,
)
from predlasso.exceptions import (
    DomainError,
    LengthMismatch,
    MissingColumn,
    NonMonotoneDates,
    SeriesTooShort,
)


def make_panel(n=140, seed=0, extras=()):
    rng = np.random.default_rng(seed)
    names = REQUIRED_PREDICTORS + tuple(extras)
    X = rng.standard_normal((n, len(names)))
    ex = 0.01 * rng.standard_normal(n)
    return ReturnPanel(
        dates=pd.period_range("1990-01", periods=n, freq="M"),
        ex_return=ex,
        predictors=X,
        names=names,
    )


def replace_month(panel, i, ex_value):
    ex = panel.ex_return.copy()
    ex[i] = ex_value
    return ReturnPanel(
        dates=panel.dates, ex_return=ex, predictors=panel.predictors, names=panel.names
    )


def test_horizon_spec():
    assert HorizonSpec(1 / 12).months == 1
    assert HorizonSpec(0.25).months == 3
    assert HorizonSpec(3).months == 36
    with pytest.raises(DomainError):
        HorizonSpec(0.1).months
    with pytest.raises(DomainError):
        HorizonSpec(0.0).months


def test_long_horizon_return_values():
    out = long_horizon_return([1.0, 2.0, 3.0, 4.0], HorizonSpec(2 / 12))
    np.testing.assert_array_equal(out, [3.0, 5.0, 7.0])
    one = long_horizon_return([1.0, 2.0, 3.0], 1 / 12)
    np.testing.assert_array_equal(one, [1.0, 2.0, 3.0])
    with pytest.raises(SeriesTooShort):
        long_horizon_return([1.0, 2.0], 0.25)


def test_ar1_coefficient_exact():
    x = np.empty(50)
    x[0] = 0.0
    for t in range(1, 50):
        x[t] = 1.0 + 0.3 * x[t - 1]
    assert ar1_coefficient(x) == pytest.approx(0.3, abs=1e-9)
    with pytest.raises(SeriesTooShort):
        ar1_coefficient([1.0, 2.0])


def test_panel_validation():
    n = 30
    good = make_panel(n)
    with pytest.raises(NonMonotoneDates):
        ReturnPanel(
            dates=pd.PeriodIndex(list(good.dates[: n - 1]) + [good.dates[-1] + 5], freq="M"),
            ex_return=good.ex_return,
            predictors=good.predictors,
            names=good.names,
        )
    with pytest.raises(LengthMismatch):
        ReturnPanel(
            dates=good.dates,
            ex_return=good.ex_return[:-1],
            predictors=good.predictors,
            names=good.names,
        )
    with pytest.raises(LengthMismatch):
        ReturnPanel(
            dates=good.dates,
            ex_return=good.ex_return,
            predictors=good.predictors,
            names=good.names[:-1],
        )


def write_panel_csv(path, n=40, date_style="yyyymm", drop=(), split_return=True, extra=True):
    rng = np.random.default_rng(7)
    dates = pd.period_range("1995-01", periods=n, freq="M")
    cols = {}
    if date_style == "yyyymm":
        cols["date"] = [d.year * 100 + d.month for d in dates]
    else:
        cols["date"] = [str(d) for d in dates]
    if split_return:
        cols["index_return"] = rng.standard_normal(n).round(6)
        cols["tbill"] = rng.standard_normal(n).round(6)
    else:
        cols["ex_return"] = rng.standard_normal(n).round(6)
    for name in REQUIRED_PREDICTORS:
        if name not in drop:
            cols[name] = rng.standard_normal(n).round(6)
    if extra:
        cols["ntis"] = rng.standard_normal(n).round(6)
    pd.DataFrame(cols).to_csv(path, index=False)
    return cols


def test_load_panel(tmp_path):
    path = tmp_path / "panel.csv"
    cols = write_panel_csv(path)
    panel = load_panel(path)
    assert panel.names == REQUIRED_PREDICTORS + ("ntis",)
    assert panel.n == 40
    assert str(panel.dates[0]) == "1995-01"
    np.testing.assert_array_equal(
        panel.ex_return, np.array(cols["index_return"]) - np.array(cols["tbill"])
    )
    np.testing.assert_array_equal(panel.predictors[:, 0], cols["dp"])
    np.testing.assert_array_equal(panel.predictors[:, 11], cols["ntis"])

    iso = tmp_path / "iso.csv"
    write_panel_csv(iso, date_style="iso", split_return=False)
    panel2 = load_panel(iso)
    assert str(panel2.dates[0]) == "1995-01"

    missing = tmp_path / "missing.csv"
    write_panel_csv(missing, drop=("dp",))
    with pytest.raises(MissingColumn, match="dp"):
        load_panel(missing)

    noret = tmp_path / "noret.csv"
    frame = pd.read_csv(path)
    frame.drop(columns=["index_return"]).to_csv(noret, index=False)
    with pytest.raises(MissingColumn):
        load_panel(noret)


def test_rolling_rwwd_is_window_mean_of_horizon_returns():
    panel = make_panel(60)
    window, hm = 24, 3
    res = rolling_forecast(panel, hm / 12, Family.RWWD, window)
    lr = long_horizon_return(panel.ex_return, hm / 12)
    # first window ends at month index window-1
    t = window - 1
    expected = lr[t - window + 1 : t - hm + 2].mean()
    assert res.forecast[0] == expected
    assert res.realized[0] == lr[t + 1]
    assert str(res.target_dates[0]) == str(panel.dates[t + 1])
    assert len(res.forecast) == panel.n - hm - window + 1
    assert res.ok.all()


def test_rolling_ols_recovers_noiseless_relation():
    rng = np.random.default_rng(3)
    n, p = 90, len(REQUIRED_PREDICTORS)
    X = rng.standard_normal((n, p))
    beta = rng.standard_normal(p)
    ex = 0.2 + X @ beta  # exact linear relation at the one-month horizon
    panel = ReturnPanel(
        dates=pd.period_range("1980-01", periods=n, freq="M"),
        ex_return=ex,
        predictors=X,
        names=REQUIRED_PREDICTORS,
    )
    res = rolling_forecast(panel, 1 / 12, Family.OLS, window=40)
    assert res.ok.all()
    assert np.max(np.abs(res.forecast - res.realized)) < 1e-8
    assert res.mpse < 1e-18


def test_rolling_window_too_short():
    panel = make_panel(80)
    with pytest.raises(SeriesTooShort):
        rolling_forecast(panel, 1 / 12, Family.OLS, window=12)  # < p + 2 fit rows
    with pytest.raises(SeriesTooShort):
        rolling_forecast(panel, 1.0, Family.RWWD, window=80)  # no room for a target
    # rwwd has no design matrix, so a short window is fine
    res = rolling_forecast(panel, 1 / 12, Family.RWWD, window=5)
    assert res.ok.all()


@pytest.mark.parametrize("selector", ["cv", "bic", "fixed"])
def test_rolling_shrinkage_selectors(selector):
    panel = make_panel(100, seed=5)
    tuning = TuningConfig(
        selector=selector,
        grid=(0.005, 0.05, 0.5),
        folds=5,
        c_lambda=0.05 if selector == "fixed" else None,
    )
    res = rolling_forecast(panel, 1 / 12, Family.SLASSO, window=60, tuning=tuning)
    assert res.ok.all()
    used = res.c_lambda[res.ok]
    assert set(np.unique(used)) <= {0.005, 0.05, 0.5}
    if selector == "fixed":
        assert (used == 0.05).all()


def test_poisoned_future_leaves_earlier_forecasts_untouched():
    panel = make_panel(120, seed=9)
    window, hm = 60, 3
    tuning = TuningConfig(selector="cv", grid=(0.01, 0.1), folds=5)
    base = rolling_forecast(panel, hm / 12, Family.PLASSO, window, tuning=tuning)
    s = 100
    poisoned = rolling_forecast(
        replace_month(panel, s, 1e9), hm / 12, Family.PLASSO, window, tuning=tuning
    )
    early = np.flatnonzero(base.target_dates < panel.dates[s])
    assert early.size > 10
    np.testing.assert_array_equal(base.forecast[early], poisoned.forecast[early])
    np.testing.assert_array_equal(base.c_lambda[early], poisoned.c_lambda[early])
    # the corruption is visible downstream, so the test really poisoned something
    assert not np.array_equal(base.forecast, poisoned.forecast)


def test_rolling_jobs_match():
    panel = make_panel(100, seed=2)
    kw = dict(tuning=TuningConfig(selector="fixed", c_lambda=0.02))
    a = rolling_forecast(panel, 0.25, Family.PLASSO, 50, **kw)
    b = rolling_forecast(panel, 0.25, Family.PLASSO, 50, jobs=3, **kw)
    np.testing.assert_array_equal(a.forecast, b.forecast)
    np.testing.assert_array_equal(a.coefficients, b.coefficients)


def test_rmpse_scale():
    panel = make_panel(80, seed=4)
    res = rolling_forecast(panel, 1 / 12, Family.RWWD, window=30)
    assert res.rmpse_x100 == pytest.approx(100.0 * np.sqrt(res.mpse))


def test_forecast_csv_writers(tmp_path):
    panel = make_panel(90, seed=6)
    runs = [
        rolling_forecast(panel, 1 / 12, Family.RWWD, window=40),
        rolling_forecast(
            panel, 1 / 12, Family.PLASSO, window=40,
            tuning=TuningConfig(selector="fixed", c_lambda=0.02),
        ),
    ]
    fpath = tmp_path / "forecasts.csv"
    write_forecast_csv(runs, fpath, header_lines=["window: 40"])
    text = fpath.read_text()
    assert text.startswith("# window: 40\n")
    header, first = text.splitlines()[1:3]
    assert header == "estimator,window_months,horizon_months,target_month,realized,forecast"
    fields = first.split(",")
    assert fields[0] == "rwwd" and fields[1] == "40"
    assert float(fields[5]) == runs[0].forecast[0]

    mpath = tmp_path / "metrics.csv"
    write_forecast_metrics_csv(runs, mpath)
    lines = mpath.read_text().splitlines()
    assert lines[0].split(",")[2] == "rmpse_x100_rwwd"
    assert float(lines[1].split(",")[2]) == runs[0].rmpse_x100

    cpath = tmp_path / "coefs.csv"
    write_coefficient_csv(runs[1], cpath)
    assert cpath.read_text().splitlines()[0] == "target_month,c_lambda,intercept," + ",".join(panel.names)

    # rewriting produces identical bytes
    again = tmp_path / "forecasts2.csv"
    write_forecast_csv(runs, again, header_lines=["window: 40"])
    assert again.read_bytes() == fpath.read_bytes()
