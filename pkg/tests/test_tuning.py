"""Penalty schedules, grids, fold layout, and the two constant selectors."""

import math

import numpy as np
import pytest

from predlasso import (
    AllCandidatesFailed,
    Design,
    DgpSpec,
    DomainError,
    Family,
    TimeSeriesDataset,
    TuningConfig,
    bic_select,
    calibrate_clambda,
    cv_select,
    default_grid,
    fit_family,
    fold_blocks,
    lambda_schedule,
    load_calibration,
    mpse,
    penalty_level,
    save_calibration,
    simulate,
)


def test_lambda_schedule_formulas():
    assert lambda_schedule(0.00563, 200, Family.PLASSO) == 0.00563 * math.sqrt(200)
    assert lambda_schedule(0.00563, 200, Family.SLASSO) == 0.00563 * math.sqrt(200)
    val = lambda_schedule(0.1, 200, Family.ALASSO)
    assert val == 0.1 * math.sqrt(200) / math.log(math.log(200))
    assert lambda_schedule(0.1, 200, Family.TALASSO) == val
    # log(log 200) ~ 1.667 > 1, so the adaptive rate sits below sqrt(n) at equal c
    assert val < 0.1 * math.sqrt(200)


def test_lambda_schedule_domain():
    with pytest.raises(DomainError):
        lambda_schedule(0.1, 1, Family.ALASSO)
    with pytest.raises(DomainError):
        lambda_schedule(0.1, 2, Family.ALASSO)  # log(log 2) < 0
    assert lambda_schedule(0.1, 3, Family.ALASSO) > 0
    assert lambda_schedule(0.1, 2, Family.PLASSO) == 0.1 * math.sqrt(2)
    for bad_c in (0.0, -1.0, np.inf, np.nan):
        with pytest.raises(ValueError):
            lambda_schedule(bad_c, 100, Family.PLASSO)
    with pytest.raises(ValueError):
        lambda_schedule(0.1, 0, Family.PLASSO)
    with pytest.raises(ValueError):
        lambda_schedule(0.1, 100, Family.OLS)


def test_penalty_level_is_n_times_schedule():
    for fam in (Family.PLASSO, Family.ALASSO):
        for n in (40, 200, 800):
            assert penalty_level(0.02, n, fam) == n * lambda_schedule(0.02, n, fam)
    assert round(penalty_level(0.00563, 200, Family.PLASSO), 4) == 15.924


def test_default_grid():
    g = default_grid()
    assert len(g) == 30
    assert g[0] == pytest.approx(1e-5) and g[-1] == pytest.approx(1.0)
    assert all(a < b for a, b in zip(g, g[1:]))
    ratios = [b / a for a, b in zip(g, g[1:])]
    assert max(ratios) - min(ratios) < 1e-9  # geometric spacing
    with pytest.raises(ValueError):
        default_grid(bounds=(0.0, 1.0))
    with pytest.raises(ValueError):
        default_grid(bounds=(2.0, 1.0))


def test_tuning_config_validation():
    cfg = TuningConfig(selector="cv", grid=(0.3, 0.1, 0.2))
    assert cfg.grid == (0.1, 0.2, 0.3)
    with pytest.raises(ValueError):
        TuningConfig(selector="nope")
    with pytest.raises(ValueError):
        TuningConfig(selector="fixed")
    assert TuningConfig(selector="fixed", c_lambda=0.05).c_lambda == 0.05


def test_fold_blocks():
    blocks = fold_blocks(35, 10)
    assert len(blocks) == 10
    sizes = [len(b) for b in blocks]
    assert max(sizes) - min(sizes) <= 1
    np.testing.assert_array_equal(np.concatenate(blocks), np.arange(35))
    # blocks are consecutive runs
    for b in blocks:
        np.testing.assert_array_equal(b, np.arange(b[0], b[-1] + 1))
    with pytest.raises(ValueError):
        fold_blocks(35, 1)
    with pytest.raises(ValueError):
        fold_blocks(29, 10)


def brute_cv(data, family, grid, folds=10, gamma=1.0):
    """Plain reimplementation of blocked CV, no warm starts or pilot reuse."""
    blocks = fold_blocks(data.n, folds)
    all_rows = np.arange(data.n)
    best_c, best_loss = None, np.inf
    for c in sorted(grid):
        fold_losses = []
        for block in blocks:
            train = data.take_rows(np.setdiff1d(all_rows, block))
            lam = penalty_level(c, train.n, family)
            fit = fit_family(train, family, lam, gamma)
            fold_losses.append(mpse(fit.predict(data.W[block]), data.y[block]))
        loss = float(np.mean(fold_losses))
        if loss <= best_loss:
            best_c, best_loss = c, loss
    return best_c


@pytest.mark.parametrize("family", [Family.PLASSO, Family.SLASSO, Family.TALASSO])
@pytest.mark.parametrize("seed", [2, 17])
def test_cv_select_matches_bruteforce(family, seed):
    full = simulate(DgpSpec(design=Design.DGP2, n=60, seed=seed))
    data = full.take_rows(slice(0, 60))
    grid = default_grid(8, (1e-4, 0.5))
    assert cv_select(data, family, grid) == brute_cv(data, family, grid)


def test_cv_tie_goes_to_larger_constant():
    full = simulate(DgpSpec(design=Design.DGP1, n=40, seed=4))
    data = full.take_rows(slice(0, 40))
    # both constants are large enough to zero every coefficient in every
    # fold, so their losses are bitwise equal
    assert cv_select(data, Family.PLASSO, grid=(1e6, 2e6)) == 2e6


def test_cv_rejects_unpenalized_families():
    full = simulate(DgpSpec(design=Design.DGP1, n=40, seed=4))
    with pytest.raises(ValueError):
        cv_select(full.take_rows(slice(0, 40)), Family.OLS)


def test_cv_all_candidates_failed():
    rng = np.random.default_rng(8)
    W = rng.standard_normal((60, 4))
    W[:, 3] = W[:, 2]  # singular pilot in every fold
    y = W[:, 0] + rng.standard_normal(60)
    data = TimeSeriesDataset(y=y, W=W)
    with pytest.raises(AllCandidatesFailed):
        cv_select(data, Family.ALASSO, grid=(0.01, 0.1))


def brute_bic(data, family, grid, gamma=1.0):
    n = data.n
    best_c, best_score = None, np.inf
    for c in sorted(grid):
        fit = fit_family(data, family, penalty_level(c, n, family), gamma)
        resid = data.y - fit.predict(data.W)
        score = n * math.log(float(resid @ resid) / n) + len(fit.active_set) * math.log(n)
        if score <= best_score:
            best_c, best_score = c, score
    return best_c


@pytest.mark.parametrize("family", [Family.PLASSO, Family.ALASSO])
@pytest.mark.parametrize("seed", [5, 23])
def test_bic_select_matches_bruteforce(family, seed):
    full = simulate(DgpSpec(design=Design.DGP2, n=80, seed=seed))
    data = full.take_rows(slice(0, 80))
    grid = default_grid(10, (1e-4, 0.5))
    assert bic_select(data, family, grid) == brute_bic(data, family, grid)


def test_bic_tie_goes_to_larger_constant():
    full = simulate(DgpSpec(design=Design.DGP1, n=40, seed=4))
    data = full.take_rows(slice(0, 40))
    assert bic_select(data, Family.PLASSO, grid=(1e6, 2e6)) == 2e6


def test_calibrate_clambda_smoke():
    grid = default_grid(6, (1e-4, 0.5))
    c = calibrate_clambda(
        Design.DGP1, Family.PLASSO, master_seed=5, reps=3, n=40, grid=grid
    )
    assert c in grid
    again = calibrate_clambda(
        Design.DGP1, Family.PLASSO, master_seed=5, reps=3, n=40, grid=grid
    )
    assert c == again
    other = calibrate_clambda(
        Design.DGP1, Family.SLASSO, master_seed=5, reps=3, n=40, grid=grid
    )
    assert other in grid  # distinct seed stream per family


def test_calibrate_lower_median():
    # 4 survivors -> index (4-1)//2 = 1, the lower of the middle pair
    vals = sorted([0.1, 0.4, 0.2, 0.3])
    assert vals[(len(vals) - 1) // 2] == 0.2


def test_calibration_roundtrip(tmp_path):
    entries = [
        {
            "design": "dgp1",
            "family": "plasso",
            "c_lambda": 0.0127,
            "reps": 100,
            "n": 200,
            "master_seed": 20260815,
        }
    ]
    path = tmp_path / "cal.json"
    save_calibration(path, entries)
    assert load_calibration(path) == entries
    with pytest.raises(ValueError):
        save_calibration(path, [{"design": "dgp1"}])
