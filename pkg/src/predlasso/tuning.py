"""Penalty-level schedules and data-driven choice of their constants.

The penalty level is never searched freely: each family follows a fixed
rate in the sample size, and only the multiplicative constant ``c`` is
tuned.  Plain and standardized fits use ``lam = c * sqrt(n)``; the
adaptive families use ``lam = c * sqrt(n) / log(log(n))`` (natural
logs).  Constants are chosen by blocked cross-validation on simulated
replications, or per-dataset by BIC.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import Family, SHRINKAGE_FAMILIES, TimeSeriesDataset
from .estimators import fit_family, ols_fit
from .exceptions import AllCandidatesFailed, DomainError, PredlassoError
from .metrics import mpse

DEFAULT_FOLDS = 10
DEFAULT_GRID_SIZE = 30
DEFAULT_GRID_BOUNDS = (1e-5, 1.0)


class Schedule(str, Enum):
    SQRT_N = "sqrt_n"
    SQRT_N_OVER_LOGLOG = "sqrt_n_over_loglog"


def schedule_for_family(family: Family) -> Schedule:
    family = Family(family)
    if family in (Family.PLASSO, Family.SLASSO):
        return Schedule.SQRT_N
    if family in (Family.ALASSO, Family.TALASSO):
        return Schedule.SQRT_N_OVER_LOGLOG
    raise ValueError(f"{family.value} has no penalty schedule")


def lambda_schedule(c: float, n: int, family: Family) -> float:
    """Penalty level for constant ``c`` at sample size ``n``.

    Raises DomainError when the adaptive rate's ``log(log(n))`` is not
    positive.
    """
    if not (np.isfinite(c) and c > 0):
        raise ValueError(f"c must be positive and finite, got {c}")
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if schedule_for_family(family) is Schedule.SQRT_N:
        return c * math.sqrt(n)
    if n == 1:
        raise DomainError("log(log(n)) undefined for n = 1")
    ll = math.log(math.log(n))
    if ll <= 0:
        raise DomainError(f"log(log(n)) = {ll} is not positive for n = {n}")
    return c * math.sqrt(n) / ll


def penalty_level(c: float, n: int, family: Family) -> float:
    """Fit-level penalty for constant ``c`` at sample size ``n``.

    The schedule constants are expressed per unit of mean squared error,
    while the solver objective sums squared errors, so the level handed
    to a fit is ``n * lambda_schedule(c, n, family)``.  Every component
    that turns a constant into an actual fit (cross-validation, BIC,
    the simulation and forecasting harnesses) goes through here.

    >>> round(penalty_level(0.00563, 200, Family.PLASSO), 4)
    15.924
    """
    return n * lambda_schedule(c, n, family)


def default_grid(
    size: int = DEFAULT_GRID_SIZE,
    bounds: tuple[float, float] = DEFAULT_GRID_BOUNDS,
) -> tuple[float, ...]:
    """Log-spaced candidate constants, ascending."""
    lo, hi = bounds
    if not (0 < lo < hi):
        raise ValueError(f"bad grid bounds {bounds}")
    return tuple(float(v) for v in np.geomspace(lo, hi, int(size)))


@dataclass(frozen=True)
class TuningConfig:
    """How to pick the penalty constant for one fit or per window.

    ``selector`` is "cv", "bic", or "fixed"; "fixed" uses ``c_lambda``
    directly.
    """

    selector: str = "cv"
    grid: tuple[float, ...] = field(default_factory=default_grid)
    folds: int = DEFAULT_FOLDS
    gamma: float = 1.0
    c_lambda: float | None = None

    def __post_init__(self) -> None:
        if self.selector not in ("cv", "bic", "fixed"):
            raise ValueError(f"unknown selector {self.selector!r}")
        if self.selector == "fixed" and not self.c_lambda:
            raise ValueError("selector 'fixed' needs c_lambda")
        object.__setattr__(self, "grid", tuple(sorted(float(c) for c in self.grid)))


def fold_blocks(n: int, folds: int) -> list[np.ndarray]:
    """Consecutive index blocks with sizes differing by at most one."""
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    if n < 3 * folds:
        raise ValueError(f"need n >= 3 * folds = {3 * folds}, got {n}")
    return np.array_split(np.arange(n), folds)


def _stage1_coefficients(fit) -> np.ndarray:
    detail = fit.stage_detail
    return detail.coefficients if detail is not None else fit.coefficients


def cv_select(
    data: TimeSeriesDataset,
    family: Family,
    grid=None,
    folds: int = DEFAULT_FOLDS,
    gamma: float = 1.0,
) -> float:
    """Choose the penalty constant by blocked cross-validation.

    The sample is cut into consecutive blocks; each block in turn is held
    out, the estimator is fit on the remaining observations with
    ``lam = penalty_level(c, n_train, family)``, and the block's mean
    squared prediction error is recorded.  The constant with the smallest
    mean across blocks wins; exact ties go to the larger constant.
    Candidates that fail in any fold are skipped; if none survives,
    AllCandidatesFailed is raised.
    """
    family = Family(family)
    if family not in SHRINKAGE_FAMILIES:
        raise ValueError(f"{family.value} takes no penalty constant")
    grid = tuple(sorted(float(c) for c in (grid if grid is not None else default_grid())))
    blocks = fold_blocks(data.n, folds)
    all_rows = np.arange(data.n)

    folds_data = []
    adaptive = family in (Family.ALASSO, Family.TALASSO)
    for block in blocks:
        train = np.setdiff1d(all_rows, block, assume_unique=True)
        train_ds = data.take_rows(train)
        pilot, poisoned = None, False
        if adaptive:
            try:
                pilot = ols_fit(train_ds)
            except PredlassoError:
                poisoned = True  # no pilot: every candidate fails on this fold
        folds_data.append((train_ds, block, pilot, poisoned))

    losses = np.full(len(grid), np.inf)
    # sweep large penalties first so each fold warm-starts the next candidate
    warm: list[np.ndarray | None] = [None] * len(folds_data)
    for gi in range(len(grid) - 1, -1, -1):
        c = grid[gi]
        fold_losses = np.empty(len(folds_data))
        ok = True
        for k, (train_ds, block, pilot, poisoned) in enumerate(folds_data):
            if poisoned:
                ok = False
                break
            try:
                lam = penalty_level(c, train_ds.n, family)
                fit = fit_family(train_ds, family, lam, gamma, pilot=pilot, theta0=warm[k])
            except PredlassoError:
                ok = False
                break
            warm[k] = _stage1_coefficients(fit)
            fold_losses[k] = mpse(fit.predict(data.W[block]), data.y[block])
        if ok:
            losses[gi] = fold_losses.mean()

    if not np.isfinite(losses).any():
        raise AllCandidatesFailed(f"no {family.value} candidate completed cross-validation")
    best = 0
    for gi in range(len(grid)):
        if losses[gi] <= losses[best]:
            best = gi  # ties resolve to the larger constant
    return grid[best]


def bic_select(
    data: TimeSeriesDataset,
    family: Family,
    grid=None,
    gamma: float = 1.0,
) -> float:
    """Choose the penalty constant by BIC on the full sample.

    BIC(c) = n * log(RSS(c) / n) + k(c) * log(n), where k counts selected
    columns (the intercept is not counted).  Exact ties go to the larger
    constant.
    """
    family = Family(family)
    if family not in SHRINKAGE_FAMILIES:
        raise ValueError(f"{family.value} takes no penalty constant")
    grid = tuple(sorted(float(c) for c in (grid if grid is not None else default_grid())))
    n = data.n
    adaptive = family in (Family.ALASSO, Family.TALASSO)
    pilot = ols_fit(data) if adaptive else None

    scores = np.full(len(grid), np.inf)
    warm = None
    for gi in range(len(grid) - 1, -1, -1):
        c = grid[gi]
        try:
            lam = penalty_level(c, n, family)
            fit = fit_family(data, family, lam, gamma, pilot=pilot, theta0=warm)
        except PredlassoError:
            continue
        warm = _stage1_coefficients(fit)
        resid = data.y - fit.predict(data.W)
        rss = max(float(resid @ resid), 1e-300)
        scores[gi] = n * math.log(rss / n) + len(fit.active_set) * math.log(n)

    if not np.isfinite(scores).any():
        raise AllCandidatesFailed(f"no {family.value} candidate produced a BIC score")
    best = 0
    for gi in range(len(grid)):
        if scores[gi] <= scores[best]:
            best = gi
    return grid[best]


def _calibration_rep(args) -> float | None:
    from .dgp import DgpSpec, simulate  # deferred to keep import graph acyclic

    design, n, seed, family, grid, folds, gamma = args
    ds = simulate(DgpSpec(design=design, n=n, seed=seed))
    try:
        return cv_select(ds.take_rows(slice(0, n)), family, grid, folds, gamma)
    except AllCandidatesFailed:
        return None


def calibrate_clambda(
    design,
    family: Family,
    *,
    master_seed: int,
    reps: int = 100,
    n: int = 200,
    grid=None,
    folds: int = DEFAULT_FOLDS,
    gamma: float = 1.0,
    jobs: int = 1,
) -> float:
    """Median cross-validated penalty constant over simulated replications.

    Runs ``cv_select`` on ``reps`` independent replications of the design
    at estimation size ``n`` and returns the lower median of the chosen
    constants.  This one constant then serves every sample size through
    ``penalty_level``.
    """
    from .dgp import Design, replication_seeds

    design = Design(design)
    family = Family(family)
    grid = tuple(sorted(float(c) for c in (grid if grid is not None else default_grid())))
    fam_code = list(Family).index(family)
    seeds = replication_seeds(master_seed, reps, key=(int(design.value[-1]), fam_code, 7))
    tasks = [(design, n, seed, family, grid, folds, gamma) for seed in seeds]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chosen = list(pool.map(_calibration_rep, tasks, chunksize=max(1, reps // (4 * jobs))))
    else:
        chosen = [_calibration_rep(t) for t in tasks]

    values = sorted(c for c in chosen if c is not None)
    if not values:
        raise AllCandidatesFailed(f"calibration failed in every replication for {family.value}")
    return values[(len(values) - 1) // 2]


def save_calibration(path, entries: list[dict]) -> None:
    """Persist calibrated constants; each entry records its full recipe."""
    required = {"design", "family", "c_lambda", "reps", "n", "master_seed"}
    for e in entries:
        missing = required - e.keys()
        if missing:
            raise ValueError(f"calibration entry missing {sorted(missing)}")
    with open(path, "w") as fh:
        json.dump(sorted(entries, key=lambda e: (e["design"], e["family"])), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_calibration(path) -> list[dict]:
    with open(path) as fh:
        return json.load(fh)
