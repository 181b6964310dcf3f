"""Replication experiments: forecast accuracy and selection behavior.

Every replication simulates ``n + 1`` observations, fits each requested
estimator on the first ``n``, and scores the one-step-ahead forecast of
the final observation against its realized value.  Selection rates
compare each fit's active set with the simulation truth; the intercept
is never part of these sets.  Replication seeds are derived from the
master seed and the cell key, so results do not depend on worker count
or execution order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import Family, SHRINKAGE_FAMILIES
from .dgp import Design, DgpSpec, replication_seeds, simulate
from .estimators import fit_family, ols_fit
from .exceptions import PredlassoError
from .metrics import selection_rates
from .tuning import calibrate_clambda, penalty_level

#: Truly inactive error-corrected pair screened in the group analysis.
SCREENED_PAIR = ("xc3", "xc4")


@dataclass(frozen=True)
class SelectionReport:
    """Aggregated forecast and selection metrics for one experiment cell."""

    design: Design
    n: int
    estimator: Family
    mpse: float
    sr: float
    sr1: float
    sr2: float
    reps: int
    failures: int


@dataclass(frozen=True)
class CointGroupReport:
    """How often a fit zeros out both, one, or neither column of the pair."""

    design: Design
    n: int
    estimator: Family
    frac_both_zero: float
    frac_exactly_one_zero: float
    frac_neither_zero: float
    reps: int
    failures: int


def _resolve_lams(estimators, tuning: Mapping, n: int, gamma: float) -> dict[Family, float]:
    lams: dict[Family, float] = {}
    for family in estimators:
        family = Family(family)
        if family in SHRINKAGE_FAMILIES:
            c = None
            for key, val in tuning.items():
                if Family(key) is family:
                    c = float(val)
            if c is None:
                raise ValueError(f"no tuning constant supplied for {family.value}")
            lams[family] = penalty_level(c, n, family)
    return lams


def _rep_batch(args):
    """Metrics for a contiguous batch of replications (worker function).

    Returns arrays indexed (replication, estimator): squared forecast
    error, the three selection rates, the count of zeroed columns among
    the screened pair (-1 when absent), and a failure flag.
    """
    design, n, seeds, families, lams, gamma = args
    E = len(families)
    R = len(seeds)
    sqerr = np.full((R, E), np.nan)
    rates = np.full((R, E, 3), np.nan)
    pair_zeros = np.full((R, E), -1, dtype=np.int8)
    failed = np.zeros((R, E), dtype=bool)

    adaptive = any(f in (Family.ALASSO, Family.TALASSO) for f in families)
    for r, seed in enumerate(seeds):
        full = simulate(DgpSpec(design=design, n=n, seed=seed))
        fit_ds = full.take_rows(slice(0, n))
        w_next = full.W[n]
        y_next = full.y[n]
        truth = full.truth
        pair_cols = tuple(
            full.names.index(nm) for nm in SCREENED_PAIR if nm in full.names
        )
        pilot = None
        pilot_failed = False
        if adaptive:
            try:
                pilot = ols_fit(fit_ds)
            except PredlassoError:
                pilot_failed = True
        for e, family in enumerate(families):
            needs_pilot = family in (Family.ALASSO, Family.TALASSO)
            if needs_pilot and pilot_failed:
                failed[r, e] = True
                continue
            try:
                fit = fit_family(fit_ds, family, lams.get(family, 0.0), gamma, pilot=pilot)
            except PredlassoError:
                failed[r, e] = True
                continue
            err = y_next - (fit.intercept + w_next @ fit.coefficients)
            sqerr[r, e] = err * err
            sr = selection_rates(truth.active_set, fit.active_set, full.p)
            rates[r, e] = (sr.sr, sr.sr1, sr.sr2)
            if len(pair_cols) == 2:
                pair_zeros[r, e] = sum(j not in fit.active_set for j in pair_cols)
    return sqerr, rates, pair_zeros, failed


def _run_cells(design, n, estimators, tuning, reps, master_seed, gamma, jobs):
    design = Design(design)
    families = [Family(f) for f in estimators]
    if Family.RWWD in families:
        raise ValueError("rwwd is a rolling-window benchmark, not a simulation estimator")
    lams = _resolve_lams(families, tuning, n, gamma)
    seeds = replication_seeds(master_seed, reps, key=(int(design.value[-1]), n))

    if jobs > 1:
        batches = [b.tolist() for b in np.array_split(np.arange(reps), min(jobs * 4, reps))]
        tasks = [
            (design, n, [seeds[i] for i in batch], families, lams, gamma)
            for batch in batches
            if batch
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_rep_batch, tasks))
        sqerr = np.concatenate([p[0] for p in parts])
        rates = np.concatenate([p[1] for p in parts])
        pair_zeros = np.concatenate([p[2] for p in parts])
        failed = np.concatenate([p[3] for p in parts])
    else:
        sqerr, rates, pair_zeros, failed = _rep_batch((design, n, seeds, families, lams, gamma))
    return families, sqerr, rates, pair_zeros, failed


def run_montecarlo(
    design,
    n_list,
    estimators,
    tuning: Mapping,
    *,
    reps: int = 500,
    master_seed: int,
    gamma: float = 1.0,
    jobs: int = 1,
) -> list[SelectionReport]:
    """Forecast MPSE and selection rates per (n, estimator) cell.

    ``tuning`` maps each shrinkage family to its calibrated penalty
    constant; one constant serves every ``n`` through the family's
    schedule.  Replications that fail for an estimator are excluded from
    that estimator's averages and counted in ``failures``.
    """
    design = Design(design)
    reports = []
    for n in n_list:
        families, sqerr, rates, _, failed = _run_cells(
            design, int(n), estimators, tuning, reps, master_seed, gamma, jobs
        )
        for e, family in enumerate(families):
            good = ~failed[:, e]
            k = int(good.sum())
            if k == 0:
                reports.append(
                    SelectionReport(design, int(n), family, float("nan"), float("nan"),
                                    float("nan"), float("nan"), 0, int(reps))
                )
                continue
            reports.append(
                SelectionReport(
                    design=design,
                    n=int(n),
                    estimator=family,
                    mpse=float(np.mean(sqerr[good, e])),
                    sr=float(np.mean(rates[good, e, 0])),
                    sr1=float(np.mean(rates[good, e, 1])),
                    sr2=float(np.mean(rates[good, e, 2])),
                    reps=k,
                    failures=int(reps - k),
                )
            )
    return reports


def coint_group_screening(
    design,
    n: int,
    estimator,
    tuning: Mapping,
    *,
    reps: int = 500,
    master_seed: int,
    gamma: float = 1.0,
    jobs: int = 1,
) -> CointGroupReport:
    """Zero-pattern frequencies for the truly inactive error-corrected pair.

    Counts how often a fit zeros both columns of the pair, exactly one,
    or neither; the three fractions sum to one over effective
    replications.
    """
    design = Design(design)
    family = Family(estimator)
    families, _, _, pair_zeros, failed = _run_cells(
        design, int(n), [family], tuning, reps, master_seed, gamma, jobs
    )
    good = ~failed[:, 0]
    z = pair_zeros[good, 0]
    if z.size and (z < 0).any():
        raise ValueError(f"{design.value} has no screened pair {SCREENED_PAIR}")
    k = int(z.size)
    if k == 0:
        return CointGroupReport(design, int(n), family, float("nan"), float("nan"),
                                float("nan"), 0, int(reps))
    return CointGroupReport(
        design=design,
        n=int(n),
        estimator=family,
        frac_both_zero=float(np.mean(z == 2)),
        frac_exactly_one_zero=float(np.mean(z == 1)),
        frac_neither_zero=float(np.mean(z == 0)),
        reps=k,
        failures=int(reps - k),
    )


def calibrate_for_design(
    design,
    families,
    *,
    master_seed: int,
    reps: int = 100,
    n: int = 200,
    grid=None,
    folds: int = 10,
    gamma: float = 1.0,
    jobs: int = 1,
) -> dict[Family, float]:
    """Calibrated penalty constants for each shrinkage family of a design."""
    out: dict[Family, float] = {}
    for family in families:
        family = Family(family)
        if family not in SHRINKAGE_FAMILIES:
            continue
        out[family] = calibrate_clambda(
            design,
            family,
            master_seed=master_seed,
            reps=reps,
            n=n,
            grid=grid,
            folds=folds,
            gamma=gamma,
            jobs=jobs,
        )
    return out
