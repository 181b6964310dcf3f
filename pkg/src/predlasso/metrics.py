"""Forecast-accuracy and variable-selection metrics."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import LengthMismatch, NonFiniteValue


def _paired(forecasts, realized) -> tuple[np.ndarray, np.ndarray]:
    f = np.asarray(forecasts, dtype=np.float64)
    r = np.asarray(realized, dtype=np.float64)
    if f.shape != r.shape or f.ndim != 1:
        raise LengthMismatch(f"forecasts {f.shape} and realized {r.shape} must be equal-length 1-d")
    if f.size == 0:
        raise LengthMismatch("need at least one forecast")
    if not (np.isfinite(f).all() and np.isfinite(r).all()):
        raise NonFiniteValue("non-finite forecast or realization")
    return f, r


def mpse(forecasts, realized) -> float:
    """Mean squared forecast error.

    >>> mpse([1.0, 2.0], [3.0, 2.0])
    2.0
    """
    f, r = _paired(forecasts, realized)
    d = f - r
    return float(np.mean(d * d))


def mpae(forecasts, realized) -> float:
    """Mean absolute forecast error.

    >>> mpae([0.0, 0.0], [2.0, -4.0])
    3.0
    """
    f, r = _paired(forecasts, realized)
    return float(np.mean(np.abs(f - r)))


class SelectionRates(NamedTuple):
    """Agreement between an estimated active set and the truth.

    ``sr1`` is the recovered fraction of truly active columns, ``sr2``
    the recovered fraction of truly inactive ones, and ``sr`` the overall
    fraction of columns whose in/out status is called correctly, so that
    ``p * sr == |active| * sr1 + |inactive| * sr2``.  Empty reference
    sets count as fully recovered.  The intercept is not a column and
    never enters these rates.
    """

    sr: float
    sr1: float
    sr2: float


def selection_rates(true_active, estimated_active, p: int) -> SelectionRates:
    """Selection agreement between 0-based index sets over ``p`` columns."""
    p = int(p)
    truth = frozenset(int(j) for j in true_active)
    est = frozenset(int(j) for j in estimated_active)
    for s in (truth, est):
        if s and (min(s) < 0 or max(s) >= p):
            raise ValueError(f"indices {sorted(s)} out of range for p={p}")
    comp_truth = frozenset(range(p)) - truth
    sr1 = len(truth & est) / len(truth) if truth else 1.0
    sr2 = len(comp_truth - est) / len(comp_truth) if comp_truth else 1.0
    agree = sum((j in truth) == (j in est) for j in range(p))
    return SelectionRates(sr=agree / p, sr1=sr1, sr2=sr2)
