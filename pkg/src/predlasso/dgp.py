"""Simulators for three benchmark designs with mixed persistence.

Each simulator returns ``n + 1`` observations: the first ``n`` are the
estimation sample and the last row is the holdout for a one-step-ahead
forecast.  Coefficients on nonstationary regressors shrink at the
``1/sqrt(n)`` rate, with ``n`` the nominal estimation size.

Randomness comes from numpy's PCG64 generator; normals are drawn with
``standard_normal`` (ziggurat).  Every simulator draws its innovation
blocks in a fixed, documented order, so a seed pins the dataset bit for
bit.  Stationary recursions (autoregressive predictors, the moving
errors, the autoregressive response of design 3) are burned in for
``burn_in`` steps; unit-root levels start at zero at the sample
boundary.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.signal import lfilter

from .core import TimeSeriesDataset, _as_float_array
from .exceptions import DimensionMismatch

DEFAULT_BURN_IN = 200

#: Cointegrating combinations of the error-corrected block (rows are vectors
#: over the C-labeled columns, in dataset order).
COINT_MATRIX = np.array([[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]])

#: Loadings placing each cointegrating combination into the block's rows.
_ERROR_CORRECTION = np.array(
    [[0.0, 0.0, 0.0, 0.0],
     [1.0, -1.0, 0.0, 0.0],
     [0.0, 0.0, 0.0, 0.0],
     [0.0, 0.0, 1.0, -1.0]]
)


class Design(str, Enum):
    DGP1 = "dgp1"
    DGP2 = "dgp2"
    DGP3 = "dgp3"


@dataclass(frozen=True, eq=False)
class TruthInfo:
    """Ground truth attached to simulated datasets.

    ``active_set`` holds 0-based indices of nonzero entries of
    ``theta_star``.  ``persistence`` labels each column I0 (stationary),
    I1 (pure random walk), or C1/C2 (first/second member of an
    error-corrected pair).  ``coint_matrix`` has one column per C-labeled
    column, in dataset order.
    """

    theta_star: np.ndarray
    intercept_star: float
    active_set: tuple[int, ...]
    persistence: tuple[str, ...]
    coint_matrix: np.ndarray | None = None

    def __post_init__(self) -> None:
        theta = _as_float_array(self.theta_star, "theta_star", 1)
        object.__setattr__(self, "theta_star", theta)
        object.__setattr__(self, "active_set", tuple(int(j) for j in self.active_set))
        object.__setattr__(self, "persistence", tuple(self.persistence))
        if self.active_set != tuple(int(j) for j in np.flatnonzero(theta)):
            raise DimensionMismatch("active_set must list the nonzero entries of theta_star")
        if len(self.persistence) != theta.shape[0]:
            raise DimensionMismatch("one persistence label per column required")
        bad = set(self.persistence) - {"I0", "I1", "C1", "C2"}
        if bad:
            raise ValueError(f"unknown persistence labels {sorted(bad)}")
        n_c = sum(lab in ("C1", "C2") for lab in self.persistence)
        if n_c and (self.coint_matrix is None or self.coint_matrix.shape[1] != n_c):
            raise DimensionMismatch("coint_matrix must cover every C-labeled column")


@dataclass(frozen=True)
class DgpSpec:
    """Everything needed to reproduce one simulated dataset."""

    design: Design
    n: int
    seed: int
    burn_in: int = DEFAULT_BURN_IN
    noise_scale: float = 1.0


def replication_seeds(master_seed: int, reps: int, key: tuple[int, ...] = ()) -> list[int]:
    """Independent 64-bit child seeds for replication ``0..reps-1``.

    ``key`` namespaces the stream, so different cells of an experiment
    draw unrelated seeds from one master seed.
    """
    ss = np.random.SeedSequence([int(master_seed), *[int(k) for k in key]])
    return [int(child.generate_state(1, np.uint64)[0]) for child in ss.spawn(int(reps))]


def _check_n(n: int) -> int:
    n = int(n)
    if n < 20:
        raise ValueError(f"n must be at least 20, got {n}")
    return n


def _ar1(eps: np.ndarray, coef: float) -> np.ndarray:
    """x_t = coef * x_{t-1} + eps_t with zero initial state, along axis 0."""
    return lfilter([1.0], [1.0, -coef], eps, axis=0)


def simulate_dgp1(n: int, seed: int, *, noise_scale: float = 1.0) -> TimeSeriesDataset:
    """Eight independent random walks, the first four weakly predictive.

    Draw order: predictor innovations (n+1, 8), then response noise (n+1,).
    """
    n = _check_n(n)
    m = n + 1
    rng = np.random.default_rng(seed)
    e = noise_scale * rng.standard_normal((m, 8))
    u = noise_scale * rng.standard_normal(m)
    W = np.cumsum(e, axis=0)
    theta = np.array([1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]) / math.sqrt(n)
    y = 0.25 + W @ theta + u
    truth = TruthInfo(
        theta_star=theta,
        intercept_star=0.25,
        active_set=(0, 1, 2, 3),
        persistence=("I1",) * 8,
    )
    names = tuple(f"x{j}" for j in range(1, 9))
    return TimeSeriesDataset(y=y, W=W, names=names, truth=truth)


def _vecm_block(e1: np.ndarray, e3: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """Error-corrected quadruple started at zero.

    The first and third components are plain random walks; the second and
    fourth chase them, with moving errors ``e2 = e1 - nu1`` and
    ``e4 = e3 - nu2``.
    """
    m = e1.shape[0]
    e = np.column_stack([e1, e1 - nu[:, 0], e3, e3 - nu[:, 1]])
    out = np.empty((m, 4))
    prev = np.zeros(4)
    for i in range(m):
        prev = prev + _ERROR_CORRECTION @ prev + e[i]
        out[i] = prev
    return out


def simulate_dgp2(
    n: int,
    seed: int,
    *,
    burn_in: int = DEFAULT_BURN_IN,
    noise_scale: float = 1.0,
) -> TimeSeriesDataset:
    """Two stationary, four error-corrected, and two random-walk predictors.

    Columns: z1, z2 (AR(1), coefficient 0.5), xc1..xc4 (error-corrected
    block), x1, x2 (random walks).  Draw order: z innovations
    (burn_in+n+1, 2), nu innovations (burn_in+n+1, 2), random-walk
    innovations for xc1/xc3 (n+1, 2), random-walk innovations for x1/x2
    (n+1, 2), response noise (n+1,).
    """
    n = _check_n(n)
    m = n + 1
    total = burn_in + m
    rng = np.random.default_rng(seed)
    eps_z = noise_scale * rng.standard_normal((total, 2))
    eps_nu = noise_scale * rng.standard_normal((total, 2))
    e13 = noise_scale * rng.standard_normal((m, 2))
    e_rw = noise_scale * rng.standard_normal((m, 2))
    u = noise_scale * rng.standard_normal(m)

    z = _ar1(eps_z, 0.5)[burn_in:]
    nu = _ar1(eps_nu, 0.2)[burn_in:]
    xc = _vecm_block(e13[:, 0], e13[:, 1], nu)
    xrw = np.cumsum(e_rw, axis=0)

    W = np.column_stack([z, xc, xrw])
    theta = np.array([0.4, 0.0, 0.3, -0.3, 0.0, 0.0, 1.0 / math.sqrt(n), 0.0])
    y = 0.3 + W @ theta + u
    truth = TruthInfo(
        theta_star=theta,
        intercept_star=0.3,
        active_set=(0, 2, 3, 6),
        persistence=("I0", "I0", "C1", "C2", "C1", "C2", "I1", "I1"),
        coint_matrix=COINT_MATRIX.copy(),
    )
    names = ("z1", "z2", "xc1", "xc2", "xc3", "xc4", "x1", "x2")
    return TimeSeriesDataset(y=y, W=W, names=names, truth=truth)


def simulate_dgp3(
    n: int,
    seed: int,
    *,
    burn_in: int = DEFAULT_BURN_IN,
    noise_scale: float = 1.0,
) -> TimeSeriesDataset:
    """Autoregressive response with lagged predictors of every persistence type.

    Columns: y_lag1, xc1..xc4 (error-corrected block, moving-error
    coefficient 0.4), x and x_lag1 (one random walk and its lag), z1..z3
    (AR(1) coefficients 0.5, 0.2, 0.2), z1_lag1..z3_lag1.  The response
    recursion is burned in against its stationary drivers; with all noise
    scaled to zero it settles at intercept/(1 - 0.4) = 0.5.

    Draw order: z innovations (burn_in+n+2, 3), nu innovations
    (burn_in+n+2, 2), random-walk innovations for xc1/xc3 (n+1, 2),
    random-walk innovations for x (n+1,), response noise (burn_in+n+2,).
    """
    n = _check_n(n)
    m = n + 1
    B = burn_in
    total = B + m + 1  # index B is time zero, the last pre-sample point
    rng = np.random.default_rng(seed)
    eps_z = noise_scale * rng.standard_normal((total, 3))
    eps_nu = noise_scale * rng.standard_normal((total, 2))
    e13 = noise_scale * rng.standard_normal((m, 2))
    e_x = noise_scale * rng.standard_normal(m)
    u = noise_scale * rng.standard_normal(total)

    z = np.column_stack([_ar1(eps_z[:, 0], 0.5), _ar1(eps_z[:, 1], 0.2), _ar1(eps_z[:, 2], 0.2)])
    nu = _ar1(eps_nu, 0.4)

    xc = np.zeros((total, 4))
    xc[B + 1 :] = _vecm_block(e13[:, 0], e13[:, 1], nu[B + 1 :])
    x = np.zeros(total)
    x[B + 1 :] = np.cumsum(e_x)

    beta1 = 1.5 / math.sqrt(n)
    # response drivers; in-sample the error-corrected pair contributes
    # 0.75*(xc1 - xc2), whose stationary value is exactly 0.75*nu1, so the
    # burn-in recursion is seamless at the sample boundary
    drive = 0.3 + 0.6 * z[:, 0] + 0.8 * z[:, 1] + u
    drive[1:] += 0.4 * z[:-1, 0]
    drive[: B + 1] += 0.75 * nu[: B + 1, 0]
    drive[B + 1 :] += 0.75 * (xc[B + 1 :, 0] - xc[B + 1 :, 1]) + beta1 * x[B + 1 :]
    y = _ar1(drive, 0.4)

    obs = np.arange(B + 1, B + m + 1)
    W = np.column_stack(
        [y[obs - 1], xc[obs], x[obs], x[obs - 1], z[obs], z[obs - 1]]
    )
    theta = np.array(
        [0.4, 0.75, -0.75, 0.0, 0.0, beta1, 0.0, 0.6, 0.8, 0.0, 0.4, 0.0, 0.0]
    )
    truth = TruthInfo(
        theta_star=theta,
        intercept_star=0.3,
        active_set=(0, 1, 2, 5, 7, 8, 10),
        persistence=(
            "I0", "C1", "C2", "C1", "C2", "I1", "I1",
            "I0", "I0", "I0", "I0", "I0", "I0",
        ),
        coint_matrix=COINT_MATRIX.copy(),
    )
    names = (
        "y_lag1", "xc1", "xc2", "xc3", "xc4", "x", "x_lag1",
        "z1", "z2", "z3", "z1_lag1", "z2_lag1", "z3_lag1",
    )
    return TimeSeriesDataset(y=y[obs], W=W, names=names, truth=truth)


_SIMULATORS = {
    Design.DGP1: simulate_dgp1,
    Design.DGP2: simulate_dgp2,
    Design.DGP3: simulate_dgp3,
}


def simulate(spec: DgpSpec) -> TimeSeriesDataset:
    """Simulate one dataset from its spec."""
    design = Design(spec.design)
    if design is Design.DGP1:
        return simulate_dgp1(spec.n, spec.seed, noise_scale=spec.noise_scale)
    fn = _SIMULATORS[design]
    return fn(spec.n, spec.seed, burn_in=spec.burn_in, noise_scale=spec.noise_scale)


def dataset_to_csv(data: TimeSeriesDataset, path, header_lines: list[str] | None = None) -> None:
    """Write a dataset as CSV with columns ``t, y, <predictors...>``.

    ``header_lines`` are prepended as '#'-prefixed comment rows.  Floats
    use ``repr`` so the file round-trips bit for bit.
    """
    with open(path, "w", newline="") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "y", *data.names])
        for i in range(data.n):
            writer.writerow([i + 1, repr(float(data.y[i])), *(repr(float(v)) for v in data.W[i])])


def truth_to_dict(truth: TruthInfo) -> dict:
    """JSON-ready description of a simulation's ground truth."""
    return {
        "theta_star": [float(v) for v in truth.theta_star],
        "intercept_star": float(truth.intercept_star),
        "active_set": list(truth.active_set),
        "persistence": list(truth.persistence),
        "coint_matrix": None
        if truth.coint_matrix is None
        else [[float(v) for v in row] for row in truth.coint_matrix],
    }
