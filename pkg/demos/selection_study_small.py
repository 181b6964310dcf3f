"""A desk-scale replay of the selection experiment (minutes, not hours).

Calibrates penalty constants on a reduced replication budget, then runs
100 replications of design 2 at two sample sizes and prints forecast
MPSE and selection rates per estimator.  SR1 is the hit rate on truly
active columns, SR2 on truly inactive ones.  The pattern to look for:
the two-stage adaptive fit approaches the oracle as n grows, while the
plain LASSO keeps over-selecting.
"""

import time

from predlasso import Design, Family, calibrate_for_design, default_grid, run_montecarlo

master_seed = 7
design = Design.DGP2
estimators = (Family.ORACLE, Family.OLS, Family.PLASSO, Family.TALASSO)
n_list = (40, 200)
reps = 100

t0 = time.perf_counter()
tuning = calibrate_for_design(
    design,
    estimators,
    master_seed=master_seed,
    reps=20,
    n=100,
    grid=default_grid(12, (1e-4, 0.5)),
)
print(f"calibrated constants ({time.perf_counter() - t0:.1f}s):")
for fam, c in tuning.items():
    print(f"  {fam.value:<8} c = {c:.6f}")
print()

t0 = time.perf_counter()
reports = run_montecarlo(
    design, n_list, estimators, tuning, reps=reps, master_seed=master_seed
)
print(f"{reps} replications per cell ({time.perf_counter() - t0:.1f}s)")
print()
print(f"{'n':>4} {'estimator':<9} {'mpse':>7} {'sr':>6} {'sr1':>6} {'sr2':>6}")
for r in reports:
    print(
        f"{r.n:>4} {r.estimator.value:<9} {r.mpse:>7.3f} "
        f"{r.sr:>6.3f} {r.sr1:>6.3f} {r.sr2:>6.3f}"
    )
