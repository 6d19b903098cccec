#!/usr/bin/env python3
"""Rate-compounded noise: from a gamma law on the relaxation rate to a
heavy-tailed autocorrelation.

A stationary exponentially correlated signal whose rate lambda is redrawn
from a gamma(a, c) law on every realization has the ensemble autocorrelation
sigma_b2/(1 + a tau)^c, which is the deformed exponential with index
q = 1 + 1/c.  This script draws such an ensemble, estimates the ensemble
autocorrelation across realizations (no time averaging: the process is not
ergodic) and overlays the closed form.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qstoch import (CompoundOU, EnsembleSpec, GammaParams, TimeGrid,
                    empirical_autocorr, ensemble_paths, gamma_pdf, marginal_autocorr,
                    q_exp, q_from_shape)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

a, c, sigma_b2 = 0.5, 2.0, 1.0
g = GammaParams(a, c)
qi = q_from_shape(c)
print(f"rate law: scale a={a}, shape c={c}  ->  mean rate {g.mean}, "
      f"rate variance {g.variance}")
print(f"induced entropic index q = 1 + 1/c = {qi.q}")

grid = TimeGrid(0.05, 100)
spec = EnsembleSpec(n_realizations=40000, master_seed=42, sampler="compound-ou")
B = ensemble_paths(spec, CompoundOU(g, sigma_b2), grid)
est = empirical_autocorr(B, max_lag=100, grid=grid)
closed = marginal_autocorr(est.lag_times, sigma_b2, g)
deformed = sigma_b2 * q_exp(-g.mean * est.lag_times, qi)

z = np.abs(est.values - closed) / est.stderr
print(f"ensemble autocorrelation over {spec.n_realizations} realizations:")
print(f"  max |z| against the closed form: {z.max():.2f}  "
      f"(excursions up to ~3.5 are routine across 101 correlated lags)")
print(f"  closed form vs deformed exponential: "
      f"{np.max(np.abs(closed - deformed)):.2e} (identical by construction)")

fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
lam_grid = np.linspace(0.0, 4.0, 400)
axes[0].plot(lam_grid, gamma_pdf(lam_grid, g))
axes[0].set_xlabel("rate $\\lambda$")
axes[0].set_title(f"gamma rate law (a={a}, c={c})")

for r in range(6):
    axes[1].plot(grid.times, B[r], lw=0.7)
axes[1].set_xlabel("t")
axes[1].set_title("compound realizations (one rate each)")

axes[2].errorbar(est.lag_times, est.values, yerr=3 * est.stderr, fmt=".", ms=3,
                 lw=0.5, label="ensemble estimate $\\pm 3$ SE")
axes[2].plot(est.lag_times, closed, "k-", lw=1.5,
             label=f"$\\sigma_b^2 (1+a\\tau)^{{-c}}$  (q={qi.q})")
axes[2].plot(est.lag_times, np.exp(-g.mean * est.lag_times), "r--", lw=1,
             label="plain exponential")
axes[2].set_xlabel("lag $\\tau$")
axes[2].legend(fontsize=8)
axes[2].set_title("heavy-tailed marginal autocorrelation")

fig.tight_layout()
fig.savefig(os.path.join(OUT, "superstatistics_noise.png"), dpi=130)
print(f"figure written to {OUT}/superstatistics_noise.png")
