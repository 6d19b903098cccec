#!/usr/bin/env python3
"""Monte Carlo Green's function of the randomly modulated oscillator vs exact
oracles.

For instantaneous damping the ensemble average is known in closed form for
both samplers: the Gaussian phase average e^{-nu t - sigma_b2 I_q(t)} for
covariance-exact noise, and a one-dimensional rate average for the
compounded sampler.  The Monte Carlo means must sit inside their own error
bars around those curves; the memory-kernel variant bridges between the
instantaneous and infinite-memory dynamics as the kernel decay rate moves.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qstoch import (CompoundOU, EnsembleSpec, GammaParams, NoiseKernel,
                    OscillatorConfig, TimeGrid, ensemble_mean_green,
                    exact_compound_markov_mean, exact_markov_mean)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

grid = TimeGrid(0.01, 400)
nu = 0.5
fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))

# covariance-exact sampler against the Gaussian phase average
k = NoiseKernel.tsallis(1.0, 1.0, 1.2)
spec = EnsembleSpec(4000, 2024, "gaussian-qexp")
mc = ensemble_mean_green(spec, k, OscillatorConfig("markov", nu), grid)
oracle = exact_markov_mean(k, nu, grid)
z = np.abs(mc.values.real - oracle.values.real)[1:] / mc.stderr.real[1:]
print(f"covariance-exact sampler, {spec.n_realizations} realizations: "
      f"max |z| vs oracle = {z.max():.2f}")
axes[0].plot(grid.times, oracle.values.real, "k-", lw=1.4, label="exact average")
axes[0].errorbar(grid.times[::20], mc.values.real[::20],
                 yerr=3 * mc.stderr.real[::20], fmt=".", ms=4, label="MC $\\pm 3$ SE")
axes[0].set_title(f"q={k.q} noise, instantaneous damping")
axes[0].set_xlabel("t")
axes[0].legend(fontsize=8)

# compounded sampler against the rate average
g = GammaParams(0.25, 4.0)
spec = EnsembleSpec(4000, 2025, "compound-ou")
mc2 = ensemble_mean_green(spec, CompoundOU(g, 1.0), OscillatorConfig("markov", nu), grid)
oracle2 = exact_compound_markov_mean(g, 1.0, nu, grid)
z2 = np.abs(mc2.values.real - oracle2.values.real)[1:] / mc2.stderr.real[1:]
print(f"compounded sampler, {spec.n_realizations} realizations:       "
      f"max |z| vs oracle = {z2.max():.2f}")
axes[1].plot(grid.times, oracle2.values.real, "k-", lw=1.4, label="rate average")
axes[1].errorbar(grid.times[::20], mc2.values.real[::20],
                 yerr=3 * mc2.stderr.real[::20], fmt=".", ms=4, label="MC $\\pm 3$ SE")
axes[1].set_title("compounded rates (a=0.25, c=4)")
axes[1].set_xlabel("t")
axes[1].legend(fontsize=8)

# memory-kernel variant bridges the two damping limits (recursion sampler:
# the bridging grids are too fine for a dense covariance factor)
kou = NoiseKernel.ou(1.0, 1.0)
spec3 = EnsembleSpec(24, 2026, "ou")

fine = TimeGrid(9e-5, int(round(2.0 / 9e-5)))
fast = ensemble_mean_green(spec3, kou, OscillatorConfig("full-kernel", 1000.0 * nu,
                                                        mu=1000.0), fine)
markov_ref = ensemble_mean_green(spec3, kou, OscillatorConfig("markov", nu), fine)
axes[2].plot(fine.times[::400], fast.values.real[::400], "C0-", lw=1.2,
             label="$\\mu = 10^3$")
axes[2].plot(fine.times[::400], markov_ref.values.real[::400], "k--", lw=1,
             label="instantaneous")
print(f"memory kernel, mu=1e3 vs instantaneous: "
      f"{np.max(np.abs(fast.values - markov_ref.values)):.4f}")

slow_grid = TimeGrid(2e-3, 1000)
slow = ensemble_mean_green(spec3, kou, OscillatorConfig("full-kernel", 1.0, mu=1e-3),
                           slow_grid)
memory_ref = ensemble_mean_green(spec3, kou, OscillatorConfig("non-markov", 1.0),
                                 slow_grid)
axes[2].plot(slow_grid.times[::20], slow.values.real[::20], "C3-", lw=1.2,
             label="$\\mu = 10^{-3}$")
axes[2].plot(slow_grid.times[::20], memory_ref.values.real[::20], "k:", lw=1,
             label="infinite memory")
print(f"memory kernel, mu=1e-3 vs infinite memory:  "
      f"{np.max(np.abs(slow.values - memory_ref.values)):.4f}")
axes[2].set_title("memory kernel bridges the limits (24 paths)")
axes[2].set_xlabel("t")
axes[2].legend(fontsize=7)

fig.tight_layout()
fig.savefig(os.path.join(OUT, "oscillator_monte_carlo.png"), dpi=130)
print(f"figure written to {OUT}/oscillator_monte_carlo.png")
