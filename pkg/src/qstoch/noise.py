"""Noise path generation on a uniform grid and ensemble autocorrelation estimation.

Three samplers are provided: the exact exponential-correlation recursion, the
rate-compounded variant (one gamma rate per realization, the superstatistical
construction), and a Gaussian sampler with the exact q-exponential covariance
obtained by factorizing the covariance matrix.  Every realization owns an
independent random stream derived from (master_seed, index), so ensembles are
reproducible regardless of scheduling.
"""

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, FactorizationError, GridMismatchError
from .gamma_compound import GammaParams
from .kernels import NoiseKernel, eval_kernel

SAMPLERS = ("ou", "compound-ou", "gaussian-qexp")

MAX_QEXP_NODES = 8192

JITTER_START = 1e-12
JITTER_STOP = 1e-8


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_i = i dt for i = 0..n."""

    dt: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise DomainError("dt must be positive")
        if self.n < 1:
            raise DomainError("n must be >= 1")

    @classmethod
    def from_t_max(cls, dt: float, t_max: float) -> "TimeGrid":
        return cls(dt=dt, n=int(round(t_max / dt)))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.dt

    @property
    def t_max(self) -> float:
        return self.n * self.dt


@dataclass(frozen=True)
class NoisePath:
    """One realization b(t_i) with its grid and generator metadata."""

    grid: TimeGrid
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise DomainError(f"expected {self.grid.n + 1} samples, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("noise path contains non-finite samples")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble size, master seed and sampler selection."""

    n_realizations: int
    master_seed: int
    sampler: str

    def __post_init__(self):
        if self.n_realizations < 2:
            raise DomainError("an ensemble needs at least 2 realizations")
        if self.sampler not in SAMPLERS:
            raise DomainError(f"unknown sampler {self.sampler!r}")


@dataclass(frozen=True)
class CompoundOU:
    """Parameter bundle for the rate-compounded sampler."""

    gamma: GammaParams
    sigma_b2: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma_b2) and self.sigma_b2 > 0.0):
            raise DomainError("sigma_b2 must be positive")


def realization_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent, reproducible stream for realization ``index``."""
    return np.random.default_rng(np.random.SeedSequence((int(master_seed), int(index))))


def _ou_values(rng, lam, sigma_b2, grid: TimeGrid) -> np.ndarray:
    """Exact stationary recursion; lam may be a scalar or per-realization vector.

    b_0 ~ N(0, sigma_b2);  b_{i+1} = b_i e^{-lam dt} + sqrt(sigma_b2 (1 - e^{-2 lam dt})) xi_i.
    """
    xi = rng.standard_normal(grid.n + 1)
    rho = np.exp(-lam * grid.dt)
    innov = np.sqrt(sigma_b2 * (1.0 - rho * rho))
    b = np.empty(grid.n + 1)
    b[0] = np.sqrt(sigma_b2) * xi[0]
    for i in range(grid.n):
        b[i + 1] = b[i] * rho + innov * xi[i + 1]
    return b


def ou_path(rng, lam: float, sigma_b2: float, grid: TimeGrid) -> NoisePath:
    """Exactly discretized exponential-correlation path (stationary start)."""
    if not (np.isfinite(lam) and lam > 0.0):
        raise DomainError("lam must be positive")
    values = _ou_values(rng, float(lam), float(sigma_b2), grid)
    return NoisePath(grid, values, {"sampler": "ou", "lam": float(lam), "sigma_b2": sigma_b2})


def compound_ou_path(rng, gamma: GammaParams, sigma_b2: float, grid: TimeGrid) -> NoisePath:
    """Draw one rate from the gamma law, then an exponential-correlation path with it."""
    lam = float(rng.gamma(shape=gamma.c, scale=gamma.a))
    values = _ou_values(rng, lam, float(sigma_b2), grid)
    return NoisePath(grid, values,
                     {"sampler": "compound-ou", "lam": lam, "a": gamma.a, "c": gamma.c,
                      "sigma_b2": sigma_b2})


@dataclass
class FactorInfo:
    """Diagnostics of the covariance factorization."""

    jitter: float
    clipped: int
    residual: float


def qexp_covariance_factor(kernel: NoiseKernel, grid: TimeGrid,
                           allow_q_below_one: bool = False):
    """Factor F with F F^T equal to the kernel covariance matrix on the grid.

    Tries a plain Cholesky first, escalating a diagonal jitter from 1e-12 to
    1e-8 (in units of sigma_b2); if that fails, falls back to a symmetric
    eigendecomposition with negative eigenvalues clipped to zero, surfacing
    the clip count as a warning.  Kernels with q < 1 have truncated support
    and are not guaranteed positive semidefinite, hence the explicit opt-in.
    """
    if kernel.kind not in ("tsallis", "ou"):
        raise DomainError("covariance sampling needs a pointwise tsallis or ou kernel")
    if kernel.kind == "tsallis" and kernel.q < 1.0 and not allow_q_below_one:
        raise DomainError("q < 1 kernels need allow_q_below_one=True (PSD not assured)")
    if grid.n + 1 > MAX_QEXP_NODES:
        raise DomainError(f"grid too large for dense factorization ({grid.n + 1} nodes)")
    t = grid.times
    C = eval_kernel(kernel, np.abs(t[:, None] - t[None, :]))
    s2 = kernel.sigma_b2
    jitter = 0.0
    while True:
        try:
            F = np.linalg.cholesky(C + jitter * s2 * np.eye(C.shape[0]) if jitter else C)
            info = FactorInfo(jitter=jitter, clipped=0, residual=jitter * s2)
            return F, info
        except np.linalg.LinAlgError:
            jitter = JITTER_START if jitter == 0.0 else 2.0 * jitter
            if jitter > JITTER_STOP:
                break
    # last resort: clip negative eigenvalues
    vals, vecs = np.linalg.eigh(C)
    clipped = int(np.sum(vals < 0.0))
    vals = np.maximum(vals, 0.0)
    F = vecs * np.sqrt(vals)[None, :]
    residual = float(np.max(np.abs(C - F @ F.T)))
    if residual > 1e-8 * s2:
        raise FactorizationError(
            f"covariance residual {residual:.2e} exceeds 1e-8 sigma_b2 "
            f"(q={kernel.q}, lambda0={kernel.lambda0}, n={grid.n})")
    warnings.warn(f"covariance factorization clipped {clipped} negative eigenvalues",
                  RuntimeWarning, stacklevel=2)
    return F, FactorInfo(jitter=np.nan, clipped=clipped, residual=residual)


def gaussian_qexp_path(rng, kernel: NoiseKernel, grid: TimeGrid,
                       factor: Optional[np.ndarray] = None,
                       allow_q_below_one: bool = False) -> NoisePath:
    """Gaussian path with the exact kernel covariance at grid resolution.

    Pass a precomputed ``factor`` (from `qexp_covariance_factor`) when drawing
    many realizations; refactorizing per path is wasteful.
    """
    if factor is None:
        factor, _ = qexp_covariance_factor(kernel, grid, allow_q_below_one)
    values = factor @ rng.standard_normal(grid.n + 1)
    return NoisePath(grid, values,
                     {"sampler": "gaussian-qexp", "q": kernel.q, "lambda0": kernel.lambda0,
                      "sigma_b2": kernel.sigma_b2})


def ensemble_paths(spec: EnsembleSpec, noise_model, grid: TimeGrid,
                   allow_q_below_one: bool = False) -> np.ndarray:
    """All realizations as an (R, n+1) matrix, per-realization streams.

    ``noise_model`` is a NoiseKernel for the 'ou' and 'gaussian-qexp'
    samplers and a CompoundOU bundle for 'compound-ou'.  Per realization the
    draw order matches the single-path functions (rate first where
    applicable, then the normals), so scalar and ensemble paths agree.
    """
    R, n1 = spec.n_realizations, grid.n + 1
    if spec.sampler == "gaussian-qexp":
        if not isinstance(noise_model, NoiseKernel):
            raise DomainError("gaussian-qexp sampler takes a NoiseKernel")
        F, _ = qexp_covariance_factor(noise_model, grid, allow_q_below_one)
        Xi = np.empty((R, n1))
        for r in range(R):
            Xi[r] = realization_rng(spec.master_seed, r).standard_normal(n1)
        return Xi @ F.T
    if spec.sampler == "ou":
        if not isinstance(noise_model, NoiseKernel) or noise_model.kind != "ou":
            raise DomainError("ou sampler takes an ou NoiseKernel")
        lam = np.full(R, noise_model.lambda0)
        s2 = noise_model.sigma_b2
        Xi = np.empty((R, n1))
        for r in range(R):
            Xi[r] = realization_rng(spec.master_seed, r).standard_normal(n1)
    else:  # compound-ou
        if not isinstance(noise_model, CompoundOU):
            raise DomainError("compound-ou sampler takes a CompoundOU bundle")
        g, s2 = noise_model.gamma, noise_model.sigma_b2
        lam = np.empty(R)
        Xi = np.empty((R, n1))
        for r in range(R):
            rng = realization_rng(spec.master_seed, r)
            lam[r] = rng.gamma(shape=g.c, scale=g.a)
            Xi[r] = rng.standard_normal(n1)
    rho = np.exp(-lam * grid.dt)
    innov = np.sqrt(s2 * (1.0 - rho * rho))
    B = np.empty((R, n1))
    B[:, 0] = np.sqrt(s2) * Xi[:, 0]
    for i in range(grid.n):
        B[:, i + 1] = B[:, i] * rho + innov * Xi[:, i + 1]
    return B


@dataclass
class AutocorrEstimate:
    """Across-realization autocovariance estimates by lag."""

    lag_times: np.ndarray
    values: np.ndarray
    stderr: np.ndarray


def empirical_autocorr(paths, max_lag: int, grid: Optional[TimeGrid] = None) -> AutocorrEstimate:
    """Ensemble autocovariance at lags 0..max_lag with jackknife standard errors.

    The estimator fixes the reference node t = 0 and averages b(0) b(k dt)
    across realizations only; no time averaging is involved, so it remains
    unbiased for non-ergodic ensembles (rate-compounded paths in particular).
    ``paths`` is either a sequence of NoisePath on a common grid or an
    (R, n+1) value matrix accompanied by ``grid``.
    """
    if isinstance(paths, np.ndarray):
        if grid is None:
            raise DomainError("matrix input needs an explicit grid")
        B = paths
    else:
        paths = list(paths)
        if len(paths) < 2:
            raise DomainError("need at least 2 paths")
        grid = paths[0].grid
        for p in paths[1:]:
            if p.grid != grid:
                raise GridMismatchError(f"grid mismatch: {p.grid} vs {grid}")
        B = np.stack([p.values for p in paths])
    R, n1 = B.shape
    if R < 2:
        raise DomainError("need at least 2 realizations")
    if not 0 <= max_lag <= n1 - 1:
        raise DomainError(f"max_lag must lie in [0, {n1 - 1}]")
    b0 = B[:, 0]
    prod = b0[:, None] * B[:, : max_lag + 1]
    est = prod.mean(axis=0)
    # delete-one jackknife of a plain mean reduces to sqrt(S/(R(R-1))) with
    # S the centered sum of squares
    S = np.sum((prod - est[None, :]) ** 2, axis=0)
    se = np.sqrt(S / (R * (R - 1)))
    return AutocorrEstimate(np.arange(max_lag + 1) * grid.dt, est, se)
