"""Monte Carlo integration of the randomly modulated damped oscillator.

The response Ĝ(t) of a unit impulse obeys, per realization of the real noise
b(t),

    dĜ/dt + i b(t) Ĝ + (damping term) = 0,    Ĝ(0) = 1,

with three damping variants: instantaneous ('markov', term nu Ĝ), infinite
memory ('non-markov', term nu int_0^t Ĝ), and an exponentially fading memory
kernel nu e^{-mu (t-t')} ('full-kernel') bridging the two.  The memory
integral is propagated exactly through the auxiliary state z' = -mu z + nu Ĝ,
z(0) = 0, which avoids O(n^2) history sums.

For the instantaneous variant the integrator steps the logarithm of Ĝ, so the
per-realization modulus law |Ĝ(t)| = e^{-nu t} holds to machine precision;
the memory variants use a classical fourth-order step with midpoint noise
obtained by linear interpolation.

Exact ensemble averages are available as oracles in the instantaneous case:
the Gaussian phase average e^{-nu t - sigma_b2 I_q(t)} for covariance-exact
sampling, and a rate-averaged quadrature for the compounded sampler.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, QuadratureError, StepSizeError
from .gamma_compound import GammaParams, gamma_pdf
from .kernels import NoiseKernel, iq_closed_form
from .noise import EnsembleSpec, NoisePath, TimeGrid, ensemble_paths

MODELS = ("markov", "non-markov", "full-kernel")

# dimensionless ceiling on (fastest rate) * dt for the one-step integrators
STEP_LIMIT = 0.1


@dataclass(frozen=True)
class OscillatorConfig:
    """Damping model and parameters.

    nu is a rate (1/time) for the 'markov' model and a squared rate
    (1/time^2) for 'non-markov' and 'full-kernel'; mu (1/time) is the kernel
    decay rate and only meaningful for 'full-kernel'.
    """

    model: str
    nu: float
    mu: Optional[float] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown model {self.model!r}")
        if not (np.isfinite(self.nu) and self.nu >= 0.0):
            raise DomainError("nu must be non-negative")
        if self.model == "full-kernel":
            if self.mu is None or not (np.isfinite(self.mu) and self.mu > 0.0):
                raise DomainError("full-kernel model needs mu > 0")
        elif self.mu is not None:
            raise DomainError(f"mu is not a parameter of the {self.model!r} model")

    def rate_scale(self) -> float:
        """Fastest deterministic rate, used by the step-size guard."""
        if self.model == "markov":
            return self.nu
        if self.model == "non-markov":
            return np.sqrt(self.nu)
        return np.sqrt(self.nu) + self.mu


@dataclass(frozen=True)
class GreenFunction:
    """Complex response values on a grid, with optional per-node standard errors.

    ``stderr`` packs the standard error of the real part in its real
    component and of the imaginary part in its imaginary component.
    """

    grid: TimeGrid
    values: np.ndarray
    stderr: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n + 1,):
            raise DomainError(f"expected {self.grid.n + 1} values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("Green function values must be finite")
        if v[0] != 1.0 + 0.0j:
            raise DomainError(f"G(0) must equal 1 exactly, got {v[0]!r}")
        object.__setattr__(self, "values", v)
        if self.stderr is not None:
            s = np.asarray(self.stderr, dtype=complex)
            if s.shape != v.shape:
                raise DomainError("stderr shape mismatch")
            object.__setattr__(self, "stderr", s)


def _check_step(b_max: float, cfg: OscillatorConfig, dt: float):
    rate = b_max + cfg.rate_scale()
    if rate * dt > STEP_LIMIT + 1e-12:
        raise StepSizeError(
            f"(|b|_max + rate scale) * dt = {rate * dt:.3g} exceeds {STEP_LIMIT}; "
            f"refine the grid")


def _integrate_markov(B: np.ndarray, nu: float, dt: float) -> np.ndarray:
    """Exact-exponential stepping of ln Ĝ: phase by trapezoid, decay exact."""
    R, n1 = B.shape
    phase = np.empty((R, n1))
    phase[:, 0] = 0.0
    np.cumsum(0.5 * dt * (B[:, 1:] + B[:, :-1]), axis=1, out=phase[:, 1:])
    t = np.arange(n1) * dt
    G = np.exp(-nu * t[None, :] - 1j * phase)
    G[:, 0] = 1.0
    return G


def _integrate_memory(B: np.ndarray, nu: float, mu: float, dt: float) -> np.ndarray:
    """Classical 4-stage step on (Ĝ, z); z carries the memory integral exactly."""
    R, n1 = B.shape
    G = np.empty((R, n1), dtype=complex)
    G[:, 0] = 1.0
    g = np.ones(R, dtype=complex)
    z = np.zeros(R, dtype=complex)
    for i in range(n1 - 1):
        b0 = B[:, i]
        b1 = B[:, i + 1]
        bh = 0.5 * (b0 + b1)
        k1g = -1j * b0 * g - z
        k1z = -mu * z + nu * g
        g2 = g + 0.5 * dt * k1g
        z2 = z + 0.5 * dt * k1z
        k2g = -1j * bh * g2 - z2
        k2z = -mu * z2 + nu * g2
        g3 = g + 0.5 * dt * k2g
        z3 = z + 0.5 * dt * k2z
        k3g = -1j * bh * g3 - z3
        k3z = -mu * z3 + nu * g3
        g4 = g + dt * k3g
        z4 = z + dt * k3z
        k4g = -1j * b1 * g4 - z4
        k4z = -mu * z4 + nu * g4
        g = g + (dt / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        z = z + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        G[:, i + 1] = g
    return G


def _integrate(B: np.ndarray, cfg: OscillatorConfig, dt: float) -> np.ndarray:
    if cfg.model == "markov":
        return _integrate_markov(B, cfg.nu, dt)
    mu = cfg.mu if cfg.model == "full-kernel" else 0.0
    return _integrate_memory(B, cfg.nu, mu, dt)


def simulate_realization(b: NoisePath, cfg: OscillatorConfig) -> GreenFunction:
    """Response to one noise realization."""
    _check_step(float(np.max(np.abs(b.values))), cfg, b.grid.dt)
    G = _integrate(b.values[None, :], cfg, b.grid.dt)[0]
    return GreenFunction(b.grid, G, meta={"provenance": "monte-carlo", "model": cfg.model,
                                          "n_realizations": 1})


def ensemble_mean_green(spec: EnsembleSpec, noise_model, cfg: OscillatorConfig,
                        grid: TimeGrid, allow_q_below_one: bool = False) -> GreenFunction:
    """Ensemble mean of the response with per-node standard errors.

    ``noise_model`` follows the sampler convention of `ensemble_paths`.
    Deterministic for a given master seed: realizations use indexed streams
    and the reduction order is fixed.
    """
    B = ensemble_paths(spec, noise_model, grid, allow_q_below_one)
    _check_step(float(np.max(np.abs(B))), cfg, grid.dt)
    G = _integrate(B, cfg, grid.dt)
    mean = G.mean(axis=0)
    R = spec.n_realizations
    se = (G.real.std(axis=0, ddof=1) + 1j * G.imag.std(axis=0, ddof=1)) / np.sqrt(R)
    meta = {"provenance": "monte-carlo", "model": cfg.model, "sampler": spec.sampler,
            "n_realizations": R, "master_seed": spec.master_seed}
    return GreenFunction(grid, mean, stderr=se, meta=meta)


def exact_markov_mean(kernel: NoiseKernel, nu: float, grid: TimeGrid) -> GreenFunction:
    """Exact ensemble average e^{-nu t - sigma_b2 I_q(t)} for the instantaneous model.

    Valid when b is Gaussian with the given pointwise covariance (the
    covariance-exact sampler); the phase integral is then Gaussian and its
    average is the exponential of minus half its variance, which is exactly
    sigma_b2 I_q(t).  Serves as ground truth against which the closure
    methods are approximations.
    """
    if kernel.kind not in ("tsallis", "ou"):
        raise DomainError("the Gaussian phase average needs a tsallis or ou kernel")
    t = grid.times
    qv = kernel.q if kernel.kind == "tsallis" else 1.0
    iq = iq_closed_form(t, qv, kernel.lambda0)
    values = np.exp(-nu * t - kernel.sigma_b2 * iq).astype(complex)
    return GreenFunction(grid, values, meta={"provenance": "oracle", "model": "markov",
                                             "oracle": "gaussian-phase"})


def exact_compound_markov_mean(gamma: GammaParams, sigma_b2: float, nu: float,
                               grid: TimeGrid, tol: float = 1e-8) -> GreenFunction:
    """Rate-averaged exact mean for the compounded sampler (instantaneous model).

    Conditional on the rate lam the mean is e^{-nu t - sigma_b2 I_1(t; lam)};
    the marginal averages that over the gamma law by quadrature.
    """
    t = grid.times
    hi = gamma.a * (gamma.c + 40.0 * np.sqrt(gamma.c) + 60.0)
    values = np.ones(grid.n + 1)

    def phase_integral(lam, ti):
        x = lam * ti
        if x < 1e-4:
            return ti * ti * (0.5 - x / 6.0 + x * x / 24.0)
        return (x + np.expm1(-x)) / (lam * lam)

    for i, ti in enumerate(t[1:], start=1):
        val, err = quad(lambda lam: np.exp(-sigma_b2 * phase_integral(lam, ti))
                        * gamma_pdf(lam, gamma),
                        0.0, hi, epsabs=tol * 1e-2, epsrel=tol * 1e-2, limit=200)
        if err > tol:
            raise QuadratureError(f"rate average did not converge at t={ti}: err={err:.2e}")
        values[i] = val
    values = (np.exp(-nu * t) * values).astype(complex)
    return GreenFunction(grid, values, meta={"provenance": "oracle", "model": "markov",
                                             "oracle": "compound-rate-average"})
