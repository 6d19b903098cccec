"""Stationary autocorrelation kernels and their integral transforms.

The central object is the q-exponential kernel sigma_b2 * e_q^{-lambda0 tau}
together with its classical (exponential), linearized (1 - lambda0 tau) and
white-noise limits, plus the lag-weighted double integral

    I_q(t) = int_0^t (t - tau) g(tau) dtau,     g(tau) = e_q^{-lambda0 tau},

which is exactly the Gaussian phase-average exponent used by the oscillator
oracles.  All kernels are even in tau; callers evaluate at |tau|.
"""

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DomainError, QuadratureError
from .qcalc import Q_BRANCH_EPS, QIndex, q_exp

KERNEL_KINDS = ("ou", "tsallis", "linear-small-lambda", "white")

# width of the q window around the removable singularities of the closed form
IQ_SINGULAR_WINDOW = 1e-3


@dataclass(frozen=True)
class NoiseKernel:
    """Autocovariance specification: kind, variance sigma_b2, rate lambda0, index q."""

    kind: str
    sigma_b2: float
    lambda0: float
    q: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise DomainError(f"unknown kernel kind {self.kind!r}")
        if not (np.isfinite(self.sigma_b2) and self.sigma_b2 > 0.0):
            raise DomainError("sigma_b2 must be positive")
        # lambda0 = 0 is meaningful only for the linearized kind (constant kernel)
        lam_ok = self.lambda0 >= 0.0 if self.kind == "linear-small-lambda" else self.lambda0 > 0.0
        if not (np.isfinite(self.lambda0) and lam_ok):
            raise DomainError(f"lambda0 invalid for kind {self.kind!r}: {self.lambda0!r}")
        if self.kind == "tsallis":
            if self.q is None or not np.isfinite(self.q):
                raise DomainError("tsallis kernels need a finite q")
        elif self.q is not None:
            raise DomainError(f"kind {self.kind!r} does not take a q index")

    @classmethod
    def ou(cls, sigma_b2, lambda0):
        return cls("ou", float(sigma_b2), float(lambda0))

    @classmethod
    def tsallis(cls, sigma_b2, lambda0, q):
        return cls("tsallis", float(sigma_b2), float(lambda0), float(q))

    @classmethod
    def linear(cls, sigma_b2, lambda0):
        return cls("linear-small-lambda", float(sigma_b2), float(lambda0))

    @classmethod
    def white(cls, sigma_b2, lambda0):
        return cls("white", float(sigma_b2), float(lambda0))

    def support_cutoff(self) -> float:
        """Lag beyond which the kernel is identically zero (inf if none)."""
        if self.kind == "tsallis" and self.q < 1.0 - Q_BRANCH_EPS:
            return 1.0 / (self.lambda0 * (1.0 - self.q))
        if self.kind == "linear-small-lambda" and self.lambda0 > 0.0:
            return 1.0 / self.lambda0
        return np.inf


def eval_kernel(kernel: NoiseKernel, tau):
    """Pointwise kernel value at lag tau >= 0.

    The white kind has no pointwise value (it is distributional); use
    `white_noise_weight` for its integral weight.
    """
    if kernel.kind == "white":
        raise DomainError("white kernels are distributional; use white_noise_weight")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0.0):
        raise DomainError("tau must be non-negative (kernels are even; pass |tau|)")
    s2, lam = kernel.sigma_b2, kernel.lambda0
    if kernel.kind == "ou":
        out = s2 * np.exp(-lam * tau)
    elif kernel.kind == "tsallis":
        out = s2 * q_exp(-lam * tau, kernel.q)
        out = np.asarray(out)
    else:  # linear-small-lambda
        out = s2 * np.maximum(0.0, 1.0 - lam * tau)
    return out if out.ndim else float(out)


def white_noise_weight(kernel: NoiseKernel) -> float:
    """Coefficient sigma_b2/lambda0 multiplying the delta function in the large-rate limit."""
    if not (np.isfinite(kernel.lambda0) and kernel.lambda0 > 0.0):
        raise DomainError("white-noise weight needs a finite positive lambda0")
    return kernel.sigma_b2 / kernel.lambda0


def _iq_ou(t, lam):
    """Classical limit (lam t - 1 + exp(-lam t))/lam^2, stable for small lam t."""
    t = np.asarray(t, dtype=float)
    x = lam * t
    small = x < 1e-4
    out = np.empty_like(x)
    xs = x[small]
    # series of (x + expm1(-x))/lam^2 = t^2 (1/2 - x/6 + x^2/24 - ...)
    out[small] = (t[small] ** 2) * (0.5 - xs / 6.0 + xs * xs / 24.0)
    xl = x[~small]
    out[~small] = (xl + np.expm1(-xl)) / lam**2
    return out


def iq_closed_form(t, q, lambda0: float):
    """Closed form of the lag-weighted kernel integral I_q(t), unit variance.

    I_q(t) = t/(lam(1+l)) + [1 - lam l t]_+^{1/l + 2}/(lam^2(1+l)(1+2l))
             - 1/(lam^2(1+l)(1+2l)),   l = 1 - q,

    which continues past the kernel support cutoff automatically because the
    bracket is clamped at zero.  Near the removable singularities q = 3/2
    (1+2l = 0) and q = 2 (1+l = 0) the quadrature route takes over, and near
    q = 1 the classical limit formula is used.
    """
    qv = q.q if isinstance(q, QIndex) else float(q)
    if not (np.isfinite(lambda0) and lambda0 > 0.0):
        raise DomainError("lambda0 must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise DomainError("t must be non-negative")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    ell = 1.0 - qv
    if abs(ell) < Q_BRANCH_EPS:
        out = _iq_ou(t, lambda0)
    elif min(abs(qv - 1.5), abs(qv - 2.0)) < IQ_SINGULAR_WINDOW:
        kernel = NoiseKernel.tsallis(1.0, lambda0, qv)
        out = np.array([iq_quadrature(ti, kernel) for ti in t])
    else:
        A = lambda0 * (1.0 + ell)
        B = lambda0**2 * (1.0 + ell) * (1.0 + 2.0 * ell)
        base = np.maximum(1.0 - lambda0 * ell * t, 0.0)
        out = t / A + base ** (1.0 / ell + 2.0) / B - 1.0 / B
    return float(out[0]) if scalar else out


def iq_quadrature(t: float, kernel: NoiseKernel, tol: float = 1e-10) -> float:
    """Adaptive quadrature of int_0^t (t - tau) g(tau) dtau, unit variance.

    The kernel shape g is the kernel normalized by its zero-lag value, so the
    result is directly comparable with `iq_closed_form`.
    """
    if t < 0.0:
        raise DomainError("t must be non-negative")
    if t == 0.0:
        return 0.0
    s2 = kernel.sigma_b2

    def integrand(tau):
        return (t - tau) * eval_kernel(kernel, tau) / s2

    cut = kernel.support_cutoff()
    points = [cut] if 0.0 < cut < t else None
    with warnings.catch_warnings():
        # tolerances below the roundoff floor are allowed; the explicit error
        # check below is what gates the result
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(integrand, 0.0, t, epsabs=tol, epsrel=max(tol, 1e-13),
                        limit=200, points=points)
    if err > 100.0 * max(tol, abs(val) * 1e-13):
        raise QuadratureError(f"I_q quadrature error estimate {err:.2e} at t={t}")
    return val


@dataclass
class MonotonicityReport:
    """Outcome of scanning I_q(t) along one parameter at several times."""

    parameter: str
    grid: np.ndarray
    times: np.ndarray
    values: np.ndarray  # shape (len(grid), len(times))
    direction: str      # 'increasing' | 'decreasing' | 'mixed'

    def is_monotone(self, expected: str) -> bool:
        return self.direction == expected


def iq_property_scan(parameter: str, grid, *, q=None, lambda0=None,
                     times=(1.0, 5.0, 10.0)) -> MonotonicityReport:
    """Scan I_q(t) over a sorted grid of q or lambda0 and report monotonicity.

    A violated monotonicity is reported in ``direction``, never raised.
    """
    grid = np.asarray(grid, dtype=float)
    times = np.asarray(times, dtype=float)
    if parameter not in ("q", "lambda0"):
        raise DomainError("parameter must be 'q' or 'lambda0'")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("grid must be strictly increasing")
    vals = np.empty((grid.size, times.size))
    for i, gval in enumerate(grid):
        if parameter == "q":
            vals[i] = iq_closed_form(times, gval, float(lambda0))
        else:
            vals[i] = iq_closed_form(times, float(q), gval)
    diffs = np.diff(vals, axis=0)
    if np.all(diffs > 0.0):
        direction = "increasing"
    elif np.all(diffs < 0.0):
        direction = "decreasing"
    else:
        direction = "mixed"
    return MonotonicityReport(parameter, grid, times, vals, direction)


@dataclass(frozen=True)
class LimitPath:
    """Joint parameterization N -> (ell(N), lambda(N)) for limit experiments.

    Intended for paths with ell -> 0 and lambda -> infinity, but any pair of
    callables is accepted; the point is to evaluate arbitrary approach paths
    empirically.
    """

    ell_fn: Callable[[int], float]
    lambda_fn: Callable[[int], float]
    description: str = ""


def limit_path_value(path: LimitPath, N: int, t: float) -> float:
    """Evaluate max{0, (1 - lambda(N) ell(N) t)}^{1/ell(N)} at path point N.

    ell(N) = 0 evaluates the classical branch exp(-lambda(N) t).  Evaluated
    directly in ell (no round trip through q) so exactly representable paths,
    e.g. lambda ell = 1 held with powers of two, hit the cutoff exactly.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    if t <= 0.0:
        raise DomainError("t must be positive")
    ell = float(path.ell_fn(N))
    lam = float(path.lambda_fn(N))
    if ell == 0.0:
        return float(np.exp(-lam * t))
    base = 1.0 - lam * ell * t
    if base <= 0.0:
        return 0.0
    return float(base ** (1.0 / ell))
