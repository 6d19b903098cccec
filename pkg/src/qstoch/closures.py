"""Deterministic closure solutions for the ensemble-averaged oscillator response.

Two closure levels are implemented for both damping models.  The lowest-order
(perturbative) closure keeps the deterministic response inside the memory
integral; the self-consistent (DIA) closure replaces it by the averaged
response itself, making the Volterra equation quadratic in the unknown.

Each closure is solved in two independent ways:

* time domain: product-trapezoidal stepping of the Volterra
  integro-differential equation (the DIA endpoint couples the new value
  linearly, so each step is a scalar linear solve);
* Laplace domain: closed forms for the perturbative closure, and the shifted
  functional equations J(p) [p + sigma2 J(p+lam)] = 1 (instantaneous damping)
  and G(p) [p + nu/p + sigma2 G(p+lam)] = 1 (infinite memory), evaluated by a
  downward recursion seeded with the free solution far to the right, plus a
  fixed-Talbot numerical inversion to come back to the time domain.

With an exponential kernel the shifted functional equations are exact
transforms of the time-domain equations (the shift by lam is the transform of
the e^{-lam t} factor), so the two routes must agree to discretization
accuracy; the tests enforce this.  lam = 0 makes the functional equations
quadratic and they are solved in closed form.  The white-noise and large-time
closed forms complete the limit panorama.

For the instantaneous model the equations are solved for J(t) = e^{nu t} G(t)
and the damping factor is restored on output.
"""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InversionError, SolverError
from .kernels import NoiseKernel, eval_kernel
from .noise import TimeGrid
from .oscillator import GreenFunction, OscillatorConfig

CLOSURE_MODELS = ("markov", "non-markov")
METHODS = ("perturbative", "dia")

TIME_DOMAIN_KINDS = ("tsallis", "ou", "linear-small-lambda")

# default tail threshold for the shifted recursions, in units of sigma:
# seeding the free solution at |p| >= TAIL_FACTOR * sigma leaves a relative
# error ~ (sigma/|p|)^2 <= 1e-4 that the downward recursion contracts far
# below 1e-10 before reaching the evaluation point
TAIL_FACTOR = 100.0


@dataclass(frozen=True)
class ClosureProblem:
    """A (model, method, kernel, damping) quadruple ready to solve."""

    model: str
    method: str
    kernel: NoiseKernel
    cfg: OscillatorConfig

    def __post_init__(self):
        if self.model not in CLOSURE_MODELS:
            raise DomainError(f"closures are defined for {CLOSURE_MODELS}, got {self.model!r}")
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if self.cfg.model != self.model:
            raise DomainError("oscillator config model does not match the problem model")


@dataclass(frozen=True)
class LaplaceSolution:
    """Transform values on a set of complex abscissae with truncation metadata."""

    abscissae: np.ndarray
    values: np.ndarray
    depth: int

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.abscissae, dtype=complex))
        v = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if p.shape != v.shape:
            raise DomainError("abscissae/values shape mismatch")
        if self.depth < 1:
            raise DomainError("depth must be >= 1")
        object.__setattr__(self, "abscissae", p)
        object.__setattr__(self, "values", v)

    def tail_residual(self) -> np.ndarray:
        """|p v(p) - 1| on the two largest-|p| abscissae (free-decay check)."""
        idx = np.argsort(np.abs(self.abscissae))[-2:]
        return np.abs(self.abscissae[idx] * self.values[idx] - 1.0)


# ----------------------------------------------------------------------------
# time domain
# ----------------------------------------------------------------------------

def _volterra_linear(K: np.ndarray, dt: float) -> np.ndarray:
    """Step y' = -int_0^t K(t-s) y(s) ds, y(0) = 1, trapezoid in both roles."""
    n = K.size - 1
    y = np.empty(n + 1)
    y[0] = 1.0
    f_prev = 0.0
    half = 0.5 * dt
    for m in range(1, n + 1):
        interior = np.dot(K[m - 1:0:-1], y[1:m]) if m >= 2 else 0.0
        known = dt * (interior + 0.5 * K[m] * y[0])
        coef = half * K[0]
        den = 1.0 + half * coef
        if abs(den) < 1e-14:
            raise SolverError(f"singular step at node {m}")
        y[m] = (y[m - 1] + half * f_prev - half * known) / den
        f_prev = -(known + coef * y[m])
    return y


def _volterra_dia(g: np.ndarray, nu_memory: float, dt: float) -> np.ndarray:
    """Step y' = -nu_memory int y - int g(t-s) y(t-s) y(s) ds, y(0) = 1.

    The new value enters linearly through the two trapezoid endpoints,
    g(0) y(0) y_m and g(t_m) y_m y(0), and through the memory endpoint.
    """
    n = g.size - 1
    y = np.empty(n + 1)
    y[0] = 1.0
    f_prev = 0.0
    half = 0.5 * dt
    run = 0.0  # trapezoid of int y over interior nodes
    for m in range(1, n + 1):
        if m >= 2:
            interior = np.dot(g[m - 1:0:-1] * y[m - 1:0:-1], y[1:m])
            run += y[m - 1]
        else:
            interior = 0.0
        known = dt * interior + nu_memory * dt * (0.5 * y[0] + run)
        coef = half * (g[m] + g[0]) * y[0] + half * nu_memory
        den = 1.0 + half * coef
        if abs(den) < 1e-14:
            raise SolverError(f"singular step at node {m}")
        y[m] = (y[m - 1] + half * f_prev - half * known) / den
        f_prev = -(known + coef * y[m])
    return y


def _time_domain_kernel_check(kernel: NoiseKernel):
    if kernel.kind not in TIME_DOMAIN_KINDS:
        raise DomainError(
            f"kind {kernel.kind!r} admits closed-form solving only; "
            "use white_noise_solution")


def volterra_perturbative(prob: ClosureProblem, grid: TimeGrid) -> GreenFunction:
    """Time-domain lowest-order closure."""
    _time_domain_kernel_check(prob.kernel)
    if prob.method != "perturbative":
        raise DomainError("problem method is not 'perturbative'")
    t = grid.times
    cov = eval_kernel(prob.kernel, t)
    nu = prob.cfg.nu
    if prob.model == "markov":
        y = _volterra_linear(cov, grid.dt)
        values = np.exp(-nu * t) * y
    else:
        K = nu + cov * np.cos(np.sqrt(nu) * t)
        values = _volterra_linear(K, grid.dt)
    values = values.astype(complex)
    values[0] = 1.0
    return GreenFunction(grid, values, meta={"provenance": "closure", "model": prob.model,
                                             "method": "perturbative"})


def volterra_dia(prob: ClosureProblem, grid: TimeGrid) -> GreenFunction:
    """Time-domain self-consistent closure (quadratic memory term)."""
    _time_domain_kernel_check(prob.kernel)
    if prob.method != "dia":
        raise DomainError("problem method is not 'dia'")
    t = grid.times
    cov = eval_kernel(prob.kernel, t)
    nu = prob.cfg.nu
    if prob.model == "markov":
        y = _volterra_dia(cov, 0.0, grid.dt)
        values = np.exp(-nu * t) * y
    else:
        values = _volterra_dia(cov, nu, grid.dt)
    values = values.astype(complex)
    values[0] = 1.0
    return GreenFunction(grid, values, meta={"provenance": "closure", "model": prob.model,
                                             "method": "dia"})


# ----------------------------------------------------------------------------
# Laplace domain
# ----------------------------------------------------------------------------

def _pole_check(den: np.ndarray):
    if np.any(np.abs(den) < 1e-12):
        warnings.warn("Laplace evaluation within 1e-12 of a pole", RuntimeWarning,
                      stacklevel=3)


def laplace_perturbative(model: str, p, kernel: NoiseKernel, cfg: OscillatorConfig):
    """Closed-form transform of the lowest-order closure.

    Instantaneous damping returns the transform of J = e^{nu t} G, i.e.
    1/(p + sigma2/(p + lam)); infinite memory returns the transform of G
    itself, 1/(p + nu/p + sigma2 (p+lam)/((p+lam)^2 + nu)).  White kernels
    use their delta-limit weight sigma2/lam in place of the kernel factor.
    """
    if model not in CLOSURE_MODELS:
        raise DomainError(f"unknown model {model!r}")
    p = np.asarray(p, dtype=complex)
    scalar = p.ndim == 0
    p = np.atleast_1d(p)
    s2, lam = kernel.sigma_b2, kernel.lambda0
    with np.errstate(divide="ignore", invalid="ignore"):
        if model == "markov":
            if kernel.kind == "white":
                den = p + s2 / lam
            else:
                den = p + s2 / (p + lam)
        else:
            nu = cfg.nu
            if kernel.kind == "white":
                den = p + nu / p + s2 / lam
            else:
                den = p + nu / p + s2 * (p + lam) / ((p + lam) ** 2 + nu)
        _pole_check(den)
        out = 1.0 / den
    return complex(out[0]) if scalar else out


def _free_denominator(model: str, nu: float):
    if model == "markov":
        return lambda p: p
    return lambda p: p + nu / p


def _recursion_depths(p: np.ndarray, lam: float, tail: float) -> np.ndarray:
    # smallest D with |p + D lam| >= tail, but never below 2: two extra
    # functional-equation applications turn the free-seed relative error
    # (sigma/|p|)^2 into (sigma/|p|)^6, far below the inversion tolerance
    im = p.imag
    need = np.sqrt(np.maximum(0.0, tail * tail - im * im))
    D = np.ceil(np.maximum(0.0, need - p.real) / lam)
    D[np.abs(im) >= tail] = 0.0
    D[np.abs(p) >= tail] = 0.0
    return np.maximum(D.astype(np.int64), 2)


def _shifted_recursion(p: np.ndarray, lam: float, sigma2: float, denom,
                       depths: np.ndarray) -> np.ndarray:
    order = np.argsort(-depths, kind="stable")
    ps = p[order]
    Ds = depths[order]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = 1.0 / denom(ps + Ds * lam)
        max_depth = int(Ds[0]) if Ds.size else 0
        neg = -Ds  # ascending, for the active-prefix search
        for m in range(max_depth - 1, -1, -1):
            k = np.searchsorted(neg, -m, side="left")  # count of Ds > m
            vals[:k] = 1.0 / (denom(ps[:k] + m * lam) + sigma2 * vals[:k])
    out = np.empty_like(vals)
    out[order] = vals
    return out


def _quadratic_branch(w: np.ndarray, sigma2: float) -> np.ndarray:
    # root of sigma2 X^2 + w X - 1 = 0 behaving as 1/w at large |w|
    # (principal square root; intended for Re w > 0)
    return (-w + np.sqrt(w * w + 4.0 * sigma2)) / (2.0 * sigma2)


def laplace_dia(model: str, p, kernel: NoiseKernel, cfg: OscillatorConfig,
                depth: Optional[int] = None, tail_factor: float = TAIL_FACTOR) -> LaplaceSolution:
    """Transform of the self-consistent closure via the shifted functional equation.

    For lam > 0 the unknown at p is tied to its value at p + lam, so a
    downward recursion from the free solution at p + D lam solves it; D is
    chosen per abscissa so the seed sits at distance >= tail_factor * sigma
    from the origin (pass ``depth`` to force a uniform truncation instead).
    lam = 0 collapses the functional equation to a quadratic, solved on the
    branch that decays like the free solution.  White kernels reproduce the
    delta-limit closed form, where both closures coincide.
    """
    if model not in CLOSURE_MODELS:
        raise DomainError(f"unknown model {model!r}")
    p_in = np.asarray(p, dtype=complex)
    p_arr = np.atleast_1d(p_in).ravel()
    s2, lam = kernel.sigma_b2, kernel.lambda0
    nu = cfg.nu
    denom = _free_denominator(model, nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        if kernel.kind == "white":
            den = denom(p_arr) + s2 / lam
            _pole_check(den)
            vals = 1.0 / den
            used = 1
        elif lam == 0.0:
            vals = _quadratic_branch(denom(p_arr), s2)
            used = 1
        else:
            if depth is None:
                depths = _recursion_depths(p_arr, lam, tail_factor * np.sqrt(s2))
            else:
                if depth < 1:
                    raise DomainError("depth must be >= 1")
                depths = np.full(p_arr.size, depth, dtype=np.int64)
            vals = _shifted_recursion(p_arr, lam, s2, denom, depths)
            used = max(1, int(depths.max()))
    if not np.all(np.isfinite(vals)):
        raise SolverError("non-finite transform values (evaluation at a pole?)")
    return LaplaceSolution(p_arr.reshape(np.shape(p_in)) if np.ndim(p_in) else p_arr,
                           vals.reshape(np.shape(p_in)) if np.ndim(p_in) else vals,
                           depth=used)


# ----------------------------------------------------------------------------
# numerical inversion
# ----------------------------------------------------------------------------

def _talbot_nodes(M: int):
    theta = np.arange(M) * np.pi / M
    cot = np.zeros(M)
    cot[1:] = 1.0 / np.tan(theta[1:])
    r = 0.4 * M
    base = r * theta * (cot + 1j)
    base[0] = r
    weight = np.empty(M, dtype=complex)
    weight[0] = 0.5 * np.exp(r)
    weight[1:] = np.exp(base[1:]) * (1.0 + 1j * theta[1:] * (1.0 + cot[1:] ** 2)
                                     - 1j * cot[1:])
    # p = base / t and exp(t p) = exp(base): weights are t-independent
    return base, weight


def _talbot_eval(F, ts: np.ndarray, M: int, shift_scale: float = 0.0) -> np.ndarray:
    """Fixed-Talbot sum at times ts; optional contour shift by shift_scale/t.

    The shift moves evaluation to F(p + s) with s = shift_scale/t and
    multiplies the result by e^{shift_scale}; it displaces the contour away
    from singularities near the imaginary axis at fixed roundoff cost.
    """
    base, weight = _talbot_nodes(M)
    P = base[None, :] / ts[:, None]
    if shift_scale:
        P = P + (shift_scale / ts)[:, None]
    vals = np.asarray(F(P.ravel())).reshape(P.shape)
    out = (0.4 / ts) * np.sum(weight[None, :] * vals, axis=1).real
    if shift_scale:
        out = out * np.exp(shift_scale)
    return out


def invert_laplace(F, t, degree: int = 32, rtol: float = 2e-8, atol: float = 2e-8):
    """Numerically invert a transform on positive times by fixed-Talbot contours.

    ``F`` must accept a complex ndarray of abscissae and return the transform
    values elementwise.  Each time is evaluated at ``degree`` and 1.5 *
    ``degree`` nodes.  The contour sum amplifies evaluation noise in F by
    roughly e^{0.4 M}/(0.4 M), so the two sizes bracket opposite failure
    modes: the small contour loses accuracy when singularities sit close to
    it (oscillatory transforms at large t), the large one when F itself
    carries roundoff noise (deep recursions).  Where the two disagree, a
    shifted contour arbitrates which regime applies; persisting disagreement
    raises InversionError.  Accuracy on rational transforms is of order 1e-9
    at moderate t.  Caveat: far beyond the resolvable oscillation range
    (roughly |Im singularity| * t > 1.3 * degree) all contours decay to the
    same spurious value and the disagreement check cannot fire; keep
    t * frequency within that budget.
    """
    ts = np.asarray(t, dtype=float)
    scalar = ts.ndim == 0
    ts = np.atleast_1d(ts).astype(float)
    if np.any(ts <= 0.0):
        raise DomainError("inversion times must be positive")
    M2 = int(np.ceil(1.5 * degree))
    v1 = _talbot_eval(F, ts, degree)
    v2 = _talbot_eval(F, ts, M2)
    tol = atol + rtol * np.maximum(1.0, np.abs(v2))
    bad = np.abs(v1 - v2) > tol
    # on agreement the small contour wins: its roundoff amplification is
    # ~e^{0.4(M2-M1)} lower and its truncation error is certified by the pair
    out = v1.copy()
    if np.any(bad):
        v3 = _talbot_eval(F, ts[bad], M2, shift_scale=2.0)
        v1b, v2b = v1[bad], v2[bad]
        keep_large = np.abs(v2b - v3) <= atol + rtol * np.maximum(1.0, np.abs(v3))
        keep_small = np.abs(v1b - v3) <= atol + rtol * np.maximum(1.0, np.abs(v1b))
        still = ~(keep_large | keep_small)
        if np.any(still):
            worst = ts[bad][still]
            raise InversionError(
                f"no agreement across contour sizes {degree}/{M2} at t={worst[:5]!r}")
        out[bad] = np.where(keep_large, v2b, v1b)
    return float(out[0]) if scalar else out


# ----------------------------------------------------------------------------
# closed-form limits
# ----------------------------------------------------------------------------

def white_noise_solution(model: str, sigma_b2: float, lambda0: float, nu: float, t):
    """Exact response in the short-correlation (white-noise) limit.

    Both closures coincide here.  The instantaneous-damping branch returns
    the nu-independent factor e^{-(sigma_b2/lambda0) t} (multiply by
    e^{-nu t} for the full response); the infinite-memory branch inverts
    p/(p^2 + b p + nu) with b = sigma_b2/lambda0 exactly, covering the
    oscillatory, critical and overdamped cases.
    """
    if model not in CLOSURE_MODELS:
        raise DomainError(f"unknown model {model!r}")
    if not (np.isfinite(lambda0) and lambda0 > 0.0):
        raise DomainError("lambda0 must be positive")
    t = np.asarray(t, dtype=float)
    b = sigma_b2 / lambda0
    if model == "markov":
        out = np.exp(-b * t)
        return out if out.ndim else float(out)
    disc = nu - 0.25 * b * b
    scale = max(nu, 0.25 * b * b)
    decay = np.exp(-0.5 * b * t)
    if disc > 1e-10 * scale:
        w = np.sqrt(disc)
        out = decay * (np.cos(w * t) - (0.5 * b / w) * np.sin(w * t))
    elif disc < -1e-10 * scale:
        wh = np.sqrt(-disc)
        # overflow-safe split of cosh/sinh; both exponents are negative
        cp = 0.5 * (1.0 - 0.5 * b / wh)
        cm = 0.5 * (1.0 + 0.5 * b / wh)
        out = cp * np.exp((wh - 0.5 * b) * t) + cm * np.exp((-wh - 0.5 * b) * t)
    else:
        out = decay * (1.0 - 0.5 * b * t)
    return out if out.ndim else float(out)


def large_time_solution(model: str, t, *, sigma_b2: Optional[float] = None,
                        lambda0: Optional[float] = None, nu: Optional[float] = None):
    """Asymptotic response at large times.

    Instantaneous damping decays like the white-noise expression (identically
    the same formula); infinite memory keeps oscillating as cos(sqrt(nu) t)
    because the rapidly oscillating kernel averages the noise term away.
    """
    if model == "markov":
        if sigma_b2 is None or lambda0 is None:
            raise DomainError("markov asymptote needs sigma_b2 and lambda0")
        return white_noise_solution("markov", sigma_b2, lambda0, 0.0, t)
    if model == "non-markov":
        if nu is None:
            raise DomainError("non-markov asymptote needs nu")
        t = np.asarray(t, dtype=float)
        out = np.cos(np.sqrt(nu) * t)
        return out if out.ndim else float(out)
    raise DomainError(f"unknown model {model!r}")
