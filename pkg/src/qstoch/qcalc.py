"""q-deformed exponential/logarithm and non-extensive entropy of discrete distributions.

The entropic index q controls the deformation; q = 1 recovers the ordinary
exponential, logarithm and Boltzmann-Gibbs entropy.  All entropies are
returned with the Boltzmann constant set to one.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDistributionError, DomainError

# Below this distance from q = 1 the deformed formulas are evaluated on the
# classical branch to avoid catastrophic cancellation in 1/(1-q).
Q_BRANCH_EPS = 1e-8

PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class QIndex:
    """Entropic index q together with the cached complement ell = 1 - q."""

    q: float
    ell: float = field(init=False)

    def __post_init__(self):
        q = float(self.q)
        if not np.isfinite(q):
            raise DomainError(f"entropic index must be finite, got {q!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "ell", 1.0 - q)

    @property
    def is_classical(self) -> bool:
        return abs(self.ell) < Q_BRANCH_EPS


def _q_value(q) -> float:
    return q.q if isinstance(q, QIndex) else float(q)


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability vector over W >= 1 states."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise DomainError("distribution must be a non-empty 1-d vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise DomainError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > PROB_SUM_TOL:
            raise DomainError(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "p", p)

    def __len__(self):
        return self.p.size


def _prob_vector(d) -> np.ndarray:
    return d.p if isinstance(d, DiscreteDistribution) else DiscreteDistribution(np.asarray(d, dtype=float)).p


def q_exp(x, q):
    """Deformed exponential [1 + (1-q)x]^{1/(1-q)}, cut off at zero.

    Wherever 1 + (1-q)x <= 0 the value is 0 (the standard max{0, .} cutoff);
    at q = 1 this is exp(x).  Accepts scalars or arrays in ``x``.
    """
    qv = _q_value(q)
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)):
        raise DomainError("q_exp requires finite arguments")
    ell = 1.0 - qv
    if abs(ell) < Q_BRANCH_EPS:
        out = np.exp(x)
        return out if out.ndim else float(out)
    base = 1.0 + ell * x
    pos = base > 0.0
    out = np.zeros_like(base)
    # log1p keeps accuracy when (1-q)x is small
    out[pos] = np.exp(np.log1p(ell * x[pos]) / ell)
    return out if out.ndim else float(out)


def q_log(x, q):
    """Deformed logarithm (x^{1-q} - 1)/(1-q) for x > 0; ln x at q = 1."""
    qv = _q_value(q)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or np.any(~np.isfinite(x)):
        raise DomainError("q_log requires x > 0")
    ell = 1.0 - qv
    if abs(ell) < Q_BRANCH_EPS:
        out = np.log(x)
    else:
        out = np.expm1(ell * np.log(x)) / ell
    return out if out.ndim else float(out)


def tsallis_entropy(d, q) -> float:
    """Non-extensive entropy (1 - sum p_i^q)/(q - 1); Boltzmann-Gibbs at q = 1.

    States with p_i = 0 contribute nothing, for any q (measure-zero
    convention); k_B = 1.
    """
    qv = _q_value(q)
    p = _prob_vector(d)
    pos = p[p > 0.0]
    if abs(qv - 1.0) < Q_BRANCH_EPS:
        return float(-np.sum(pos * np.log(pos)))
    return float((1.0 - np.sum(pos**qv)) / (qv - 1.0))


def escort_probabilities(d, q) -> DiscreteDistribution:
    """Reweighted distribution P_i = p_i^q / sum_j p_j^q."""
    qv = _q_value(q)
    p = _prob_vector(d)
    if not np.any(p > 0.0):
        raise DegenerateDistributionError("escort of an all-zero vector")
    if qv <= 0.0 and np.any(p == 0.0):
        raise DomainError("p_i = 0 with q <= 0 makes the escort weights diverge")
    # scale by the largest probability so p^q cannot overflow for large q
    w = np.zeros_like(p)
    pos = p > 0.0
    pmax = p[pos].max()
    w[pos] = (p[pos] / pmax) ** qv
    return DiscreteDistribution(w / w.sum())


def maxent_distribution(energies, beta, q) -> DiscreteDistribution:
    """Distribution maximizing the non-extensive entropy at inverse temperature beta.

    p_i is proportional to [1 - (1-q) beta E_i]^{1/(1-q)}, with states cut
    off to zero where the bracket is non-positive; the normalizer plays the
    role of the generalized partition value.  beta = 0 gives the uniform
    distribution; q -> 1 gives the Gibbs weights exp(-beta E_i)/Z.
    """
    qv = _q_value(q)
    E = np.asarray(energies, dtype=float)
    if E.ndim != 1 or E.size < 1 or np.any(~np.isfinite(E)):
        raise DomainError("energies must be a finite 1-d vector")
    beta = float(beta)
    if not np.isfinite(beta):
        raise DomainError("beta must be finite")
    if abs(qv - 1.0) < Q_BRANCH_EPS:
        # shift for overflow safety; drops out after normalization
        w = np.exp(-beta * E + (beta * E).min())
    else:
        w = q_exp(-beta * E, qv)
        w = np.atleast_1d(w)
    total = w.sum()
    if total <= 0.0:
        raise DegenerateDistributionError("every state is cut off at this beta")
    return DiscreteDistribution(w / total)
