"""Executable invariant suites: every lemma-like statement as a measured check.

Each suite returns a list of Check records with the measured value, the
declared tolerance and a pass flag; the CLI serializes them to JSON and maps
any failure onto a nonzero exit status.
"""

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad

from . import gamma_compound as gc
from . import kernels as kn
from . import qcalc as qc


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}


def _check(name, value, tol, detail=""):
    return Check(name=name, passed=bool(value <= tol), value=float(value),
                 tolerance=float(tol), detail=detail)


def _flag(name, ok, detail=""):
    ok = bool(ok)
    return Check(name=name, passed=ok, value=1.0 if ok else 0.0, tolerance=1.0,
                 detail=detail)


def _random_distribution(rng, w):
    p = rng.random(w)
    return p / p.sum()


# ----------------------------------------------------------------------------


def suite_qcore() -> SuiteReport:
    rep = SuiteReport("qcore")
    qs = [0.2, 0.5, 0.9, 1.3, 2.0, 3.0]
    xs = np.linspace(-2.0, 3.0, 41)

    worst = 0.0
    for q in qs:
        y = qc.q_exp(xs, q)
        mask = y > 0.0
        worst = max(worst, np.max(np.abs(qc.q_log(y[mask], q) - xs[mask])))
    rep.checks.append(_check("q_log inverts q_exp", worst, 1e-10))

    ab = np.linspace(0.05, 10.0, 25)
    worst = 0.0
    for q in qs:
        la = qc.q_log(ab, q)
        lhs = qc.q_log(np.outer(ab, ab).ravel(), q)
        rhs = (la[:, None] + la[None, :] + (1.0 - q) * np.outer(la, la)).ravel()
        worst = max(worst, np.max(np.abs(lhs - rhs)))
    rep.checks.append(_check("pseudo-additivity of q_log", worst, 1e-10))

    rng = np.random.default_rng(2024)
    worst = 0.0
    for q in qs:
        pa = _random_distribution(rng, 5)
        pb = _random_distribution(rng, 7)
        sa, sb = qc.tsallis_entropy(pa, q), qc.tsallis_entropy(pb, q)
        sab = qc.tsallis_entropy(np.outer(pa, pb).ravel(), q)
        worst = max(worst, abs(sab - (sa + sb + (1.0 - q) * sa * sb)))
    rep.checks.append(_check("non-extensive composition", worst, 1e-10))

    worst = 0.0
    for w in (2, 5, 16):
        d = _random_distribution(rng, w)
        bg = qc.tsallis_entropy(d, 1.0)
        worst = max(worst, abs(qc.tsallis_entropy(d, 1.0 + 1e-6) - bg),
                    abs(qc.tsallis_entropy(d, 1.0 - 1e-6) - bg))
    rep.checks.append(_check("continuity at q=1", worst, 1e-5))

    ok = True
    for q in (0.5, 1.0, 2.0):
        for w in (4, 16):
            s_uniform = qc.tsallis_entropy(np.full(w, 1.0 / w), q)
            best = max(qc.tsallis_entropy(_random_distribution(rng, w), q)
                       for _ in range(1000))
            ok = ok and best <= s_uniform + 1e-12
    rep.checks.append(_flag("uniform maximizes entropy", ok))

    worst, order_ok = 0.0, True
    for q in (1.5, 2.0, 7.0):
        p = np.sort(rng.random(9))
        p = p / p.sum()
        esc = qc.escort_probabilities(p, q)
        worst = max(worst, abs(esc.p.sum() - 1.0))
        order_ok = order_ok and np.all(np.argsort(esc.p) == np.argsort(p))
    rep.checks.append(_check("escort normalization", worst, 1e-12))
    rep.checks.append(_flag("escort preserves ordering (q>1)", order_ok))
    return rep


def suite_gamma() -> SuiteReport:
    rep = SuiteReport("gamma")
    worst = 0.0
    for a in (0.1, 1.0, 10.0):
        for c in (0.5, 1.0, 4.0, 100.0):
            g = gc.GammaParams(a, c)
            hi = a * (c + 40.0 * np.sqrt(c) + 60.0)
            val, _ = quad(lambda lam: gc.gamma_pdf(lam, g), 0.0, hi, limit=300,
                          epsabs=1e-12, epsrel=1e-12)
            worst = max(worst, abs(val - 1.0))
    rep.checks.append(_check("rate density normalization", worst, 1e-10))

    tau = np.linspace(0.0, 50.0, 401)
    worst = 0.0
    for (a, c) in ((0.25, 4.0), (0.5, 2.0), (1.0, 1.0), (0.05, 30.0)):
        worst = max(worst, np.max(gc.marginal_matches_qexp(tau, 1.7, gc.GammaParams(a, c))))
    rep.checks.append(_check("compound equals q-exponential", worst, 1e-12))

    worst = 0.0
    for (lam0, s2) in ((1.0, 0.25), (2.0, 2.0), (0.3, 0.05)):
        m = gc.RateMoments(lam0, s2)
        g = gc.params_from_moments(m)
        qi = gc.q_from_shape(g.c)
        worst = max(worst, abs((qi.q - 1.0) - s2 / lam0**2))
    rep.checks.append(_check("rate dispersion sets q - 1", worst, 1e-12))

    ok = True
    for probe in (lambda lam: np.exp(-lam), lambda lam: 1.0 / (1.0 + lam)):
        errs = [gc.delta_limit_error(c, probe) for c in (10.0, 1e2, 1e3, 1e4)]
        ok = ok and all(errs[i] > errs[i + 1] for i in range(len(errs) - 1))
    rep.checks.append(_flag("zero-dispersion error decreasing in c", ok))
    return rep


def suite_kernels() -> SuiteReport:
    rep = SuiteReport("kernels")
    tau = np.linspace(0.0, 20.0, 801)
    ou = kn.eval_kernel(kn.NoiseKernel.ou(1.3, 0.7), tau)
    worst = 0.0
    for q in (1.0 - 1e-7, 1.0 + 1e-7):
        tq = kn.eval_kernel(kn.NoiseKernel.tsallis(1.3, 0.7, q), tau)
        worst = max(worst, np.max(np.abs(tq - ou)))
    rep.checks.append(_check("q->1 degeneration to exponential", worst, 1e-6))

    ok = True
    for q in np.linspace(0.2, 3.0, 15):
        for x in np.linspace(0.005, 0.1, 20):
            err = abs(qc.q_exp(-x, q) - (1.0 - x))
            ok = ok and err <= x * x * max(1.0, abs(q))
    rep.checks.append(_flag("first-order accuracy at small lag", ok))

    k = kn.NoiseKernel.tsallis(1.0, 1.0, 1.25)
    h = 1e-4
    worst = 0.0
    for t in (0.5, 1.0, 3.0):
        dI = (kn.iq_quadrature(t + h, k, tol=1e-15)
              - kn.iq_quadrature(t - h, k, tol=1e-15)) / (2.0 * h)
        intg, _ = quad(lambda u: kn.eval_kernel(k, u), 0.0, t, epsabs=1e-12)
        worst = max(worst, abs(dI - intg))
    # one-sided second-order stencil at t = 0 (I(0) = I'(0) = 0)
    second = (-5.0 * kn.iq_quadrature(h, k, tol=1e-15)
              + 4.0 * kn.iq_quadrature(2 * h, k, tol=1e-15)
              - kn.iq_quadrature(3 * h, k, tol=1e-15)) / h**2
    worst2 = abs(second - 1.0)
    rep.checks.append(_check("dI/dt equals integrated kernel", worst, 1e-6))
    rep.checks.append(_check("d2I/dt2(0) equals kernel(0)", worst2, 1e-6))

    worst = 0.0
    for q in (0.3, 0.8, 1.1, 1.25, 1.8, 2.5):
        for lam in (0.5, 1.0, 2.0):
            for t in (0.5, 1.0, 5.0):
                cl = kn.iq_closed_form(t, q, lam)
                qu = kn.iq_quadrature(t, kn.NoiseKernel.tsallis(1.0, lam, q))
                worst = max(worst, abs(cl - qu))
    rep.checks.append(_check("closed form vs quadrature", worst, 1e-8))

    tq = kn.eval_kernel(kn.NoiseKernel.tsallis(1.0, 1.0, 1.4), tau)
    nonneg = bool(np.all(tq >= 0.0))
    sym = kn.eval_kernel(kn.NoiseKernel.tsallis(1.0, 1.0, 1.4), np.abs(-tau))
    rep.checks.append(_flag("non-negative for q>=1 and even in |tau|",
                           nonneg and np.array_equal(tq, sym)))
    return rep


def suite_appendix_b() -> SuiteReport:
    rep = SuiteReport("appendix-b")
    worst = 0.0
    for c in (1e2, 1e3, 1e4):
        err = gc.delta_limit_error(c, lambda lam: lam * lam)
        worst = max(worst, abs(err - 1.0 / c) * c)
    rep.checks.append(_check("second-moment probe error equals 1/c", worst, 1e-12,
                             detail="relative deviation"))

    e_const = gc.delta_limit_error(50.0, lambda lam: np.ones_like(np.asarray(lam, dtype=float)))
    rep.checks.append(_check("constant probe error vanishes", e_const, 1e-10))

    errs = {c: gc.delta_limit_error(c, lambda lam: np.exp(-lam)) for c in (1e2, 1e4)}
    ratio = errs[1e4] / errs[1e2]
    rep.checks.append(_check("smooth probe error scales like 1/c", abs(ratio - 1e-2), 2e-3,
                             detail=f"ratio={ratio:.4e}"))

    ok = True
    for probe in (lambda lam: np.exp(-lam), lambda lam: np.cos(lam)):
        seq = [gc.delta_limit_error(c, probe) for c in (10.0, 1e2, 1e3, 1e4)]
        ok = ok and all(seq[i] > seq[i + 1] for i in range(len(seq) - 1))
    rep.checks.append(_flag("error monotone decreasing in c", ok))
    return rep


def suite_appendix_c() -> SuiteReport:
    rep = SuiteReport("appendix-c")
    # iterated limit, classical branch first: exp(-lam t) at lam = 1e3
    path = kn.LimitPath(lambda N: 0.0, lambda N: 1e3, "classical branch, lam=1e3")
    v = kn.limit_path_value(path, N=1, t=1.0)
    rep.checks.append(_check("iterated limit vanishes", v, 1e-100))

    path = kn.LimitPath(lambda N: 1.0 / N, lambda N: 1.0, "ell=1/N, lam fixed")
    v = kn.limit_path_value(path, N=10**6, t=1.0)
    rep.checks.append(_check("classical limit along ell=1/N", abs(v - np.exp(-1.0)), 1e-6))

    path = kn.LimitPath(lambda N: 2.0**-N, lambda N: 2.0**N, "lam ell = 1 held")
    vals = [kn.limit_path_value(path, N, t=1.0) for N in (1, 10, 30)]
    rep.checks.append(_check("cutoff path is identically zero", max(vals), 0.0))

    ok = True
    for q in np.linspace(0.2, 3.0, 15):
        for x in np.linspace(0.005, 0.1, 20):
            ok = ok and abs(qc.q_exp(-x, q) - (1.0 - x)) <= x * x * max(1.0, abs(q))
    rep.checks.append(_flag("linearization bound on (q, lam t) grid", ok))

    worst = 0.0
    for lam in (0.5, 5.0, 50.0):
        val, _ = quad(lambda t: lam * np.exp(-lam * t), 0.0, np.inf, epsabs=1e-13)
        worst = max(worst, abs(val - 1.0))
    rep.checks.append(_check("delta-weight normalization", worst, 1e-10))
    return rep


def suite_appendix_d() -> SuiteReport:
    rep = SuiteReport("appendix-d")
    cl = kn.iq_closed_form(1.0, 1.25, 1.0)
    qu = kn.iq_quadrature(1.0, kn.NoiseKernel.tsallis(1.0, 1.0, 1.25))
    rep.checks.append(_check("closed form vs quadrature at q=1.25", abs(cl - qu), 1e-7,
                             detail=f"value={cl:.7f}"))
    rep.checks.append(_check("reference value 0.3733333", abs(cl - 0.3733333), 1e-7))

    r1 = kn.iq_property_scan("q", [0.2, 0.4, 0.6, 0.8], lambda0=0.1)
    rep.checks.append(_flag("I_q increasing in q for q<1", r1.is_monotone("increasing"),
                           detail=r1.direction))
    r2 = kn.iq_property_scan("lambda0", [0.5, 1.0, 2.0, 4.0], q=1.1)
    rep.checks.append(_flag("I_q decreasing in lambda0 for q>1", r2.is_monotone("decreasing"),
                           detail=r2.direction))
    r3 = kn.iq_property_scan("lambda0", [0.5, 1.0, 2.0, 4.0], q=1.0)
    rep.checks.append(_flag("classical-limit scan decreasing", r3.is_monotone("decreasing")))
    return rep


SUITES = {
    "qcore": suite_qcore,
    "gamma": suite_gamma,
    "kernels": suite_kernels,
    "appendix-b": suite_appendix_b,
    "appendix-c": suite_appendix_c,
    "appendix-d": suite_appendix_d,
}


def run_suite(name: str) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name]()
