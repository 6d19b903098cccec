"""Acceptance suite: one test per exit criterion, each at its declared tolerance.

Every test records a PASS/FAIL line that the terminal summary reprints, so a
full run reads as a checklist.  Monte Carlo criteria run at pinned master
seeds; the statistical tolerances (3 standard errors and the like) make any
typical seed pass, and the pinned one keeps the suite deterministic.
"""

import json

import numpy as np
from scipy.special import j1

from conftest import record_acceptance
from qstoch import (ClosureProblem, CompoundOU, EnsembleSpec, GammaParams, NoiseKernel,
                    OscillatorConfig, TimeGrid, compound_autocorr_quadrature,
                    delta_limit_error, empirical_autocorr, ensemble_mean_green,
                    ensemble_paths, exact_markov_mean, invert_laplace, iq_closed_form,
                    iq_property_scan, iq_quadrature, laplace_dia, laplace_perturbative,
                    large_time_solution, limit_path_value, marginal_autocorr, ou_path,
                    q_exp, realization_rng, simulate_realization, volterra_dia,
                    volterra_perturbative, white_noise_solution)
from qstoch.cli import main
from qstoch.kernels import LimitPath


def _report(num, name, passed, detail):
    status = "PASS" if passed else "FAIL"
    record_acceptance(f"[ACCEPTANCE {num:02d}] {name}: {status} ({detail})")
    assert passed, f"criterion {num} failed: {detail}"


def test_acceptance_01_superstatistical_identity():
    a, c, s2 = 0.5, 2.0, 1.0
    grid = TimeGrid(0.05, 100)
    g = GammaParams(a, c)
    B = ensemble_paths(EnsembleSpec(100000, 42, "compound-ou"), CompoundOU(g, s2), grid)
    est = empirical_autocorr(B, max_lag=100, grid=grid)
    truth = s2 / (1.0 + a * est.lag_times) ** c
    zmax = float(np.max(np.abs(est.values - truth) / est.stderr))
    quad_gap = max(abs(marginal_autocorr(tau, s2, g) - compound_autocorr_quadrature(tau, s2, g))
                   for tau in (0.0, 0.5, 1.0, 2.0, 5.0))
    _report(1, "superstatistical identity", zmax <= 3.0 and quad_gap <= 1e-8,
            f"max |z| = {zmax:.2f} over 101 lags, closed-vs-quadrature = {quad_gap:.1e}")


def test_acceptance_02_exact_markov_oracle():
    grid = TimeGrid(0.01, 500)
    k = NoiseKernel.tsallis(1.0, 1.0, 1.2)
    cfg = OscillatorConfig("markov", 0.5)
    mc = ensemble_mean_green(EnsembleSpec(20000, 777, "gaussian-qexp"), k, cfg, grid)
    oracle = exact_markov_mean(k, 0.5, grid)
    z = np.abs(mc.values.real - oracle.values.real)[1:] / mc.stderr.real[1:]
    frac = float(np.mean(z <= 3.0))
    _report(2, "exact instantaneous-damping oracle", frac >= 0.99,
            f"|z| <= 3 at {100 * frac:.1f}% of nodes, max z = {z.max():.2f}")


def test_acceptance_03_markov_modulus_law():
    nu = 0.7
    worst = 0.0
    count = 0
    for gi, dt in enumerate((0.02, 0.01, 0.005)):
        grid = TimeGrid(dt, int(round(2.0 / dt)))
        decay = np.exp(-nu * grid.times)
        for r in range(100):
            b = ou_path(realization_rng(9000 + gi, r), 1.0, 1.0, grid)
            gf = simulate_realization(b, OscillatorConfig("markov", nu))
            worst = max(worst, float(np.max(np.abs(np.abs(gf.values) - decay))))
            count += 1
    _report(3, "modulus law per realization", worst <= 1e-10,
            f"max deviation {worst:.1e} over {count} realizations, three grids")


def test_acceptance_04_dia_bessel_oracle():
    grid = TimeGrid(0.005, 2000)
    cfg = OscillatorConfig("markov", 0.0)
    k = NoiseKernel.linear(1.0, 0.0)
    gf = volterra_dia(ClosureProblem("markov", "dia", k, cfg), grid)
    t = grid.times[1:]
    ref = np.concatenate([[1.0], j1(2.0 * t) / t])
    err = float(np.max(np.abs(gf.values.real - ref)))
    p0 = laplace_dia("markov", 0.0 + 0.0j, k, cfg).values[0]
    origin_err = abs(p0 - 1.0)
    _report(4, "self-consistent closure Bessel oracle",
            err <= 1e-4 and origin_err <= 1e-9,
            f"time-domain max err = {err:.2e}, transform at origin off by {origin_err:.1e}")


def test_acceptance_05_cross_domain_agreement():
    grid = TimeGrid(0.005, 2000)
    t = grid.times
    worst = 0.0
    worst_case = ""
    for model, nu in (("markov", 0.5), ("non-markov", 1.0)):
        cfg = OscillatorConfig(model, nu)
        damp = np.exp(-nu * t[1:]) if model == "markov" else 1.0
        for lam in (0.05, 0.1, 0.2):
            k = NoiseKernel.ou(1.0, lam)
            for method in ("perturbative", "dia"):
                prob = ClosureProblem(model, method, k, cfg)
                if method == "perturbative":
                    gf = volterra_perturbative(prob, grid)
                    inv = invert_laplace(
                        lambda p: laplace_perturbative(model, p, k, cfg), t[1:])
                else:
                    gf = volterra_dia(prob, grid)
                    inv = invert_laplace(
                        lambda p: laplace_dia(model, p, k, cfg).values, t[1:],
                        rtol=1e-6, atol=1e-6)
                gap = float(np.max(np.abs(gf.values.real[1:] - damp * inv)))
                if gap > worst:
                    worst, worst_case = gap, f"{model}/{method}/lam={lam}"
    _report(5, "cross-domain closure agreement", worst <= 2e-3,
            f"max gap = {worst:.2e} ({worst_case}); 12 cases on t in [0,10]")


def test_acceptance_06_white_noise_limit():
    rates = (10.0, 30.0, 100.0)
    ok = True
    details = []
    for model, nu in (("markov", 0.0), ("non-markov", 1.0)):
        cfg = OscillatorConfig(model, nu)
        gaps, dev_at_100 = [], None
        for lam in rates:
            dt = min(0.005, 0.1 / lam)
            grid = TimeGrid(dt, int(round(5.0 / dt)))
            k = NoiseKernel.ou(lam, lam)  # sigma_b2/lambda0 = 1 held
            pert = volterra_perturbative(
                ClosureProblem(model, "perturbative", k, cfg), grid).values.real
            dia = volterra_dia(ClosureProblem(model, "dia", k, cfg), grid).values.real
            if model == "markov":
                closed = white_noise_solution("markov", k.sigma_b2, k.lambda0, nu,
                                              grid.times)
                closed = np.exp(-nu * grid.times) * closed
            else:
                closed = white_noise_solution("non-markov", k.sigma_b2, k.lambda0, nu,
                                              grid.times)
            gaps.append(float(np.max(np.abs(pert - dia))))
            if lam == 100.0:
                dev_at_100 = max(float(np.max(np.abs(pert - closed))),
                                 float(np.max(np.abs(dia - closed))))
        monotone = gaps[0] > gaps[1] > gaps[2]
        ok = ok and monotone and gaps[-1] < 0.02 and dev_at_100 < 0.02
        details.append(f"{model}: gaps {gaps[0]:.4f}>{gaps[1]:.4f}>{gaps[2]:.4f}, "
                       f"dev vs closed form {dev_at_100:.4f}")
    _report(6, "short-correlation limit minimizes closure gap", ok, "; ".join(details))


def test_acceptance_07_large_time_limits():
    t = np.linspace(0.0, 10.0, 101)
    markov_identical = np.array_equal(
        large_time_solution("markov", t, sigma_b2=1.3, lambda0=0.7),
        white_noise_solution("markov", 1.3, 0.7, 0.0, t))
    nu = 1.0
    tg = np.linspace(0.05, 20.0, 400)
    inv = invert_laplace(lambda p: p / (p * p + nu), tg)
    err = float(np.max(np.abs(inv - np.cos(np.sqrt(nu) * tg))))
    _report(7, "large-time limits", markov_identical and err <= 1e-7,
            f"instantaneous branch identical: {markov_identical}, "
            f"oscillator inversion max err = {err:.1e} on (0, 20]")


def test_acceptance_08_zero_dispersion_lemma():
    rel_worst = 0.0
    for c in (1e2, 1e3, 1e4):
        err = delta_limit_error(c, lambda lam: lam * lam)
        rel_worst = max(rel_worst, abs(err - 1.0 / c) * c)
    monotone = True
    for probe in (lambda lam: np.exp(-lam), lambda lam: np.cos(lam)):
        seq = [delta_limit_error(c, probe) for c in (10.0, 1e2, 1e3, 1e4)]
        monotone = monotone and all(seq[i] > seq[i + 1] for i in range(3))
    _report(8, "zero-dispersion lemma", rel_worst <= 1e-12 and monotone,
            f"second-moment probe off 1/c by {rel_worst:.1e} relative, "
            f"smooth probes monotone: {monotone}")


def test_acceptance_09_limit_lemmas():
    iterated = limit_path_value(LimitPath(lambda N: 0.0, lambda N: 1e3, ""), 1, 1.0)
    bound_ok = True
    for q in np.linspace(0.2, 3.0, 15):
        for x in np.linspace(0.005, 0.1, 20):
            bound_ok = bound_ok and (abs(q_exp(-x, q) - (1.0 - x))
                                     <= x * x * max(1.0, abs(q)))
    from scipy.integrate import quad
    norm_worst = 0.0
    for lam in (0.5, 5.0, 50.0):
        val, _ = quad(lambda u: lam * np.exp(-lam * u), 0.0, np.inf, epsabs=1e-13)
        norm_worst = max(norm_worst, abs(val - 1.0))
    _report(9, "kernel limit lemmas",
            iterated < 1e-100 and bound_ok and norm_worst <= 1e-10,
            f"iterated limit = {iterated:.1e}, linearization bound holds: {bound_ok}, "
            f"delta-weight normalization off by {norm_worst:.1e}")


def test_acceptance_10_double_integral_properties():
    cl = iq_closed_form(1.0, 1.25, 1.0)
    qu = iq_quadrature(1.0, NoiseKernel.tsallis(1.0, 1.0, 1.25))
    value_ok = abs(cl - qu) <= 1e-7 and abs(cl - 0.3733333) <= 1e-7
    p1 = iq_property_scan("q", [0.2, 0.4, 0.6, 0.8], lambda0=0.1)
    p2 = iq_property_scan("lambda0", [0.5, 1.0, 2.0, 4.0], q=1.1)
    props_ok = p1.is_monotone("increasing") and p2.is_monotone("decreasing")
    _report(10, "double-integral closed form and monotonicity", value_ok and props_ok,
            f"value {cl:.7f} vs quadrature gap {abs(cl - qu):.1e}; "
            f"q-scan {p1.direction}, rate-scan {p2.direction}")


def test_acceptance_11_reproducibility(tmp_path):
    outdir = tmp_path / "run"
    config = {
        "schema_version": 1,
        "model": "markov",
        "kernel": {"kind": "tsallis", "sigma_b2": 1.0, "lambda0": 1.0, "q": 1.2},
        "oscillator": {"nu": 0.5},
        "grid": {"dt": 0.01, "t_max": 1.0},
        "ensemble": {"n_realizations": 512, "master_seed": 20240807,
                     "sampler": "gaussian-qexp"},
        "output": {"directory": str(outdir), "formats": ["csv", "json"]},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    assert main(["simulate", str(cfg_path), "--threads", "1"]) == 0
    names = ("monte_carlo.csv", "oracle.csv", "summary.json")
    first = {n: (outdir / n).read_bytes() for n in names}
    # re-run from the embedded config, same directory, different thread cap
    embedded = json.loads(first["summary.json"].decode())["config"]
    rerun_path = tmp_path / "rerun.json"
    rerun_path.write_text(json.dumps(embedded))
    assert main(["simulate", str(rerun_path), "--threads", "4"]) == 0
    identical = all((outdir / n).read_bytes() == first[n] for n in names)
    _report(11, "bit-identical reruns from embedded config", identical,
            f"{len(names)} artifacts byte-compared across --threads 1 vs 4")
