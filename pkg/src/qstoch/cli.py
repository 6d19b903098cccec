"""Command-line experiment runner.

Subcommands::

    qstoch verify <suite>            invariant suites, JSON report, exit 0/1
    qstoch simulate <config.json>    Monte Carlo ensemble + oracle curves
    qstoch closure <config.json>     time-domain and Laplace-inverted closures
    qstoch compare <config.json>     aligned-grid error metrics, pass/fail

Exit codes: 0 success, 1 check/tolerance failure, 2 configuration error.
Every artifact embeds the resolved config and master seed; re-running a
command from the embedded config reproduces the files byte for byte.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import closures as cl
from . import dataio
from . import verify as vf
from .errors import ConfigError, DomainError, GridMismatchError, QstochError
from .gamma_compound import GammaParams
from .kernels import NoiseKernel
from .noise import CompoundOU, EnsembleSpec, TimeGrid, ensemble_paths
from .oscillator import (OscillatorConfig, ensemble_mean_green, exact_compound_markov_mean,
                         exact_markov_mean)

SCHEMA_VERSION = 1


# ----------------------------------------------------------------------------
# config plumbing
# ----------------------------------------------------------------------------

def _require(cfg: dict, key: str, path: str):
    if key not in cfg:
        raise ConfigError(f"{path}.{key}: missing required key")
    return cfg[key]


def _check_keys(cfg: dict, allowed, path: str):
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(cfg) - set(allowed)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")


def _load_config(path: str) -> dict:
    try:
        with open(path) as f:
            cfg = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    version = cfg.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    return cfg


def _build(label, ctor, /, **kwargs):
    try:
        return ctor(**kwargs)
    except QstochError as e:
        raise ConfigError(f"{label}: {e}") from e


def _parse_kernel(cfg: dict, path: str) -> NoiseKernel:
    _check_keys(cfg, {"kind", "sigma_b2", "lambda0", "q"}, path)
    kind = _require(cfg, "kind", path)
    return _build(path, NoiseKernel, kind=kind,
                  sigma_b2=float(_require(cfg, "sigma_b2", path)),
                  lambda0=float(_require(cfg, "lambda0", path)),
                  q=float(cfg["q"]) if "q" in cfg and cfg["q"] is not None else None)


def _parse_compound(cfg: dict, path: str) -> CompoundOU:
    _check_keys(cfg, {"a", "c", "sigma_b2"}, path)
    gamma = _build(path, GammaParams, a=float(_require(cfg, "a", path)),
                   c=float(_require(cfg, "c", path)))
    return _build(path, CompoundOU, gamma=gamma,
                  sigma_b2=float(_require(cfg, "sigma_b2", path)))


def _parse_grid(cfg: dict, path: str) -> TimeGrid:
    _check_keys(cfg, {"dt", "t_max", "n"}, path)
    dt = float(_require(cfg, "dt", path))
    if "n" in cfg:
        return _build(path, TimeGrid, dt=dt, n=int(cfg["n"]))
    return _build(path, TimeGrid.from_t_max, dt=dt, t_max=float(_require(cfg, "t_max", path)))


def _parse_oscillator(cfg: dict, model: str, path: str) -> OscillatorConfig:
    _check_keys(cfg, {"nu", "mu"}, path)
    mu = cfg.get("mu")
    return _build(path, OscillatorConfig, model=model,
                  nu=float(_require(cfg, "nu", path)),
                  mu=float(mu) if mu is not None else None)


def _parse_output(cfg: dict, path: str, override_dir=None) -> dict:
    _check_keys(cfg, {"directory", "formats", "dump_paths"}, path)
    out = {
        "directory": _require(cfg, "directory", path),
        "formats": cfg.get("formats", ["csv", "json"]),
        "dump_paths": int(cfg.get("dump_paths", 0)),
    }
    for fmt in out["formats"]:
        if fmt not in ("csv", "json"):
            raise ConfigError(f"{path}.formats: unknown format {fmt!r}")
    if out["dump_paths"] < 0:
        raise ConfigError(f"{path}.dump_paths: must be >= 0")
    if override_dir:
        out["directory"] = override_dir
    return out


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def cmd_verify(args) -> int:
    suites = sorted(vf.SUITES) if args.suite == "all" else [args.suite]
    reports = [vf.run_suite(s) for s in suites]
    payload = {"schema_version": SCHEMA_VERSION, "command": "verify",
               "reports": [r.to_dict() for r in reports],
               "passed": all(r.passed for r in reports)}
    text = json.dumps(payload, sort_keys=True, indent=2)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        dataio.write_json(os.path.join(args.out, "verify_report.json"), payload)
    print(text)
    return 0 if payload["passed"] else 1


def _resolved_simulate_config(cfg: dict, seed_override) -> dict:
    resolved = json.loads(json.dumps(cfg))  # deep copy
    resolved["schema_version"] = SCHEMA_VERSION
    if seed_override is not None:
        resolved["ensemble"]["master_seed"] = int(seed_override)
    return resolved


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"schema_version", "model", "kernel", "compound", "oscillator",
                      "grid", "ensemble", "output"}, "config")
    cfg = _resolved_simulate_config(cfg, args.seed)

    ens_cfg = _require(cfg, "ensemble", "config")
    _check_keys(ens_cfg, {"n_realizations", "master_seed", "sampler"}, "config.ensemble")
    spec = _build("config.ensemble", EnsembleSpec,
                  n_realizations=int(_require(ens_cfg, "n_realizations", "config.ensemble")),
                  master_seed=int(_require(ens_cfg, "master_seed", "config.ensemble")),
                  sampler=_require(ens_cfg, "sampler", "config.ensemble"))

    model = _require(cfg, "model", "config")
    grid = _parse_grid(_require(cfg, "grid", "config"), "config.grid")
    osc = _parse_oscillator(_require(cfg, "oscillator", "config"), model, "config.oscillator")

    if spec.sampler == "compound-ou":
        if "compound" not in cfg:
            raise ConfigError("config.compound: required for the compound-ou sampler")
        noise_model = _parse_compound(cfg["compound"], "config.compound")
    else:
        if "kernel" not in cfg:
            raise ConfigError(f"config.kernel: required for the {spec.sampler} sampler")
        noise_model = _parse_kernel(cfg["kernel"], "config.kernel")

    out = _parse_output(_require(cfg, "output", "config"), "config.output", args.out)
    cfg["output"] = {k: v for k, v in out.items()}
    outdir = out["directory"]
    os.makedirs(outdir, exist_ok=True)

    mc = ensemble_mean_green(spec, noise_model, osc, grid)
    files = []
    if "csv" in out["formats"]:
        dataio.write_curve_csv(os.path.join(outdir, "monte_carlo.csv"), grid.times,
                               mc.values, stderr=mc.stderr, config=cfg)
        files.append("monte_carlo.csv")

    oracle = None
    if model == "markov":
        if spec.sampler in ("gaussian-qexp", "ou"):
            oracle = exact_markov_mean(noise_model, osc.nu, grid)
        else:
            oracle = exact_compound_markov_mean(noise_model.gamma, noise_model.sigma_b2,
                                                osc.nu, grid)
    summary = {"schema_version": SCHEMA_VERSION, "command": "simulate", "config": cfg}
    if oracle is not None:
        if "csv" in out["formats"]:
            dataio.write_curve_csv(os.path.join(outdir, "oracle.csv"), grid.times,
                                   oracle.values, config=cfg)
            files.append("oracle.csv")
        se = np.maximum(mc.stderr.real, 1e-300)
        z = np.abs(mc.values.real - oracle.values.real) / se
        z = z[1:]  # t = 0 is exact by construction
        summary["z_scores"] = {"max": float(z.max()),
                               "fraction_within_3": float(np.mean(z <= 3.0)),
                               "nodes": int(z.size)}
    if out["dump_paths"] > 0:
        B = ensemble_paths(spec, noise_model, grid)
        for r in range(min(out["dump_paths"], spec.n_realizations)):
            name = f"path_{r:04d}.csv"
            dataio.write_path_csv(os.path.join(outdir, name), grid.times, B[r], config=cfg)
            files.append(name)
    summary["files"] = files
    if "json" in out["formats"]:
        dataio.write_json(os.path.join(outdir, "summary.json"), summary)
    return 0


def cmd_closure(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"schema_version", "model", "methods", "kernel", "oscillator",
                      "grid", "laplace", "output"}, "config")
    cfg["schema_version"] = SCHEMA_VERSION
    model = _require(cfg, "model", "config")
    if model not in cl.CLOSURE_MODELS:
        raise ConfigError(f"config.model: closures support {cl.CLOSURE_MODELS}")
    methods = _require(cfg, "methods", "config")
    for m in methods:
        if m not in cl.METHODS:
            raise ConfigError(f"config.methods: unknown method {m!r}")
    kernel = _parse_kernel(_require(cfg, "kernel", "config"), "config.kernel")
    grid = _parse_grid(_require(cfg, "grid", "config"), "config.grid")
    osc = _parse_oscillator(_require(cfg, "oscillator", "config"), model, "config.oscillator")

    lap_cfg = cfg.get("laplace", {})
    _check_keys(lap_cfg, {"abscissae"}, "config.laplace")
    if "abscissae" in lap_cfg:
        absc = np.array([complex(re, im) for re, im in lap_cfg["abscissae"]])
    else:
        absc = np.logspace(-1, 2, 40).astype(complex)

    out = _parse_output(_require(cfg, "output", "config"), "config.output", args.out)
    cfg["output"] = {k: v for k, v in out.items()}
    outdir = out["directory"]
    os.makedirs(outdir, exist_ok=True)

    t = grid.times
    files = []
    for method in methods:
        stem = f"{model}_{method}"
        if kernel.kind == "white":
            # closed-form branch: both closures coincide in this limit
            values = cl.white_noise_solution(model, kernel.sigma_b2, kernel.lambda0,
                                             osc.nu, t)
            if model == "markov":
                values = np.exp(-osc.nu * t) * values
            dataio.write_curve_csv(os.path.join(outdir, f"{stem}_time.csv"), t,
                                   values.astype(complex), config=cfg)
            files.append(f"{stem}_time.csv")
            if method == "dia":
                sol = cl.laplace_dia(model, absc, kernel, osc)
            else:
                sol = cl.LaplaceSolution(absc, cl.laplace_perturbative(model, absc, kernel, osc), 1)
            dataio.write_laplace_csv(os.path.join(outdir, f"{stem}_laplace.csv"), sol,
                                     config=cfg)
            files.append(f"{stem}_laplace.csv")
            continue
        prob = cl.ClosureProblem(model, method, kernel, osc)
        time_gf = (cl.volterra_dia if method == "dia" else cl.volterra_perturbative)(prob, grid)
        dataio.write_curve_csv(os.path.join(outdir, f"{stem}_time.csv"), t,
                               time_gf.values, config=cfg)
        files.append(f"{stem}_time.csv")

        if method == "dia":
            def F(P, _k=kernel, _o=osc):
                return cl.laplace_dia(model, P, _k, _o).values
            sol = cl.laplace_dia(model, absc, kernel, osc)
            # recursion noise in F caps the usable contour accuracy
            inv_tol = 1e-6
        else:
            def F(P, _k=kernel, _o=osc):
                return cl.laplace_perturbative(model, P, _k, _o)
            sol = cl.LaplaceSolution(absc, cl.laplace_perturbative(model, absc, kernel, osc), 1)
            inv_tol = 2e-8
        inverted = cl.invert_laplace(F, t[1:], rtol=inv_tol, atol=inv_tol)
        if model == "markov":
            inverted = np.exp(-osc.nu * t[1:]) * inverted
        inv_values = np.concatenate([[1.0], inverted]).astype(complex)
        dataio.write_curve_csv(os.path.join(outdir, f"{stem}_laplace_inv.csv"), t,
                               inv_values, config=cfg)
        files.append(f"{stem}_laplace_inv.csv")
        dataio.write_laplace_csv(os.path.join(outdir, f"{stem}_laplace.csv"), sol, config=cfg)
        files.append(f"{stem}_laplace.csv")

    if "json" in out["formats"]:
        dataio.write_json(os.path.join(outdir, "summary.json"),
                          {"schema_version": SCHEMA_VERSION, "command": "closure",
                           "config": cfg, "files": files})
    return 0


def _pair_metrics(ref: dict, other: dict) -> dict:
    if ref["t"].shape != other["t"].shape or np.any(ref["t"] != other["t"]):
        raise GridMismatchError("curves are not on the same grid")
    dre = other["re"] - ref["re"]
    dim = other.get("im", 0.0) - ref.get("im", 0.0)
    err = np.hypot(dre, dim)
    metrics = {"max_abs": float(err.max()), "rms": float(np.sqrt(np.mean(err**2)))}
    se = None
    for cols in (ref, other):
        if "stderr_re" in cols:
            se = np.maximum(cols["stderr_re"], 1e-300)
    if se is not None:
        z = np.abs(dre) / se
        z = z[1:] if z.size > 1 else z
        metrics["z_max"] = float(z.max())
        metrics["z_fraction_within_3"] = float(np.mean(z <= 3.0))
    return metrics


def cmd_compare(args) -> int:
    cfg = _load_config(args.config)
    _check_keys(cfg, {"schema_version", "curves", "tolerances"}, "config")
    curves = _require(cfg, "curves", "config")
    if not isinstance(curves, list) or len(curves) < 2:
        raise ConfigError("config.curves: need at least two curve sources")
    loaded = []
    for i, entry in enumerate(curves):
        _check_keys(entry, {"path", "label"}, f"config.curves[{i}]")
        path = _require(entry, "path", f"config.curves[{i}]")
        try:
            cols = dataio.read_curve_csv(path)
        except OSError as e:
            raise ConfigError(f"config.curves[{i}].path: {e}") from e
        loaded.append((entry.get("label", path), cols))

    tolerances = cfg.get("tolerances", {})
    _check_keys(tolerances, {"max_abs", "rms", "z_max", "z_fraction"}, "config.tolerances")

    ref_label, ref = loaded[0]
    pairs = []
    overall = True
    for label, cols in loaded[1:]:
        metrics = _pair_metrics(ref, cols)
        verdicts = {}
        for key in ("max_abs", "rms", "z_max"):
            if key in tolerances:
                if key not in metrics:
                    raise ConfigError(f"config.tolerances.{key}: curves carry no stderr")
                verdicts[key] = metrics[key] <= float(tolerances[key])
        if "z_fraction" in tolerances:
            zf = tolerances["z_fraction"]
            _check_keys(zf, {"z", "fraction"}, "config.tolerances.z_fraction")
            if "z_fraction_within_3" not in metrics:
                raise ConfigError("config.tolerances.z_fraction: curves carry no stderr")
            want = float(zf.get("fraction", 0.99))
            verdicts["z_fraction"] = metrics["z_fraction_within_3"] >= want
        passed = all(verdicts.values()) if verdicts else True
        overall = overall and passed
        pairs.append({"reference": ref_label, "curve": label, "metrics": metrics,
                      "verdicts": verdicts, "passed": passed})

    report = {"schema_version": SCHEMA_VERSION, "command": "compare", "config": cfg,
              "pairs": pairs, "passed": overall}
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        dataio.write_json(os.path.join(args.out, "compare_report.json"), report)
    print(text)
    return 0 if overall else 1


# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qstoch",
                                     description="stochastic-oscillator laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap; results are identical for any value")

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=sorted(vf.SUITES) + ["all"])
    common(p)
    p.set_defaults(func=cmd_verify)

    for name, fn in (("simulate", cmd_simulate), ("closure", cmd_closure),
                     ("compare", cmd_compare)):
        p = sub.add_parser(name)
        p.add_argument("config")
        common(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, GridMismatchError, DomainError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except QstochError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
