"""Plot-ready CSV and JSON emission with atomic writes and embedded configs.

Every artifact carries the resolved configuration that produced it (a
``# config=...`` comment line in CSV, a ``config`` key in JSON) so any output
can be reproduced from the file alone.  Writes go through a temporary file
and an atomic rename.
"""

import json
import os
import tempfile

import numpy as np

from .errors import ConfigError

_FMT = "%.17g"  # round-trips float64 exactly


def atomic_write_text(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _config_comment(config) -> str:
    if config is None:
        return ""
    return "# config=" + json.dumps(config, sort_keys=True, separators=(",", ":")) + "\n"


def write_curve_csv(path: str, t, values, stderr=None, config=None):
    """Time-domain curve: columns t,re,im and optionally stderr_re,stderr_im."""
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=complex)
    lines = [_config_comment(config)]
    if stderr is None:
        lines.append("t,re,im\n")
        for ti, vi in zip(t, v):
            lines.append(f"{_FMT % ti},{_FMT % vi.real},{_FMT % vi.imag}\n")
    else:
        s = np.asarray(stderr, dtype=complex)
        lines.append("t,re,im,stderr_re,stderr_im\n")
        for ti, vi, si in zip(t, v, s):
            lines.append(f"{_FMT % ti},{_FMT % vi.real},{_FMT % vi.imag},"
                         f"{_FMT % si.real},{_FMT % si.imag}\n")
    atomic_write_text(path, "".join(lines))


def write_laplace_csv(path: str, solution, config=None):
    """Transform dump: columns re_p,im_p,re_val,im_val,depth."""
    lines = [_config_comment(config), "re_p,im_p,re_val,im_val,depth\n"]
    for p, v in zip(solution.abscissae.ravel(), solution.values.ravel()):
        lines.append(f"{_FMT % p.real},{_FMT % p.imag},{_FMT % v.real},"
                     f"{_FMT % v.imag},{solution.depth}\n")
    atomic_write_text(path, "".join(lines))


def write_path_csv(path: str, t, b, config=None):
    """Noise realization dump: columns t,b."""
    lines = [_config_comment(config), "t,b\n"]
    for ti, bi in zip(np.asarray(t, float), np.asarray(b, float)):
        lines.append(f"{_FMT % ti},{_FMT % bi}\n")
    atomic_write_text(path, "".join(lines))


def write_json(path: str, obj):
    atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def read_curve_csv(path: str) -> dict:
    """Read back a curve CSV; returns column arrays plus the embedded config."""
    config = None
    header = None
    rows = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# config="):
                    config = json.loads(line[len("# config="):])
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append([float(x) for x in line.split(",")])
    if header is None:
        raise ConfigError(f"{path}: no header row")
    data = np.asarray(rows, dtype=float)
    out = {name: data[:, i] for i, name in enumerate(header)}
    out["_config"] = config
    return out
