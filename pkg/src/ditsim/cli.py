"""Command-line front end.

Subcommands emit deterministic CSV (17 significant digits, comma
delimiter, LF line endings, header row) plus a sidecar ``<out>.meta``
file echoing the fully resolved configuration.  Parameter precedence,
lowest to highest: built-in defaults, DITSIM_* environment variables,
``--config`` key=value file, command-line flags.

Exit codes: 0 success, 2 validation error, 3 numeric error.
"""
import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from ._backend import backend_name
from . import decomposition as dc
from . import dit_analysis as da
from . import source_model as sm
from . import winter_model as wm
from .faddeeva import FaddeevaOverflowError, wofz

ENV_PREFIX = "DITSIM_"


class ConfigError(ValueError):
    pass


def _parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def parse_grid(text):
    """start:stop:step -> inclusive float grid; a bare number -> [number]."""
    parts = str(text).split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"malformed grid {text!r}") from None
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3:
        raise ConfigError(f"grid {text!r} must be start:stop:step")
    start, stop, step = vals
    if step <= 0.0 or stop < start:
        raise ConfigError(f"grid {text!r} needs stop >= start and step > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def parse_window(text):
    parts = str(text).split(":")
    if len(parts) != 2:
        raise ConfigError(f"window {text!r} must be lo:hi")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"malformed window {text!r}") from None
    if not lo < hi:
        raise ConfigError(f"window {text!r} needs lo < hi")
    return lo, hi


# option name -> (python type, default); shared across env/config/flag layers
_OPTIONS = {
    "trace": {
        "k0I": (float, -0.0015),
        "x": (float, 1000.0),
        "t": (str, "100:1200:0.2"),
        "normalized": (bool, False),
        "out": (str, "trace.csv"),
        "plot": (str, ""),
    },
    "maxima": {
        "k0I": (float, -0.0015),
        "x": (float, 1000.0),
        "n_max": (int, 15),
        "t_window": (str, ""),
        "out": (str, "maxima.csv"),
    },
    "visibility": {
        "k0I_grid": (str, "-0.10:-0.005:0.005"),
        "x_grid": (str, "10:200:10"),
        "threads": (int, 1),
        "out": (str, "visibility.csv"),
    },
    "winter": {
        "wall": (str, "infinite"),
        "L": (float, 3.14),
        "U": (float, 161.35),
        "V": (float, 202.72),
        "x_obs": (float, 157.05),
        "dx": (float, 3.14 / 200.0),
        "dt": (float, 0.008),
        "t_max": (float, 170.0),
        "refine": (int, 1),
        "fit_window": (str, ""),
        "out": (str, "winter.csv"),
        "plot": (str, ""),
    },
    "faddeeva-check": {
        "table": (str, ""),
        "fuzz": (int, 10000),
        "seed": (int, 20260823),
        "out": (str, "faddeeva_check.txt"),
    },
}


def _flag(name):
    return "--" + name.replace("_", "-")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ditsim",
        description="Diffraction-in-time traces, maxima, visibility scans "
        "and the delta-barrier cross-check.",
    )
    parser.add_argument("--version", action="version", version=f"ditsim {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, opts in _OPTIONS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value override file")
        for opt, (typ, _default) in opts.items():
            if typ is bool:
                p.add_argument(_flag(opt), action="store_true", default=argparse.SUPPRESS)
            else:
                p.add_argument(_flag(opt), type=typ, default=argparse.SUPPRESS)
    return parser


def _read_config_file(path):
    out = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, _, val = line.partition("=")
                out[key.strip()] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return out


def resolve_config(subcommand, args):
    """Merge defaults, environment, config file and flags for a subcommand."""
    opts = _OPTIONS[subcommand]
    cfg = {k: default for k, (_t, default) in opts.items()}

    def coerce(key, raw):
        typ = opts[key][0]
        try:
            return _parse_bool(raw) if typ is bool else typ(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {raw!r}") from None

    for key in opts:
        raw = os.environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            cfg[key] = coerce(key, raw)
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            if key not in opts:
                raise ConfigError(f"unknown config key {key!r} for {subcommand}")
            cfg[key] = coerce(key, raw)
    for key in opts:
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    return cfg


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_meta(out_path, subcommand, cfg):
    with open(out_path + ".meta", "w", newline="\n") as fh:
        fh.write(f"subcommand={subcommand}\n")
        fh.write(f"version={__version__}\n")
        fh.write(f"backend={backend_name()}\n")
        for key in sorted(cfg):
            fh.write(f"{key}={cfg[key]}\n")


def _maybe_plot(path, t, curves, xlabel, ylabel):
    if not path:
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for label, y in curves:
        ax.plot(t, y, lw=0.9, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def cmd_trace(cfg):
    c = sm.make_carrier(cfg["k0I"])
    t = parse_grid(cfg["t"])
    if t.size == 0:
        raise ConfigError("t: empty time grid")
    trace = sm.density_trace(c, cfg["x"], t, normalized=cfg["normalized"])
    norm = sm.norm_constant(c) if cfg["normalized"] else 1.0

    rows = []
    for i, ti in enumerate(t):
        p = sm.make_point(c, cfg["x"], ti)
        d = dc.approx_density(c, p)
        pole_sq = abs(d.pole) ** 2 if d.pole_active else 0.0
        rows.append(
            (
                ti,
                trace[i, 1],
                trace[i, 2],
                d.approx_density / norm,
                abs(d.saddle) ** 2 / norm,
                pole_sq / norm,
                d.interference / norm,
                d.pole_active,
            )
        )
    header = [
        "t",
        "density_exact",
        "flux",
        "density_approx",
        "saddle_sq",
        "pole_sq",
        "interference",
        "pole_active",
    ]
    write_csv(cfg["out"], header, rows)
    _maybe_plot(
        cfg["plot"],
        t,
        [("exact", [r[1] for r in rows]), ("approx", [r[3] for r in rows])],
        "t",
        "density",
    )


def cmd_maxima(cfg):
    c = sm.make_carrier(cfg["k0I"])
    window = parse_window(cfg["t_window"]) if cfg["t_window"] else None
    records = da.maxima_records(c, cfg["x"], cfg["n_max"], t_window=window)
    rows = []
    for r in records:
        rel = abs(r.interval_measured - r.interval_predicted) / r.interval_predicted
        rows.append(
            (r.n, r.t_predicted, r.t_measured, r.interval_predicted, r.interval_measured, rel)
        )
    write_csv(
        cfg["out"],
        ["n", "T_pred", "T_meas", "interval_pred", "interval_meas", "rel_err"],
        rows,
    )


def cmd_visibility(cfg):
    k_grid = parse_grid(cfg["k0I_grid"])
    x_grid = parse_grid(cfg["x_grid"])
    if cfg["threads"] < 1:
        raise ConfigError("threads must be >= 1")
    best, surface = da.visibility_scan(k_grid, x_grid, threads=cfg["threads"])
    rows = [
        (v.k0I, v.x, v.delta, v.k0I == best.k0I and v.x == best.x) for v in surface
    ]
    write_csv(cfg["out"], ["k0I", "x", "delta", "is_argmax"], rows)


def cmd_winter(cfg):
    if cfg["wall"] not in ("infinite", "finite"):
        raise ConfigError(f"wall must be 'infinite' or 'finite', got {cfg['wall']!r}")
    if cfg["refine"] < 1:
        raise ConfigError("refine must be >= 1")
    wcfg = wm.WinterConfig(
        L=cfg["L"],
        U=cfg["U"],
        wall=cfg["wall"],
        V=cfg["V"],
        x_obs=cfg["x_obs"],
        dx=cfg["dx"],
        dt=cfg["dt"],
        t_max=cfg["t_max"],
    )
    if cfg["refine"] > 1:
        wcfg = wcfg.refined(cfg["refine"])
    result = wm.run(wcfg)
    trace = result.trace

    if cfg["fit_window"]:
        window = parse_window(cfg["fit_window"])
    else:
        window = (0.5 * cfg["x_obs"] + 10.0, cfg["t_max"] - 2.0)
    overlay = np.full(trace.shape[0], np.nan)
    try:
        fit = wm.fit_source_model(trace, window, cfg["x_obs"])
        overlay = wm.source_overlay(fit, cfg["x_obs"], trace[:, 0])
    except wm.FitWindowError as exc:
        print(f"source-model fit skipped: {exc}", file=sys.stderr)
    rows = [
        (trace[i, 0], trace[i, 1], trace[i, 2], overlay[i])
        for i in range(trace.shape[0])
    ]
    write_csv(cfg["out"], ["t", "density", "flux", "overlay"], rows)
    _maybe_plot(
        cfg["plot"],
        trace[:, 0],
        [("winter", trace[:, 1]), ("source model", overlay)],
        "t",
        "density",
    )


def cmd_faddeeva_check(cfg):
    table = cfg["table"]
    if not table:
        table = os.path.join(os.path.dirname(__file__), "data", "faddeeva_oracle.txt")
    z_list, w_list = [], []
    with open(table) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ConfigError(f"corrupted table row {lineno}: {line!r}")
            try:
                a, b, cr, ci = (float(p) for p in parts)
            except ValueError:
                raise ConfigError(f"corrupted table row {lineno}: {line!r}") from None
            z_list.append(complex(a, b))
            w_list.append(complex(cr, ci))
    if not z_list:
        raise ConfigError(f"table {table} contains no data rows")
    z = np.array(z_list)
    ref = np.array(w_list)
    err = np.abs(wofz(z) - ref) / np.abs(ref)
    max_err = float(err.max())

    rng = np.random.default_rng(cfg["seed"])
    n = cfg["fuzz"]
    zf = rng.uniform(-50.0, 50.0, n) + 1j * rng.uniform(0.0, 50.0, n)
    wf = wofz(zf)
    conj_gap = float(np.abs(wofz(-np.conj(zf)) - np.conj(wf)).max())
    bound_ok = bool(np.all(np.abs(wf) <= 1.0 + 1e-14))
    xr = rng.uniform(-25.0, 25.0, n)
    real_gap = float(np.abs(np.real(wofz(xr + 0j)) - np.exp(-(xr**2))).max())

    lines = [
        f"table rows checked: {z.size}",
        f"max relative error vs oracle: {max_err:.3e}",
        f"fuzz samples: {n}",
        f"conjugation identity max gap: {conj_gap:.3e}",
        f"real-axis identity max gap: {real_gap:.3e}",
        f"|w| <= 1 in upper half-plane: {'pass' if bound_ok else 'FAIL'}",
    ]
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    with open(cfg["out"], "w", newline="\n") as fh:
        fh.write(report)
    if max_err > 1e-12 or conj_gap > 1e-12 or real_gap > 1e-13 or not bound_ok:
        raise ArithmeticError("faddeeva check failed; see report")


_COMMANDS = {
    "trace": cmd_trace,
    "maxima": cmd_maxima,
    "visibility": cmd_visibility,
    "winter": cmd_winter,
    "faddeeva-check": cmd_faddeeva_check,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.subcommand, args)
        _COMMANDS[args.subcommand](cfg)
        write_meta(cfg["out"], args.subcommand, cfg)
    except (ConfigError, sm.NormalizationDivergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, FaddeevaOverflowError, wm.NormDriftError, RuntimeError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
