"""Experiment orchestration: config files, run modes, artifacts, plots.

A run is described by a flat key-value config with sections::

    [run]
    mode = simulate            # simulate|oracle_compare|critical_sweep|exact_only
    domain = circle            # circle|line
    output_dir = runs/demo

    [params]
    a = 0.5
    sigma = 1.0
    nu = 1.0

    [initial]
    kind = two_mode            # two_mode|pole_family|file
    amplitude = 4.0

    [controls]
    t_end = 1.2

Complex numbers are written ``re,im``.  All floats are echoed with full
precision (repr) so a manifest replays bit-exactly.  The environment
variable GCLM_OUTPUT_ROOT relocates relative output directories.
"""

from __future__ import annotations

import configparser
import dataclasses
import enum
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

import gclm
from gclm import collapse as collapse_mod
from gclm import exact, tracker
from gclm.dynamics import (
    RunControls,
    TerminalStatus,
    TimeSeries,
    simulate,
)
from gclm.spectral import (
    Domain,
    GclmParams,
    SpectralField,
    read_snapshot,
    write_snapshot,
)

__all__ = [
    "Mode",
    "RunConfig",
    "ConfigError",
    "two_mode_field",
    "parse_config",
    "write_config",
    "run",
    "emit_plots",
]


class Mode(enum.Enum):
    SIMULATE = "simulate"
    ORACLE_COMPARE = "oracle_compare"
    CRITICAL_SWEEP = "critical_sweep"
    EXACT_ONLY = "exact_only"


class ConfigError(ValueError):
    """A config file failed validation; the message names the field."""


@dataclass
class RunConfig:
    mode: Mode
    domain: Domain
    params: GclmParams
    initial: dict
    controls: RunControls
    output_dir: str
    sweep: dict = dc_field(default_factory=dict)


def two_mode_field(amplitude: float, grid_size: int,
                   domain: Domain = Domain.CIRCLE) -> SpectralField:
    """Two-mode initial data w0 = -A (sin x + sin(2x)/2)."""
    return SpectralField.from_function(
        lambda x: -amplitude * (np.sin(x) + 0.5 * np.sin(2.0 * x)),
        grid_size, domain)


# ---------------------------------------------------------------------------
# config parsing / echoing

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return f"{v.real!r},{v.imag!r}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_scalar(text: str):
    """Best-effort typed parse: bool, int, complex 're,im', float, string."""
    s = text.strip()
    low = s.lower()
    if low in ("true", "false"):
        return low == "true"
    if "," in s:
        re_s, im_s = s.split(",", 1)
        return complex(float(re_s), float(im_s))
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def parse_config(source) -> RunConfig:
    """Parse a config file (path, file object, or literal text)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    if isinstance(source, (str, os.PathLike)) and "\n" not in str(source):
        if not Path(source).exists():
            raise ConfigError(f"config file not found: {source}")
        cp.read(source)
    elif isinstance(source, str):
        cp.read_string(source)
    else:
        cp.read_file(source)
    try:
        run_sec = cp["run"]
        mode = Mode(run_sec.get("mode", "simulate").lower())
        domain = Domain(run_sec.get("domain", "circle").lower())
        output_dir = run_sec.get("output_dir", "run_output")
    except (KeyError, ValueError) as e:
        raise ConfigError(f"[run] section invalid: {e}") from e

    pvals = {k: _parse_scalar(v) for k, v in cp.items("params")} \
        if cp.has_section("params") else {}
    try:
        params = GclmParams(**{k: float(pvals[k]) for k in pvals})
        params.validate(domain)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[params] section invalid: {e}") from e

    cvals = {k: _parse_scalar(v) for k, v in cp.items("controls")} \
        if cp.has_section("controls") else {}
    try:
        controls = RunControls(**cvals)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[controls] section invalid: {e}") from e

    initial = {k: _parse_scalar(v) for k, v in cp.items("initial")} \
        if cp.has_section("initial") else {}
    kind = initial.get("kind", "two_mode")
    if kind not in ("two_mode", "pole_family", "file"):
        raise ConfigError(f"initial.kind invalid: {kind!r}")
    if kind == "two_mode" and "amplitude" not in initial:
        raise ConfigError("initial.amplitude required for two_mode data")
    if kind == "pole_family" and "family" not in initial:
        raise ConfigError("initial.family required for pole_family data")
    if kind == "file" and "path" not in initial:
        raise ConfigError("initial.path required for file data")

    sweep = {k: _parse_scalar(v) for k, v in cp.items("sweep")} \
        if cp.has_section("sweep") else {}
    if mode is Mode.CRITICAL_SWEEP:
        lo = sweep.get("bracket_lo")
        hi = sweep.get("bracket_hi")
        if lo is None or hi is None or not 0 < lo < hi:
            raise ConfigError(
                "sweep.bracket_lo/bracket_hi must satisfy 0 < lo < hi")
    return RunConfig(mode=mode, domain=domain, params=params,
                     initial=initial, controls=controls,
                     output_dir=output_dir, sweep=sweep)


def write_config(config: RunConfig, fh) -> None:
    own = isinstance(fh, (str, os.PathLike))
    stream = open(fh, "w") if own else fh
    try:
        w = stream.write
        w("[run]\n")
        w(f"mode = {config.mode.value}\n")
        w(f"domain = {config.domain.value}\n")
        w(f"output_dir = {config.output_dir}\n")
        w("\n[params]\n")
        for f in dataclasses.fields(config.params):
            w(f"{f.name} = {_fmt(getattr(config.params, f.name))}\n")
        w("\n[controls]\n")
        for f in dataclasses.fields(config.controls):
            v = getattr(config.controls, f.name)
            if v is None:
                continue
            w(f"{f.name} = {_fmt(v)}\n")
        if config.initial:
            w("\n[initial]\n")
            for k, v in config.initial.items():
                w(f"{k} = {_fmt(v)}\n")
        if config.sweep:
            w("\n[sweep]\n")
            for k, v in config.sweep.items():
                w(f"{k} = {_fmt(v)}\n")
    finally:
        if own:
            stream.close()


def config_text(config: RunConfig) -> str:
    buf = io.StringIO()
    write_config(config, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# initial data construction

def _family_state(initial: dict):
    kwargs = {k: v for k, v in initial.items()
              if k not in ("kind", "family")}
    return exact.family_from_name(initial["family"], **kwargs)


def _initial_field(config: RunConfig) -> SpectralField:
    kind = config.initial.get("kind", "two_mode")
    if kind == "two_mode":
        return two_mode_field(float(config.initial["amplitude"]),
                              config.controls.n0, config.domain)
    if kind == "pole_family":
        state = _family_state(config.initial)
        if state.domain is not config.domain:
            raise ConfigError(
                f"family {config.initial['family']} lives on the "
                f"{state.domain.value}, config says {config.domain.value}")
        return state.field(config.controls.n0)
    field, _ = read_snapshot(str(config.initial["path"]))
    if field.domain is not config.domain:
        raise ConfigError("snapshot domain disagrees with config")
    return field


# ---------------------------------------------------------------------------
# the run modes

def _json_default(o):
    if isinstance(o, (TerminalStatus, Mode, Domain, exact.Kind)):
        return o.value
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return o.tolist()
    if dataclasses.is_dataclass(o):
        return dataclasses.asdict(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


def _write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_json_default)
        fh.write("\n")


def output_root(config: RunConfig) -> Path:
    root = os.environ.get("GCLM_OUTPUT_ROOT")
    out = Path(config.output_dir)
    if root and not out.is_absolute():
        out = Path(root) / out
    return out


def _write_manifest(path: Path, config: RunConfig, wall: float,
                    status: str) -> None:
    with open(path, "w") as fh:
        fh.write("# gclm manifest v1\n")
        fh.write(f"gclm_version = {gclm.__version__}\n")
        fh.write(f"numpy_version = {np.__version__}\n")
        fh.write(f"scipy_version = {__import__('scipy').__version__}\n")
        fh.write(f"python_version = {sys.version.split()[0]}\n")
        fh.write(f"wall_time_seconds = {wall!r}\n")
        fh.write(f"status = {status}\n")
        fh.write("## begin config\n")
        fh.write(config_text(config))
        fh.write("## end config\n")


def manifest_config_text(path) -> str:
    """Extract the verbatim config echo from a manifest file."""
    text = Path(path).read_text()
    start = text.index("## begin config\n") + len("## begin config\n")
    end = text.index("## end config\n")
    return text[start:end]


def _aaa_record(field: SpectralField, t: float) -> dict:
    vals = field.values()
    x = field.grid()
    stride = max(1, x.size // 2000)
    fit = tracker.aaa_approximate(x[::stride], vals[::stride])
    return {
        "t": t,
        "poles": [[p.real, p.imag] for p in fit.poles],
        "residues": [[r.real, r.imag] for r in fit.residues],
        "max_error": fit.max_error,
        "non_converged": fit.non_converged,
    }


def run(config: RunConfig) -> dict:
    """Execute one configured experiment; returns artifact paths."""
    t_start = time.time()
    out = output_root(config)
    out.mkdir(parents=True, exist_ok=True)
    artifacts = {}

    def emit(name, fname):
        artifacts[name] = str(out / fname)
        return out / fname

    status = "ok"
    if config.mode is Mode.EXACT_ONLY:
        state = _family_state(config.initial)
        cl = state.classify()
        _write_json(emit("fit", "fit.json"), {
            "family": config.initial["family"],
            "classification": dataclasses.asdict(cl),
        })
        write_snapshot(state.field(config.controls.n0), 0.0,
                       str(emit("snapshot_initial", "snapshot_initial.txt")))
        status = cl.kind.value
    elif config.mode is Mode.SIMULATE:
        field0 = _initial_field(config)
        write_snapshot(field0, 0.0,
                       str(emit("snapshot_initial", "snapshot_initial.txt")))
        series, final = simulate(field0, config.params, config.controls)
        series.to_csv(str(emit("series", "series.csv")))
        write_snapshot(final.field, final.t,
                       str(emit("snapshot_final", "snapshot_final.txt")))
        fit_payload = {"terminal_status": series.terminal_status.value,
                       "t_final": final.t,
                       "n_final": final.field.grid_size}
        try:
            cfit = collapse_mod.fit_collapse(series)
            fit_payload["collapse"] = dataclasses.asdict(cfit)
        except collapse_mod.NoCollapseSignalError as e:
            fit_payload["collapse"] = None
            fit_payload["collapse_note"] = str(e)
        try:
            dfit = tracker.fit_fourier_decay(final.field)
            fit_payload["decay"] = dataclasses.asdict(dfit)
        except tracker.SpectrumTooCleanError as e:
            fit_payload["decay"] = None
            fit_payload["decay_note"] = str(e)
        _write_json(emit("fit", "fit.json"), fit_payload)
        _write_json(emit("aaa", "aaa.json"),
                    _aaa_record(final.field, final.t))
        status = series.terminal_status.value
    elif config.mode is Mode.ORACLE_COMPARE:
        state = _family_state(config.initial)
        n0 = config.controls.n0
        field = state.field(n0)
        write_snapshot(field, 0.0,
                       str(emit("snapshot_initial", "snapshot_initial.txt")))
        n_seg = 20
        seg = config.controls.t_end / n_seg
        rows = []
        t = 0.0
        for i in range(n_seg):
            ctrl = dataclasses.replace(config.controls, t_end=seg,
                                       n0=field.grid_size,
                                       sample_dt=seg)
            series, fin = simulate(field, config.params, ctrl)
            if series.terminal_status is not TerminalStatus.REACHED_T_END:
                status = series.terminal_status.value
                break
            t += fin.t
            field = fin.field
            ex = state.advance(t).field(field.grid_size)
            scale = np.max(np.abs(ex.values()))
            err = np.max(np.abs(field.values() - ex.values())) / scale
            rows.append((t, err))
        with open(emit("oracle", "oracle.csv"), "w") as fh:
            fh.write("t,rel_linf_error\n")
            for t_i, err in rows:
                fh.write(f"{t_i!r},{err!r}\n")
        _write_json(emit("fit", "fit.json"), {
            "family": config.initial["family"],
            "max_rel_error": max((e for _, e in rows), default=np.nan),
            "n_comparisons": len(rows),
        })
        write_snapshot(field, t,
                       str(emit("snapshot_final", "snapshot_final.txt")))
    elif config.mode is Mode.CRITICAL_SWEEP:
        lo, hi = config.sweep["bracket_lo"], config.sweep["bracket_hi"]
        tol = config.sweep.get("tol", 0.1)
        validate = bool(config.sweep.get("validate_bracket", True))

        def make_initial(a):
            return two_mode_field(a, config.controls.n0, config.domain)

        result = collapse_mod.critical_amplitude(
            make_initial, config.params, (lo, hi), tol, config.controls,
            validate_bracket=validate)
        _write_json(emit("critical", "critical.json"), {
            "a": config.params.a,
            "sigma": config.params.sigma,
            "nu": config.params.nu,
            "A_no_blowup": result.lower,
            "A_blowup": result.upper,
            "probes": [dataclasses.asdict(p) for p in result.probes],
        })
        status = f"bracket=({result.lower!r},{result.upper!r})"
    _write_manifest(emit("manifest", "manifest.txt"), config,
                    time.time() - t_start, status)
    return artifacts


# ---------------------------------------------------------------------------
# plot-script emission

_PLOT_HEADER = """\
#!/usr/bin/env python3
# Auto-generated plotting script; reads only files in its own directory.
import json, os
import numpy as np
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))

def load_series():
    path = os.path.join(here, "series.csv")
    with open(path) as fh:
        status = fh.readline().strip().split("=", 1)[1]
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",")
    cols = {name: data[:, i] for i, name in enumerate(names)}
    return status, cols

def load_snapshot(name):
    path = os.path.join(here, name)
    with open(path) as fh:
        fh.readline()
        t = float(fh.readline())
        n = int(fh.readline())
        rows = np.loadtxt(fh)
    coeffs = rows[:, 0] + 1j * rows[:, 1]   # k = -n .. n-1
    m = 2 * n
    x = -np.pi + 2 * np.pi * np.arange(m) / m
    k = np.arange(-n, n)
    vals = np.real(coeffs[None, :] * np.exp(1j * k[None, :] * x[:, None])).sum(axis=1)
    return t, n, coeffs, x, vals
"""

_PLOT_BODIES = {
    "plot_amplitude.py": """\
status, cols = load_series()
fit = json.load(open(os.path.join(here, "fit.json"))) if \\
    os.path.exists(os.path.join(here, "fit.json")) else {}
plt.figure()
if fit.get("collapse"):
    tc = fit["collapse"]["t_c"]
    tau = tc - cols["t"]
    plt.loglog(tau, cols["max_abs_omega"], "o-", ms=3)
    beta = fit["collapse"]["beta"]
    plt.loglog(tau, fit["collapse"]["amplitude"] * tau**(-beta), "--",
               label=f"slope -beta = {-beta:.3f}")
    plt.xlabel("t_c - t")
    plt.legend()
else:
    plt.semilogy(cols["t"], cols["max_abs_omega"], "o-", ms=3)
    plt.xlabel("t")
plt.ylabel("max |omega|")
plt.title(f"amplitude history ({status})")
plt.savefig(os.path.join(here, "amplitude.png"), dpi=150)
""",
    "plot_delta.py": """\
status, cols = load_series()
fit = json.load(open(os.path.join(here, "fit.json"))) if \\
    os.path.exists(os.path.join(here, "fit.json")) else {}
ok = np.isfinite(cols["delta_x"])
plt.figure()
if fit.get("collapse"):
    tc = fit["collapse"]["t_c"]
    tau = tc - cols["t"][ok]
    plt.loglog(tau, cols["delta_x"][ok], "o-", ms=3)
    alpha = fit["collapse"]["alpha"]
    plt.title(f"delta_x, fitted alpha = {alpha:.3f}")
    plt.xlabel("t_c - t")
else:
    plt.semilogy(cols["t"][ok], cols["delta_x"][ok], "o-", ms=3)
    plt.title("singularity distance")
    plt.xlabel("t")
plt.ylabel("delta_x")
plt.savefig(os.path.join(here, "delta.png"), dpi=150)
""",
    "plot_spectrum.py": """\
t, n, coeffs, x, vals = load_snapshot("snapshot_final.txt")
k = np.arange(1, n)
mag = np.abs(coeffs[n + 1:])
plt.figure()
plt.semilogy(k, np.maximum(mag, 1e-300), ".", ms=2)
fit = json.load(open(os.path.join(here, "fit.json"))) if \\
    os.path.exists(os.path.join(here, "fit.json")) else {}
if fit.get("decay"):
    d = fit["decay"]
    kk = np.linspace(1, n - 1, 200)
    plt.semilogy(kk, d["amplitude"] * np.exp(-d["delta"] * kk) / kk**d["p"],
                 "--", label=f"C e^(-{d['delta']:.3g} k) / k^{d['p']:.3g}")
    plt.legend()
plt.xlabel("k")
plt.ylabel("|omega_k|")
plt.title(f"spectrum at t = {t:.6g}")
plt.savefig(os.path.join(here, "spectrum.png"), dpi=150)
""",
    "plot_profile.py": """\
status, cols = load_series()
fit = json.load(open(os.path.join(here, "fit.json")))
t, n, coeffs, x, vals = load_snapshot("snapshot_final.txt")
c = fit["collapse"]
tau = c["t_c"] - t
x_c = x[np.argmax(np.abs(vals))]
xi = (x - x_c) / tau**c["alpha"]
plt.figure()
plt.plot(xi, tau**c["beta"] * vals, "-")
plt.xlim(-20, 20)
plt.xlabel("xi = (x - x_c) / (t_c - t)^alpha")
plt.ylabel("(t_c - t)^beta omega")
plt.title(f"rescaled profile at t_c - t = {tau:.3g}")
plt.savefig(os.path.join(here, "profile.png"), dpi=150)
""",
}


def emit_plots(artifact_dir) -> list:
    """Write plotting scripts next to a run's artifacts.

    Collapse runs get profile/spectrum/delta/amplitude scripts, global runs
    amplitude/delta only.  Raises FileNotFoundError listing the expected
    artifacts when none are present.
    """
    out = Path(artifact_dir)
    series_path = out / "series.csv"
    if not series_path.exists():
        raise FileNotFoundError(
            f"no artifacts in {out}; expected series.csv (plus fit.json and "
            f"snapshot_final.txt) as written by a simulate run")
    series = TimeSeries.from_csv(str(series_path))
    collapsed = series.terminal_status is TerminalStatus.COLLAPSE_DETECTED
    names = ["plot_amplitude.py", "plot_delta.py"]
    if collapsed:
        names += ["plot_spectrum.py", "plot_profile.py"]
    paths = []
    for name in names:
        path = out / name
        path.write_text(_PLOT_HEADER + "\n" + _PLOT_BODIES[name])
        paths.append(str(path))
    return paths
