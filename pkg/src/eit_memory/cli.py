"""Command-line front end.

Every subcommand reads one JSON config (defaults shown by ``--dump-defaults``),
writes deterministic CSV/JSON payloads into ``--out`` and a ``*.meta.json``
sidecar with run metadata. Exit codes: 0 ok, 1 usage or config error,
2 physically infeasible request (unmatchable pulse, bath/step guards).
"""

import argparse
import copy
import datetime
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import InfeasibleError, UnmatchableError
from .grid import TimeGrid
from .impedance import adiabaticity_margins, matched_schedule
from .ladder import SystemParams, dark_amplitude, output_envelope
from .oracle import BathGrid, discretize_input, integrate_lambda_system, integrate_mode_equations
from .protocol import TimeReverse, fidelity_sweep, full_cycle, release, write_sweep_csv
from .states import (CutoffError, PulseEnvelope, make_fock, make_sech_envelope,
                     make_squeezed_vacuum, squeezing_for_mean_photons, write_columns)

DEFAULTS = {
    "grid": {"t0": 0.0, "dt": 0.01, "t1": 160.0},
    "pulse": {"shape": "sech", "width": 10.0, "center": 80.0, "file": None},
    "system": {"gamma": 1.0, "g_sqrtN": 10.0, "gamma_a": 1.0, "gamma_0": 1e-3, "n_atoms": 1e6},
    "storage": {
        "t_s": 100.0,
        "t_d": None,
        "state": "fock",
        "fock_n": 1,
        "squeeze_r": None,
        "matching": "ideal",
        "t_s_values": {"start": 0.0, "stop": 3000.0, "num": 31},
    },
    "bath": {"width": 200.0, "spacing": 0.02, "dt": None, "window_widths": 4.0,
             "contrast_ratio": 0.1, "threshold": 10.0},
    "output": {"dir": "."},
}
# storage.t_s_values may also be an explicit list of hold times

MARKOV_TOL = 2e-2
NORM_DRIFT_TOL = 1e-8
CAPTURE_REL_TOL = 0.05
FAILED_CAPTURE = 0.5


class ConfigError(ValueError):
    pass


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, val in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {path}{key}")
        if isinstance(base[key], dict) and not (key == "t_s_values" and isinstance(val, list)):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {path}{key} must be an object")
            out[key] = _merge(base[key], val, f"{path}{key}.")
        else:
            out[key] = val
    return out


def load_config(path=None):
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        with open(path) as fh:
            user = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigError("config must be a JSON object")
    return _merge(DEFAULTS, user)


def _params(cfg):
    return SystemParams(**cfg["system"])


def _grid(cfg):
    g = cfg["grid"]
    return TimeGrid.span(g["t0"], g["t1"], g["dt"])


def _envelope(cfg, grid=None, strict=True):
    """Input pulse and the energy it carries before the grid starts (None = extrapolate)."""
    pulse = cfg["pulse"]
    if pulse.get("file"):
        try:
            return PulseEnvelope.from_csv(pulse["file"]), None
        except OSError as exc:
            raise ConfigError(f"cannot read envelope {pulse['file']}: {exc}") from exc
    if pulse["shape"] != "sech":
        raise ConfigError(f"unsupported pulse shape {pulse['shape']!r}")
    grid = grid or _grid(cfg)
    width, center = pulse["width"], pulse["center"]
    if strict:
        return make_sech_envelope(width, center, grid), None
    h = make_sech_envelope(width, center, grid, tol=math.inf)
    return h, 0.5 * (1.0 + math.tanh((grid.t0 - center) / width))


def _input_state(cfg):
    st = cfg["storage"]
    if st["state"] == "fock":
        n = int(st["fock_n"])
        return make_fock(n, max(n + 1, 2))
    if st["state"] == "squeezed":
        r = st["squeeze_r"]
        if r is None:
            r = squeezing_for_mean_photons(st["fock_n"])
        return _squeezed(r)
    raise ConfigError(f"storage.state must be 'fock' or 'squeezed', got {st['state']!r}")


def _squeezed(r):
    try:
        return make_squeezed_vacuum(r, 4)
    except CutoffError as exc:
        return make_squeezed_vacuum(r, exc.required_dim)


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_meta(path, command, cfg):
    blob = json.dumps(cfg, sort_keys=True).encode()
    _write_json(path + ".meta.json", {
        "command": command,
        "version": __version__,
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    })


def _out_dir(cfg, out):
    d = out or cfg["output"]["dir"]
    os.makedirs(d, exist_ok=True)
    return d


def cmd_match(cfg, out=None, envelope=None):
    """Write the impedance-matched schedule ``t,cos_theta,omega``."""
    params = _params(cfg)
    if envelope is not None:
        h, prior = envelope, None
    else:
        h, prior = _envelope(cfg, strict=False)
    s = matched_schedule(h, params, prior_mass=prior)
    path = os.path.join(_out_dir(cfg, out), "schedule.csv")
    s.to_csv(path, params)
    _write_meta(path, "match", cfg)
    return path


def _reversal(cfg, capture_end):
    st = cfg["storage"]
    if st["t_d"] is None:
        t_s = float(st["t_s"])
        if t_s < 0:
            raise ConfigError("storage.t_s must be non-negative")
        return t_s
    t_d = float(st["t_d"])
    if t_d < capture_end:
        raise ConfigError(f"reversal time t_d={t_d} precedes the end of the input pulse grid at {capture_end}")
    return 2.0 * (t_d - capture_end)


def fig2a_trace(cfg):
    """Capture, hold and time-reversed release on one uniform timeline.

    Returns the CSV columns and a summary with the mirror-symmetry error
    (relative to the input peak) and the released/captured energy ratio.
    """
    params = _params(cfg)
    h, _ = _envelope(cfg)
    h = h.normalized()
    grid = h.grid
    t_s = _reversal(cfg, grid.t_end)
    hold = int(round(t_s / grid.dt))
    t_s = hold * grid.dt
    t_d = grid.t_end + 0.5 * t_s

    s = matched_schedule(h, params)
    traj = dark_amplitude(h, s, params)
    leak = output_envelope(h, traj, params, s)
    survival = math.exp(-params.gamma_0 * t_s)
    stored = traj.final * math.sqrt(survival)
    rel, _ = release(stored, TimeReverse(), s, params, t_d=t_d)
    d_rel = rel.samples / np.where(s.cos_theta[::-1] > 0, s.cos_theta[::-1], np.inf)

    n = grid.count
    total = 2 * n + hold - 1
    t = grid.t0 + grid.dt * np.arange(total)
    z = np.zeros(total)
    h_in, h_out, cos_theta, d = z.copy(), z.copy(), z.copy(), z.copy()
    h_in[:n] = h.samples.real
    h_out[:n] = leak.samples.real
    cos_theta[:n] = s.cos_theta
    d[:n] = traj.d.real
    hold_t = np.arange(1, hold) * grid.dt
    d[n:n + hold - 1] = (traj.final * np.exp(-0.5 * params.gamma_0 * hold_t)).real
    h_out[n + hold - 1:] = rel.samples.real
    cos_theta[n + hold - 1:] = s.cos_theta[::-1]
    d[n + hold - 1:] = d_rel.real

    peak = np.max(np.abs(h.samples))
    mirror_err = float(np.max(np.abs(rel.samples[::-1] - h.samples * np.sqrt(survival) * traj.final)) / peak)
    captured = abs(traj.final) ** 2
    summary = {
        "t_s": t_s,
        "t_d": t_d,
        "captured": captured,
        "released": rel.norm(),
        "energy_ratio": rel.norm() / captured,
        "expected_ratio": survival,
        "mirror_error": mirror_err,
        "residual_output": leak.norm(),
    }
    cols = {"t": t, "h_in": h_in, "h_out": h_out, "cos_theta": cos_theta, "d": d}
    return cols, summary


def cmd_fig2a(cfg, out=None):
    cols, summary = fig2a_trace(cfg)
    d = _out_dir(cfg, out)
    path = os.path.join(d, "fig2a.csv")
    write_columns(path, cols)
    _write_json(os.path.join(d, "fig2a_summary.json"), summary)
    _write_meta(path, "fig2a", cfg)
    return path


def _t_s_values(cfg):
    sel = cfg["storage"]["t_s_values"]
    if isinstance(sel, list):
        return [float(x) for x in sel]
    return list(np.linspace(sel["start"], sel["stop"], int(sel["num"])))


def cmd_fig2b(cfg, out=None):
    """Fidelity vs storage time for a Fock state and a squeezed vacuum of equal mean photon number."""
    params = _params(cfg)
    st = cfg["storage"]
    n = int(st["fock_n"])
    r = st["squeeze_r"] if st["squeeze_r"] is not None else squeezing_for_mean_photons(n)
    ts = _t_s_values(cfg)
    h = _envelope(cfg)[0].normalized() if st["matching"] == "simulated" else None
    fock = fidelity_sweep(make_fock(n, n + 2), ts, params, matching=st["matching"], h=h)
    sq = fidelity_sweep(_squeezed(r), ts, params, matching=st["matching"], h=h)
    path = os.path.join(_out_dir(cfg, out), "fig2b.csv")
    write_columns(path, {"t_s": ts, "f_fock": [p.fidelity for p in fock],
                         "f_squeezed": [p.fidelity for p in sq]})
    _write_meta(path, "fig2b", cfg)
    return path


def cmd_cycle(cfg, out=None):
    params = _params(cfg)
    st = cfg["storage"]
    h, _ = _envelope(cfg)
    result = full_cycle(_input_state(cfg), h.normalized(), params, float(st["t_s"]),
                        matching=st["matching"])
    path = os.path.join(_out_dir(cfg, out), "cycle.json")
    result.to_json(path)
    _write_meta(path, "cycle", cfg)
    return path


def cmd_sweep(cfg, out=None):
    params = _params(cfg)
    st = cfg["storage"]
    h = _envelope(cfg)[0].normalized() if st["matching"] == "simulated" else None
    pts = fidelity_sweep(_input_state(cfg), _t_s_values(cfg), params, matching=st["matching"], h=h)
    path = os.path.join(_out_dir(cfg, out), "sweep.csv")
    write_sweep_csv(path, pts)
    _write_meta(path, "sweep", cfg)
    return path


def oracle_report(cfg):
    """Run the discretized-bath comparisons and collect their figures of merit."""
    params = _params(cfg)
    b = cfg["bath"]
    pulse = cfg["pulse"]
    width, center = pulse["width"], pulse["center"]
    half = b["window_widths"] * width
    grid = TimeGrid.span(center - half, center + half, cfg["grid"]["dt"])
    bath = BathGrid(b["width"], b["spacing"], window=grid.duration)
    h, _ = _envelope(cfg, grid=grid, strict=False)
    h = h.normalized()

    s = matched_schedule(h, params)
    markov = dark_amplitude(h, s, params)
    ideal = abs(markov.final) ** 2
    modes = integrate_mode_equations(discretize_input(h, bath, grid.t0), s, bath, dt=b["dt"])
    max_dev = float(np.max(np.abs(np.abs(modes.D) - np.abs(markov.d))))
    # the truncated pulse jumps at the window edges; skip one cavity time there
    t = grid.times
    inner = (t > grid.t0 + 1.0 / params.gamma) & (t < grid.t_end - 1.0 / params.gamma)
    h_out_dev = float(np.max(np.abs(modes.h_out[inner] - output_envelope(h, markov, params, s).samples[inner])))

    omega_min = float(np.nanmin(s.omega(params)))
    margins = adiabaticity_margins(params, omega_min, width, threshold=b["threshold"])

    def lambda_run(p):
        lt = integrate_lambda_system(h, s, p, bath, dt=b["dt"])
        eff = lt.capture_efficiency
        return {"g_sqrtN": p.g_sqrtN, "gamma_a": p.gamma_a, "capture_efficiency": eff,
                "ideal": ideal, "max_excited_population": lt.max_excited_population,
                "capture_failure": eff < (1 - CAPTURE_REL_TOL) * ideal}

    main = lambda_run(params)
    contrast_params = SystemParams(**{**cfg["system"],
                                      "g_sqrtN": math.sqrt(b["contrast_ratio"] * params.gamma * params.gamma_a)})
    contrast = lambda_run(contrast_params)

    checks = {
        "markov_deviation": max_dev <= MARKOV_TOL,
        "norm_drift": modes.norm_drift <= NORM_DRIFT_TOL,
        "adiabatic_capture": (not margins.adiabatic) or not main["capture_failure"],
        "contrast_capture_fails": contrast["capture_efficiency"] <= FAILED_CAPTURE,
    }
    return {
        "max_dev": max_dev,
        "norm_drift": modes.norm_drift,
        "h_out_dev": h_out_dev,
        "adiabatic_margins": {"cavity": margins.cavity, "pulse": margins.pulse, "mixed": margins.mixed,
                              "threshold": margins.threshold, "adiabatic": margins.adiabatic,
                              "binding": margins.binding},
        "capture_failure": main["capture_failure"],
        "lambda": main,
        "lambda_contrast": contrast,
        "bath": {"width": bath.width, "spacing": bath.spacing, "modes": bath.n_modes,
                 "step": modes.step},
        "checks": checks,
        "verdict": "pass" if all(checks.values()) else "fail",
    }


def cmd_oracle_check(cfg, out=None):
    report = oracle_report(cfg)
    path = os.path.join(_out_dir(cfg, out), "oracle_check.json")
    _write_json(path, report)
    _write_meta(path, "oracle-check", cfg)
    return path


def _parse_grid(text):
    try:
        t0, dt, t1 = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--grid expects t0:dt:t1, got {text!r}") from exc
    return {"t0": t0, "dt": dt, "t1": t1}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (missing keys take defaults)")
    common.add_argument("--out", help="output directory (overrides output.dir)")

    parser = argparse.ArgumentParser(prog="eit-memory", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.add_argument("--dump-defaults", action="store_true", help="print the default config and exit")
    sub = parser.add_subparsers(dest="command")
    m = sub.add_parser("match", parents=[common], help="impedance-matched schedule for a pulse")
    m.add_argument("--sech", nargs=2, type=float, metavar=("T", "TC"), help="sech pulse width and center")
    m.add_argument("--envelope", help="envelope CSV (t,re,im)")
    m.add_argument("--grid", help="t0:dt:t1 for built-in pulses")
    for name, text in [("fig2a", "capture-hold-release trace"),
                       ("fig2b", "fidelity vs storage time, Fock and squeezed inputs"),
                       ("cycle", "one memory cycle, JSON report"),
                       ("sweep", "fidelity sweep for the configured input state"),
                       ("oracle-check", "compare against the discretized-bath integrators")]:
        sub.add_parser(name, parents=[common], help=text)
    return parser


COMMANDS = {"fig2a": cmd_fig2a, "fig2b": cmd_fig2b, "cycle": cmd_cycle,
            "sweep": cmd_sweep, "oracle-check": cmd_oracle_check}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.dump_defaults:
        json.dump(DEFAULTS, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfg = load_config(args.config)
        if args.command == "match":
            envelope = None
            if args.grid:
                cfg["grid"] = _parse_grid(args.grid)
            if args.sech:
                cfg["pulse"].update(shape="sech", width=args.sech[0], center=args.sech[1], file=None)
            if args.envelope:
                try:
                    envelope = PulseEnvelope.from_csv(args.envelope)
                except OSError as exc:
                    raise ConfigError(f"cannot read envelope {args.envelope}: {exc}") from exc
            path = cmd_match(cfg, args.out, envelope=envelope)
        else:
            path = COMMANDS[args.command](cfg, args.out)
    except UnmatchableError as exc:
        print(f"error: {exc} (first violation at t={exc.time:.10g})", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0
