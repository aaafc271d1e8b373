"""Command-line sweeps writing CSV (or JSON) tables with a self-describing header."""

import argparse
import json
import subprocess
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .coherence import WINDOWS, coherence_relative_entropy, homoclinic_distance, quench_eigensystem
from .dynamics import (g0_amplitude_frequency, g0_trajectory, gminus_trajectory,
                       multilevel_amplitudes, multilevel_trajectory, reduce_spin,
                       _trajectory_from_elements)
from .errors import ConfigError, DegenerateFrequency, NonConverged, SeparatrixEnergy
from .hamiltonians import DEFAULT_ALPHA, h_g0, h_gminus, h_gplus, h_multilevel
from .mathieu_core import Domain, a, b, classify_region
from .open_system import (LindbladParams, ReservoirParams, bath_F, bath_purity,
                          lindblad_closed_form, lindblad_integrate, purity, spin_entropy)
from .pendulum_map import ClassicalOrbit, classical_orbit, instanton


# ---- config values -------------------------------------------------------

def _float(s):
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"not a number: {s!r}") from None


def _int(s):
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"not an integer: {s!r}") from None


def _floats(s):
    return [_float(x) for x in s.split(",") if x.strip()]


def _ints(s):
    return [_int(x) for x in s.split(",") if x.strip()]


def _tuples(s):
    """'2:3.855, 3:7.535' -> [(2.0, 3.855), (3.0, 7.535)]"""
    return [tuple(_float(v) for v in item.split(":")) for item in s.split(",") if item.strip()]


def _fmt_value(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ", ".join(":".join(_fmt_num(x) for x in item) if isinstance(item, tuple)
                         else _fmt_num(item) for item in v)
    return str(v)


def _fmt_num(x):
    return repr(int(x)) if float(x).is_integer() and abs(x) < 1e15 else repr(float(x))


G0_PAIRS = "2:3.855, 3:7.535, 4:10.785"
GMINUS_PAIRS = "2:0.1, 3:0.57, 4:1.585"
# Q:gamma items; a Q sweep at gamma = 0.01 followed by a gamma sweep at Q = 0.5
LINDBLAD_RUNS = ("0.5:0.01, 5:0.01, 10:0.01, 25:0.01, "
                 "0.5:0.01, 0.5:0.02, 0.5:0.03, 0.5:0.04")

SCHEMAS = {
    "spectrum": {"n_max": (_int, "5"), "l_min": (_float, "0"), "l_max": (_float, "30"),
                 "dl": (_float, "0.05"), "eps_deg": (_float, "0.05")},
    "dynamics": {"pairs": (_tuples, G0_PAIRS), "Q": (_float, "0.5"), "omega0": (_float, "1"),
                 "alpha": (_float, repr(DEFAULT_ALPHA)), "region": (str, "auto"),
                 "branch": (str, "ce"), "mode": (str, "trajectory"), "t_max": (_float, "100"),
                 "dt": (_float, "0.05"), "l_min": (_float, "0.5"), "l_max": (_float, "20"),
                 "dl": (_float, "0.05"), "eps_deg": (_float, "0.05")},
    "lindblad": {"n": (_int, "4"), "l": (_float, "10.785"), "omega0": (_float, "1"),
                 "alpha": (_float, repr(DEFAULT_ALPHA)),
                 "runs": (_tuples, LINDBLAD_RUNS),
                 "t_max": (_float, "1000"), "dt": (_float, "0.5")},
    "bath": {"tau": (_float, "1"), "g": (_float, "0.375"), "deltas": (_floats, "0.2, 0.5"),
             "Ns": (_ints, "2, 3, 4"), "N_contour_max": (_int, "10"), "c0": (_float, "0"),
             "c1": (_float, "1"), "t_max": (_float, "20"), "dt": (_float, "0.05")},
    "multilevel": {"pairs": (_tuples, G0_PAIRS), "Q": (_float, "0.5"), "omega0": (_float, "1"),
                   "alpha": (_float, repr(DEFAULT_ALPHA)), "domain": (str, "full"),
                   "t_max": (_float, "100"), "dt": (_float, "0.05")},
    "coherence": {"ns": (_ints, "2, 3, 4"), "p1": (_float, "0.9"), "p2": (_float, "0.1"),
                  "dw0": (_float, "0.8"), "omega0": (_float, "1"), "Q": (_float, "5"),
                  "alpha": (_float, repr(DEFAULT_ALPHA)),
                  "windows": (_tuples, ", ".join(f"{n}:{lo}:{hi}" for n, (lo, hi) in WINDOWS.items())),
                  "n_points": (_int, "200"), "eps_deg": (_float, "0.05")},
    "classical": {"E": (_float, "3"), "U": (_float, "1"), "omega_p": (_float, "1"),
                  "t_max": (_float, "20"), "dt": (_float, "0.01")},
}

PRESETS = {
    "fig1": ("spectrum", {}),
    "fig2": ("dynamics", {"pairs": G0_PAIRS, "region": "G0"}),
    "fig3": ("dynamics", {"mode": "amplitude", "region": "G0"}),
    "fig4": ("dynamics", {"pairs": GMINUS_PAIRS, "region": "G-"}),
    "fig5": ("lindblad", {}),
    "fig6": ("lindblad", {"runs": "0.5:0.01, 0.5:0.02, 0.5:0.03, 0.5:0.04"}),
    "fig7": ("lindblad", {"runs": "1:0.01, 5:0.01, 25:0.01, "
                                  "0.5:0.01, 0.5:0.02, 0.5:0.03, 0.5:0.04"}),
    "fig8": ("bath", {"deltas": "0.2"}),
    "fig9": ("bath", {}),
    "fig10": ("multilevel", {"domain": "half"}),
    "fig11": ("coherence", {}),
    "fig12": ("coherence", {}),
}


def read_config_text(text):
    """Flat `key = value` lines.  Files carrying `# cfg ` lines are read from those only."""
    lines = text.splitlines()
    cfg_lines = [ln[len("# cfg "):] for ln in lines if ln.startswith("# cfg ")]
    if cfg_lines:
        lines = cfg_lines
    out = {}
    for ln in lines:
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if "=" not in ln:
            raise ConfigError(f"expected key = value, got {ln!r}")
        k, v = (s.strip() for s in ln.split("=", 1))
        out[k] = v
    return out


def resolve(command, preset=None, overrides=None):
    schema = SCHEMAS[command]
    raw = {k: d for k, (_, d) in schema.items()}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        pcmd, vals = PRESETS[preset]
        if pcmd != command:
            raise ConfigError(f"preset {preset} belongs to '{pcmd}', not '{command}'")
        raw.update(vals)
    for k, v in (overrides or {}).items():
        if k not in schema:
            raise ConfigError(f"unknown key {k!r} for {command}")
        raw[k] = v
    cfg = {k: schema[k][0](raw[k]) for k in schema}
    _validate(command, cfg)
    return cfg


def _grid(lo, hi, step, name):
    if not step > 0:
        raise ConfigError(f"{name} step must be positive")
    if hi < lo:
        raise ConfigError(f"empty {name} grid")
    return lo + np.arange(int(np.floor((hi - lo) / step + 1e-9)) + 1) * step


def _time_grid(cfg):
    if not cfg["t_max"] > 0:
        raise ConfigError("t_max must be positive")
    return _grid(0.0, cfg["t_max"], cfg["dt"], "t")


def _validate(command, cfg):
    if "dt" in cfg:
        _time_grid(cfg)
    if command == "spectrum":
        if cfg["n_max"] < 1:
            raise ConfigError("n_max must be at least 1")
        _grid(cfg["l_min"], cfg["l_max"], cfg["dl"], "l")
        if cfg["l_min"] < 0:
            raise ConfigError("l must be non-negative")
    if command in ("dynamics", "multilevel"):
        if not cfg["pairs"] or any(len(p) != 2 or p[0] < 1 or p[1] < 0 for p in cfg["pairs"]):
            raise ConfigError("pairs must be n:l items with n >= 1, l >= 0")
    if command == "dynamics":
        if cfg["region"] not in ("auto", "G0", "G-", "G+"):
            raise ConfigError("region must be auto, G0, G- or G+")
        if cfg["branch"] not in ("ce", "se"):
            raise ConfigError("branch must be ce or se")
        if cfg["mode"] not in ("trajectory", "amplitude"):
            raise ConfigError("mode must be trajectory or amplitude")
        if cfg["mode"] == "amplitude":
            _grid(cfg["l_min"], cfg["l_max"], cfg["dl"], "l")
    if command == "multilevel" and cfg["domain"] not in ("full", "half"):
        raise ConfigError("domain must be full or half")
    if command == "lindblad":
        if not cfg["runs"] or any(len(r) != 2 for r in cfg["runs"]):
            raise ConfigError("runs must be Q:gamma items")
        if any(r[1] < 0 for r in cfg["runs"]):
            raise ConfigError("gamma must be non-negative")
    if command == "bath":
        if not cfg["Ns"] or min(cfg["Ns"]) < 1 or cfg["N_contour_max"] < 1:
            raise ConfigError("reservoir counts must be at least 1")
        if cfg["tau"] < 0 or cfg["g"] < 0:
            raise ConfigError("tau and g must be non-negative")
        if abs(cfg["c0"] ** 2 + cfg["c1"] ** 2 - 1) > 1e-12:
            raise ConfigError("c0^2 + c1^2 must equal 1")
        if not cfg["deltas"]:
            raise ConfigError("deltas must be nonempty")
    if command == "coherence":
        p1, p2 = cfg["p1"], cfg["p2"]
        if min(p1, p2) < 0 or abs(p1 + p2 - 1) > 1e-12:
            raise ConfigError("p1, p2 must be non-negative and sum to 1")
        if cfg["n_points"] < 1:
            raise ConfigError("n_points must be positive")
        wins = {int(w[0]): w[1:] for w in cfg["windows"] if len(w) == 3}
        for n in cfg["ns"]:
            if n not in wins:
                raise ConfigError(f"no l window for n={n}")
            lo, hi = wins[n]
            if lo <= 0 or hi < lo:
                raise ConfigError(f"window for n={n} must satisfy 0 < lo <= hi")


# ---- tasks (module level so they pickle) --------------------------------

def _spectrum_row(args):
    l, n_max, eps = args
    avals = [a(n, l) for n in range(n_max + 1)]
    bvals = [b(n, l) for n in range(1, n_max + 1)]
    regions = [classify_region(n, l, eps).region.value for n in range(1, n_max + 1)]
    return [l] + avals + bvals + regions


def _dynamics_task(args):
    n, l, cfg, t = args
    region = cfg["region"]
    if region == "auto":
        region = classify_region(n, l, cfg["eps_deg"]).region.value
    common = dict(omega0=cfg["omega0"], alpha=cfg["alpha"], Q=cfg["Q"])
    if region == "G0":
        h = h_g0(cfg["branch"], n, l, eps_deg=cfg["eps_deg"], check_region=False, **common)
        traj = g0_trajectory(h, t)
    elif region == "G-":
        h = h_gminus(n, l, eps_deg=cfg["eps_deg"], check_region=False, **common)
        traj = gminus_trajectory(h, t)
    else:
        h = h_gplus(n, l, eps_deg=cfg["eps_deg"], check_region=False, **common)
        traj = multilevel_trajectory(h, t)
    return region, traj.columns()


def _amplitude_row(args):
    n, l, cfg = args
    h = h_g0(cfg["branch"], n, l, cfg["omega0"], cfg["alpha"], cfg["Q"], check_region=False)
    try:
        amp, freq = g0_amplitude_frequency(h)
    except DegenerateFrequency:
        amp, freq = np.nan, np.nan
    return [l, amp, freq, classify_region(n, l, cfg["eps_deg"]).region.value]


def _lindblad_task(args):
    Q, gamma, cfg, t = args
    h = h_g0("ce", cfg["n"], cfg["l"], cfg["omega0"], cfg["alpha"], Q, check_region=False)
    p = LindbladParams(gamma, h.coeffs["b"], h.coeffs["c"])
    rho = lindblad_integrate(p, t)
    closed = lindblad_closed_form(p, t)
    return {"t": t, "purity_numeric": purity(rho), "purity_closed": purity(closed),
            "entropy": spin_entropy(rho), "sz": np.real(rho[:, 0, 0] - rho[:, 1, 1])}


def _bath_task(args):
    delta, cfg, t = args
    c0, c1 = cfg["c0"], cfg["c1"]
    contour = {"N": [], "t": [], "F": []}
    for N in range(1, cfg["N_contour_max"] + 1):
        F = bath_F(ReservoirParams(N, cfg["tau"], cfg["g"], delta), t, c1)
        contour["N"].extend([float(N)] * len(t))
        contour["t"].extend(t)
        contour["F"].extend(F)
    pur = {"t": t}
    for N in cfg["Ns"]:
        pur[f"purity_N{N}"] = bath_purity(ReservoirParams(N, cfg["tau"], cfg["g"], delta),
                                          c0, c1, t)
    return contour, pur


def _multilevel_task(args):
    n, l, cfg, t = args
    h = h_multilevel(n, l, cfg["omega0"], cfg["alpha"], cfg["Q"], Domain(cfg["domain"]))
    S = multilevel_amplitudes(h, t)
    cols = {"t": t}
    for i in range(4):
        cols[f"S{i + 1}_sq"] = np.abs(S[:, i]) ** 2
    traj = _trajectory_from_elements(t, *reduce_spin(S)).columns()
    del traj["t"]
    cols.update(traj)
    return cols


def _coherence_row(args):
    n, l, cfg = args
    spec = quench_eigensystem(cfg["p1"], cfg["p2"], cfg["dw0"], cfg["omega0"], cfg["alpha"],
                              cfg["Q"], n, l)
    return [l, coherence_relative_entropy(spec), homoclinic_distance(n, l),
            classify_region(n, l, cfg["eps_deg"]).region.value]


def _pmap(fn, items, workers):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# ---- commands ------------------------------------------------------------
# each returns a list of (file stem, columns dict, extra metadata)

def _rows_to_columns(names, rows):
    return {name: [r[i] for r in rows] for i, name in enumerate(names)}


def _tag(x):
    return _fmt_num(x).replace("-", "m")


def cmd_spectrum(cfg, workers=1):
    N = cfg["n_max"]
    ls = _grid(cfg["l_min"], cfg["l_max"], cfg["dl"], "l")
    rows = _pmap(_spectrum_row, [(float(l), N, cfg["eps_deg"]) for l in ls], workers)
    names = (["l"] + [f"a_{n}" for n in range(N + 1)] + [f"b_{n}" for n in range(1, N + 1)]
             + [f"region_{n}" for n in range(1, N + 1)])
    return [("spectrum", _rows_to_columns(names, rows), {})]


def cmd_dynamics(cfg, workers=1):
    if cfg["mode"] == "amplitude":
        ls = _grid(cfg["l_min"], cfg["l_max"], cfg["dl"], "l")
        out = []
        for n in sorted({int(p[0]) for p in cfg["pairs"]}):
            rows = _pmap(_amplitude_row, [(n, float(l), cfg) for l in ls], workers)
            out.append((f"amplitude_n{n}",
                        _rows_to_columns(["l", "amplitude", "frequency", "region"], rows), {}))
        return out
    t = _time_grid(cfg)
    tasks = [(int(n), float(l), cfg, t) for n, l in cfg["pairs"]]
    res = _pmap(_dynamics_task, tasks, workers)
    return [(f"dynamics_n{n}_l{_tag(l)}", cols, {"region": region})
            for (n, l, _, _), (region, cols) in zip(tasks, res)]


def cmd_lindblad(cfg, workers=1):
    t = _time_grid(cfg)
    tasks = [(float(Q), float(g), cfg, t) for Q, g in cfg["runs"]]
    res = _pmap(_lindblad_task, tasks, workers)
    return [(f"lindblad_run{i}_Q{_tag(Q)}_gamma{_tag(g)}", cols, {})
            for i, ((Q, g, _, _), cols) in enumerate(zip(tasks, res))]


def cmd_bath(cfg, workers=1):
    t = _time_grid(cfg)
    tasks = [(float(d), cfg, t) for d in cfg["deltas"]]
    res = _pmap(_bath_task, tasks, workers)
    out = []
    for (d, _, _), (contour, pur) in zip(tasks, res):
        out.append((f"bath_F_delta{_tag(d)}", contour, {}))
        out.append((f"bath_purity_delta{_tag(d)}", pur, {}))
    return out


HALF_CAVEAT = ("overlap domain [0, pi]: the ce/se cross coupling is nonzero only because "
               "the integral is truncated to half a period; over [0, 2pi] it vanishes")


def cmd_multilevel(cfg, workers=1):
    t = _time_grid(cfg)
    tasks = [(int(n), float(l), cfg, t) for n, l in cfg["pairs"]]
    res = _pmap(_multilevel_task, tasks, workers)
    meta = {"caveat": HALF_CAVEAT} if cfg["domain"] == "half" else {}
    return [(f"multilevel_n{n}_l{_tag(l)}_{cfg['domain']}", cols, meta)
            for (n, l, _, _), cols in zip(tasks, res)]


def cmd_coherence(cfg, workers=1):
    wins = {int(w[0]): w[1:] for w in cfg["windows"]}
    out = []
    for n in cfg["ns"]:
        lo, hi = wins[n]
        ls = np.linspace(lo, hi, cfg["n_points"])
        rows = _pmap(_coherence_row, [(n, float(l), cfg) for l in ls], workers)
        out.append((f"coherence_n{n}", _rows_to_columns(["l", "C", "R", "region"], rows), {}))
    return out


def cmd_classical(cfg, workers=1):
    t = _time_grid(cfg)
    E, U, w = cfg["E"], cfg["U"], cfg["omega_p"]
    if U < 0 or w <= 0 or E + U <= 0:
        raise ConfigError("need U >= 0, omega_p > 0 and E + U > 0")
    orbit = ClassicalOrbit(E, U, w)
    try:
        cols = {"t": t, "dI": classical_orbit(orbit, t)}
        meta = {}
    except SeparatrixEnergy as exc:
        return [("classical", {"t": t, "instanton": instanton(U, w, t)}, {"error": str(exc)})]
    if U > 0 and orbit.k > 1 - 1e-3:
        cols["instanton"] = instanton(U, w, t)
    return [("classical", cols, meta)]


COMMANDS = {"spectrum": cmd_spectrum, "dynamics": cmd_dynamics, "lindblad": cmd_lindblad,
            "bath": cmd_bath, "multilevel": cmd_multilevel, "coherence": cmd_coherence,
            "classical": cmd_classical}


# ---- output --------------------------------------------------------------

def git_hash():
    try:
        res = subprocess.run(["git", "rev-parse", "HEAD"], cwd=Path(__file__).resolve().parent,
                             capture_output=True, text=True, timeout=5)
        return res.stdout.strip() if res.returncode == 0 and res.stdout.strip() else "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _cell(v):
    if isinstance(v, str):
        return v
    return "%.12e" % (float(v) + 0.0)  # folds -0.0 into 0.0


def _json_value(v):
    return v if isinstance(v, str) else float("%.12e" % float(v))


def write_table(path, fmt, command, cfg, columns, meta, commit):
    names = list(columns)
    header = {"version": __version__, "git": commit, "command": command}
    if fmt == "json":
        doc = {"meta": {**header, "config": {k: _fmt_value(v) for k, v in cfg.items()}, **meta},
               "columns": names,
               "data": {k: [_json_value(x) for x in columns[k]] for k in names}}
        text = json.dumps(doc, indent=1) + "\n"
    else:
        lines = [f"# mathieu-nv {__version__}", f"# git {commit}", f"# command {command}"]
        lines += [f"# cfg {k} = {_fmt_value(v)}" for k, v in cfg.items()]
        lines += [f"# {k}: {v}" for k, v in meta.items()]
        lines.append(",".join(names))
        nrows = len(columns[names[0]])
        for i in range(nrows):
            lines.append(",".join(_cell(columns[k][i]) for k in names))
        text = "\n".join(lines) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def run(command, cfg, out_dir, fmt="csv", workers=1):
    outputs = COMMANDS[command](cfg, workers)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    commit = git_hash()
    paths = []
    for stem, cols, meta in outputs:
        path = out_dir / f"{stem}.{fmt}"
        write_table(path, fmt, command, cfg, cols, meta, commit)
        paths.append(path)
    return paths


def build_parser():
    ap = argparse.ArgumentParser(prog="mathieu-nv")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--preset", default=None)
    ap.add_argument("--config", default=None, help="flat key = value file")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--overlap-domain", choices=["full", "half"], default=None)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        overrides = {}
        if args.config:
            try:
                overrides = read_config_text(Path(args.config).read_text())
            except OSError as exc:
                raise ConfigError(str(exc)) from None
        if args.overlap_domain is not None:
            if args.command != "multilevel":
                raise ConfigError("--overlap-domain applies to multilevel only")
            overrides["domain"] = args.overlap_domain
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        cfg = resolve(args.command, args.preset, overrides)
        paths = run(args.command, cfg, args.out, args.format, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NonConverged as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return 3
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
