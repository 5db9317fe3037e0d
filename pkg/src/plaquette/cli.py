"""Command-line front end.

    plaquette orbit     --k 1 --phi 0.5pi --u 21 --out orbit.csv --svg
    plaquette ratio-map --grid-x 0:4pi:401 --grid-y 0.01:4:400 --out ratio.csv
    plaquette sweep     --kind phiU --k 0.5 --grid-x 0:2pi:64 --grid-y 0:30:60
    plaquette critical  --k 1 --phi 0.5pi --grid-y 0:30:61
    plaquette validate

Settings come from built-in defaults, then an optional JSON file
(``--config``), then flags. Exit status: 0 ok, 2 bad configuration,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import csv
import json
import math
import operator
import re
import sys
from pathlib import Path

import numpy as np

from . import analytic, analysis, sweep as sweeps
from .errors import InvalidParameters, NumericalError, PlaquetteError, ToleranceExceeded
from .integrator import IntegratorConfig, integrate
from .model import PlaquetteParams, State, initial_state_paper

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(Exception):
    pass


# --- value parsing -------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_real(value) -> float:
    """A float, or a small arithmetic expression in ``pi`` such as ``0.5pi`` or ``3*pi/2``."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().replace("π", "pi")
    text = re.sub(r"(\d|\.)\s*pi", r"\1*pi", text)
    try:
        tree = ast.parse(text, mode="eval").body
    except SyntaxError:
        raise ConfigError(f"cannot parse number {value!r}") from None

    def ev(node):
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ConfigError(f"cannot parse number {value!r}")

    try:
        out = ev(tree)
    except ZeroDivisionError:
        raise ConfigError(f"division by zero in {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"{value!r} is not finite")
    return out


def parse_grid(name, value) -> sweeps.GridSpec:
    if isinstance(value, dict):
        extra = set(value) - {"min", "max", "count"}
        if extra or len(value) != 3:
            raise ConfigError(f"grid {name}: need exactly min, max, count")
        lo, hi, count = value["min"], value["max"], value["count"]
    else:
        parts = str(value).split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {name}: expected 'min:max:count', got {value!r}")
        lo, hi, count = parts
    try:
        n = int(count)
    except (TypeError, ValueError):
        raise ConfigError(f"grid {name}: count must be an integer, got {count!r}") from None
    try:
        return sweeps.GridSpec(name, parse_real(lo), parse_real(hi), n)
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from None


def parse_seedstate(value) -> State:
    if isinstance(value, str) and value.strip().lower() == "paper":
        return initial_state_paper()
    if isinstance(value, str):
        items = [s for s in value.replace(";", ",").split(",")]
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        raise ConfigError(f"seedstate must be 'paper' or four complex values, got {value!r}")
    if len(items) != 4:
        raise ConfigError(f"seedstate needs four amplitudes, got {len(items)}")
    amps = []
    for item in items:
        try:
            if isinstance(item, (list, tuple)) and len(item) == 2:
                amps.append(complex(float(item[0]), float(item[1])))
            elif isinstance(item, (int, float)) and not isinstance(item, bool):
                amps.append(complex(item))
            else:
                amps.append(complex(str(item).strip().replace(" ", "").replace("i", "j")))
        except (TypeError, ValueError):
            raise ConfigError(f"cannot parse amplitude {item!r}") from None
    try:
        return State(np.array(amps))
    except InvalidParameters as exc:
        raise ConfigError(f"seedstate: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"seedstate: {exc}") from None


def _as_bool(name, value):
    if isinstance(value, bool):
        return value
    raise ConfigError(f"{name} must be true or false, got {value!r}")


# --- configuration schema ------------------------------------------------

# section -> key -> flag destination
SECTIONS = {
    "model": {"k": "k", "u": "u", "phi": "phi", "seedstate": "seedstate", "ratio": "ratio", "root": "root"},
    "integrator": {"dt": "dt", "tmax": "tmax", "periods": "periods", "stride": "stride",
                   "scheme": "scheme", "renormalize": "renormalize"},
    "grid": {"x": "grid_x", "y": "grid_y"},
    "classify": {"threshold": "threshold", "t_start": "t_start"},
    "sweep": {"kind": "kind", "workers": "workers"},
    "output": {"out": "out", "svg": "svg", "figure": "figure"},
}
_DEST_TO_KEY = {dest: (sec, key) for sec, keys in SECTIONS.items() for key, dest in keys.items()}

_INTEGRATOR = {"dt": 1e-3, "stride": 10, "scheme": "split4", "renormalize": False}
_CLASSIFY = {"threshold": analysis.DEFAULT_THRESHOLD, "t_start": analysis.DEFAULT_T_START}

DEFAULTS = {
    "orbit": {"k": 1.0, "u": 0.0, "phi": 0.0, "seedstate": "paper", "ratio": None, "root": 0,
              **_INTEGRATOR, "tmax": 100.0, "periods": None, **_CLASSIFY,
              "out": "orbit.csv", "svg": False, "figure": False},
    "ratio-map": {"grid_x": "0:4*pi:401", "grid_y": "0.01:4:400", "out": "ratio_map.csv", "figure": False},
    "sweep": {"kind": "KU", "k": 0.5, "phi": "0.5*pi", "seedstate": "paper",
              **_INTEGRATOR, "tmax": 200.0, **_CLASSIFY, "grid_x": None, "grid_y": "0:40:200",
              "workers": None, "out": "sweep.csv", "figure": False},
    "critical": {"k": 1.0, "phi": "0.5*pi", "seedstate": "paper", **_INTEGRATOR, "tmax": 200.0,
                 **_CLASSIFY, "grid_y": "0:30:61", "workers": None, "out": None, "figure": False},
    "validate": {**_INTEGRATOR, "tmax": 100.0},
}

# default x grids for sweeps, by kind
SWEEP_X = {"KU": "0.1:2:96", "phiU": "0:4*pi:128"}


def load_config_file(path, command) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    allowed = DEFAULTS[command]
    out = {}
    for section, body in data.items():
        if section == "command":
            if body != command:
                raise ConfigError(f"config is for {body!r}, not {command!r}")
            continue
        if section not in SECTIONS:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(body, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        for key, value in body.items():
            dest = SECTIONS[section].get(key)
            if dest is None:
                raise ConfigError(f"unknown config key {section}.{key}")
            if dest not in allowed:
                raise ConfigError(f"config key {section}.{key} does not apply to {command}")
            out[dest] = value
    return out


def resolve(command, args) -> dict:
    cfg = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        cfg.update(load_config_file(args.config, command))
    for dest in DEFAULTS[command]:
        v = getattr(args, dest, None)
        if v is not None:
            cfg[dest] = v
    return cfg


def sections_of(cfg) -> dict:
    """Nested form of a resolved flat config; loadable again with --config."""
    out = {}
    for dest, value in cfg.items():
        sec, key = _DEST_TO_KEY[dest]
        out.setdefault(sec, {})[key] = value
    return out


# --- builders ------------------------------------------------------------

def build_integrator(cfg, t_max=None) -> IntegratorConfig:
    try:
        stride = cfg["stride"]
        if isinstance(stride, bool) or not isinstance(stride, (int, str)):
            raise ConfigError(f"stride must be an integer, got {stride!r}")
        return IntegratorConfig(
            dt=parse_real(cfg["dt"]),
            t_max=parse_real(cfg["tmax"]) if t_max is None else t_max,
            sample_stride=int(stride),
            renormalize=_as_bool("renormalize", cfg["renormalize"]),
            scheme=str(cfg["scheme"]),
        )
    except (InvalidParameters, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def build_params(cfg, k=None, u=None) -> PlaquetteParams:
    try:
        return PlaquetteParams(
            K=parse_real(cfg["k"]) if k is None else k,
            phi=parse_real(cfg["phi"]),
            U=parse_real(cfg.get("u", 0.0)) if u is None else u,
        )
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from None


def _resolve_k(cfg):
    """K/J from --ratio when given, else --k."""
    if cfg.get("ratio") is None:
        return parse_real(cfg["k"])
    r = parse_real(cfg["ratio"])
    phi = parse_real(cfg["phi"])
    try:
        roots = analytic.find_k_for_ratio(r, phi)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if roots is analytic.ALL_K:
        return parse_real(cfg["k"])
    if not roots:
        raise ConfigError(f"no K/J > 0 gives alpha/beta = {r:g} at phi = {phi:g}")
    idx = cfg["root"]
    if isinstance(idx, bool) or not isinstance(idx, int) or not 0 <= idx < len(roots):
        raise ConfigError(f"root must be an index below {len(roots)}, got {idx!r}")
    return roots[idx]


def _sibling(out, suffix):
    p = Path(out)
    return p.with_name(p.stem + suffix)


def _extra_path(value, out, suffix):
    if value is True:
        return _sibling(out, suffix)
    if value in (False, None):
        return None
    return Path(value)


def _g(v) -> str:
    return format(float(v), ".17g")


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_sidecar(path, command, cfg, files, extra=None) -> None:
    doc = {"command": command, "config": sections_of(cfg), "files": [str(f) for f in files]}
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, Path):
        return str(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _metadata(command, cfg):
    return json.dumps({"command": command, "config": sections_of(cfg)}, sort_keys=True, default=_jsonable)


# --- commands ------------------------------------------------------------

def cmd_orbit(cfg) -> int:
    state0 = parse_seedstate(cfg["seedstate"])
    k = _resolve_k(cfg)
    params = build_params(cfg, k=k)
    cfg["k"] = k
    t_max = None
    if cfg.get("periods") is not None:
        n_periods = parse_real(cfg["periods"])
        freqs = analytic.mode_frequencies(params)
        try:
            comm = analytic.classify_commensurability(freqs)
            period = analytic.orbit_period(freqs, comm)
        except PlaquetteError as exc:
            raise ConfigError(f"--periods needs a periodic linear orbit: {exc}") from None
        t_max = n_periods * period
        # shrink dt so that t_max is hit exactly
        dt = parse_real(cfg["dt"])
        cfg["dt"] = t_max / math.ceil(t_max / dt - 1e-9)
        cfg["tmax"] = t_max
    sim = build_integrator(cfg, t_max)
    traj = integrate(state0, params, sim)

    out = Path(cfg["out"])
    rows = (
        [_g(t), *(_g(v) for v in occ), _g(c[0]), _g(c[1]), _g(nm), _g(en)]
        for t, occ, c, nm, en in zip(traj.times, traj.occupations, traj.centers, traj.norms, traj.energies)
    )
    write_csv(out, ["t", "n1", "n2", "n3", "n4", "xc", "yc", "norm", "energy"], rows)
    files = [out]
    meta = _metadata("orbit", cfg)
    svg_path = _extra_path(cfg["svg"], out, ".svg")
    if svg_path is not None:
        from .svg import write_orbit_svg

        write_orbit_svg(svg_path, traj.xc, traj.yc, title=f"K/J={params.K:g} phi={params.phi:g} U/J={params.U:g}", metadata=meta)
        files.append(svg_path)
    fig_path = _extra_path(cfg["figure"], out, ".png")
    if fig_path is not None:
        from .plotting import orbit_figure

        orbit_figure(traj, fig_path, title=f"K/J={params.K:.4g}  phi={params.phi:.4g}  U/J={params.U:g}", metadata=meta)
        files.append(fig_path)

    verdict = analysis.classify_selftrapping(traj, parse_real(cfg["t_start"]), parse_real(cfg["threshold"]))
    summary = {
        "average_xc": verdict.average_xc,
        "trapped": verdict.trapped,
        "max_norm_drift": traj.max_norm_drift,
        "max_energy_drift": traj.max_energy_drift,
        "closure_error": float(np.hypot(*(traj.centers[-1] - traj.centers[0]))),
    }
    write_sidecar(_sibling(out, ".json"), "orbit", cfg, files,
                  {"integrator": sim.to_dict(), "summary": summary})
    print(f"wrote {', '.join(map(str, files))}")
    print(f"<x_c> = {verdict.average_xc:.6f} ({'trapped' if verdict.trapped else 'not trapped'})")
    print(f"max norm drift {traj.max_norm_drift:.3g}, max energy drift {traj.max_energy_drift:.3g}")
    print(f"end-to-start distance {summary['closure_error']:.3g}")
    return EXIT_OK


def cmd_ratio_map(cfg) -> int:
    gx = parse_grid("phi", cfg["grid_x"])
    gy = parse_grid("k_over_j", cfg["grid_y"])
    phi, k = gx.points(), gy.points()
    try:
        alpha, beta = analytic.frequency_map(phi, k)
        ratio = analytic.ratio_map(phi, k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = Path(cfg["out"])

    def rows():
        for i, p in enumerate(phi):
            for j, kk in enumerate(k):
                yield [_g(p), _g(kk), _g(alpha[i, j]), _g(beta[i, j]), _g(ratio[i, j])]

    write_csv(out, ["phi", "k_over_j", "alpha", "beta", "ratio"], rows())
    files = [out]
    fig_path = _extra_path(cfg["figure"], out, ".png")
    if fig_path is not None:
        from .plotting import ratio_figure

        ratio_figure(phi, k, ratio, fig_path, metadata=_metadata("ratio-map", cfg))
        files.append(fig_path)
    write_sidecar(_sibling(out, ".json"), "ratio-map", cfg, files,
                  {"x_axis": gx.to_dict(), "y_axis": gy.to_dict()})
    print(f"wrote {', '.join(map(str, files))} ({gx.count}x{gy.count} cells)")
    return EXIT_OK


def _workers(cfg):
    w = cfg.get("workers")
    try:
        return sweeps.resolve_workers(None if w is None else int(w))
    except (ValueError, TypeError, InvalidParameters) as exc:
        raise ConfigError(f"workers: {exc}") from None


def cmd_sweep(cfg) -> int:
    kind = cfg["kind"]
    if kind not in SWEEP_X:
        raise ConfigError(f"kind must be one of {sorted(SWEEP_X)}, got {kind!r}")
    if cfg["grid_x"] is None:
        cfg["grid_x"] = SWEEP_X[kind]
    state0 = parse_seedstate(cfg["seedstate"])
    sim = build_integrator(cfg)
    threshold, t_start = parse_real(cfg["threshold"]), parse_real(cfg["t_start"])
    gy = parse_grid("u_over_j", cfg["grid_y"])
    workers = _workers(cfg)
    if kind == "KU":
        gx = parse_grid("k_over_j", cfg["grid_x"])
        if gx.min <= 0:
            raise ConfigError("K/J grid must be positive")
        try:
            diagram = sweeps.sweep_selftrap_KU(parse_real(cfg["phi"]), gx, gy, sim, threshold, t_start, workers, state0)
        except InvalidParameters as exc:
            raise ConfigError(str(exc)) from None
    else:
        gx = parse_grid("phi", cfg["grid_x"])
        k = parse_real(cfg["k"])
        if not k > 0:
            raise ConfigError("K/J must be positive")
        diagram = sweeps.sweep_selftrap_phiU(k, gx, gy, sim, threshold, t_start, workers, state0)

    out = Path(cfg["out"])
    xs, ys = gx.points(), gy.points()

    def rows():
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                avg = diagram.average_xc[i, j]
                flag = "nan" if math.isnan(avg) else str(int(diagram.trapped[i, j]))
                yield [_g(x), _g(y), _g(avg), flag]

    write_csv(out, ["x", "y", "average_xc", "trapped"], rows())
    files = [out]
    fig_path = _extra_path(cfg["figure"], out, ".png")
    if fig_path is not None:
        from .plotting import phase_figure

        phase_figure(diagram, fig_path, metadata=_metadata("sweep", cfg))
        files.append(fig_path)
    failures = [{"cell": list(c), "error": e} for c, e in sorted(diagram.failures.items())]
    write_sidecar(_sibling(out, ".json"), "sweep", cfg, files,
                  {"provenance": diagram.provenance, "failures": failures})
    flips = diagram.flips_along_y()
    print(f"wrote {', '.join(map(str, files))} ({gx.count}x{gy.count} cells, {len(failures)} failed)")
    print(f"trapped cells: {int(diagram.trapped.sum())}; max flips along U in one column: {int(flips.max())}")
    return EXIT_OK


def cmd_critical(cfg) -> int:
    state0 = parse_seedstate(cfg["seedstate"])
    params = build_params(cfg, u=0.0)
    sim = build_integrator(cfg)
    threshold, t_start = parse_real(cfg["threshold"]), parse_real(cfg["t_start"])
    gy = parse_grid("u_over_j", cfg["grid_y"])
    scan = sweeps.scan_interaction(params, gy, sim, threshold, t_start, _workers(cfg), state0)

    try:
        red = analysis.reduce(state0)
        ratio = analysis.critical_interaction(red.s_u, red.theta_u, params.phi)
        reference = f"U/K = {ratio:.6g} (U/J = {ratio * params.K:.6g})"
    except (PlaquetteError, ValueError) as exc:
        ratio = None
        reference = f"undefined ({exc})"

    flips = scan.flips
    print(f"K/J = {params.K:g}, phi = {params.phi:g}, U/J in [{gy.min:g}, {gy.max:g}] ({gy.count} points)")
    print(f"verdict flips: {len(flips)}")
    for lo, hi in flips:
        print(f"  U/J in ({lo:g}, {hi:g})")
    if len(flips) >= 3:
        print("  multiple windows (re-entrant self-trapping)")
    print(f"analytic critical value, double-well approximation: {reference}")

    files = []
    if cfg.get("out"):
        out = Path(cfg["out"])
        rows = (
            [_g(u), _g(a), "nan" if math.isnan(a) else str(int(t))]
            for u, a, t in zip(scan.u_values, scan.average_xc, scan.trapped)
        )
        write_csv(out, ["u", "average_xc", "trapped"], rows)
        files.append(out)
        fig_path = _extra_path(cfg["figure"], out, ".png")
        if fig_path is not None:
            from .plotting import scan_figure

            scan_figure(scan, threshold, fig_path, metadata=_metadata("critical", cfg))
            files.append(fig_path)
        write_sidecar(_sibling(out, ".json"), "critical", cfg, files, {
            "provenance": scan.provenance,
            "flips": [list(f) for f in flips],
            "double_well_u_over_k": ratio,
            "failures": [{"cell": list(c), "error": e} for c, e in sorted(scan.failures.items())],
        })
        print(f"wrote {', '.join(map(str, files))}")
    return EXIT_OK


VALIDATION_CASES = [
    # (K/J, phi); K = J at phi = 0 is the beta = 0 limit
    (1.0, 0.0),
    (0.5, 0.5 * math.pi),
    (1.3, 1.7),
    (2.0, math.pi),
    (0.7, 3.0 * math.pi),
    (0.25, 5.5),
]


def _check(rows, name, measured, limit):
    ok = measured <= limit
    rows.append((name, f"{measured:.3e}", f"{limit:.0e}", "pass" if ok else "FAIL"))
    return ok


def cmd_validate(cfg) -> int:
    sim = build_integrator(cfg)
    rows = []
    all_ok = True

    # analytic vs numeric at U = 0
    worst = 0.0
    for k, phi in VALIDATION_CASES:
        params = PlaquetteParams(K=k, phi=phi)
        c = sim.replace(keep_states=True)
        try:
            traj = integrate(initial_state_paper(), params, c)
        except ToleranceExceeded as exc:
            rows.append((f"analytic K/J={k:g} phi={phi:.4g}", "-", "-", f"FAIL {exc}"))
            all_ok = False
            continue
        exact = analytic.analytic_amplitudes(traj.times, params)
        worst = max(worst, float(np.max(np.abs(traj.states - exact))))
    all_ok &= _check(rows, f"analytic vs numeric, t <= {sim.t_max:g}", worst, 1e-8)

    # conservation in the interacting regime
    for u in (20.0, 21.0):
        params = PlaquetteParams(K=1.0, phi=0.5 * math.pi, U=u)
        try:
            traj = integrate(initial_state_paper(), params, sim.replace(t_max=200.0))
        except ToleranceExceeded as exc:
            rows.append((f"conservation U/J={u:g}", "-", "-", f"FAIL ToleranceExceeded: {exc}"))
            all_ok = False
            continue
        all_ok &= _check(rows, f"norm drift U/J={u:g}, t <= 200", traj.max_norm_drift, sim.norm_tolerance)
        all_ok &= _check(rows, f"energy drift U/J={u:g}, t <= 200", traj.max_energy_drift, sim.energy_tolerance)

    # closure of commensurate orbits
    phi = 0.5 * math.pi
    worst_a = worst_n = 0.0
    for k in analytic.find_k_for_ratio(2.0, phi):
        params = PlaquetteParams(K=k, phi=phi)
        freqs = analytic.mode_frequencies(params)
        period = analytic.orbit_period(freqs, analytic.classify_commensurability(freqs))
        xc, yc = analytic.analytic_center(period, params)
        worst_a = max(worst_a, math.hypot(xc + 1.0, yc))
        n = math.ceil(period / sim.dt - 1e-9)
        try:
            traj = integrate(initial_state_paper(), params, sim.replace(dt=period / n, t_max=period))
        except ToleranceExceeded as exc:
            rows.append((f"closure numeric K/J={k:.4g}", "-", "-", f"FAIL {exc}"))
            all_ok = False
            continue
        worst_n = max(worst_n, math.hypot(traj.xc[-1] + 1.0, traj.yc[-1]))
    all_ok &= _check(rows, "closure at alpha/beta = 2 (analytic)", worst_a, 1e-6)
    all_ok &= _check(rows, "closure at alpha/beta = 2 (numeric)", worst_n, 1e-6)

    # exchanging the frequencies leaves x_c alone and mirrors y_c
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        a, b = rng.uniform(0.1, 3.0, 2)
        pre_x, pre_y = rng.uniform(-2, 2, 2)
        t = rng.uniform(0, 100)
        x1, y1 = analytic.closed_form_center(t, a, b, pre_x, pre_y)
        x2, y2 = analytic.closed_form_center(t, b, a, pre_x, pre_y)
        worst = max(worst, abs(x1 - x2), abs(y1 + y2))
    all_ok &= _check(rows, "swap antisymmetry (100 cases)", worst, 1e-12)

    w = max(len(r[0]) for r in rows)
    print(f"{'check':<{w}}  {'measured':>10}  {'limit':>6}  status")
    for name, measured, limit, status in rows:
        print(f"{name:<{w}}  {measured:>10}  {limit:>6}  {status}")
    print("all checks passed" if all_ok else "some checks FAILED")
    return EXIT_OK if all_ok else EXIT_NUMERIC


COMMANDS = {
    "orbit": cmd_orbit,
    "ratio-map": cmd_ratio_map,
    "sweep": cmd_sweep,
    "critical": cmd_critical,
    "validate": cmd_validate,
}


# --- argument parsing ----------------------------------------------------

def _flag_specs():
    # dest -> (flags, argparse kwargs)
    return {
        "phi": (["--phi"], dict(help="flux phi in radians; accepts e.g. 0.5pi")),
        "k": (["--k"], dict(help="tunnelling ratio K/J")),
        "u": (["--u"], dict(help="interaction U/J")),
        "ratio": (["--ratio"], dict(help="choose K/J so that alpha/beta equals this value")),
        "root": (["--root"], dict(type=int, help="which K/J root to use with --ratio (0 = smaller)")),
        "seedstate": (["--seedstate"], dict(help="'paper' or four comma-separated complex amplitudes")),
        "dt": (["--dt"], dict(help="time step")),
        "tmax": (["--tmax"], dict(help="integration horizon")),
        "periods": (["--periods"], dict(help="integrate this many linear orbit periods instead of --tmax")),
        "stride": (["--stride"], dict(type=int, help="record every n-th step")),
        "scheme": (["--scheme"], dict(choices=["split4", "rk4"])),
        "renormalize": (["--renormalize"], dict(action="store_const", const=True, help="renormalise each step")),
        "grid_x": (["--grid-x"], dict(metavar="MIN:MAX:COUNT")),
        "grid_y": (["--grid-y"], dict(metavar="MIN:MAX:COUNT")),
        "threshold": (["--threshold"], dict(help="trapped when <x_c> is below this")),
        "t_start": (["--t-start"], dict(help="start of the averaging window")),
        "kind": (["--kind"], dict(choices=sorted(SWEEP_X))),
        "workers": (["--workers"], dict(type=int, help="worker threads (default: $PLAQUETTE_WORKERS or CPU count)")),
        "out": (["--out"], dict(help="output CSV path")),
        "svg": (["--svg"], dict(nargs="?", const=True, metavar="PATH", help="also write an SVG orbit plot")),
        "figure": (["--figure"], dict(nargs="?", const=True, metavar="PATH", help="also write a PNG figure (needs matplotlib)")),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plaquette", description="Mean-field dynamics of a four-site plaquette with a synthetic gauge field.")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = _flag_specs()
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; flags override its values")
        for dest in DEFAULTS[name]:
            flags, kwargs = specs[dest]
            p.add_argument(*flags, dest=dest, default=None, **kwargs)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = resolve(args.command, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidParameters, PlaquetteError) as exc:
        print(f"configuration error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
