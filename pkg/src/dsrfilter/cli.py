"""Command-line entry point: ``dsrfilter {synth,sim,fit,mm,metrics}``.

Exit codes: 0 success, 2 config/parse error, 3 infeasible synthesis,
4 fit not converged, 5 metrics failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dsrcell, filterlab, fitting, mixedmode, synth
from .config import format_section, load_config, require, resolve_path
from .errors import ConfigError, DsrError, MetricsError, ParseError
from .io import (parse_touchstone, sparams_from_csv, touchstone_from_sweep, write_csv,
                 write_touchstone)
from .netcore import FrequencyGrid, abcd_to_s, db
from .svgplot import svg_plot

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NOT_CONVERGED, EXIT_METRICS = 0, 2, 3, 4, 5

DM_KEYS = {"l_line_h": "l_line", "c_gap_f": "c_gap", "c_coup_f": "c_coup",
           "l_strip_half_h": "l_strip_half", "c_patch_f": "c_patch"}
CM_KEYS = {"cm_l_line_h": "l_line", "cm_c_gap_f": "c_gap", "c1_f": "c1"}


def _out_dir(args, cfg) -> Path:
    out = args.out or cfg.get("output", {}).get("dir")
    if out is None:
        out = "."
    path = Path(out) if args.out else resolve_path(cfg, out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str):
    path.write_text(text)
    print(f"wrote {path}")


def _topology(args, cell):
    topo = args.topology or cell.get("topology", "t")
    if topo not in dsrcell.TOPOLOGIES:
        raise ConfigError(f"unknown topology {topo!r}; expected one of {dsrcell.TOPOLOGIES}")
    return topo


def _cells(cfg):
    """DM and CM cell parameters from [cell]; either may be None."""
    cell = require(cfg, "cell")
    dm_vals = {v: cell[k] for k, v in DM_KEYS.items() if k in cell}
    if "synth_report" in cell:
        path = resolve_path(cfg, cell["synth_report"])
        try:
            rep = json.loads(path.read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read synthesis report {path}: {exc}") from None
        if not rep.get("feasible"):
            raise ConfigError(f"synthesis report {path} is infeasible; no cell values")
        sh = rep["shunt"]
        dm_vals = {"l_line": rep["l_line_h"], "c_gap": rep["c_gap_f"], "c_coup": sh["c_coup_f"],
                   "l_strip_half": sh["l_strip_half_h"], "c_patch": sh["c_patch_f"], **dm_vals}
    dm = None
    if dm_vals:
        missing = sorted(set(DM_KEYS.values()) - set(dm_vals))
        if missing:
            raise ConfigError(f"[cell] incomplete DM values, missing {missing}")
        dm = dsrcell.DsrCellParams(**dm_vals)
    l_cm = cell.get("cm_l_line_h", dm.l_line if dm else None)
    cg_cm = cell.get("cm_c_gap_f", dm.c_gap if dm else None)
    cm = None
    if "c1_f" in cell:
        if l_cm is None or cg_cm is None:
            raise ConfigError("[cell] CM values need cm_l_line_h and cm_c_gap_f")
        cm = dsrcell.CmCellParams(l_cm, cg_cm, cell["c1_f"])
    elif dm is not None:
        cm = dsrcell.cm_params_from_dm(dm, l_cm, cg_cm)
    if dm is None and cm is None:
        raise ConfigError("[cell] gives no element values")
    return dm, cm


def _grid(cfg):
    sw = cfg.get("sweep", {})
    f0 = cfg.get("spec", {}).get("f0_hz", 1.5e9)
    start = sw.get("f_start_hz", 0.25 * f0)
    stop = sw.get("f_stop_hz", 2.5 * f0)
    points = sw.get("points", 1001)
    if not stop > start or points < 2:
        raise ConfigError("[sweep] needs f_stop_hz > f_start_hz and points >= 2")
    return FrequencyGrid.linear(start, stop, points)


def _simulate(cfg, args):
    dm, cm = _cells(cfg)
    cell = cfg["cell"]
    topo = _topology(args, cell)
    n = cell.get("n", cfg.get("spec", {}).get("n", 1))
    if n < 1:
        raise ConfigError("[cell] n must be >= 1")
    z0 = cell.get("z0_ohm", cfg.get("spec", {}).get("z0_ohm", 50.0))
    grid = _grid(cfg)
    f = grid.points
    out = {}
    if dm is not None:
        net = np.linalg.matrix_power(dsrcell.dm_bandpass_cell(dm, f, topo), n)
        out["dm"] = abcd_to_s(net, z0)
    if cm is not None:
        net = np.linalg.matrix_power(dsrcell.cm_bandpass_cell(cm, f, topo), n)
        out["cm"] = abcd_to_s(net, z0)
    return grid, out, n


# --- subcommands ---------------------------------------------------------------

def cmd_synth(args) -> int:
    cfg = load_config(args.config)
    sp = require(cfg, "spec")
    spec = synth.FilterSpec(order_n=sp.get("n", 3), f0=sp.get("f0_hz", 1.5e9),
                            fbw=sp.get("fbw", 0.06), z0=sp.get("z0_ohm", 50.0),
                            g_value=sp.get("g", 1.521))
    convention = synth.normalize_convention(args.convention or sp.get("convention", "plus_j"))
    rep = synth.synthesize(spec, convention)
    lines = [
        f"order N        {spec.order_n}",
        f"f0             {spec.f0 / 1e9:.6g} GHz",
        f"FBW            {100 * spec.fbw:.4g} %  (g = {spec.g_value:g})",
        f"Delta          {100 * rep.delta:.4f} %",
        f"band edges     {rep.f1 / 1e9:.6f} / {rep.f2 / 1e9:.6f} GHz",
        f"convention     {rep.convention}",
        f"C_g            {rep.c_gap * 1e12:.4f} pF",
        f"L              {rep.l_line * 1e9:.4f} nH",
    ]
    if rep.feasible:
        lines += [
            f"C              {rep.shunt.c_coup * 1e12:.6g} pF",
            f"L_C            {rep.shunt.l_strip_half * 1e9:.6g} nH",
            f"C_C            {rep.shunt.c_patch * 1e12:.6g} pF",
        ]
    else:
        lines.append(f"INFEASIBLE     {rep.shunt.describe()}")
    if rep.residuals:
        lines.append("residuals      " + ", ".join(f"{k}={v:.2e}" for k, v in rep.residuals.items()))
    print("\n".join(lines))
    out = _out_dir(args, cfg)
    _write(out / "synth_report.json", json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_sim(args) -> int:
    cfg = load_config(args.config)
    grid, res, n = _simulate(cfg, args)
    o = cfg.get("output", {})
    prefix = o.get("prefix", "")
    fmt, unit = o.get("format", "MA"), o.get("unit", "GHz")
    out = _out_dir(args, cfg)
    f = grid.points
    if o.get("touchstone", True):
        for mode, sp in res.items():
            doc = touchstone_from_sweep(f, sp.s, sp.z_ref, comments=[f"{mode.upper()} response, {n} cell(s)"])
            _write(out / f"{prefix}{mode}.s2p", write_touchstone(doc, fmt, unit))
    if o.get("csv", True):
        traces = {{"dm": "sdd", "cm": "scc"}[k]: v for k, v in res.items()}
        cols = [f"{p}{ij}_{kind}" for p in traces for ij in ("21", "11") for kind in ("db", "deg")]
        _write(out / f"{prefix}sweep.csv", write_csv(f, traces, cols))
    if o.get("s4p", False) and len(res) == 2:
        s4 = mixedmode.mixed_to_std4(mixedmode.from_half_circuits(res["dm"], res["cm"]))
        doc = touchstone_from_sweep(f, s4.s, s4.z_ref, comments=["4-port from DM/CM half circuits"])
        _write(out / f"{prefix}filter.s4p", write_touchstone(doc, fmt, unit))
    if o.get("svg", False):
        traces = {{"dm": "|Sdd21|", "cm": "|Scc21|"}[k]: db(v.s21) for k, v in res.items()}
        _write(out / f"{prefix}plot.svg", svg_plot(f, traces, title=f"{n}-cell response"))
    if len(res) == 2:
        sr = filterlab.SweepResult(grid, res["dm"], res["cm"])
        try:
            m = filterlab.metrics(sr, args.threshold_db or o.get("threshold_db", 30.0))
        except MetricsError as exc:
            print(f"metrics: {exc}")
        else:
            print(filterlab.format_metrics(m, cfg.get("spec", {}).get("fbw")))
            _write(out / f"{prefix}metrics.csv", filterlab.metrics_csv(m))
    elif "dm" in res:
        k = int(np.argmax(np.abs(res["dm"].s21)))
        print(f"peak |Sdd21| {db(res['dm'].s21[k]):.4f} dB at {f[k] / 1e9:.6f} GHz")
    return EXIT_OK


def _read_target(path: Path, ports=2):
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if path.suffix.lower() == ".csv":
        return sparams_from_csv(text)
    doc = parse_touchstone(text, ports)
    return doc.freq_hz, doc.sparams2() if ports == 2 else doc


def cmd_fit(args) -> int:
    cfg = load_config(args.config)
    fc = require(cfg, "fit")
    if not args.target and "target" not in fc:
        raise ConfigError("no fit target: give --target or [fit] target")
    target_path = Path(args.target) if args.target else resolve_path(cfg, fc["target"])
    freqs, target = _read_target(target_path)
    mode = fc.get("mode", "dm")
    if mode not in ("dm", "cm"):
        raise ConfigError("[fit] mode must be dm or cm")
    dm, cm = _cells(cfg)
    if mode == "dm":
        if dm is None:
            raise ConfigError("[fit] mode=dm needs DM values in [cell]")
        kind, init, keymap = "dm_bandpass", vars(dm).copy(), DM_KEYS
    else:
        if cm is None:
            raise ConfigError("[fit] mode=cm needs CM values in [cell]")
        kind, init, keymap = "cm_bandpass", vars(cm).copy(), CM_KEYS
    rev = {v: k for k, v in keymap.items()}
    names = fitting.PARAM_NAMES[kind]
    free = [s.strip() for s in fc.get("free", ",".join(names)).split(",") if s.strip()]
    for name in free:
        if name not in names:
            raise ConfigError(f"[fit] free parameter {name!r} not in {names}")
    lo_rel, hi_rel = fc.get("rel_lower", 0.5), fc.get("rel_upper", 2.0)
    bounds = {}
    for name in free:
        key = "c1_f" if name == "c1" else [k for k, v in DM_KEYS.items() if v == name][0]
        bounds[name] = (fc.get(f"{key}_min", init[name] * lo_rel), fc.get(f"{key}_max", init[name] * hi_rel))
    problem = fitting.FitProblem(kind, bounds, freqs, target,
                                 fixed={k: v for k, v in init.items() if k not in free},
                                 mag_weight=fc.get("mag_weight", 1.0),
                                 phase_weight=fc.get("phase_weight", 0.1),
                                 topology=_topology(args, cfg["cell"]))
    opts = fitting.FitOptions(max_evals=fc.get("max_evals", 5000), max_restarts=fc.get("restarts", 5))
    res = fitting.fit(problem, {k: init[k] for k in free}, opts)
    print(f"initial cost   {res.initial_cost:.6e}")
    print(f"final cost     {res.cost:.6e}")
    print(f"evaluations    {res.evaluations}  iterations {res.iterations}  converged {res.converged}")
    final = {**init, **res.parameters}
    for name in names:
        print(f"{name:14s} {final[name]:.6e}" + ("" if name in free else "  (fixed)"))
    out = _out_dir(args, cfg)
    _write(out / "fitted.cfg", format_section("cell", {rev[k]: final[k] for k in names}))
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def _port_map(text):
    try:
        pm = [int(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad --port-map {text!r}") from None
    if len(pm) != 4 or sorted(pm) != [1, 2, 3, 4]:
        raise ConfigError(f"--port-map must be a permutation of 1,2,3,4, got {text!r}")
    return pm


def cmd_mm(args) -> int:
    pm = _port_map(args.port_map)
    path = Path(args.target)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    doc = parse_touchstone(text, 4)
    s4 = mixedmode.permute_ports(mixedmode.SParams4(doc.s, doc.z_ref), pm)
    mm = mixedmode.std4_to_mixed(s4)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    f = doc.freq_hz
    for name, block in (("sdd", mm.sdd), ("scc", mm.scc)):
        d = touchstone_from_sweep(f, block.s, block.z_ref, doc.fmt, doc.unit,
                                  [f"{name} block, port map {','.join(map(str, pm))}"])
        _write(out / f"{name}.s2p", write_touchstone(d))
    cols = [f"{p}{ij}_{k}" for p in ("sdd", "scc") for ij in ("21", "11") for k in ("db", "deg")]
    _write(out / "mixed.csv", write_csv(f, {"sdd": mm.sdd, "scc": mm.scc}, cols))
    print(f"max cross-mode |Sdc|,|Scd| = {mm.max_cross_mode():.3e}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    threshold = args.threshold_db
    target_fbw = None
    if args.config:
        cfg = load_config(args.config)
        grid, res, _ = _simulate(cfg, args)
        if len(res) != 2:
            raise ConfigError("metrics need both DM and CM cell values")
        sr = filterlab.SweepResult(grid, res["dm"], res["cm"])
        threshold = threshold or cfg.get("output", {}).get("threshold_db")
        target_fbw = cfg.get("spec", {}).get("fbw")
    elif args.dm and args.cm:
        fd, dm = _read_target(Path(args.dm))
        fcm, cm = _read_target(Path(args.cm))
        if fd.shape != fcm.shape or not np.allclose(fd, fcm, rtol=1e-12, atol=0):
            raise ConfigError("DM and CM files use different frequency points")
        sr = filterlab.SweepResult(FrequencyGrid(fd), dm, cm)
    else:
        raise ConfigError("metrics needs --config or both --dm and --cm")
    try:
        m = filterlab.metrics(sr, threshold or 30.0)
    except MetricsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METRICS
    print(filterlab.format_metrics(m, target_fbw))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "metrics.csv", filterlab.metrics_csv(m))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dsrfilter",
                                description="DSR differential bandpass filter circuit toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, metavar="PATH")
        sp.add_argument("--out", metavar="DIR")
        sp.add_argument("--topology", choices=dsrcell.TOPOLOGIES)
        sp.add_argument("--threshold-db", type=float, metavar="N")

    s = sub.add_parser("synth", help="synthesize cell element values")
    common(s)
    s.add_argument("--convention", choices=("plusj", "minusj"))
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("sim", help="simulate DM/CM responses")
    common(s)
    s.set_defaults(func=cmd_sim)

    s = sub.add_parser("fit", help="fit cell elements to a target file")
    common(s)
    s.add_argument("--target", metavar="FILE")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("mm", help="convert a 4-port file to mixed mode")
    s.add_argument("target", metavar="FILE.s4p")
    s.add_argument("--port-map", default="1,2,3,4", metavar="a,b,c,d")
    s.add_argument("--out", metavar="DIR")
    s.set_defaults(func=cmd_mm)

    s = sub.add_parser("metrics", help="passband and CM metrics")
    common(s, config_required=False)
    s.add_argument("--dm", metavar="FILE")
    s.add_argument("--cm", metavar="FILE")
    s.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DsrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
