"""Command-line front end: sweeps, minimisation, oracle comparison, tables.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import backend, bessel, response
from .config import ConfigError, RunConfig, load_config
from .dielectric import (DiagonalModeParams, breakdown, identity_10_13_check,
                         omega_tilde_table)
from .geometry import GeometryError
from .nocore import commensurate_average_density, energy_density_nocore
from .oracle import oracle_density

CSV_HEADER = (
    "parameter,value,e_dir_0,e_dir_1,e_dir_2,"
    "e_img1_0,e_img1_1,e_img1_2,e_img1_3,"
    "e_img2_0,e_img2_1,e_img2_2,e_img2_3,"
    "total,imag_residual,trunc_estimate,validity_ratio"
)


def _fmt(x):
    return format(float(x), ".17g")


def _breakdown_row(cfg: RunConfig, value):
    state = cfg.state_at(value)
    phys = cfg.physical_at(value)
    dp = None
    ratio = 0.0
    if cfg.approx_level == "diagonal":
        wxi = phys.omega_xi or max(abs(state.dxi1_ds), abs(state.dxi2_ds))
        dp = DiagonalModeParams(wxi, state.dxi1_ds - wxi, state.dxi2_ds - wxi)
        ratio = dp.validity_ratio if math.isfinite(dp.validity_ratio) else 0.0
    b = breakdown(state, cfg.charge, phys, cfg.truncation, level=cfg.approx_level,
                  diag_params=dp)
    fields = [
        cfg.sweep_parameter, _fmt(value),
        _fmt(b.e_dir_0), _fmt(b.e_dir_1), _fmt(b.e_dir_2),
        *[_fmt(v) for v in b.e_img1_parts],
        *[_fmt(v) for v in b.e_img2_parts],
        _fmt(b.total), _fmt(b.imag_residual), _fmt(b.trunc_estimate), _fmt(ratio),
    ]
    return ",".join(fields), b


@dataclass
class RunRecord:
    """One sweep run: config identity, per-point rows and diagnostics."""

    config_hash: str
    rows: list
    breakdowns: list
    diagnostics: dict = field(default_factory=dict)
    timestamp: str = ""


def _row_for(args):
    text, value = args
    from .config import parse_config

    return _breakdown_row(parse_config(text), value)


def run_sweep(cfg: RunConfig, workers=1) -> RunRecord:
    """Evaluate every sweep point; results are ordered by sweep position.

    workers > 1 fans the points out over a process pool; gathering keeps
    sweep order, so the output is identical to the serial run.
    """
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_row_for,
                                    [(cfg.text, v) for v in cfg.sweep_values]))
    else:
        results = [_breakdown_row(cfg, v) for v in cfg.sweep_values]
    rows = [r[0] for r in results]
    brks = [r[1] for r in results]
    digest = hashlib.sha256(cfg.text.encode()).hexdigest()[:12]
    diag = {
        "max_imag_residual": max((b.imag_residual for b in brks), default=0.0),
        "max_trunc_estimate": max((b.trunc_estimate for b in brks), default=0.0),
    }
    return RunRecord(digest, rows, brks, diag, time.strftime("%Y-%m-%dT%H:%M:%S"))


def _run_dir(cfg: RunConfig, kind):
    digest = hashlib.sha256(cfg.text.encode()).hexdigest()[:12]
    path = os.path.join(cfg.output_dir, f"{kind}-{digest}")
    os.makedirs(path, exist_ok=True)
    return path


def _write_series_dat(path, rows):
    """Gnuplot-style two-column blocks, one per energy component."""
    names = CSV_HEADER.split(",")[2:14]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for col, name in enumerate(names, start=1):
            fh.write(f"# {name}\n")
            for row in rows:
                parts = row.split(",")
                fh.write(f"{parts[1]} {parts[col + 1]}\n")
            fh.write("\n\n")


def cmd_sweep(args):
    cfg = load_config(args.config)
    record = run_sweep(cfg, workers=args.workers)
    out = _run_dir(cfg, "sweep")
    with open(os.path.join(out, "results.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in record.rows:
            fh.write(row + "\n")
    _write_series_dat(os.path.join(out, "results.dat"), record.rows)
    with open(os.path.join(out, "config.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(cfg.text)
    with open(os.path.join(out, "metadata.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"kind = sweep\nconfig_hash = {record.config_hash}\n")
        fh.write(f"backend = {backend.name}\npoints = {len(record.rows)}\n")
        fh.write(f"approx_level = {cfg.approx_level}\n")
        for key, val in record.diagnostics.items():
            fh.write(f"{key} = {_fmt(val)}\n")
        fh.write("omega_A3_linear_terms = incomplete (not a systematic expansion)\n")
        fh.write(f"timestamp = {record.timestamp}\n")
    print(f"wrote {len(record.rows)} points to {out}")
    return 0


def _objective(cfg: RunConfig, names, base_state_kw):
    def evaluate(x):
        kw = dict(base_state_kw)
        for name, xi in zip(names, x):
            if name == "xi_phase":
                kw["xi1"] = cfg.geometry_value("xi1") + xi
            else:
                kw[name] = xi
        from .geometry import BraidState

        state = BraidState.make(**kw)
        b = breakdown(state, cfg.charge, cfg.physical, cfg.truncation,
                      level=cfg.approx_level)
        return b.total

    return evaluate


def golden_section(f, lo, hi, tol, max_iter=500):
    """Deterministic golden-section minimisation on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    trace = [(c, fc), (d, fd)]
    it = 0
    while abs(b - a) > tol and it < max_iter:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
            trace.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
            trace.append((d, fd))
        it += 1
    x = (a + b) / 2.0
    return x, f(x), trace, it < max_iter


def nelder_mead(f, x0, spans, tol, max_iter=500):
    """Deterministic Nelder-Mead with a fixed initial simplex."""
    ndim = len(x0)
    pts = [np.array(x0, dtype=float)]
    for i in range(ndim):
        p = np.array(x0, dtype=float)
        p[i] += 0.05 * spans[i]
        pts.append(p)
    vals = [f(p) for p in pts]
    trace = [(tuple(p), v) for p, v in zip(pts, vals)]
    for it in range(max_iter):
        order = np.argsort(vals, kind="stable")
        pts = [pts[i] for i in order]
        vals = [vals[i] for i in order]
        diam = max(np.max(np.abs(p - pts[0])) for p in pts[1:])
        if diam < tol:
            return pts[0], vals[0], trace, True
        centroid = np.mean(pts[:-1], axis=0)
        xr = centroid + (centroid - pts[-1])
        fr = f(xr)
        trace.append((tuple(xr), fr))
        if vals[0] <= fr < vals[-2]:
            pts[-1], vals[-1] = xr, fr
        elif fr < vals[0]:
            xe = centroid + 2.0 * (centroid - pts[-1])
            fe = f(xe)
            trace.append((tuple(xe), fe))
            if fe < fr:
                pts[-1], vals[-1] = xe, fe
            else:
                pts[-1], vals[-1] = xr, fr
        else:
            xc = centroid + 0.5 * (pts[-1] - centroid)
            fc = f(xc)
            trace.append((tuple(xc), fc))
            if fc < vals[-1]:
                pts[-1], vals[-1] = xc, fc
            else:
                for i in range(1, len(pts)):
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0])
                    vals[i] = f(pts[i])
                    trace.append((tuple(pts[i]), vals[i]))
    return pts[0], vals[0], trace, False


_DEFAULT_BOUNDS = {"eta": (0.02, 1.2), "R": None, "xi_phase": (0.0, 2.0 * math.pi)}


def cmd_minimize(args):
    cfg = load_config(args.config)
    names = [n.strip() for n in args.free.split(",") if n.strip()]
    if not 1 <= len(names) <= 3:
        raise ConfigError("--free takes one to three of eta,R,xi_phase")
    for n in names:
        if n not in ("eta", "R", "xi_phase"):
            raise ConfigError(f"cannot minimise over {n!r}")
    bounds = {}
    if args.bounds:
        for item in args.bounds.split(","):
            name, _, rng = item.partition("=")
            lo, _, hi = rng.partition(":")
            bounds[name.strip()] = (float(lo), float(hi))
    a = cfg.geometry_value("a")
    for n in names:
        if n not in bounds:
            default = _DEFAULT_BOUNDS[n]
            if default is None:
                default = (2.0 * a * 1.05 + 1e-9, 3.0 * cfg.geometry_value("R"))
            bounds[n] = default
    base_kw = dict(
        R=cfg.geometry_value("R"), a=a, eta=cfg.geometry_value("eta"),
        omega_A2=cfg.geometry_value("omega_A2"), omega_A3=cfg.geometry_value("omega_A3"),
        deta_ds=cfg.geometry_value("deta_ds"),
        xi1=cfg.geometry_value("xi1"), xi2=cfg.geometry_value("xi2"),
        dxi1_ds=cfg.geometry_value("dxi1_ds", cfg.physical.omega_xi),
        dxi2_ds=cfg.geometry_value("dxi2_ds", cfg.physical.omega_xi),
    )
    f = _objective(cfg, names, base_kw)
    spans = [bounds[n][1] - bounds[n][0] for n in names]
    if len(names) == 1:
        lo, hi = bounds[names[0]]
        x, fx, trace, ok = golden_section(lambda t: f([t]), lo, hi, 1e-6 * spans[0])
        xvec = [x]
    else:
        x0 = [0.5 * (bounds[n][0] + bounds[n][1]) for n in names]

        def clipped(x):
            xc = [min(max(v, bounds[n][0]), bounds[n][1]) for v, n in zip(x, names)]
            return f(xc)

        xvec, fx, trace, ok = nelder_mead(clipped, x0, spans, 1e-6 * max(spans))
        xvec = [min(max(v, bounds[n][0]), bounds[n][1]) for v, n in zip(xvec, names)]
    out = _run_dir(cfg, "minimize")
    with open(os.path.join(out, "minimize.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("iteration," + ",".join(names) + ",energy\n")
        for i, (pt, val) in enumerate(trace):
            pt = pt if isinstance(pt, tuple) else (pt,)
            fh.write(f"{i}," + ",".join(_fmt(v) for v in pt) + f",{_fmt(val)}\n")
    argmin = ", ".join(f"{n}={_fmt(v)}" for n, v in zip(names, xvec))
    print(f"argmin: {argmin}; energy = {_fmt(fx)}; converged = {ok}")
    print(f"trace written to {out}/minimize.csv")
    return 0 if ok else 3


def cmd_oracle(args):
    cfg = load_config(args.config)
    kd0 = cfg.physical.kappa_D
    ds = cfg.raw.get("oracle.ds", 0.01 / kd0)
    periods = cfg.raw.get("oracle.periods", 6)
    out = _run_dir(cfg, "oracle")
    rows = []
    worst = 0.0
    for v in cfg.sweep_values:
        state = cfg.state_at(v)
        phys = cfg.physical_at(v)
        edge = cfg.raw.get("oracle.edge", 8.0 / phys.kappa_D)
        if abs(state.omega_A[2]) > 0 or state.deta_ds != 0:
            raise ConfigError("oracle comparison requires a symmetric straight braid")
        if state.dxi1_ds == state.dxi2_ds and state.dxi1_ds != 0.0:
            mode = commensurate_average_density(state, phys, cfg.truncation).value
        elif max(abs(state.dxi1_ds), abs(state.dxi2_ds)) > 0:
            period = 2.0 * math.pi / max(abs(state.dxi1_ds), abs(state.dxi2_ds))
            taus = np.linspace(0.0, period, 16, endpoint=False)
            dens = []
            for t in taus:
                st = cfg.state_at(v)
                st = type(st).make(
                    R=st.R, a=st.a, eta=st.eta, omega_A2=0.0, omega_A3=0.0,
                    xi1=st.xi1 + st.dxi1_ds * t, xi2=st.xi2 + st.dxi2_ds * t,
                    dxi1_ds=st.dxi1_ds, dxi2_ds=st.dxi2_ds,
                )
                dens.append(energy_density_nocore(st, phys, cfg.truncation).value)
            mode = float(np.mean(dens))
        else:
            mode = energy_density_nocore(state, phys, cfg.truncation).value
        orc = oracle_density(state, phys.kappa_D, ds=ds, n_periods=periods,
                             edge_discard=edge)
        rel = (mode - orc) / orc
        worst = max(worst, abs(rel))
        rows.append(f"{cfg.sweep_parameter},{_fmt(v)},{_fmt(mode)},{_fmt(orc)},{_fmt(rel)}")
    with open(os.path.join(out, "oracle.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("parameter,value,mode_sum,yukawa_oracle,rel_diff\n")
        for row in rows:
            fh.write(row + "\n")
    print(f"oracle comparison over {len(rows)} points: max |rel diff| = {worst:.3e}")
    print(f"report in {out}/oracle.csv")
    return 0


def cmd_fig1(args):
    akz = np.arange(args.min_akz, args.max_akz + args.step / 2.0, args.step)
    rows = response.fig1_table(args.a_kappa, lmax=3, akz=akz)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "surf0_curves.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("l,a_kz,value\n")
        for l, k, v in rows:
            fh.write(f"{l},{_fmt(k)},{_fmt(v)}\n")
    diag = response.surf0_slope_diagnostic(args.a_kappa)
    print(f"wrote {path}")
    for l, slope in diag.items():
        print(f"max |d zeta/d(a k_z)| at l={l}: {slope:.4f}")
    return 0


def cmd_identities(args):
    rng = np.random.default_rng(20260810)
    worst = {}
    r = 0.0
    for _ in range(100):
        aK = rng.uniform(0.5, 4.0)
        eta2 = rng.uniform(0.0, 0.6)
        xi2 = rng.uniform(0.0, 2.0 * math.pi)
        m = int(rng.integers(0, 4))
        r = max(r, bessel.graf_addition_check(aK, eta2, xi2, m))
    worst["addition formulas"] = r
    r = 0.0
    for _ in range(100):
        z = rng.uniform(0.1, 5.0)
        t = rng.uniform(0.0, 2.0 * math.pi)
        r = max(r, bessel.jacobi_anger_residual(z, t))
    worst["plane-wave expansion"] = r
    r = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 32))
        x = rng.uniform(0.05, 50.0)
        r = max(r, bessel.wronskian_residual(n, x), *bessel.recurrence_residuals(n, x))
    worst["wronskian/recurrences"] = r
    r = 0.0
    for _ in range(100):
        n = int(rng.integers(-5, 6))
        npp = int(rng.integers(-5, 6))
        a = rng.uniform(0.3, 1.5)
        R = rng.uniform(2.0 * a + 0.5, 6.0)
        kap = rng.uniform(0.5, 2.0)
        r = max(r, identity_10_13_check(n, npp, a, R, kap))
    worst["bessel product identity"] = r
    r = 0.0
    for n in range(4):
        for x in (3.0, 5.0, 8.0):
            for y in (1.0, 2.0, 4.0):
                if y < x:
                    _, resid = omega_tilde_table(n, x, y)
                    r = max(r, resid)
    worst["image ladder dual forms"] = r
    status = 0
    for name, resid in worst.items():
        flag = "ok" if resid < 1e-9 else "FAIL"
        if resid >= 1e-9:
            status = 3
        print(f"{name:28s} max residual {resid:.3e}  {flag}")
    return status


def main(argv=None):
    ap = argparse.ArgumentParser(prog="braidpot",
                                 description="Screened electrostatics of braided charged rods")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="evaluate an energy sweep from a config file")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=1,
                   help="evaluate sweep points in a process pool")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("minimize", help="minimise the total energy over free parameters")
    p.add_argument("config")
    p.add_argument("--free", required=True, help="comma list from eta,R,xi_phase")
    p.add_argument("--bounds", default="", help="name=lo:hi[,name=lo:hi...]")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("oracle", help="compare the mode sum against the pair-sum oracle")
    p.add_argument("config")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fig1", help="emit the leading response curves")
    p.add_argument("--a-kappa", type=float, default=2.0)
    p.add_argument("--out", required=True)
    p.add_argument("--min-akz", type=float, default=-10.0)
    p.add_argument("--max-akz", type=float, default=10.0)
    p.add_argument("--step", type=float, default=0.1)
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("identities", help="run the identity suites and print residuals")
    p.set_defaults(func=cmd_identities)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GeometryError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
