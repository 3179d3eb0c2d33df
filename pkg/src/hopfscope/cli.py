"""Command-line front end.

Every command writes CSV data files plus a JSON summary (parameters echoed,
derived quantities, pass/fail of the relevant checks) into ``--outdir`` and
prints the summary to stdout.  Exit codes: 0 success, 2 check failure,
1 error.  Outputs are byte-deterministic for identical configurations:
floats use shortest round-trip formatting and JSON keys are sorted.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import asymptotics as asym
from . import isi as isimod
from . import maps as mapsmod
from .errors import HopfscopeError
from .integrate import EventSpec, IntegratorConfig, dominant_frequencies, integrate
from .model import alpha_of_nu, find_hopf_nu, normal_form, nu_of_alpha
from .taylor import taylor_of_model

# documented validity ranges; override with --force
VALIDITY = {
    "p": (0.05, 6.0),
    "alpha": (-1.0, 1.4),
    "nu": (0.216, 0.6),
    "rtol": (1e-13, 1e-2),
    "atol": (1e-15, 1e-2),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, obj):
    text = json.dumps(obj, sort_keys=True, indent=2)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    return text


def load_config(path):
    """Parse ``key = value`` lines; '#' starts a comment; UTF-8."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise HopfscopeError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        for cast in (int, float):
            try:
                out[key] = cast(val)
                break
            except ValueError:
                continue
        else:
            if val.lower() in ("true", "false"):
                out[key] = val.lower() == "true"
            else:
                out[key] = val
    return out


def _check_validity(ns, names, force):
    problems = []
    for name in names:
        val = getattr(ns, name, None)
        if val is None or name not in VALIDITY:
            continue
        lo, hi = VALIDITY[name]
        if not (lo <= val <= hi):
            problems.append(f"{name}={val} outside documented range [{lo}, {hi}]")
    if problems and not force:
        raise HopfscopeError(
            "; ".join(problems) + " (pass --force to override)"
        )
    return problems


def _cfg(ns):
    return IntegratorConfig(rtol=ns.rtol, atol=ns.atol)


def _parse_range(text):
    """lo:hi:step range specification."""
    parts = text.split(":")
    if len(parts) != 3:
        raise HopfscopeError(f"range must be lo:hi:step, got {text!r}")
    lo, hi, step = (float(s) for s in parts)
    if step <= 0 or hi < lo:
        raise HopfscopeError(f"bad range {text!r}")
    n = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(n) if lo + i * step <= hi + 1e-12]


def _parse_values(text):
    return [float(s) for s in text.split(",") if s.strip()]


def _summary(ns, command, results, checks, outdir):
    params = {
        k: v
        for k, v in sorted(vars(ns).items())
        if k not in ("func", "config") and not k.startswith("_")
    }
    ok = all(checks.values()) if checks else True
    obj = {
        "command": command,
        "params": params,
        "results": results,
        "checks": checks,
        "ok": ok,
    }
    text = write_json(Path(outdir) / f"{command}-summary.json", obj)
    print(text)
    return 0 if ok else 2


# --------------------------------------------------------------------------
# commands


def cmd_hopf_locate(ns):
    loc = find_hopf_nu(tol=ns.tol)
    evs = np.linalg.eigvals(
        np.array(
            [
                [(3 - loc.nu) / loc.nu, -3 / loc.nu, -3 / loc.nu],
                [-1.0, 0.0, 1.0],
                [9 - loc.nu, -6.0, -9.0],
            ]
        )
    )
    results = {
        "nu_AH": loc.nu,
        "beta": loc.beta,
        "real_eig": loc.real_eig,
        "alpha_residual": loc.alpha_residual,
        "a_prime": loc.a_prime,
        "eigenvalues": sorted([[z.real, z.imag] for z in evs]),
    }
    checks = {
        "alpha_residual_small": loc.alpha_residual < 1e-10,
        "transversal": abs(loc.a_prime) > 0.1,
    }
    return _summary(ns, "hopf-locate", results, checks, ns.outdir)


def cmd_lyapunov(ns):
    ps = _parse_range(ns.p_range)
    rows = []
    for p in ps:
        rows.append((p, mapsmod.gamma_of_p(p)))
    write_csv(Path(ns.outdir) / "gamma.csv", ["p", "gamma"], rows)
    sign_changes = []
    for (p0, g0), (p1, g1) in zip(rows, rows[1:]):
        if g0 * g1 < 0:
            sign_changes.append([p0, p1])
    results = {"n_points": len(rows), "sign_change_brackets": sign_changes}
    checks = {"found_two_zeros": len(sign_changes) == 2}
    return _summary(ns, "lyapunov", results, checks, ns.outdir)


def cmd_simulate(ns):
    alpha = ns.alpha if ns.alpha is not None else alpha_of_nu(ns.nu)
    nf = normal_form(alpha, ns.p)
    x0 = _parse_values(ns.x0)
    traj = integrate(nf, x0, (0.0, ns.t_end), cfg=_cfg(ns))
    traj.to_csv(Path(ns.outdir) / "trajectory.csv", n=ns.n_out)
    results = {
        "alpha": alpha,
        "nu": nf.nu,
        "beta": nf.beta,
        "t_end": ns.t_end,
        "n_steps": int(len(traj.t)),
        "final_state": [float(v) for v in traj.y[:, -1]],
    }
    checks = {}
    if ns.check == "freq-doubling":
        f1 = dominant_frequencies(traj, 0)
        f2 = dominant_frequencies(traj, 1)
        ratio = f1 / f2
        results["freq_x1"] = f1
        results["freq_x2"] = f2
        results["freq_ratio"] = ratio
        checks["freq_doubling"] = bool(abs(ratio - 2.0) <= 0.1)
    return _summary(ns, "simulate", results, checks, ns.outdir)


def cmd_orbit_geometry(ns):
    td = taylor_of_model(0.0, ns.p)
    ha = asym.hopf_asymptotics(td)
    curve, rho_bar = asym.orbit_approx(ns.alpha, ha)
    thetas = np.linspace(0.0, 2.0 * math.pi, ns.n_theta, endpoint=False)
    pts = curve(thetas)
    k, kappa = asym.curvature_torsion(thetas, ha.A_const, ns.alpha, ha.gamma)
    rows = [
        (thetas[i], pts[0, i], pts[1, i], pts[2, i], k[i], kappa[i])
        for i in range(len(thetas))
    ]
    write_csv(
        Path(ns.outdir) / "orbit.csv",
        ["theta", "x1", "x2", "x3", "curvature", "torsion"],
        rows,
    )
    results = {
        "rho_bar": rho_bar,
        "gamma": ha.gamma,
        "beta": ha.beta,
        "a": ha.a_const,
        "A": ha.A_const,
        "vartheta": ha.theta_offset,
    }
    return _summary(ns, "orbit-geometry", results, {}, ns.outdir)


def cmd_return_map(ns):
    p = ns.p if ns.p is not None else mapsmod.p_for_gamma(ns.gamma)
    theta_bar = None if ns.theta_bar == "auto" else float(ns.theta_bar)
    seeds = [tuple(_parse_values(s)) for s in ns.seed]
    rm = mapsmod.first_return_map(
        ns.alpha,
        p,
        theta_bar=theta_bar,
        n_transient=ns.n_transient,
        n_samples=ns.n_samples,
        seeds=seeds or (((0.0, 0.01, 0.0),)),
        cfg=_cfg(ns),
        t_max=ns.t_max,
    )
    rm.to_csv(Path(ns.outdir) / "return-map.csv")
    gamma = mapsmod.gamma_of_p(p)
    results = {
        "p": p,
        "gamma": gamma,
        "theta_bar": rm.theta_bar,
        "n_samples": int(len(rm)),
        "I_min": float(np.min(rm.I_k)),
        "I_max": float(np.max(rm.I_k)),
        "multivalued_bins": rm.multivalued_branches(),
    }
    checks = {}
    try:
        slope, intercept, n_used = mapsmod.fit_linear_branch(rm)
        beta = normal_form(ns.alpha, p).beta
        expected = 1.0 - 2.0 * ns.alpha * 2.0 * math.pi / beta
        results.update(
            {
                "linear_branch_slope": slope,
                "linear_branch_intercept": intercept,
                "linear_branch_n": n_used,
                "slope_expected": expected,
            }
        )
        checks["slope_within_10pct"] = bool(abs(slope - expected) <= 0.1 * abs(expected))
    except HopfscopeError as exc:
        results["linear_branch_error"] = str(exc)
    if ns.fit_c:
        fit = asym.fit_second_lyapunov(
            rm, ns.alpha, gamma, math.sqrt(abs(ns.alpha)), 2 * math.pi / normal_form(ns.alpha, p).beta
        )
        results["c_fit"] = fit.c
        results["c_fit_residual_rms"] = fit.residual_rms
        results["c_fit_ill_conditioned"] = fit.ill_conditioned
    return _summary(ns, "return-map", results, checks, ns.outdir)


def cmd_isi_scan(ns):
    rows = []
    runs = []
    if ns.sweep == "none":
        values = [None]
    else:
        values = _parse_values(ns.values)
        if not values:
            raise HopfscopeError("--values required for a sweep")
    for v in values:
        if ns.sweep == "alpha":
            alpha, p = float(v), ns.p
        elif ns.sweep == "gamma":
            alpha, p = ns.alpha, mapsmod.p_for_gamma(float(v))
        else:
            alpha, p = ns.alpha, ns.p
        st = isimod.measure_spike_train(
            alpha, p, ns.t_end, r1=ns.r1, r2=ns.r2, cfg=_cfg(ns)
        )
        if not st.is_multimodal:
            rows.append((v if v is not None else alpha, alpha, p, math.nan, math.nan, 0))
            continue
        series = isimod.isi_series(st)
        series.to_csv(Path(ns.outdir) / f"isi-{len(rows):02d}.csv")
        mean = series.mean()
        rows.append(
            (v if v is not None else alpha, alpha, p, mean, series.cv(), len(series.tau))
        )
        runs.append((float(v) if v is not None else alpha, mean))
    write_csv(
        Path(ns.outdir) / "isi-scan.csv",
        ["param", "alpha", "p", "mean_isi", "cv", "n_isi"],
        rows,
    )
    results = {"rows": len(rows)}
    checks = {}
    if ns.fit != "none" and len(runs) >= 5:
        mode = "vs-alpha" if ns.fit == "vs-alpha" else "vs-ln-gamma"
        report = isimod.fit_isi_scaling(runs, mode, alpha=ns.alpha)
        (Path(ns.outdir) / "isi-fit.json").write_text(report.to_json() + "\n")
        results["fit"] = json.loads(report.to_json())
        if mode == "vs-ln-gamma" and report.theoretical_slope:
            checks["slope_within_15pct"] = bool(
                abs(report.slope - report.theoretical_slope)
                <= 0.15 * abs(report.theoretical_slope)
            )
        if mode == "vs-alpha":
            checks["r2_above_095"] = bool(report.r2 > 0.95)
    return _summary(ns, "isi-scan", results, checks, ns.outdir)


def cmd_verify_global(ns):
    planes = _parse_values(ns.planes)
    grid_n = [int(s) for s in ns.mesh.split("x")]
    images = mapsmod.flow_map_Q(
        ns.alpha,
        ns.p,
        n_x1=grid_n[0],
        n_theta=grid_n[1],
        rho_plus=ns.rho_plus,
        planes=planes,
        cfg=_cfg(ns),
        t_max=ns.t_max,
    )
    rows = []
    diam = {}
    for plane in sorted(images):
        for s in images[plane]:
            rows.append(
                (
                    plane,
                    s.start[0],
                    s.start[1],
                    math.nan if s.failed else s.end[0],
                    math.nan if s.failed else s.end[1],
                    math.nan if s.failed else s.flight_time,
                    int(s.failed),
                )
            )
        diam[plane] = mapsmod.image_diameter(images[plane])
    write_csv(
        Path(ns.outdir) / "flow-map.csv",
        ["plane", "x1_start", "theta_start", "y1", "y2", "t_flight", "failed"],
        rows,
    )
    prof = mapsmod.contraction_profile(ns.alpha, ns.p, d1=min(planes))
    write_csv(
        Path(ns.outdir) / "contraction.csv",
        ["x1", "w", "lambda_bar", "lambda_under", "ratio_bar", "ratio_under", "h23"],
        list(
            zip(
                prof.x1,
                prof.w,
                prof.lambda_bar,
                prof.lambda_under,
                prof.ratio_bar,
                prof.ratio_under,
                prof.h23_deviation,
            )
        ),
    )
    ordered = sorted(diam)  # most negative first
    diams = [diam[k] for k in ordered]
    n_failed = sum(1 for r in rows if r[6])
    zeta = mapsmod.image_min_norm(images[min(images)])
    results = {
        "planes": ordered,
        "diameters": diams,
        "zeta": zeta,
        "n_failed": n_failed,
        "x_star": prof.x_star,
        "w_positive": prof.w_positive,
        "lambda_bar_positivity": prof.positivity_ok,
        "monotone_violation_x1": [float(v) for v in prof.monotone_violations],
        "max_h23_deviation": float(np.max(prof.h23_deviation)),
    }
    checks = {
        "G1_all_reach_sections": n_failed == 0,
        "G1_zeta_positive": zeta > 0.0,
        "G2_diameter_shrinks": all(a > b for a, b in zip(diams, diams[1:])),
        "G2_lambda_bar_positive_outer": prof.positivity_ok,
        "w_positive_on_axis": prof.w_positive,
    }
    return _summary(ns, "verify-global", results, checks, ns.outdir)


def cmd_sweep(ns):
    if ns.values:
        values = _parse_values(ns.values)
    else:
        values = _parse_range(ns.range)
    result = mapsmod.sweep_bifurcation(
        ns.param,
        values,
        alpha=ns.alpha,
        p=ns.p,
        theta_bar=ns.theta_bar,
        n_transient=ns.n_transient,
        n_keep=ns.n_keep,
        cfg=_cfg(ns),
        t_max=ns.t_max,
        jobs=ns.jobs,
    )
    result.diagram_to_csv(Path(ns.outdir) / "diagram.csv")
    classifications = [
        {
            "param": st.param,
            "gamma": st.gamma,
            "failed": st.failed,
            **st.orbit.to_json_dict(),
        }
        for st in result.steps
    ]
    write_json(Path(ns.outdir) / "classifications.json", classifications)
    results = {
        "n_steps": len(result.steps),
        "doubling_events": [list(d) for d in result.doubling_events],
        "classifications": [c["classification"] for c in classifications],
    }
    return _summary(ns, "sweep", results, {}, ns.outdir)


# --------------------------------------------------------------------------
# parser


def build_parser():
    parser = _Parser(prog="hopfscope", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, needs_tol=True):
        sp.add_argument("--outdir", default=".", help="output directory")
        sp.add_argument("--config", default=None, help="key = value config file")
        sp.add_argument("--force", action="store_true", help="skip validity-range checks")
        if needs_tol:
            sp.add_argument("--rtol", type=float, default=1e-10)
            sp.add_argument("--atol", type=float, default=1e-12)

    sp = sub.add_parser("hopf-locate", help="locate the Hopf parameter value")
    common(sp, needs_tol=False)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_hopf_locate, _validate=())

    sp = sub.add_parser("lyapunov", help="first Lyapunov coefficient over a p grid")
    common(sp, needs_tol=False)
    sp.add_argument("--p-range", default="0.2:3.2:0.05")
    sp.set_defaults(func=cmd_lyapunov, _validate=())

    sp = sub.add_parser("simulate", help="integrate the model and export the trajectory")
    common(sp)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--nu", type=float, default=None)
    sp.add_argument("--x0", default="0.0,0.01,0.0")
    sp.add_argument("--t-end", type=float, default=1000.0)
    sp.add_argument("--n-out", type=int, default=20000)
    sp.add_argument("--check", choices=["none", "freq-doubling"], default="none")
    sp.set_defaults(func=cmd_simulate, _validate=("p", "alpha", "nu", "rtol", "atol"))

    sp = sub.add_parser("orbit-geometry", help="leading-order orbit, curvature, torsion")
    common(sp, needs_tol=False)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--n-theta", type=int, default=512)
    sp.set_defaults(func=cmd_orbit_geometry, _validate=("p", "alpha"))

    sp = sub.add_parser("return-map", help="numeric first-return map of 1/rho^2")
    common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--gamma", type=float, default=None, help="target gamma (inverted to p)")
    sp.add_argument("--theta-bar", default="auto")
    sp.add_argument("--n-transient", type=int, default=10)
    sp.add_argument("--n-samples", type=int, default=400)
    sp.add_argument("--t-max", type=float, default=4000.0)
    sp.add_argument("--seed", action="append", default=[], help="x1,x2,x3 (repeatable)")
    sp.add_argument("--fit-c", action="store_true")
    sp.set_defaults(func=cmd_return_map, _validate=("p", "alpha", "rtol", "atol"))

    sp = sub.add_parser("isi-scan", help="interspike intervals and scaling fits")
    common(sp)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--t-end", type=float, default=2000.0)
    sp.add_argument("--r1", type=float, default=isimod.DEFAULT_R1)
    sp.add_argument("--r2", type=float, default=isimod.DEFAULT_R2)
    sp.add_argument("--sweep", choices=["none", "alpha", "gamma"], default="none")
    sp.add_argument("--values", default="")
    sp.add_argument("--fit", choices=["none", "vs-alpha", "vs-ln-gamma"], default="none")
    sp.set_defaults(func=cmd_isi_scan, _validate=("p", "alpha", "rtol", "atol"))

    sp = sub.add_parser("verify-global", help="flow-map and contraction diagnostics")
    common(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--planes", default="-0.65,-0.5,-0.35,-0.2")
    sp.add_argument("--mesh", default="20x20")
    sp.add_argument("--rho-plus", type=float, default=0.1)
    sp.add_argument("--t-max", type=float, default=400.0)
    sp.set_defaults(func=cmd_verify_global, _validate=("p", "alpha", "rtol", "atol"))

    sp = sub.add_parser("sweep", help="bifurcation sweep with orbit classification")
    common(sp)
    sp.add_argument("--param", choices=["alpha", "p", "gamma-proxy"], required=True)
    sp.add_argument("--range", default=None, help="lo:hi:step")
    sp.add_argument("--values", default=None, help="comma-separated values")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--theta-bar", type=float, default=0.0)
    sp.add_argument("--n-transient", type=int, default=120)
    sp.add_argument("--n-keep", type=int, default=80)
    sp.add_argument("--t-max", type=float, default=2500.0)
    sp.add_argument(
        "--jobs",
        type=int,
        default=int(os.environ.get("HOPFSCOPE_JOBS", "1")),
        help="parallel workers (default from HOPFSCOPE_JOBS)",
    )
    sp.set_defaults(func=cmd_sweep, _validate=("p", "alpha", "rtol", "atol"))

    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    # pre-scan for --config so file values become defaults (flags override)
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        try:
            file_defaults = load_config(cfg_path)
        except (OSError, HopfscopeError) as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 1
        ns0, _ = parser.parse_known_args(argv)
        # apply to the chosen subparser by re-parsing with defaults injected
        for action in parser._subparsers._group_actions:
            subparser = action.choices.get(ns0.command)
            if subparser is not None:
                known = {
                    a.dest for a in subparser._actions if a.dest != "help"
                }
                subparser.set_defaults(
                    **{k: v for k, v in file_defaults.items() if k in known}
                )
    ns = parser.parse_args(argv)
    try:
        _check_validity(ns, getattr(ns, "_validate", ()), getattr(ns, "force", False))
        Path(ns.outdir).mkdir(parents=True, exist_ok=True)
        return ns.func(ns)
    except HopfscopeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
