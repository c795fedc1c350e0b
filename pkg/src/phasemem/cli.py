"""Command-line entry point: ``phasemem <command> ...``.

Exit codes: 0 success, 2 usage error, 3 input validation error,
4 numeric contract violation.
"""

from __future__ import annotations

import argparse
import json
import math
import shlex
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .acf_model import ModelParams, PhaseConstant, lorentzian_acf, model_acf
from .ensemble import EnsembleConfig, run_ensemble
from .errors import ContractViolation
from .estimator import average_channels, detrend, relative_fluctuation, sample_acf
from .fit import FitConfig, degeneracy_scan, fit_acf, fit_lorentzian, is_degenerate, profile_spread
from .io import (manifest, read_acf_csv, read_excitation_csv, write_acf_csv,
                 write_excitation_csv, write_json, write_rows)
from .kinematics import RotorGeometry, WindowKinematics, rotor_frequency, spin_window_params
from .specfun import AngleGrid, SpinWindow
from .tps import HBAR_MEV_S, RotorParams, fringe_visibility, spectrum_grid

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CONTRACT = 0, 2, 3, 4

DEFAULT_CONFIG = {
    "gamma_MeV": 0.15,
    "beta_MeV": 0.03,
    "hbar_omega_MeV": 0.75,
    "d": 1.0,
    "g": 1.0,
    "i_bar": 36.0,
    "phi_rad": 0.0,
    "e_bar_MeV": None,
    "barrier_MeV": None,
    "e_min_MeV": 49.0,
    "e_max_MeV": 57.0,
    "de_MeV": 0.025,
    "sigma_d": 0.0,
    "n_realizations": 400,
    "seed": 0,
    "phase_constant": "pi",
    "theta_deg": 87.5,
    "vary_spin_center": False,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def load_config(path):
    cfg = dict(DEFAULT_CONFIG)
    if path is None:
        return cfg
    with open(path, encoding="utf-8") as fh:
        user = json.load(fh)
    if not isinstance(user, dict):
        raise ValueError("config must be a JSON object")
    unknown = sorted(set(user) - set(DEFAULT_CONFIG))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    cfg.update(user)
    return cfg


def model_params(cfg):
    return ModelParams(cfg["gamma_MeV"], cfg["beta_MeV"], cfg["hbar_omega_MeV"], cfg["d"],
                       PhaseConstant.parse(cfg["phase_constant"]))


def window_kinematics(cfg):
    if cfg["e_bar_MeV"] is None or cfg["barrier_MeV"] is None:
        raise ValueError("e_bar_MeV and barrier_MeV are required for spin-window kinematics")
    return WindowKinematics(cfg["i_bar"], cfg["e_bar_MeV"], cfg["barrier_MeV"], cfg["g"])


def ensemble_config(cfg):
    return EnsembleConfig(
        params=model_params(cfg),
        window=SpinWindow.gaussian(cfg["i_bar"], cfg["g"]),
        e_min=cfg["e_min_MeV"], e_max=cfg["e_max_MeV"], e_step=cfg["de_MeV"],
        phi=cfg["phi_rad"], sigma_d=cfg["sigma_d"],
        n_realizations=int(cfg["n_realizations"]), base_seed=int(cfg["seed"]),
        kinematics=window_kinematics(cfg) if cfg["vary_spin_center"] else None,
    )


def _out(args):
    return Path(args.out)


def cmd_model(args, cfg):
    params = model_params(cfg)
    n = int(math.floor(args.eps_max / args.eps_step + 1e-9))
    eps = args.eps_step * np.arange(n + 1)
    c = model_acf(eps, params)
    if abs(c[0] - 1.0) > 1e-10:
        raise ContractViolation(f"C(0) = {c[0]!r} is not 1")
    header, cols = ["epsilon_MeV", "C"], [eps, c]
    if args.lorentzian_gamma is not None:
        header.append("C_lorentzian")
        cols.append(lorentzian_acf(eps, args.lorentzian_gamma))
    write_rows(_out(args), header, zip(*cols))
    return [_out(args)], []


def cmd_tps(args, cfg):
    window = SpinWindow.gaussian(cfg["i_bar"], cfg["g"])
    rp = RotorParams(cfg["gamma_MeV"], cfg["beta_MeV"], cfg["hbar_omega_MeV"], cfg["phi_rad"], window)
    frac = np.linspace(0.0, args.periods, args.n_t)
    t = frac * rp.period
    grid = AngleGrid.from_degrees(args.theta_min, args.theta_max, args.n_theta)
    spec = spectrum_grid(t, grid, rp)
    floor = -1e-12 * np.max(np.abs(spec.p), axis=1, keepdims=True)
    if np.any(spec.p < floor):
        raise ContractViolation("time power spectrum went negative")
    deg = np.degrees(grid.theta_values)
    header = ["t_over_T", "theta_deg", "P", "P_diag", "ratio", "t_hbar_per_MeV"]
    if args.seconds:
        header.append("t_s")
    rows = []
    for i, ti in enumerate(t):
        for k, th in enumerate(deg):
            row = [frac[i], th, spec.p[i, k], spec.p_diag[i, k], spec.ratio[i, k], ti]
            if args.seconds:
                row.append(ti * HBAR_MEV_S)
            rows.append(row)
    write_rows(_out(args), header, rows)
    outputs = [_out(args)]
    if args.visibility_out:
        lo, hi = np.radians(args.visibility_window)
        vis = [fringe_visibility(ti, (lo, hi), rp, args.visibility_points) for ti in t]
        write_rows(args.visibility_out, ["t_over_T", "visibility"], zip(frac, vis))
        outputs.append(Path(args.visibility_out))
    return outputs, []


def cmd_simulate(args, cfg):
    config = ensemble_config(cfg)
    theta = math.radians(cfg["theta_deg"])
    outdir = Path(args.outdir)
    result = run_ensemble(config, theta, args.eps_max, keep_excitations=True, threads=args.threads)
    series = result.acf_series()
    if not np.all(np.isfinite(series.c_values)):
        raise ContractViolation("ensemble ACF is not finite")
    outputs = []
    for i, xf in enumerate(result.excitations):
        path = outdir / f"excitation_{i:04d}.csv"
        write_excitation_csv(path, [xf])
        outputs.append(path)
    acf_path = outdir / "ensemble_acf.csv"
    write_acf_csv(acf_path, series)
    outputs.append(acf_path)
    return outputs, []


def cmd_acf(args, cfg):
    functions = []
    for path in args.inputs:
        functions.extend(read_excitation_csv(path))
    series = []
    for xf in functions:
        if args.detrend == "poly":
            _, trend = detrend(xf, "poly", order=args.order)
            xf = relative_fluctuation(xf, trend)
        elif args.detrend == "moving_average":
            _, trend = detrend(xf, "moving_average", window_mev=args.window_mev)
            xf = relative_fluctuation(xf, trend)
        series.append(sample_acf(xf, args.eps_max))
    combined = average_channels(series) if len(series) > 1 else series[0]
    write_acf_csv(_out(args), combined)
    return [_out(args)], list(args.inputs)


def fit_config(args, cfg):
    kw = {"phase_constant": args.phase_constant or cfg["phase_constant"],
          "weight_mode": args.weight_mode, "grid_points": args.grid_points}
    for name in ("gamma", "beta", "hbar_omega", "d"):
        b = getattr(args, f"{name}_bounds")
        if b is not None:
            kw[f"{name}_bounds"] = tuple(b)
    return FitConfig(**kw)


def cmd_fit(args, cfg):
    target = read_acf_csv(args.input)
    config = fit_config(args, cfg)
    res = fit_acf(target, config)
    out = {"fit": res.as_dict(), "weight_mode": config.weight_mode,
           "n_lags": len(target)}
    if args.lorentzian:
        lf = fit_lorentzian(target, config)
        out["lorentzian"] = {"gamma_MeV": lf.gamma, "scale": lf.scale, "objective": lf.objective}
    write_json(_out(args), out)
    return [_out(args)], [args.input]


def cmd_scan(args, cfg):
    target = read_acf_csv(args.input)
    config = fit_config(args, cfg)
    betas = np.linspace(args.beta_min, args.beta_max, args.n_beta)
    prof = degeneracy_scan(target, betas, config)
    out = {
        "profile": [{"beta_MeV": p.beta, "objective": p.objective, "gamma_MeV": p.gamma,
                     "hbar_omega_MeV": p.hbar_omega, "d": p.d, "scale": p.scale} for p in prof],
        "relative_spread": profile_spread(prof),
        "degenerate": is_degenerate(prof, args.threshold),
        "threshold": args.threshold,
    }
    write_json(_out(args), out)
    return [_out(args)], [args.input]


def cmd_kinematics(args, cfg):
    out = {}
    if cfg["e_bar_MeV"] is not None and cfg["barrier_MeV"] is not None:
        k = window_kinematics(cfg)
        e = cfg["e_bar_MeV"] if args.energy is None else args.energy
        center, de, d = spin_window_params(k, cfg["hbar_omega_MeV"], e)
        out["window"] = {"energy_MeV": e, "I": center, "delta_E_MeV": de, "d": d}
    geom = RotorGeometry(args.a1, args.a2, args.r0, not args.no_self_inertia)
    spin = cfg["i_bar"] if args.spin is None else args.spin
    hw, report = rotor_frequency(geom, spin)
    report.update(spin=spin, a1=args.a1, a2=args.a2, r0_fm=args.r0,
                  ratio_to_fitted_hbar_omega=hw / cfg["hbar_omega_MeV"])
    out["rotor"] = report
    write_json(_out(args), out)
    return [_out(args)], []


def build_parser():
    p = _Parser(prog="phasemem", description="Slow phase-relaxation correlation toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, out=True):
        sp.add_argument("--config", help="JSON configuration document")
        if out:
            sp.add_argument("--out", required=True, help="output file")

    sp = sub.add_parser("model", help="evaluate the analytic ACF on an epsilon grid")
    common(sp)
    sp.add_argument("--eps-max", type=float, default=3.0)
    sp.add_argument("--eps-step", type=float, default=0.01)
    sp.add_argument("--lorentzian-gamma", type=float)
    sp.set_defaults(func=cmd_model)

    sp = sub.add_parser("tps", help="time power spectrum on a (t, theta) grid")
    common(sp)
    sp.add_argument("--periods", type=float, default=1.0, help="t range in units of T")
    sp.add_argument("--n-t", type=int, default=5)
    sp.add_argument("--theta-min", type=float, default=0.0)
    sp.add_argument("--theta-max", type=float, default=180.0)
    sp.add_argument("--n-theta", type=int, default=181)
    sp.add_argument("--seconds", action="store_true", help="add a t_s column")
    sp.add_argument("--visibility-out")
    sp.add_argument("--visibility-window", type=float, nargs=2, default=(80.0, 100.0))
    sp.add_argument("--visibility-points", type=int, default=64)
    sp.set_defaults(func=cmd_tps)

    sp = sub.add_parser("simulate", help="run the Monte Carlo S-matrix ensemble")
    common(sp, out=False)
    sp.add_argument("--outdir", required=True)
    sp.add_argument("--eps-max", type=float, default=2.0)
    sp.add_argument("--threads", type=int)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("acf", help="sample ACF of excitation-function CSVs")
    common(sp)
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--eps-max", type=float, default=2.0)
    sp.add_argument("--detrend", choices=("none", "poly", "moving_average"), default="none")
    sp.add_argument("--order", type=int, default=1)
    sp.add_argument("--window-mev", type=float, default=2.0)
    sp.set_defaults(func=cmd_acf)

    for name, func in (("fit", cmd_fit), ("scan", cmd_scan)):
        sp = sub.add_parser(name, help=f"{name} the analytic ACF against an ACF CSV")
        common(sp)
        sp.add_argument("--input", required=True)
        sp.add_argument("--phase-constant", choices=("pi", "two_pi"))
        sp.add_argument("--weight-mode", choices=("auto", "uniform", "inverse_variance"), default="auto")
        sp.add_argument("--grid-points", type=int, default=12)
        for b in ("gamma", "beta", "hbar_omega", "d"):
            sp.add_argument(f"--{b.replace('_', '-')}-bounds", type=float, nargs=2, metavar=("LO", "HI"))
        if name == "fit":
            sp.add_argument("--lorentzian", action="store_true", help="also fit a Lorentzian")
        else:
            sp.add_argument("--beta-min", type=float, default=0.01)
            sp.add_argument("--beta-max", type=float, default=0.2)
            sp.add_argument("--n-beta", type=int, default=20)
            sp.add_argument("--threshold", type=float, default=0.10)
        sp.set_defaults(func=func)

    sp = sub.add_parser("kinematics", help="spin-window kinematics and rotor frequency")
    common(sp)
    sp.add_argument("--energy", type=float)
    sp.add_argument("--a1", type=int, default=24)
    sp.add_argument("--a2", type=int, default=28)
    sp.add_argument("--r0", type=float, default=1.2)
    sp.add_argument("--spin", type=float)
    sp.add_argument("--no-self-inertia", action="store_true")
    sp.set_defaults(func=cmd_kinematics)
    return p


def execute(argv):
    argv = list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        cfg = load_config(args.config)
        outputs, inputs = args.func(args, cfg)
    except ContractViolation as exc:
        print(f"phasemem: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"phasemem: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    wall = time.perf_counter() - start
    seed = int(cfg["seed"]) if args.command == "simulate" else None
    man = manifest(__version__, shlex.join(["phasemem"] + argv),
                   {"command": args.command, "config": cfg,
                    "options": {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}},
                   seed, inputs, outputs, wall)
    if args.command == "simulate":
        man_path = Path(args.outdir) / "manifest.json"
    else:
        man_path = Path(str(args.out) + ".manifest.json")
    write_json(man_path, man)
    return EXIT_OK


def main():
    sys.exit(execute(sys.argv[1:]))


if __name__ == "__main__":
    main()
