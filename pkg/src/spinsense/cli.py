"""Command-line driver for sweeps, figure presets, optimization, validation.

Subcommands
-----------
ramsey    detuning or interrogation-time sweeps of the Ramsey protocol
rabi      resonance profiles or atom-number scaling of the Rabi protocol
optimize  interrogation-time optima of the analytic Ramsey sensitivity
validate  run the oracle cross-check battery, write a pass/fail report
recipe    named presets (fig1, fig2, fig5, fig6, fig7), no free parameters

Every output file carries the fully resolved configuration in its header and
is byte-identical when rerun with the same config, seed, and thread count.
Precedence of settings: command-line flag > config file > built-in default.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    SweepConfig,
    _parse_grid,
    _parse_int_list,
    default_threads,
    read_config_file,
    render_table,
    write_table,
)
from .dynamics import IntegrationError, NoiseModel
from .rabi import default_detuning_grid, rabi_profile, rabi_scaling_study, rabi_sensitivity
from .ramsey import (
    amplitude_detuning_grid,
    ramsey_profile,
    ramsey_sensitivity_analytic,
)
from .sensitivity import (
    DegenerateProfileError,
    loglog_fit,
    optimize_tau,
    saturation_bound,
)
from .validation import report_lines, run_validation

RECIPES = ("fig1", "fig2", "fig5", "fig6", "fig7")


# ---------------------------------------------------------------------------
# Argument parsing and config resolution
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsense",
        description="Laser-noise-limited Ramsey/Rabi spectroscopy sweeps",
    )
    parser.add_argument("--version", action="version", version=f"spinsense {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--out", help="output file path")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("--seed", type=int, help="RNG seed recorded in headers")
        p.add_argument("--threads", type=int, help="worker processes (default $SPINSENSE_THREADS or 1)")

    p = sub.add_parser("ramsey", help="Ramsey sweep: per-detuning rows, or per-tau with --tau-grid")
    add_common(p)
    p.add_argument("--n", type=int, help="atom number")
    p.add_argument("--scheme", help="standard | twin-detuning | phase-conjugate")
    p.add_argument("--gamma-d", type=float, help="phase-diffusion rate")
    p.add_argument("--gamma-a", type=float, help="amplitude-noise rate")
    p.add_argument("--tau", type=float, help="interrogation time")
    p.add_argument("--tau-grid", type=_parse_grid, help="tau grid 'min,max,count[,log]'")
    p.add_argument("--omega-grid", type=_parse_grid, help="detuning grid 'min,max,count'")
    p.add_argument("--method", help="auto | exact | moments | lindblad")
    p.add_argument("--tol", type=float, help="integrator tolerance")

    p = sub.add_parser("rabi", help="Rabi profile, or atom-number scaling with --n-list")
    add_common(p)
    p.add_argument("--n", type=int, help="atom number")
    p.add_argument("--n-list", type=_parse_int_list, help="comma-separated atom numbers for a scaling table")
    p.add_argument("--scheme", help="standard | twin-detuning")
    p.add_argument("--gamma-d", type=float, help="phase-diffusion rate")
    p.add_argument("--eta", type=float, help="drive strength (pulse lasts pi/(2 eta))")
    p.add_argument("--omega-grid", type=_parse_grid, help="detuning grid 'min,max,count'")
    p.add_argument("--method", help="auto | moments | lindblad")
    p.add_argument("--tol", type=float, help="integrator tolerance")

    p = sub.add_parser("optimize", help="interrogation-time optima of the analytic sensitivity")
    add_common(p)
    p.add_argument("--n-list", type=_parse_int_list, help="comma-separated atom numbers")
    p.add_argument("--scheme", help="standard | twin-detuning | phase-conjugate")
    p.add_argument("--gamma-d", type=float, help="phase-diffusion rate")

    p = sub.add_parser("validate", help="run oracle cross-checks; exit 0 iff all pass")
    add_common(p)
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--rk-tol", type=float, default=1e-10, help="integrator tolerance for the reference route")

    p = sub.add_parser("recipe", help="figure presets with fixed parameters")
    add_common(p)
    p.add_argument("name", choices=RECIPES)
    return parser


def _pick(args, file_cfg: dict, key: str, cast, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in file_cfg:
        return cast(file_cfg[key])
    return default


def _resolve_sweep(args, protocol: str) -> SweepConfig:
    file_cfg = read_config_file(args.config) if args.config else {}
    file_protocol = file_cfg.get("protocol")
    if file_protocol is not None and file_protocol != protocol:
        raise ConfigError(
            f"config file sets protocol={file_protocol!r} but the {protocol!r} subcommand was invoked"
        )
    return SweepConfig(
        protocol=protocol,
        scheme=_pick(args, file_cfg, "scheme", str, "standard"),
        n_atoms=_pick(args, file_cfg, "n", int, _pick(args, file_cfg, "n_atoms", int)),
        n_list=_pick(args, file_cfg, "n_list", _parse_int_list),
        gamma_d=_pick(args, file_cfg, "gamma_d", float, 0.0),
        gamma_a=_pick(args, file_cfg, "gamma_a", float, 0.0),
        tau=_pick(args, file_cfg, "tau", float),
        tau_grid=_pick(args, file_cfg, "tau_grid", _parse_grid),
        eta=_pick(args, file_cfg, "eta", float),
        omega_grid=_pick(args, file_cfg, "omega_grid", _parse_grid),
        seed=_pick(args, file_cfg, "seed", int, 0),
        tol=_pick(args, file_cfg, "tol", float, 1e-9),
        method=_pick(args, file_cfg, "method", str, "auto"),
        threads=_pick(args, file_cfg, "threads", int, default_threads()),
        out=_pick(args, file_cfg, "out", str),
        format=_pick(args, file_cfg, "format", str, "csv"),
    )


def _run_jobs(fn, jobs: list, threads: int) -> list:
    if threads <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        return list(pool.map(fn, jobs))  # map preserves grid order


# ---------------------------------------------------------------------------
# ramsey
# ---------------------------------------------------------------------------

def _ramsey_grid(cfg: SweepConfig, tau: float) -> np.ndarray:
    if cfg.gamma_a > 0:
        default = amplitude_detuning_grid(cfg.gamma_a, tau)
    else:
        default = np.linspace(-np.pi / tau, np.pi / tau, 801)
    return cfg.omegas(default)


def _ramsey_tau_job(job: tuple) -> tuple:
    cfg_dict, tau = job
    cfg = SweepConfig(**cfg_dict)
    grid = _ramsey_grid(cfg, tau)
    noise = NoiseModel(gamma_d=cfg.gamma_d, gamma_a=cfg.gamma_a)
    try:
        res = ramsey_profile(
            cfg.n_atoms, grid, noise, tau, cfg.scheme, method=cfg.method, tol=cfg.tol
        )
    except (IntegrationError, DegenerateProfileError) as exc:
        raise RuntimeError(f"tau = {tau:.6g}: {exc}") from exc
    i = int(np.argmin(np.abs(grid - res.sensitivity_detuning)))
    return (
        res.sensitivity_detuning,
        tau,
        float(res.signal[i]),
        float(res.second_moment[i]),
        float(res.std_dev[i]),
        res.sensitivity,
    )


def cmd_ramsey(cfg: SweepConfig) -> int:
    if cfg.n_atoms is None:
        raise ConfigError("ramsey sweeps need --n")
    columns = ["omega", "tau", "signal", "second_moment", "std_dev", "delta_omega"]
    taus = cfg.taus()
    if taus is not None:
        cfg_dict = {**cfg.__dict__}
        rows = _run_jobs(_ramsey_tau_job, [(cfg_dict, float(t)) for t in taus], cfg.threads)
    else:
        grid = _ramsey_grid(cfg, cfg.tau)
        noise = NoiseModel(gamma_d=cfg.gamma_d, gamma_a=cfg.gamma_a)
        res = ramsey_profile(
            cfg.n_atoms, grid, noise, cfg.tau, cfg.scheme, method=cfg.method, tol=cfg.tol
        )
        rows = [
            (float(o), cfg.tau, float(s), float(m), float(d), res.sensitivity)
            for o, s, m, d in zip(grid, res.signal, res.second_moment, res.std_dev)
        ]
    meta = cfg.metadata()
    meta["spinsense_version"] = __version__
    _emit(cfg, meta, columns, rows)
    return 0


# ---------------------------------------------------------------------------
# rabi
# ---------------------------------------------------------------------------

def cmd_rabi(cfg: SweepConfig) -> int:
    meta = cfg.metadata()
    meta["spinsense_version"] = __version__
    if cfg.n_list is not None:
        points, exponent = rabi_scaling_study(
            cfg.n_list,
            cfg.eta,
            cfg.gamma_d,
            cfg.scheme,
            method=cfg.method if cfg.method != "exact" else "auto",
        )
        meta["fitted_exponent"] = exponent
        columns = ["n_atoms", "delta_omega"]
        rows = [(int(p.control), p.sensitivity) for p in points]
    else:
        if cfg.n_atoms is None:
            raise ConfigError("rabi sweeps need --n or --n-list")
        grid = cfg.omegas(default_detuning_grid(cfg.eta, cfg.gamma_d))
        profile = rabi_profile(
            cfg.n_atoms, cfg.eta, cfg.gamma_d, grid, cfg.scheme, method=cfg.method, tol=cfg.tol
        )
        sens = rabi_sensitivity(profile)
        columns = ["omega", "tau", "signal", "second_moment", "std_dev", "delta_omega"]
        rows = [
            (float(o), profile.tau, float(s), float(m), float(d), sens)
            for o, s, m, d in zip(grid, profile.signal, profile.second_moment, profile.std_dev)
        ]
    _emit(cfg, meta, columns, rows)
    return 0


# ---------------------------------------------------------------------------
# optimize / validate / recipes
# ---------------------------------------------------------------------------

def cmd_optimize(args) -> int:
    from .dynamics import normalize_scheme

    file_cfg = read_config_file(args.config) if args.config else {}
    n_list = _pick(args, file_cfg, "n_list", _parse_int_list)
    scheme = normalize_scheme(_pick(args, file_cfg, "scheme", str, "standard"))
    gamma_d = _pick(args, file_cfg, "gamma_d", float, 1.0)
    fmt = _pick(args, file_cfg, "format", str, "csv")
    out = _pick(args, file_cfg, "out", str)
    if not n_list:
        raise ConfigError("optimize needs --n-list")
    if gamma_d <= 0:
        raise ConfigError("optimize needs gamma_d > 0")
    rows = []
    for n in n_list:
        tau_star, sens_star = optimize_tau(n, gamma_d, scheme)
        rows.append((int(n), tau_star, sens_star))
    meta = {
        "command": "optimize",
        "scheme": scheme,
        "gamma_d": gamma_d,
        "seed": _pick(args, file_cfg, "seed", int, 0),
        "saturation_bound": saturation_bound(gamma_d),
        "spinsense_version": __version__,
    }
    _emit_raw(out, fmt, meta, ["n_atoms", "tau_opt", "delta_omega_opt"], rows)
    return 0


def cmd_validate(args) -> int:
    file_cfg = read_config_file(args.config) if args.config else {}
    seed = _pick(args, file_cfg, "seed", int, 20240801)
    out = _pick(args, file_cfg, "out", str)
    results = run_validation(level=args.level, seed=seed, rk_tol=args.rk_tol)
    header = {
        "command": "validate",
        "level": args.level,
        "seed": seed,
        "rk_tol": args.rk_tol,
        "spinsense_version": __version__,
    }
    lines = report_lines(results, header)
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(r.passed for r in results) else 1


def _recipe_fig1():
    gamma_d, n = 1.0, 10
    rows = []
    for x in np.linspace(0.05, 6.0, 120):
        tau = x / gamma_d
        rows.append(
            ("a", x, ramsey_sensitivity_analytic(n, gamma_d, tau, "standard"), 1.0 / (tau * np.sqrt(n)))
        )
    tau_bound, _ = optimize_tau(10**6, gamma_d, "standard")
    n_values = sorted(set(np.unique(np.round(np.geomspace(1, 1e4, 41)).astype(int))))
    for nn in n_values:
        _, sens_star = optimize_tau(int(nn), gamma_d, "standard")
        rows.append(("b", float(nn), sens_star, 1.0 / (tau_bound * np.sqrt(nn))))
    meta = {
        "recipe": "fig1",
        "gamma_d": gamma_d,
        "n_atoms": n,
        "saturation_bound": saturation_bound(gamma_d),
        "tau_opt_large_n": tau_bound,
    }
    return meta, ["panel", "x", "delta_omega", "reference"], rows


def _recipe_fig2():
    gamma_a, n = 1.0, 10
    from .ramsey import amplitude_noise_atom_scaling, amplitude_noise_sensitivity_curve

    taus = np.geomspace(0.01, 100.0, 25)
    curve = amplitude_noise_sensitivity_curve(n, gamma_a, taus)
    rows = [("a", p.control, p.sensitivity, 1.0 / (p.control * np.sqrt(n))) for p in curve]
    short = [(p.control, p.sensitivity) for p in curve if p.control <= 0.1]
    long = [(p.control, p.sensitivity) for p in curve if p.control >= 10.0]
    slope_short, _, _ = loglog_fit(short)
    slope_long, _, _ = loglog_fit(long)
    n_values = list(range(4, 41, 2))
    points, slope_n = amplitude_noise_atom_scaling(n_values, gamma_a, 20.0)
    ref0 = points[0].sensitivity * np.sqrt(points[0].control)
    rows += [("b", p.control, p.sensitivity, ref0 / np.sqrt(p.control)) for p in points]
    meta = {
        "recipe": "fig2",
        "gamma_a": gamma_a,
        "n_atoms": n,
        "tau_c": 20.0,
        "slope_tau_short": slope_short,
        "slope_tau_long": slope_long,
        "slope_n": slope_n,
    }
    return meta, ["panel", "x", "delta_omega", "reference"], rows


def _recipe_fig5():
    gamma_d, n, tau = 1.0, 100, 0.5
    omegas = np.linspace(-1.5 * np.pi, 1.5 * np.pi, 601) / tau
    noise = NoiseModel(gamma_d=gamma_d)
    res_std = ramsey_profile(n, omegas, noise, tau, "standard")
    res_twin = ramsey_profile(n, omegas, noise, tau, "twin-detuning")
    rows = [
        (float(o), float(s1), float(d1), float(s2), float(d2))
        for o, s1, d1, s2, d2 in zip(
            omegas, res_std.signal, res_std.std_dev, res_twin.signal, res_twin.std_dev
        )
    ]
    meta = {
        "recipe": "fig5",
        "gamma_d": gamma_d,
        "n_atoms": n,
        "tau": tau,
        "delta_omega_standard": res_std.sensitivity,
        "delta_omega_twin": res_twin.sensitivity,
    }
    return meta, ["omega", "signal_standard", "std_standard", "signal_twin", "std_twin"], rows


def _recipe_fig6():
    gamma_d, n, eta = 1.0, 10, 0.2
    grid = default_detuning_grid(eta, gamma_d, 401)
    prof_std = rabi_profile(n, eta, gamma_d, grid, "standard")
    prof_twin = rabi_profile(n, eta, gamma_d, grid, "twin-detuning")
    rows = [
        (float(o), float(s1), float(d1), float(s2), float(d2))
        for o, s1, d1, s2, d2 in zip(
            grid, prof_std.signal, prof_std.std_dev, prof_twin.signal, prof_twin.std_dev
        )
    ]
    meta = {
        "recipe": "fig6",
        "gamma_d": gamma_d,
        "n_atoms": n,
        "eta": eta,
        "tau": prof_std.tau,
        "delta_omega_standard": rabi_sensitivity(prof_std),
        "delta_omega_twin": rabi_sensitivity(prof_twin),
    }
    return meta, ["omega", "signal_standard", "std_standard", "signal_twin", "std_twin"], rows


def _recipe_fig7():
    gamma_d = eta = 1.0
    n_values = list(range(4, 41, 2))
    pts_std, exp_std = rabi_scaling_study(n_values, eta, gamma_d, "standard")
    pts_twin, exp_twin = rabi_scaling_study(n_values, eta, gamma_d, "twin-detuning")
    upper = [(p.control, p.sensitivity) for p in pts_std if p.control >= 20]
    exp_std_upper, _, _ = loglog_fit(upper)
    rows = [
        (int(ps.control), ps.sensitivity, pt.sensitivity) for ps, pt in zip(pts_std, pts_twin)
    ]
    meta = {
        "recipe": "fig7",
        "gamma_d": gamma_d,
        "eta": eta,
        "exponent_standard": exp_std,
        "exponent_standard_upper_half": exp_std_upper,
        "exponent_twin": exp_twin,
    }
    return meta, ["n_atoms", "delta_omega_standard", "delta_omega_twin"], rows


_RECIPE_BUILDERS = {
    "fig1": _recipe_fig1,
    "fig2": _recipe_fig2,
    "fig5": _recipe_fig5,
    "fig6": _recipe_fig6,
    "fig7": _recipe_fig7,
}


def cmd_recipe(args) -> int:
    file_cfg = read_config_file(args.config) if args.config else {}
    fmt = _pick(args, file_cfg, "format", str, "csv")
    out = _pick(args, file_cfg, "out", str)
    seed = _pick(args, file_cfg, "seed", int, 0)
    meta, columns, rows = _RECIPE_BUILDERS[args.name]()
    meta["seed"] = seed
    meta["spinsense_version"] = __version__
    _emit_raw(out, fmt, meta, columns, rows)
    return 0


# ---------------------------------------------------------------------------
# Output plumbing and entry point
# ---------------------------------------------------------------------------

def _emit(cfg: SweepConfig, meta: dict, columns: list[str], rows: list[tuple]) -> None:
    _emit_raw(cfg.out, cfg.format, meta, columns, rows)


def _emit_raw(out, fmt: str, meta: dict, columns: list[str], rows: list[tuple]) -> None:
    if out:
        write_table(out, fmt, meta, columns, rows)
    else:
        sys.stdout.write(render_table(fmt, meta, columns, rows))


_GRID_FLAGS = ("--omega-grid", "--tau-grid")


def _preprocess_argv(argv):
    """Join grid flags with their values so negative grid bounds survive
    argparse's option detection ('--omega-grid -3,3,201' works unquoted)."""
    if argv is None:
        argv = sys.argv[1:]
    out = []
    tokens = iter(argv)
    for token in tokens:
        if token in _GRID_FLAGS:
            value = next(tokens, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(_preprocess_argv(argv))
    try:
        if args.command == "ramsey":
            return cmd_ramsey(_resolve_sweep(args, "ramsey"))
        if args.command == "rabi":
            return cmd_rabi(_resolve_sweep(args, "rabi"))
        if args.command == "optimize":
            return cmd_optimize(args)
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "recipe":
            return cmd_recipe(args)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationError, DegenerateProfileError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
