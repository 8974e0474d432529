"""Command-line front end: scenario configs in, CSV curves out.

Config files are flat key=value text with optional [section] headers
(INI style, no nesting).  Every CSV starts with '#key=value' comment
lines echoing the configuration, then a header row; floats are printed
with 12 significant digits.  Exit codes: 0 ok, 1 config error,
2 numerical failure, 3 acceptance mismatch in verify mode.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
import time

import numpy as np

from . import antenna, freespace as fs, purification as pur
from . import teleportation as tp
from .core import make_tmst, negativity, log_negativity


class ConfigError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, float) or isinstance(value, np.floating):
        return f"{value:.12g}"
    return str(value)


def write_csv(path, header, rows, meta, deterministic=False):
    lines = []
    for key in sorted(meta):
        lines.append(f"#{key}={_fmt(meta[key])}")
    if not deterministic:
        lines.append(f"#generated_unix={int(time.time())}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def load_config(path) -> dict:
    """Flat key=value pairs; section names prefix keys as section.key."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        with open(path) as fh:
            content = fh.read()
        if not content.lstrip().startswith("["):
            content = "[main]\n" + content
        parser.read_string(content)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    out = {}
    for section in parser.sections():
        for key, val in parser[section].items():
            name = key if section == "main" else f"{section}.{key}"
            out[name] = val
    return out


_KNOWN_KEYS = {
    "mu", "n_th", "r", "n", "tau", "eta_ant", "seed", "temperature",
    "length", "protocol", "kind", "scenario", "p0", "detector_eff",
}


def config_floats(cfg: dict, defaults: dict) -> dict:
    out = dict(defaults)
    for key, val in cfg.items():
        base = key.split(".")[-1]
        if base not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            out[base] = float(val) if base not in ("protocol", "kind", "scenario") else val
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {val}") from exc
    return out


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("GAUSSIANLINK_SEED")
    return int(env) if env else 0


# -- subcommands -----------------------------------------------------------


def cmd_reach(args):
    params = dict(fs.TABLE1)
    if args.config:
        params.update(
            {k: v for k, v in config_floats(load_config(args.config), params).items()}
        )
    rows = []
    for kind in ("asymmetric", "symmetric"):
        eta, lmax = fs.entanglement_reach(
            params["r"], params["n"], params["n_th"], params["mu"],
            params["eta_ant"], kind,
        )
        rows.append((kind, eta, lmax))
    write_csv(args.out, ["kind", "eta_max", "l_max_m"], rows, params,
              args.deterministic)
    return 0


def cmd_teleport_curve(args):
    lengths = np.linspace(args.l_min, args.l_max, args.points)
    params = dict(fs.TABLE1)
    rows = []
    for length in lengths:
        oap = fs.OpenAirParams(params["mu"], params["n_th"], params["eta_ant"],
                               length)
        if args.resource == "tmsv":
            # idealized vacuum environment for the pure TMSV resource
            oap = fs.OpenAirParams(params["mu"], 0.0, params["eta_ant"], length)
            state = fs.lossy_tmst_asymmetric(args.r, 0.0, oap)
        elif args.resource == "tmst":
            state = fs.lossy_tmst_asymmetric(args.r, params["n"], oap)
        elif args.resource == "tmst-sym":
            state = fs.lossy_tmst_symmetric(args.r, params["n"], oap)
        else:
            raise ConfigError(f"unknown resource {args.resource}")
        rows.append((length, args.resource, tp.fidelity_coherent(state)))
    meta = dict(params, r=args.r, resource=args.resource)
    write_csv(args.out, ["l_m", "protocol", "fidelity"], rows, meta,
              args.deterministic)
    return 0


def cmd_distill(args):
    from .distillation import ps_tmsv_negativity, ps_tmsv_probability

    lam = np.tanh(args.r)
    taus = np.linspace(args.tau_min, args.tau_max, args.points)
    rows = []
    for tau in taus:
        for k in (1, 2):
            rows.append((tau, k, ps_tmsv_negativity(lam, tau, k),
                         ps_tmsv_probability(lam, tau, k)))
    write_csv(args.out, ["tau", "k", "negativity", "probability"], rows,
              {"r": args.r}, args.deterministic)
    return 0


def cmd_purify_sweep(args):
    taus = np.linspace(0.02, 0.99, args.points)
    rows = []
    for tau in taus:
        out = pur.purify_with_measurement(args.r, args.n, tau, args.m_env,
                                          args.meas)
        rows.append((tau, out.purity, out.nu_tilde_minus, out.efficiency))
    meta = {"r": args.r, "n": args.n, "m_env": args.m_env, "meas": args.meas}
    write_csv(args.out, ["tau", "purity", "nu_tilde_minus", "efficiency"],
              rows, meta, args.deterministic)
    return 0


def cmd_qfi(args):
    grid_ns = np.linspace(0.1, 2.0, args.points)
    rows = []
    for ns in grid_ns:
        ratio = pur.qi_ratio_tmsv_vs_coherent(ns, args.n_th)
        state = make_tmst(np.arcsinh(np.sqrt(ns)), 0.0)
        numeric = pur.qi_fisher_limit(state, args.n_th) / \
            pur.qi_fisher_limit_coherent(ns, args.n_th)
        rows.append((ns, args.n_th, ratio, numeric))
    write_csv(args.out, ["n_s", "n_th", "ratio_closed", "ratio_numeric"],
              rows, {"n_th": args.n_th}, args.deterministic)
    return 0


def cmd_antenna_optimize(args):
    res = antenna.optimize_profile(args.N, args.d, freq=args.freq,
                                   seed=_seed(args))
    xs = np.linspace(0.0, args.d, res.profile.n_slices + 1)
    rows = list(zip(xs, res.profile.z_nodes))
    meta = {
        "N": args.N, "d_m": args.d, "freq_hz": args.freq, "seed": _seed(args),
        "reflectivity": res.reflectivity, "sweeps": res.sweeps,
        "converged": res.converged, "backend": antenna.BACKEND_NAME,
    }
    write_csv(args.out, ["x_m", "z_ohm"], rows, meta, args.deterministic)
    return 0


def cmd_antenna_errors(args):
    res = antenna.optimize_profile(args.N, args.d, freq=args.freq,
                                   seed=_seed(args))
    pcts = np.linspace(0.0, args.pct_max, args.points)
    ratios = antenna.fabrication_error_study(
        res.profile, pcts, trials=args.trials, seed=_seed(args) + 1
    )
    smooth = antenna.n_average(ratios, n=min(50, args.points // 2))
    rows = list(zip(pcts, ratios, smooth))
    meta = {"N": args.N, "d_m": args.d, "trials": args.trials,
            "seed": _seed(args)}
    write_csv(args.out, ["error_pct", "ratio_mean", "ratio_navg"], rows, meta,
              args.deterministic)
    return 0


def cmd_link_sim(args):
    rows, meta = _link_sim_rows(args.scenario, args.points)
    write_csv(
        args.out,
        ["x_axis", "negativity", "fidelity_fast", "fidelity_slow",
         "tau_mean", "tau_sqrt_mean"],
        rows, meta, args.deterministic,
    )
    return 0


def _link_sim_rows(scenario: str, points: int):
    geom_sat = fs.BeamGeometry(800e-9, 0.20, 0.40)
    geom_ground = fs.BeamGeometry(800e-9, 0.05, 0.05)
    env_day = fs.TurbulenceEnv()
    r = 1.0
    rows = []
    if scenario in ("downlink", "uplink"):
        n_bg = fs.thermal_background(
            800e-9, 1e-9, 1e-8, 1e-10, 0.40,
            fs.BACKGROUND_TEMPS[("down" if scenario == "downlink" else "up", "day")],
        )
        m_env = 1.0 + 2.0 * n_bg
        for h in np.geomspace(2e5, 4.2e7, points):
            tau_atm = fs.atm_tau_slant_optical(h)
            ch = fs.fading_channel(
                geom_sat, env_day, "down" if scenario == "downlink" else "up",
                h, tau_extra=tau_atm,
            )
            neg, fid = fs.link_quantities_fast(r, ch, m_env)
            _, fid_slow = fs.link_quantities_slow(r, ch, m_env)
            rows.append((h, neg, fid, fid_slow, ch.tau_mean, ch.sqrt_tau_mean))
        meta = {"scenario": scenario, "n_bg": n_bg, "r": r}
    elif scenario == "ground_ground":
        n_bg = fs.HORIZONTAL_BACKGROUND["day"]
        m_env = 1.0 + 2.0 * n_bg
        for z in np.linspace(200.0, 1066.0, points):
            tau_atm = fs.atm_tau_fixed(fs.MU_OPTICAL_SEA, z, 30.0)
            ch = fs.fading_channel(geom_ground, env_day, "horizontal", z,
                                   tau_extra=tau_atm, h_const=30.0)
            neg, fid = fs.link_quantities_fast(r, ch, m_env)
            _, fid_slow = fs.link_quantities_slow(r, ch, m_env)
            rows.append((z, neg, fid, fid_slow, ch.tau_mean, ch.sqrt_tau_mean))
        meta = {"scenario": scenario, "n_bg": n_bg, "r": r}
    elif scenario == "intersat_optical":
        n_bg = fs.INTERSAT_BACKGROUND
        m_env = 1.0 + 2.0 * n_bg
        for z in np.linspace(200.0, 5000.0, points):
            ch = fs.fading_channel(geom_ground, env_day, "horizontal", z,
                                   turbulent=False)
            neg, fid = fs.link_quantities_fast(r, ch, m_env)
            _, fid_slow = fs.link_quantities_slow(r, ch, m_env)
            rows.append((z, neg, fid, fid_slow, ch.tau_mean, ch.sqrt_tau_mean))
        meta = {"scenario": scenario, "n_bg": n_bg, "r": r}
    elif scenario == "microwave_slant":
        geom = fs.BeamGeometry(0.06, 1.0, 2.0)
        n_bg = fs.thermal_background_microwave(0.06, 1e-4, 2.0, 288.0)
        m_env = 1.0 + 2.0 * n_bg
        for z in np.linspace(5.0, 120.0, points):
            tau = fs.diffraction_tau(geom, z) * fs.atm_tau_slant_microwave(
                10.0, 10.0 + z
            )
            state = fs.deterministic_loss_state(r, tau, m_env)
            rows.append((z, negativity(state), tp.fidelity_coherent(state),
                         tp.fidelity_coherent(state), tau, np.sqrt(tau)))
        meta = {"scenario": scenario, "n_bg": n_bg, "r": r}
    elif scenario in ("intermediate_gen", "intermediate_lens"):
        n_down = fs.thermal_background(800e-9, 1e-9, 1e-8, 1e-10, 0.40,
                                       fs.BACKGROUND_TEMPS[("down", "day")])
        n_up = fs.thermal_background(800e-9, 1e-9, 1e-8, 1e-10, 0.40,
                                     fs.BACKGROUND_TEMPS[("up", "day")])
        for h in np.geomspace(4e5, 4.2e7, points):
            split, quals = _optimal_intermediate(
                geom_sat, env_day, h, n_down, n_up,
                lens=(scenario == "intermediate_lens"),
            )
            rows.append((h, quals[0], quals[1], quals[1], split, 0.0))
        meta = {"scenario": scenario, "n_down": n_down, "n_up": n_up, "r": r}
    elif scenario == "intersat_microwave":
        for kind in ("asymmetric", "symmetric"):
            eta_lim = fs.intersat_eta_threshold(
                1.0, fs.thermal_background_microwave(0.06, 1e-4, 2.0, 2.7),
                kind,
            )
            bound = fs.intersat_aperture_product_bound(0.06, eta_lim)
            rows.append((0.0, eta_lim, bound, bound, 0.0, 0.0))
        meta = {"scenario": scenario}
    else:
        raise ConfigError(f"unknown scenario {scenario!r}")
    return rows, meta


def _optimal_intermediate(geom, env, h_total, n_down, n_up, lens=False):
    """Golden-section over the station altitude fraction."""
    from scipy.optimize import minimize_scalar

    def neg_quality(frac):
        h_mid = max(frac * h_total, 1e3)
        tau_atm_d = fs.atm_tau_slant_optical(h_mid)
        ch_down = fs.fading_channel(geom, env, "down", h_mid,
                                    tau_extra=tau_atm_d)
        z_up = h_total - h_mid
        ch_up = fs.fading_channel(geom, env, "up", z_up, h0=h_mid,
                                  tau_extra=fs.atm_tau_slant_optical(
                                      h_total, h0=h_mid))
        if lens:
            tau = ch_down.tau_mean * ch_up.tau_mean
            state = fs.deterministic_loss_state(
                1.0, tau, 1.0 + 2.0 * n_down
            )
        else:
            state = fs.two_leg_state(
                1.0, ch_down.tau_mean, ch_up.tau_mean,
                1.0 + 2.0 * n_down, 1.0 + 2.0 * n_up,
            )
        return -tp.fidelity_coherent(state)

    res = minimize_scalar(neg_quality, bounds=(0.01, 0.99), method="bounded",
                          options={"xatol": 1e-3})
    frac = float(res.x)
    h_mid = max(frac * h_total, 1e3)
    tau_atm_d = fs.atm_tau_slant_optical(h_mid)
    ch_down = fs.fading_channel(geom, env, "down", h_mid, tau_extra=tau_atm_d)
    ch_up = fs.fading_channel(
        geom, env, "up", h_total - h_mid, h0=h_mid,
        tau_extra=fs.atm_tau_slant_optical(h_total, h0=h_mid),
    )
    if lens:
        state = fs.deterministic_loss_state(
            1.0, ch_down.tau_mean * ch_up.tau_mean, 1.0 + 2.0 * n_down
        )
    else:
        state = fs.two_leg_state(1.0, ch_down.tau_mean, ch_up.tau_mean,
                                 1.0 + 2.0 * n_down, 1.0 + 2.0 * n_up)
    return frac, (negativity(state), tp.fidelity_coherent(state))


def cmd_qubit_teleport(args):
    lengths = np.linspace(args.l_min, args.l_max, args.points)
    fids = tp.lossy_resource_scenarios(args.kind, args.protocol, lengths,
                                       r=args.r)
    rows = [(length, args.protocol, fid) for length, fid in zip(lengths, fids)]
    meta = dict(tp.LINK_PRESETS[args.kind], protocol=args.protocol,
                kind=args.kind, r=args.r)
    write_csv(args.out, ["l_m", "protocol", "fidelity"], rows, meta,
              args.deterministic)
    return 0


def cmd_verify(args):
    """Run the acceptance suite via pytest and map the result to exit codes."""
    import pytest

    here = os.path.dirname(os.path.dirname(os.path.dirname(
        os.path.abspath(__file__))))
    test_path = os.path.join(here, "tests", "test_acceptance.py")
    if not os.path.exists(test_path):
        test_path = "tests/test_acceptance.py"
    plugin_args = [test_path, "-v", "-rxs"]
    if args.strict:
        plugin_args.append("--runxfail")
    code = pytest.main(plugin_args)
    if code == 0:
        return 0
    return 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gaussianlink",
        description="Gaussian quantum communication toolkit CLI",
    )
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker bound for sweep parallelism")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="-", help="CSV output path (- = stdout)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--deterministic", action="store_true",
                       help="suppress the timestamp comment line")

    p = sub.add_parser("reach", help="entanglement reach distances")
    p.add_argument("--config")
    p.add_argument("--preset", choices=["table1"], default="table1")
    common(p)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("teleport-curve", help="coherent-state fidelity curve")
    p.add_argument("--resource", default="tmst",
                   choices=["tmsv", "tmst", "tmst-sym"])
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--l-min", type=float, default=0.0)
    p.add_argument("--l-max", type=float, default=600.0)
    p.add_argument("--points", type=int, default=61)
    common(p)
    p.set_defaults(func=cmd_teleport_curve)

    p = sub.add_parser("distill", help="PS negativity/probability curves")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--tau-min", type=float, default=0.5)
    p.add_argument("--tau-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=26)
    common(p)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("purify-sweep", help="purification outcome sweep")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--n", type=float, default=0.01)
    p.add_argument("--m-env", type=float, default=1.0)
    p.add_argument("--meas", default="heterodyne",
                   choices=["homodyne", "double_homodyne", "heterodyne"])
    p.add_argument("--points", type=int, default=25)
    common(p)
    p.set_defaults(func=cmd_purify_sweep)

    p = sub.add_parser("qfi", help="quantum illumination QFI ratios")
    p.add_argument("--n-th", type=float, default=625.0)
    p.add_argument("--points", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("antenna-optimize", help="impedance profile optimizer")
    p.add_argument("--N", type=int, default=160)
    p.add_argument("--d", type=float, default=0.05)
    p.add_argument("--freq", type=float, default=5e9)
    common(p)
    p.set_defaults(func=cmd_antenna_optimize)

    p = sub.add_parser("antenna-errors", help="fabrication error study")
    p.add_argument("--N", type=int, default=160)
    p.add_argument("--d", type=float, default=0.05)
    p.add_argument("--freq", type=float, default=5e9)
    p.add_argument("--pct-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--trials", type=int, default=200)
    common(p)
    p.set_defaults(func=cmd_antenna_errors)

    p = sub.add_parser("link-sim", help="free-space link curves")
    p.add_argument("--scenario", required=True,
                   choices=["downlink", "uplink", "intermediate_gen",
                            "intermediate_lens", "ground_ground",
                            "intersat_optical", "intersat_microwave",
                            "microwave_slant"])
    p.add_argument("--points", type=int, default=15)
    common(p)
    p.set_defaults(func=cmd_link_sim)

    p = sub.add_parser("qubit-teleport", help="qubit fidelity over distance")
    p.add_argument("--kind", default="cryolink", choices=["cryolink", "openair"])
    p.add_argument("--protocol", default="cv",
                   choices=["cv", "cv2ps", "hybrid", "hybrid_weighted",
                            "dv_bell"])
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--l-min", type=float, default=1.0)
    p.add_argument("--l-max", type=float, default=3000.0)
    p.add_argument("--points", type=int, default=25)
    common(p)
    p.set_defaults(func=cmd_qubit_teleport)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", default="headline")
    p.add_argument("--strict", action="store_true",
                   help="fail on documented paper-mismatch items too")
    common(p)
    p.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
