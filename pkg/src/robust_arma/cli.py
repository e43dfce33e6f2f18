"""Command-line interface.

Settings are resolved as command-line flags, then a JSON ``--config`` file,
then built-in defaults.  Exit codes: 0 success, 2 usage, 3 data, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULTS = {
    "p": 1, "q": 0, "c1": 0.405, "grid_step": 0.05, "q_long": 100, "p_long": None,
    "mu": None, "algorithm": "dl", "format": "text", "output": None, "input": None,
    "phi": "", "theta": "", "n": 500, "seed": None, "runs": 100, "kind": "none",
    "epsilon": 0.0, "temporal": "isolated", "dist": "normal", "scale": 1.0,
    "n_patch": 1, "mask_output": None, "preset": None, "methods": "bip_tau",
    "threads": None, "eps_grid": "0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45",
    "cw_grid": "1,2,3,4,5,6,7,8,9,10,11,12", "surface_output": None,
    "cw_max": 50.0, "cw_step": 0.25, "p_max": 10, "criterion": "SIC",
    "classical": "css", "fit_window": 2,
}


class UsageError(Exception):
    pass


def _floats(text, name) -> tuple:
    if text is None or text == "":
        return ()
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise UsageError(f"--{name.replace('_', '-')} expects comma separated numbers") from None


def _common(sp, *names):
    add = {
        "input": lambda: sp.add_argument("--input", "-i", help="series file, one value per line"),
        "output": lambda: sp.add_argument("--output", "-o", help="output file (stdout if omitted)"),
        "p": lambda: sp.add_argument("--p", type=int, help="AR order"),
        "q": lambda: sp.add_argument("--q", type=int, help="MA order"),
        "c1": lambda: sp.add_argument("--c1", type=float, help="tuning constant of rho1"),
        "grid_step": lambda: sp.add_argument("--grid-step", type=float, dest="grid_step"),
        "q_long": lambda: sp.add_argument("--q-long", type=int, dest="q_long"),
        "p_long": lambda: sp.add_argument("--p-long", type=int, dest="p_long"),
        "mu": lambda: sp.add_argument("--mu", type=float, help="known location"),
        "seed": lambda: sp.add_argument("--seed", type=int),
        "runs": lambda: sp.add_argument("--runs", type=int),
        "n": lambda: sp.add_argument("--n", type=int, help="series length"),
        "format": lambda: sp.add_argument("--format", choices=("text", "csv", "json")),
        "threads": lambda: sp.add_argument("--threads", type=int),
        "phi": lambda: sp.add_argument("--phi", help="comma separated AR coefficients"),
        "theta": lambda: sp.add_argument("--theta", help="comma separated MA coefficients"),
        "classical": lambda: sp.add_argument("--classical", choices=("css", "hr")),
        "fit_window": lambda: sp.add_argument("--fit-window", type=int, dest="fit_window",
                                               help="half-width of the local fit, 0 for the whole grid"),
    }
    for nm in names:
        add[nm]()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robust-arma",
                                 description="Robust ARMA estimation with the BIP tau-estimator.",
                                 argument_default=None)
    ap.add_argument("--config", help="JSON file with default settings")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("estimate", help="fit a model to a series")
    _common(sp, "input", "output", "p", "q", "c1", "grid_step", "q_long", "p_long",
            "mu", "format", "classical", "fit_window")
    sp.add_argument("--algorithm", choices=("dl", "fb"),
                    help="AR fit: Durbin-Levinson or forward-backward")

    sp = sub.add_parser("clean", help="replace outliers by cleaned values")
    _common(sp, "input", "output", "p", "q", "c1", "grid_step", "q_long", "p_long",
            "mu", "classical", "fit_window")

    sp = sub.add_parser("simulate", help="generate a (contaminated) ARMA series")
    _common(sp, "output", "phi", "theta", "mu", "n", "seed")
    sp.add_argument("--kind", choices=("none", "AO", "RO", "IO"))
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--temporal", choices=("isolated", "independent", "patchy", "equispaced"))
    sp.add_argument("--dist", choices=("normal", "half_normal", "point_mass", "constant"))
    sp.add_argument("--scale", type=float, help="contaminant scale or amplitude")
    sp.add_argument("--n-patch", type=int, dest="n_patch")
    sp.add_argument("--mask-output", dest="mask_output", help="write the outlier mask")

    sp = sub.add_parser("mc", help="Monte Carlo table")
    _common(sp, "output", "phi", "theta", "mu", "n", "seed", "runs", "format",
            "threads", "c1", "p_long", "classical", "fit_window")
    sp.add_argument("--preset", help="table3, table4, table5 or fig3")
    sp.add_argument("--methods", help="comma separated method names")

    sp = sub.add_parser("biascurve", help="maximum and quantile bias curves for AR(1)")
    _common(sp, "output", "phi", "n", "seed", "runs", "threads", "c1", "grid_step")
    sp.add_argument("--preset", help="fig4")
    sp.add_argument("--eps-grid", dest="eps_grid")
    sp.add_argument("--cw-grid", dest="cw_grid")
    sp.add_argument("--surface-output", dest="surface_output")

    sp = sub.add_parser("ifcurve", help="AR(1) influence function")
    _common(sp, "output", "phi", "c1")
    sp.add_argument("--cw-max", type=float, dest="cw_max")
    sp.add_argument("--cw-step", type=float, dest="cw_step")

    sp = sub.add_parser("order", help="robust AR order selection")
    _common(sp, "input", "output", "c1", "grid_step", "mu")
    sp.add_argument("--p-max", type=int, dest="p_max")
    sp.add_argument("--criterion", choices=("AIC", "SIC", "HQC", "aic", "sic", "hqc"))

    sp = sub.add_parser("efficiency", help="Gaussian efficiency for a tuning constant")
    _common(sp, "c1")
    return ap


def resolve(ns: argparse.Namespace) -> dict:
    """Merge flags over the JSON config over the defaults."""
    cfg = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(file_cfg)
    for k, v in vars(ns).items():
        if v is not None and k not in ("config", "command"):
            cfg[k] = v
    cfg["command"] = ns.command
    try:
        _validate(cfg)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid setting: {exc}") from None
    return cfg


def _validate(cfg):
    def need(cond, msg):
        if not cond:
            raise UsageError(msg)

    need(cfg["c1"] is not None and float(cfg["c1"]) > 0, "c1 must be positive")
    need(0 < float(cfg["grid_step"]) <= 0.5, "grid-step must lie in (0, 0.5]")
    need(int(cfg["q_long"]) >= 1, "q-long must be positive")
    need(int(cfg["p"]) >= 0 and int(cfg["q"]) >= 0, "orders must be non-negative")
    need(cfg["p_long"] is None or int(cfg["p_long"]) >= 1, "p-long must be positive")
    need(int(cfg["runs"]) >= 1, "runs must be at least 1")
    need(int(cfg["n"]) >= 1, "n must be positive")
    need(0.0 <= float(cfg["epsilon"]) <= 1.0, "epsilon must lie in [0, 1]")
    need(int(cfg["p_max"]) >= 0, "p-max must be non-negative")
    need(int(cfg["fit_window"] or 0) >= 0, "fit-window must be non-negative")
    cmd = cfg["command"]
    if cmd in ("simulate", "mc", "biascurve"):
        need(cfg["seed"] is not None, f"{cmd} requires --seed")
    if cmd in ("estimate", "clean", "order"):
        need(cfg["input"] is not None, f"{cmd} requires --input")


# --- commands -------------------------------------------------------------

def _emit(text: str, path: Optional[str]):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _window(cfg):
    return int(cfg["fit_window"] or 0) or None


def _options(cfg):
    from .arma import EstimationOptions
    return EstimationOptions(q_long=int(cfg["q_long"]), p_long=cfg["p_long"],
                             grid_step=float(cfg["grid_step"]), mu=cfg["mu"],
                             classical=cfg["classical"], fit_window=_window(cfg))


def _fit(cfg, y):
    from .ar import estimate_ar_forward_backward
    from .arma import estimate_bip_tau
    from .core import ArmaSpec, make_rho_family

    fam = make_rho_family(float(cfg["c1"]))
    spec = ArmaSpec(int(cfg["p"]), int(cfg["q"]))
    opts = _options(cfg)
    if cfg["algorithm"] == "fb":
        if spec.q:
            raise UsageError("the forward-backward algorithm fits AR models only")
        tr = estimate_ar_forward_backward(y, spec.p, fam, opts.grid_step, q_long=opts.q_long,
                                          mu=opts.mu, fit_window=opts.fit_window)
        return tr.params, min(tr.sigma_arma, tr.sigma_bip), tr.branch, tr.sigma_hat, fam
    res = estimate_bip_tau(y, spec, fam, opts)
    return res.beta_star, res.sigma_tau_star, res.branch, res.sigma_hat, fam


def cmd_estimate(cfg):
    from .io import read_series
    y = read_series(cfg["input"])
    params, sigma, branch, sigma_hat, _ = _fit(cfg, y)
    doc = {"phi": params.phi.tolist(), "theta": params.theta.tolist(), "mu": params.mu,
           "sigma_tau": sigma, "sigma_hat": sigma_hat, "branch": branch.value}
    if cfg["format"] == "json":
        text = json.dumps(doc, indent=2) + "\n"
    elif cfg["format"] == "csv":
        rows = [("phi%d" % (i + 1), v) for i, v in enumerate(doc["phi"])]
        rows += [("theta%d" % (i + 1), v) for i, v in enumerate(doc["theta"])]
        rows += [("mu", doc["mu"]), ("sigma_tau", sigma), ("sigma_hat", sigma_hat)]
        text = "parameter,value\n" + "".join(f"{k},{float(v)!r}\n" for k, v in rows)
        text += f"branch,{branch.value}\n"
    else:
        fmt = lambda v: " ".join(repr(float(x)) for x in v) or "-"
        text = (f"phi:       {fmt(doc['phi'])}\n"
                f"theta:     {fmt(doc['theta'])}\n"
                f"mu:        {float(doc['mu'])!r}\n"
                f"sigma_tau: {float(sigma)!r}\n"
                f"branch:    {branch.value}\n")
    _emit(text, cfg["output"])


def cmd_clean(cfg):
    from .innovations import bip_clean
    from .io import read_series, write_series
    y = read_series(cfg["input"])
    params, _, _, sigma_hat, fam = _fit(cfg, y)
    out = bip_clean(y, params, sigma_hat, fam, check=False) if sigma_hat > 0 else y.copy()
    write_series(cfg["output"], out)


def _model(cfg):
    from .core import ArmaParams
    mu = 0.0 if cfg["mu"] is None else float(cfg["mu"])
    try:
        return ArmaParams(_floats(cfg["phi"], "phi"), _floats(cfg["theta"], "theta"), mu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(cfg):
    from .core import roots_within_margin
    from .io import write_series
    from .sim.process import Contaminant, ContaminationSpec, contaminate, generate_arma

    model = _model(cfg)
    if not roots_within_margin(model):
        raise UsageError("model is not stationary and invertible")
    try:
        spec = ContaminationSpec(cfg["kind"], float(cfg["epsilon"]), cfg["temporal"],
                                 Contaminant(cfg["dist"], float(cfg["scale"])),
                                 int(cfg["n_patch"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rng = np.random.default_rng(int(cfg["seed"]))
    n = int(cfg["n"])
    if spec.kind == "IO":
        y = generate_arma(model, n, seed=rng, innovation_outliers=spec)
        mask = np.zeros(n, dtype=bool)
    else:
        c = contaminate(generate_arma(model, n, seed=rng), spec, rng)
        y, mask = c.values, c.mask
    write_series(cfg["output"], y)
    if cfg["mask_output"]:
        with open(cfg["mask_output"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write("".join(f"{int(m)}\n" for m in mask))


def cmd_mc(cfg):
    import dataclasses
    from .presets import get_preset
    from .sim.montecarlo import run_monte_carlo
    from .sim.process import CLEAN

    if cfg["preset"]:
        try:
            pre = get_preset(cfg["preset"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if pre.kind != "mc":
            raise UsageError(f"preset {pre.name} is not a Monte Carlo table")
        # settings that differ from the defaults override the preset
        model, scenarios, n, methods = pre.model, pre.scenarios, pre.n, pre.methods
        opts = pre.options
        for key in ("p_long", "classical", "fit_window"):
            if cfg.get(key) is not None and cfg[key] != DEFAULTS[key]:
                val = _window(cfg) if key == "fit_window" else cfg[key]
                opts = dataclasses.replace(opts, **{key: val})
        refs = pre.reference_keys()
        if cfg["methods"] != DEFAULTS["methods"]:
            methods = tuple(cfg["methods"].split(","))
        if cfg["n"] != DEFAULTS["n"]:
            n = int(cfg["n"])
    else:
        model = _model(cfg)
        scenarios = (CLEAN,)
        n = int(cfg["n"])
        methods = tuple(cfg["methods"].split(","))
        opts = _options(cfg)
        refs = None
    rep = run_monte_carlo(model, scenarios, methods, int(cfg["runs"]), n,
                          int(cfg["seed"]), options=opts, references=refs,
                          threads=cfg["threads"])
    text = rep.to_json() + "\n" if cfg["format"] == "json" else rep.to_csv()
    _emit(text, cfg["output"])


def cmd_biascurve(cfg):
    from .core import ArmaParams, make_rho_family
    from .presets import get_preset
    from .sim.biascurve import bias_curves

    if cfg["preset"]:
        pre = get_preset(cfg["preset"])
        if pre.kind != "biascurve":
            raise UsageError(f"preset {pre.name} is not a bias-curve set-up")
        model, eps, cw, n = pre.model, pre.eps_grid, pre.cw_grid, pre.n
        if cfg["n"] != DEFAULTS["n"]:
            n = int(cfg["n"])
    else:
        phi = _floats(cfg["phi"], "phi") or (0.5,)
        if len(phi) != 1:
            raise UsageError("bias curves need a single AR coefficient")
        model = ArmaParams(phi)
        eps, cw, n = _floats(cfg["eps_grid"], "eps_grid"), _floats(cfg["cw_grid"], "cw_grid"), int(cfg["n"])
    surf = bias_curves(model, eps, cw, n, int(cfg["runs"]), int(cfg["seed"]),
                       family=make_rho_family(float(cfg["c1"])),
                       grid_step=float(cfg["grid_step"]), threads=cfg["threads"])
    _emit(surf.curves_csv(), cfg["output"])
    if cfg["surface_output"]:
        surf.surface_csv(cfg["surface_output"])


def cmd_ifcurve(cfg):
    from .analysis import influence_function_ar1, ls_influence_function_ar1
    from .core import make_rho_family

    phi = _floats(cfg["phi"], "phi") or (-0.5,)
    if len(phi) != 1 or not -1 < phi[0] < 1:
        raise UsageError("ifcurve needs a single coefficient with |phi| < 1")
    step, top = float(cfg["cw_step"]), float(cfg["cw_max"])
    if not (step > 0 and top > 0):
        raise UsageError("cw-step and cw-max must be positive")
    cw = np.round(np.arange(0.0, top + 0.5 * step, step), 12)
    tau = influence_function_ar1(phi[0], cw, make_rho_family(float(cfg["c1"])))
    ls = ls_influence_function_ar1(phi[0], cw)
    lines = ["c_w,if_tau,if_ls"]
    lines += [f"{c!r},{a!r},{b!r}" for c, a, b in
              zip(cw.tolist(), tau.if_values.tolist(), ls.if_values.tolist())]
    lines.append(f"# ges={tau.ges!r}")
    _emit("\n".join(lines) + "\n", cfg["output"])


def cmd_order(cfg):
    from .analysis import select_order
    from .core import make_rho_family
    from .io import read_series

    y = read_series(cfg["input"])
    res = select_order(y, int(cfg["p_max"]), cfg["criterion"],
                       make_rho_family(float(cfg["c1"])), mu=cfg["mu"],
                       grid_step=float(cfg["grid_step"]))
    lines = ["p,sigma_tau,ic"]
    lines += [f"{int(p)},{float(s)!r},{float(v)!r}" for p, s, v in zip(res.orders, res.sigma, res.ic)]
    lines.append(f"# p_hat={res.p_hat} criterion={res.criterion}")
    _emit("\n".join(lines) + "\n", cfg["output"])


def cmd_efficiency(cfg):
    from .analysis import asymptotic_efficiency
    from .core import make_rho_family
    eff = asymptotic_efficiency(make_rho_family(float(cfg["c1"])))
    _emit(f"{eff!r}\n", None)


COMMANDS = {"estimate": cmd_estimate, "clean": cmd_clean, "simulate": cmd_simulate,
            "mc": cmd_mc, "biascurve": cmd_biascurve, "ifcurve": cmd_ifcurve,
            "order": cmd_order, "efficiency": cmd_efficiency}


def main(argv=None) -> int:
    from .io import DataError

    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = resolve(ns)
        COMMANDS[cfg["command"]](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
