"""Command-line front end.

Times given on the command line are in units of ``t_mix``; positions and
spans are in units of the slit separation ``d``. Settings are taken from
flags first, then from ``--config FILE`` (flat ``key = value`` lines), then
from the built-in figure defaults.

Exit codes: 0 success, 1 validation, 2 numerical convergence, 3 I/O.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import densmat as dm
from . import interference as itf
from .correlators import ScenarioParams, timescales
from .errors import BrownslitError, ConvergenceError, ParameterError
from .figures import FIGURE_IDS, build_figure, params_meta, profile_table, time_grid
from .oracle import DEFAULT_BUDGET, oracle_density
from .output import Table, atomic_write_text, fmt, heatmap, line_plot

EXIT_OK, EXIT_VALIDATION, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3

ORACLE_SETS = (("T0_g0", 0.0, 0.0), ("T1_g0", 1.0, 0.0), ("T1_g0.3", 1.0, 0.3))
ORACLE_TIMES = (0.1, 0.3, 1.0, 3.0, 10.0)

# flag name -> (type, built-in default)
OPTIONS = {
    "sigma_over_d": (float, 0.05),
    "temperature": (float, 1.0),
    "gamma": (float, 0.0),
    "mass": (float, 1.0),
    "separation": (float, 1.0),
    "t_min": (float, None),
    "t_max": (float, None),
    "t_count": (int, None),
    "t_scale": (str, None),
    "time": (float, 1.0),
    "x_span": (float, None),
    "x_count": (int, None),
    "out": (str, "."),
    "format": (str, "csv"),
    "tolerance": (float, 1e-6),
    "quadrature_budget": (int, DEFAULT_BUDGET),
}


@dataclass
class RunConfig:
    sigma_over_d: float = 0.05
    temperature: float = 1.0
    gamma: float = 0.0
    mass: float = 1.0
    separation: float = 1.0
    t_min: float | None = None
    t_max: float | None = None
    t_count: int | None = None
    t_scale: str | None = None
    time: float = 1.0
    x_span: float | None = None
    x_count: int | None = None
    out: str = "."
    formats: tuple = ("csv",)
    tolerance: float = 1e-6
    quadrature_budget: int = DEFAULT_BUDGET
    explicit: set = field(default_factory=set)

    def params(self, T=None, gamma=None) -> ScenarioParams:
        return ScenarioParams.from_dimensionless(
            self.sigma_over_d,
            self.temperature if T is None else T,
            self.gamma if gamma is None else gamma,
            m=self.mass,
            d=self.separation,
        )

    def validate(self):
        self.params()
        for name in ("t_count", "x_count"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ParameterError(f"{name} must be positive")
        if self.t_scale not in (None, "linear", "log"):
            raise ParameterError("t-scale must be 'linear' or 'log'")
        if self.t_min is not None and self.t_max is not None and not self.t_max > self.t_min:
            raise ParameterError("time grid must be strictly increasing: need t-max > t-min")
        if self.x_span is not None and self.x_span <= 0:
            raise ParameterError("x-span must be positive")
        bad = set(self.formats) - {"csv", "svg"}
        if bad:
            raise ParameterError(f"unknown output format(s): {', '.join(sorted(bad))}")
        if self.quadrature_budget < 1:
            raise ParameterError("quadrature budget must be at least 1")
        if self.tolerance <= 0:
            raise ParameterError("tolerance must be positive")
        return self


def read_config_file(path):
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in OPTIONS:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def build_config(args) -> RunConfig:
    merged = {}
    explicit = set()
    if getattr(args, "config", None):
        for key, raw in read_config_file(args.config).items():
            typ = OPTIONS[key][0]
            try:
                merged[key] = typ(raw)
            except ValueError as exc:
                raise ParameterError(f"config value for {key!r} is not a valid {typ.__name__}") from exc
            explicit.add(key)
    for key in OPTIONS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
            explicit.add(key)
    cfg = RunConfig()
    for key, (_, default) in OPTIONS.items():
        value = merged.get(key, default)
        if key == "format":
            cfg.formats = tuple(s.strip() for s in str(value).split(",") if s.strip())
        else:
            setattr(cfg, key, value)
    cfg.explicit = explicit
    return cfg.validate()


def _emit(tables, svg_text, cfg, svg_name):
    written = []
    if "csv" in cfg.formats:
        for tab in tables:
            written.append(tab.write(cfg.out))
    if svg_text is not None and "svg" in cfg.formats:
        path = os.path.join(cfg.out, f"{svg_name}.svg")
        atomic_write_text(path, svg_text)
        written.append(path)
    return written


def _time_grid(cfg, lo, hi, count, scale):
    return time_grid(
        cfg.t_min if cfg.t_min is not None else lo,
        cfg.t_max if cfg.t_max is not None else hi,
        cfg.t_count if cfg.t_count is not None else count,
        cfg.t_scale if cfg.t_scale is not None else scale,
    )


# --- subcommands -----------------------------------------------------------


def cmd_timescales(cfg, args, out=sys.stdout):
    params = cfg.params()
    ts = timescales(params)
    rows = {
        "t_mix": ts.t_mix,
        "t_spread": ts.t_spread,
        "t_dec": ts.t_dec,
        "t_s": ts.t_s,
        "tau_flo": ts.tau_flo,
        "lambda_th": ts.lambda_th,
    }
    rows.update(ts.ratios())
    for key, value in rows.items():
        shown = "unbounded" if math.isinf(value) else f"{value:.10g}"
        print(f"{key:16s} {shown}", file=out)
    if "out" in cfg.explicit:
        tab = Table(
            name="timescales",
            columns={"quantity": np.arange(len(rows)), "value": list(rows.values())},
            meta=params_meta(params, quantities="|".join(rows)),
        )
        tab.write(cfg.out)
    return EXIT_OK


def cmd_figure(cfg, args, out=sys.stdout):
    overrides = {}
    if "sigma_over_d" in cfg.explicit:
        overrides["sigma_over_d"] = cfg.sigma_over_d
    single_set = args.figure in ("1a", "2", "3", "4")
    if single_set and ({"temperature", "gamma"} & cfg.explicit):
        overrides["parameter_sets"] = (("custom", cfg.temperature, cfg.gamma),)
    if cfg.t_min is not None or cfg.t_max is not None:
        from .figures import FIGURES

        lo, hi = FIGURES[args.figure].t_range or (0.0, 1.0)
        overrides["t_range"] = (cfg.t_min if cfg.t_min is not None else lo, cfg.t_max if cfg.t_max is not None else hi)
    for key in ("t_count", "t_scale", "x_span", "x_count"):
        if getattr(cfg, key) is not None:
            overrides[key] = getattr(cfg, key)
    tables, svg = build_figure(args.figure, m=cfg.mass, d=cfg.separation, **overrides)
    for path in _emit(tables, svg, cfg, f"fig{args.figure}"):
        print(path, file=out)
    return EXIT_OK


def cmd_profile(cfg, args, out=sys.stdout):
    params = cfg.params()
    t = cfg.time * params.t_mix
    if cfg.x_span is None and cfg.x_count is None:
        x = itf.default_grid(params, t)
    else:
        span = (cfg.x_span if cfg.x_span is not None else 7.0) * params.d
        x = np.linspace(-span, span, cfg.x_count or itf.DEFAULT_X_COUNT)
    tab = profile_table(params, t, x, f"profile_t{cfg.time:g}", t_over_tmix=f"{cfg.time:g}")
    svg = line_plot(
        [(x, tab.columns["P"], "P"), (x, tab.columns["P_cl"], "P_cl")],
        title=f"P(x, t = {cfg.time:g} t_mix)",
        xlabel="x",
        ylabel="density",
    )
    for path in _emit([tab], svg, cfg, f"profile_t{cfg.time:g}"):
        print(path, file=out)
    return EXIT_OK


def fit_gaussian_tau(params, t, log_a_flo):
    """Least-squares ``tau`` for ``ln a_FLO ~ -t**2 / (8 tau**2)`` over the given points."""
    t2 = np.asarray(t) ** 2
    slope = float(np.dot(t2, log_a_flo) / np.dot(t2, t2))
    if slope >= 0:
        return math.inf
    return math.sqrt(-1.0 / (8.0 * slope))


def cmd_attenuation(cfg, args, out=sys.stdout):
    params = cfg.params()
    ts = _time_grid(cfg, 1e-3, 1e2, 400, "log") * params.t_mix
    from .figures import attenuation_table

    tab = attenuation_table(params, ts, "attenuation")
    if params.gamma > 0 and params.T > 0:
        tab.columns["a_longtime"] = itf.longtime_attenuation(params, ts)
        tab.descriptions["a_longtime"] = "exp(-t/(t_dec(1+t/t_s)))"
    if args.fit_gaussian:
        scales = timescales(params)
        if math.isinf(scales.tau_flo):
            raise ParameterError("the Gaussian short-time law needs T > 0")
        window = ts < scales.t_spread
        if window.sum() < 2:
            raise ParameterError("need at least two times below t_spread to fit")
        tau = fit_gaussian_tau(params, ts[window], tab.columns["ln_a_flo"][window])
        print(f"fitted tau      {tau:.10g}", file=out)
        print(f"tau_flo         {scales.tau_flo:.10g}", file=out)
        print(f"fit / tau_flo   {tau / scales.tau_flo:.10g}", file=out)
    svg = line_plot(
        [(ts / params.t_mix, tab.columns["a_flo"], "a_FLO"), (ts / params.t_mix, tab.columns["a_2"], "a_2")],
        title="attenuation factors",
        xlabel="t / t_mix",
        ylabel="a(t)",
        logx=cfg.t_scale != "linear",
        logy=True,
    )
    for path in _emit([tab], svg, cfg, "attenuation"):
        print(path, file=out)
    return EXIT_OK


def cmd_oracle_check(cfg, args, out=sys.stdout):
    sets = ORACLE_SETS
    if {"temperature", "gamma"} & cfg.explicit:
        sets = (("custom", cfg.temperature, cfg.gamma),)
    worst = 0.0
    tables = []
    for label, T, g in sets:
        params = cfg.params(T=T, gamma=g)
        cols = {k: [] for k in ("x", "t", "closed_form", "oracle", "rel_err", "checked")}
        for f in ORACLE_TIMES:
            t = f * params.t_mix
            if cfg.x_span is not None:
                x = np.linspace(-cfg.x_span * params.d, cfg.x_span * params.d, cfg.x_count or 41)
            else:
                x = itf.default_grid(params, t, count=cfg.x_count or 41)
            if args.single_slit:
                closed = itf.single_slit_density(params, x, t)
            else:
                closed = itf.total_density(params, x, t)
            try:
                res = oracle_density(params, x, t, single_slit=args.single_slit, budget=cfg.quadrature_budget)
            except ConvergenceError as exc:
                print(f"[{label} t={f:g} t_mix] {exc}", file=out)
                raise
            diff = np.abs(res.density - closed)
            with np.errstate(divide="ignore", invalid="ignore"):
                rel = np.where(closed > 0, diff / np.abs(closed), np.where(diff > 0, np.inf, 0.0))
            checked = closed > 1e-30 * closed.max()
            worst = max(worst, float(np.max(rel[checked])))
            for k, v in (("x", x), ("t", np.full_like(x, t)), ("closed_form", closed),
                         ("oracle", res.density), ("rel_err", rel), ("checked", checked.astype(float))):
                cols[k].append(v)
        tab = Table(
            name=f"oracle_check_{label}" + ("_single" if args.single_slit else ""),
            columns={k: np.concatenate(v) for k, v in cols.items()},
            meta=params_meta(params, mode="single-slit" if args.single_slit else "double-slit"),
            descriptions={"checked": "1 where closed_form > 1e-30 max (criterion applies)"},
        )
        tables.append(tab)
        print(f"{label:10s} max rel err {fmt(max(np.max(r[c > 0]) for r, c in zip(cols['rel_err'], cols['checked'])))}", file=out)
    _emit(tables, None, cfg, "oracle")
    status = "PASS" if worst < cfg.tolerance else "FAIL"
    print(f"overall max rel err {worst:.3e} (tolerance {cfg.tolerance:g}) {status}", file=out)
    return EXIT_OK if worst < cfg.tolerance else EXIT_CONVERGENCE


def cmd_densmat(cfg, args, out=sys.stdout):
    params = cfg.params()
    if params.gamma != 0:
        from .errors import UnsupportedRegimeError

        raise UnsupportedRegimeError(
            "density-matrix evolution is only available for gamma = 0 (dissipationless case)"
        )
    count = cfg.x_count or dm.DEFAULT_COUNT
    rho_full = dm.initial_density_matrix(params, dm.default_grid(params, count=count), "full")
    rho_int = dm.initial_density_matrix(params, rho_full.x, "interference")
    closed = dm.closed_form_a_od(params)
    n0 = dm.off_diagonal_norm(rho_int)
    ts = _time_grid(cfg, 0.0, 5.0, 11, "linear") * params.t_mix
    rows = {k: [] for k in ("t", "t_over_tmix", "a_od_grid", "a_od_error", "a_od_exact", "drift", "trace")}
    for t in ts:
        grid = dm.default_grid(params, t, count=count)
        ev_int = dm.free_unitary_evolve(rho_int, params, t, grid=grid)
        ev_full = dm.free_unitary_evolve(rho_full, params, t, grid=grid)
        norm = dm.off_diagonal_norm(ev_int)
        rows["t"].append(t)
        rows["t_over_tmix"].append(t / params.t_mix)
        rows["a_od_grid"].append(norm.value)
        rows["a_od_error"].append(norm.error)
        rows["a_od_exact"].append(np.sqrt(ev_int.exact_norm_squared()))
        rows["drift"].append(abs(norm.value / n0.value - 1.0))
        rows["trace"].append(ev_full.trace())
    meta = params_meta(params, a_od_closed_form=f"{closed.value:.17g}", closed_form_valid=closed.valid)
    summary = Table(name="densmat_norms", columns=rows, meta=meta)
    stride = max(1, count // 128)
    tables = [
        summary,
        dm.to_table(rho_full, "rho_full_t0", params_meta(params, part="full", stride=stride), stride),
        dm.to_table(rho_int, "rho_int_t0", params_meta(params, part="interference", stride=stride), stride),
    ]
    svg = heatmap(rho_full.x[::stride], rho_full.x[::stride], np.abs(rho_full.rho[::stride, ::stride]),
                  title="|rho(x, x')| at t = 0", xlabel="x'", ylabel="x")
    print(f"a_OD grid        {n0.value:.10g} +- {n0.error:.2g}", file=out)
    print(f"a_OD closed form {closed.value:.10g}" + ("" if closed.valid else " (sigma << lambda_th violated)"), file=out)
    print(f"max drift        {max(rows['drift']):.3e}", file=out)
    for path in _emit(tables, svg, cfg, "densmat_rho_full"):
        print(path, file=out)
    return EXIT_OK


COMMANDS = {
    "timescales": cmd_timescales,
    "figure": cmd_figure,
    "profile": cmd_profile,
    "attenuation": cmd_attenuation,
    "oracle-check": cmd_oracle_check,
    "densmat": cmd_densmat,
}


def _common(p):
    p.add_argument("--config", help="flat key = value file (flags override it)")
    p.add_argument("--sigma-over-d", type=float, help="slit width sigma/d (default 0.05)")
    p.add_argument("--temperature", type=float, help="T in units of E (default 1)")
    p.add_argument("--gamma", type=float, help="friction in units of E (default 0)")
    p.add_argument("--mass", type=float, help="particle mass m (default 1)")
    p.add_argument("--separation", type=float, help="slit separation d (default 1)")
    p.add_argument("--t-min", type=float, help="first time, units of t_mix")
    p.add_argument("--t-max", type=float, help="last time, units of t_mix")
    p.add_argument("--t-count", type=int, help="number of times")
    p.add_argument("--t-scale", choices=("linear", "log"))
    p.add_argument("--x-span", type=float, help="half-width of the x grid, units of d")
    p.add_argument("--x-count", type=int, help="number of x points")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--format", help="comma-separated subset of csv,svg (default csv)")
    p.add_argument("--tolerance", type=float, help="oracle-check pass threshold (default 1e-6)")
    p.add_argument("--quadrature-budget", type=int, help="maximum panel doublings in the oracle")


def make_parser():
    parser = argparse.ArgumentParser(prog="brownslit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"brownslit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("timescales", help="report t_mix, t_spread, t_dec, t_s, tau_FLO"))
    fig = sub.add_parser("figure", help="data (and SVG) for one of the figures")
    fig.add_argument("figure", choices=FIGURE_IDS)
    _common(fig)
    prof = sub.add_parser("profile", help="P(x, t) and its parts at one time")
    prof.add_argument("--time", type=float, help="time in units of t_mix (default 1)")
    _common(prof)
    att = sub.add_parser("attenuation", help="a_FLO(t) and a_2(t) on a time grid")
    att.add_argument("--fit-gaussian", action="store_true", help="fit the short-time Gaussian decay")
    _common(att)
    orc = sub.add_parser("oracle-check", help="certify closed forms against direct quadrature")
    orc.add_argument("--single-slit", action="store_true", help="compare with the single-slit density")
    _common(orc)
    _common(sub.add_parser("densmat", help="off-diagonal norm and its time invariance at gamma = 0"))
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = make_parser()
    args = parser.parse_args(argv)
    for name in ("fit_gaussian", "single_slit"):
        if not hasattr(args, name):
            setattr(args, name, False)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            cfg = build_config(args)
            return COMMANDS[args.command](cfg, args, out=out)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except BrownslitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
