"""Data behind the reference figures, one table per parameter set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import interference as itf
from .correlators import ScenarioParams
from .output import Table, heatmap, line_plot

FIGURE_IDS = ("1a", "1b", "2", "3", "4", "4-inset")

WEAK = ("weak", 1.0, 0.3)
FREE = ("free", 0.0, 0.0)
THERMAL = ("thermal", 1.0, 0.0)


@dataclass(frozen=True)
class FigureSpec:
    """Default scenario choices for one figure; time values are in units of t_mix."""

    figure: str
    parameter_sets: tuple
    times: tuple = ()
    sigma_over_d: float = 0.05
    t_range: tuple = ()
    t_scale: str = "linear"
    t_count: int = 0
    x_span: float = 3.0
    x_count: int = 601


FIGURES = {
    "1a": FigureSpec("1a", (WEAK,), t_range=(0.0, 3.0), t_count=61, x_count=241),
    "1b": FigureSpec("1b", (WEAK, FREE), times=(1.0,), x_span=7.0, x_count=1401),
    "2": FigureSpec("2", (WEAK,), times=(0.1, 0.3, 1.0), x_span=7.0, x_count=1401),
    "3": FigureSpec("3", (THERMAL,), t_range=(1e-3, 1e2), t_scale="log", t_count=400),
    "4": FigureSpec("4", (THERMAL,), t_range=(1e-3, 1e2), t_scale="log", t_count=400),
    "4-inset": FigureSpec("4-inset", (FREE, THERMAL, WEAK), t_range=(1e-3, 1e2), t_scale="log", t_count=400),
}


def time_grid(t_min, t_max, count, scale):
    if count < 1:
        raise ValueError("time grid needs at least one point")
    if scale == "log":
        if t_min <= 0:
            raise ValueError("a log-spaced time grid needs t_min > 0")
        return np.geomspace(t_min, t_max, count)
    return np.linspace(t_min, t_max, count)


def params_meta(params: ScenarioParams, **extra):
    meta = {
        "sigma_over_d": f"{params.sigma / params.d:.17g}",
        "T_over_E": f"{params.T / params.E:.17g}",
        "gamma_over_E": f"{params.gamma / params.E:.17g}",
        "m": f"{params.m:.17g}",
        "d": f"{params.d:.17g}",
    }
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


def profile_table(params, t, x, name, **meta):
    prof = itf.profile(params, t, x)
    return Table(
        name=name,
        columns={
            "x": prof.x,
            "P": prof.P,
            "P_cl": prof.P_cl,
            "P_cl_plus_P_int": prof.upper_envelope,
            "P_cl_minus_P_int": prof.lower_envelope,
            "P_int": prof.P_int,
            "phase": prof.phase,
        },
        meta=params_meta(params, t=f"{t:.17g}", **meta),
        descriptions={
            "x": "position (units of length)",
            "P": "total density",
            "P_cl": "non-interfering density",
            "P_cl_plus_P_int": "upper fringe envelope",
            "P_cl_minus_P_int": "lower fringe envelope",
            "P_int": "fringe amplitude",
            "phase": "fringe phase (rad)",
        },
    )


def attenuation_table(params, t, name, **meta):
    series = itf.attenuation_series(params, t)
    log_cl0 = itf.log_classical_density(params, 0.0, t)[0]
    log_int0 = itf.log_interference_amplitude(params, 0.0, t)
    return Table(
        name=name,
        columns={
            "t": t,
            "t_over_tmix": t / params.t_mix,
            "P_cl_0": np.exp(log_cl0),
            "P_int_0": np.exp(log_int0),
            "a_flo": series.a_flo,
            "a_2": series.a2,
            "ln_a_flo": series.log_a_flo,
            "ln_a_2": series.log_a2,
        },
        meta=params_meta(params, **meta),
        descriptions={
            "t": "time (units of 1/E)",
            "t_over_tmix": "time in units of t_mix",
            "P_cl_0": "P_cl(x=0,t)",
            "P_int_0": "P_int(x=0,t)",
            "a_flo": "P_int(0,t)/P_cl(0,t)",
            "a_2": "P_int(0,t)/(N P_1(0,t))",
            "ln_a_flo": "natural log of a_flo",
            "ln_a_2": "natural log of a_2",
        },
    )


def _scenario(label_T_gamma, sigma_over_d, m=1.0, d=1.0):
    _, T, g = label_T_gamma
    return ScenarioParams.from_dimensionless(sigma_over_d, T, g, m=m, d=d)


def build_figure(fig_id, sigma_over_d=None, parameter_sets=None, t_range=None, t_count=None,
                 t_scale=None, x_span=None, x_count=None, m=1.0, d=1.0):
    """Tables and SVG text for one figure. Overrides replace the built-in defaults."""
    fs = FIGURES[fig_id]
    sod = fs.sigma_over_d if sigma_over_d is None else sigma_over_d
    sets = fs.parameter_sets if parameter_sets is None else parameter_sets
    t_lo, t_hi = (fs.t_range or (0.0, 1.0)) if t_range is None else t_range
    t_count = fs.t_count if t_count is None else t_count
    t_scale = fs.t_scale if t_scale is None else t_scale
    x_span = fs.x_span if x_span is None else x_span
    x_count = fs.x_count if x_count is None else x_count
    tables = []

    if fig_id == "1a":
        params = _scenario(sets[0], sod, m, d)
        ts = time_grid(t_lo, t_hi, t_count, t_scale) * params.t_mix
        x = np.linspace(-x_span * d, x_span * d, x_count)
        P = np.array([itf.total_density(params, x, t) for t in ts])
        T_, X_ = np.meshgrid(ts, x, indexing="ij")
        tables.append(
            Table(
                name=f"fig1a_{sets[0][0]}",
                columns={"t": T_.ravel(), "t_over_tmix": T_.ravel() / params.t_mix, "x": X_.ravel(), "P": P.ravel()},
                meta=params_meta(params, figure="1a"),
                descriptions={"t": "time (1/E)", "t_over_tmix": "time / t_mix", "x": "position", "P": "density"},
            )
        )
        svg = heatmap(x, ts / params.t_mix, P, title="figure 1a: P(x,t)", xlabel="x / d", ylabel="t / t_mix")
        return tables, svg

    if fig_id in ("1b", "2"):
        curves = []
        for pset in sets:
            params = _scenario(pset, sod, m, d)
            for f in fs.times:
                t = f * params.t_mix
                x = np.linspace(-x_span * d, x_span * d, x_count)
                name = f"fig{fig_id}_{pset[0]}_t{f:g}"
                tab = profile_table(params, t, x, name, figure=fig_id, t_over_tmix=f"{f:g}")
                tables.append(tab)
                curves.append((x, tab.columns["P"], f"P {pset[0]} t={f:g} t_mix"))
                if fig_id == "2":
                    curves.append((x, tab.columns["P_cl"], f"P_cl t={f:g}"))
                    curves.append((x, tab.columns["P_cl_plus_P_int"], f"P_cl+P_int t={f:g}"))
                    curves.append((x, tab.columns["P_cl_minus_P_int"], f"P_cl-P_int t={f:g}"))
        svg = line_plot(curves, title=f"figure {fig_id}", xlabel="x / d", ylabel="P(x,t)")
        return tables, svg

    curves = []
    for pset in sets:
        params = _scenario(pset, sod, m, d)
        ts = time_grid(t_lo, t_hi, t_count, t_scale) * params.t_mix
        tab = attenuation_table(params, ts, f"fig{fig_id}_{pset[0]}", figure=fig_id)
        tables.append(tab)
        tt = tab.columns["t_over_tmix"]
        if fig_id == "3":
            curves += [
                (tt, tab.columns["P_cl_0"], "P_cl(0,t)"),
                (tt, tab.columns["P_int_0"], "P_int(0,t)"),
                (tt, tab.columns["a_flo"], "a_FLO"),
            ]
        elif fig_id == "4":
            curves += [(tt, tab.columns["a_2"], "a_2"), (tt, tab.columns["a_flo"], "a_FLO")]
        else:
            curves.append((tt, tab.columns["a_2"], f"a_2 T={pset[1]:g}E gamma={pset[2]:g}E"))
    svg = line_plot(
        curves, title=f"figure {fig_id}", xlabel="t / t_mix", ylabel="value", logx=True, logy=True
    )
    return tables, svg
