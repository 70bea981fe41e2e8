"""Probability density of the two-slit Brownian particle and attenuation factors.

After the double-slit measurement the particle density at time ``t`` is

    P(x, t) = P_cl(x, t) + P_int(x, t) * cos(x d A / (2 sigma**2 w**2))

with ``P_cl`` the incoherent sum of the two single-slit packets and
``P_int`` the envelope of the fringes. The fringe envelope and the classical
part are both of order ``exp(-d**2 / 8 sigma**2)`` near ``x = 0`` at early
times, so every quantity is also available as a logarithm and the
attenuation factors are formed entirely in the log domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import ScenarioParams, correlator, timescales
from .errors import GridError, ParameterError, UnsupportedRegimeError

LOG_2PI = math.log(2.0 * math.pi)
NORMALIZATION_TOL = 1e-6
DEFAULT_X_COUNT = 2048
DEFAULT_SPAN_FACTOR = 6.0


@dataclass(frozen=True)
class SlitPreparation:
    """The two-Gaussian transmission amplitude ``alpha(x)`` of the double slit."""

    sigma: float
    d: float

    @classmethod
    def from_params(cls, params: ScenarioParams):
        return cls(sigma=params.sigma, d=params.d)

    @property
    def norm(self) -> float:
        return 1.0 / (1.0 + math.exp(-self.d**2 / (8.0 * self.sigma**2)))

    def amplitude(self, x):
        x = np.asarray(x, dtype=float)
        s2 = self.sigma**2
        pre = math.sqrt(self.norm) / (8.0 * math.pi * s2) ** 0.25
        return pre * (
            np.exp(-((x - self.d / 2) ** 2) / (4 * s2)) + np.exp(-((x + self.d / 2) ** 2) / (4 * s2))
        )

    def density(self, x):
        return self.amplitude(x) ** 2


def _log_p1(x, w2):
    return -0.5 * (LOG_2PI + np.log(w2)) - x * x / (2.0 * w2)


def log_single_slit_density(params: ScenarioParams, x, t):
    x = np.asarray(x, dtype=float)
    return _log_p1(x, correlator(params, t).width_sq)


def single_slit_density(params: ScenarioParams, x, t):
    """Density ``P_1`` of a packet released from a single Gaussian slit at 0."""
    return np.exp(log_single_slit_density(params, x, t))


def log_classical_density(params: ScenarioParams, x, t):
    """Logs of ``(P_cl, P_cl+, P_cl-)``, with ``P_cl+-(x) = N P_1(x +- d/2)``."""
    x = np.asarray(x, dtype=float)
    w2 = correlator(params, t).width_sq
    log_n = math.log(params.norm)
    log_plus = log_n + _log_p1(x + params.d / 2, w2)
    log_minus = log_n + _log_p1(x - params.d / 2, w2)
    log_cl = np.logaddexp(log_plus, log_minus) - math.log(2.0)
    return log_cl, log_plus, log_minus


def classical_density(params: ScenarioParams, x, t):
    return tuple(np.exp(v) for v in log_classical_density(params, x, t))


def log_interference_amplitude(params: ScenarioParams, x, t):
    x = np.asarray(x, dtype=float)
    c = correlator(params, t)
    s2, d = params.sigma**2, params.d
    offset = d * d * (s2 - 2.0 * c.Q) / (4.0 * s2)
    return (
        math.log(params.norm)
        - 0.5 * (LOG_2PI + np.log(c.width_sq))
        - (x * x + offset) / (2.0 * c.width_sq)
    )


def interference_amplitude(params: ScenarioParams, x, t):
    """Fringe envelope ``P_int(x, t)``; strictly positive."""
    return np.exp(log_interference_amplitude(params, x, t))


def fringe_phase(params: ScenarioParams, x, t):
    x = np.asarray(x, dtype=float)
    c = correlator(params, t)
    return x * params.d * c.A / (2.0 * params.sigma**2 * c.width_sq)


def total_density(params: ScenarioParams, x, t):
    """Full density ``P(x, t)``."""
    p_cl = np.exp(log_classical_density(params, x, t)[0])
    p_int = interference_amplitude(params, x, t)
    return p_cl + p_int * np.cos(fringe_phase(params, x, t))


@dataclass(frozen=True)
class SpatialProfile:
    t: float
    x: np.ndarray
    P: np.ndarray
    P_cl: np.ndarray
    P_cl_plus: np.ndarray
    P_cl_minus: np.ndarray
    P_int: np.ndarray
    phase: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    def integral(self) -> float:
        return trapezoid_sum(self.P, self.spacing)

    @property
    def upper_envelope(self):
        return self.P_cl + self.P_int

    @property
    def lower_envelope(self):
        return self.P_cl - self.P_int


def trapezoid_sum(values, h) -> float:
    """Trapezoid rule on a uniform grid with exactly rounded (order-free) summation."""
    values = np.asarray(values, dtype=float)
    interior = math.fsum(values[1:-1].tolist())
    return h * (interior + 0.5 * (values[0] + values[-1]))


def default_grid(params: ScenarioParams, t, count=DEFAULT_X_COUNT, span_factor=DEFAULT_SPAN_FACTOR):
    """Uniform grid over ``[-L, L]`` with ``L = d/2 + span_factor * max(w(t), d)``."""
    w = math.sqrt(float(correlator(params, t).width_sq))
    half = params.d / 2 + span_factor * max(w, params.d)
    return np.linspace(-half, half, count)


def profile(params: ScenarioParams, t, grid=None) -> SpatialProfile:
    """Sample ``P`` and its parts on a uniform grid centred at 0.

    Raises :class:`GridError` when the grid does not capture the probability
    (trapezoid integral below ``1 - 1e-6``) or is not uniform.
    """
    t = float(t)
    x = default_grid(params, t) if grid is None else np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise GridError("profile grid must be one-dimensional with at least 3 points")
    steps = np.diff(x)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise GridError("profile grid must be uniform and strictly increasing")
    log_cl, log_plus, log_minus = log_classical_density(params, x, t)
    p_cl = np.exp(log_cl)
    p_int = interference_amplitude(params, x, t)
    phase = fringe_phase(params, x, t)
    prof = SpatialProfile(
        t=t,
        x=x,
        P=p_cl + p_int * np.cos(phase),
        P_cl=p_cl,
        P_cl_plus=np.exp(log_plus),
        P_cl_minus=np.exp(log_minus),
        P_int=p_int,
        phase=phase,
    )
    total = prof.integral()
    if total < 1.0 - NORMALIZATION_TOL:
        raise GridError(
            f"grid [{x[0]:g}, {x[-1]:g}] captures only {total:.9f} of the probability at t={t:g}; "
            "widen the grid"
        )
    return prof


def log_attenuation_flo(params: ScenarioParams, t):
    """``ln(P_int(0, t) / P_cl(0, t))``."""
    return log_interference_amplitude(params, 0.0, t) - log_classical_density(params, 0.0, t)[0]


def log_attenuation_a2(params: ScenarioParams, t):
    """``ln(P_int(0, t) / (N P_1(0, t)))``."""
    return (
        log_interference_amplitude(params, 0.0, t)
        - math.log(params.norm)
        - log_single_slit_density(params, 0.0, t)
    )


def attenuation_flo(params: ScenarioParams, t):
    return np.exp(log_attenuation_flo(params, t))


def attenuation_a2(params: ScenarioParams, t):
    return np.exp(log_attenuation_a2(params, t))


def log_attenuation_flo_at(params: ScenarioParams, x, t):
    """x-resolved form ``ln(P_int / sqrt(P_cl+ P_cl-))``; independent of ``x``."""
    _, log_plus, log_minus = log_classical_density(params, x, t)
    return log_interference_amplitude(params, x, t) - 0.5 * (log_plus + log_minus)


@dataclass(frozen=True)
class AttenuationSeries:
    t: np.ndarray
    a_flo: np.ndarray
    a2: np.ndarray
    log_a_flo: np.ndarray
    log_a2: np.ndarray


def attenuation_series(params: ScenarioParams, t) -> AttenuationSeries:
    t = np.asarray(t, dtype=float)
    log_flo = log_attenuation_flo(params, t)
    log_a2 = log_attenuation_a2(params, t)
    return AttenuationSeries(
        t=t, a_flo=np.exp(log_flo), a2=np.exp(log_a2), log_a_flo=log_flo, log_a2=log_a2
    )


def saturation_a_inf(params: ScenarioParams) -> float:
    """Late-time plateau ``exp(-d**2 / (8 sigma**2 + 2 lambda_th**2))`` at ``gamma = 0``."""
    lam_sq = params.lambda_th_sq
    if math.isinf(lam_sq):
        return 1.0
    return math.exp(-params.d**2 / (8.0 * params.sigma**2 + 2.0 * lam_sq))


def log_longtime_attenuation(params: ScenarioParams, t):
    if params.gamma == 0 or params.T == 0:
        raise UnsupportedRegimeError(
            "the long-time exponential law needs gamma > 0 and T > 0 (t_dec is unbounded otherwise)"
        )
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("time must satisfy t >= 0")
    ts = timescales(params)
    return -t / (ts.t_dec * (1.0 + t / ts.t_s))


def longtime_attenuation(params: ScenarioParams, t):
    """Asymptotic law ``exp(-t / (t_dec (1 + t / t_s)))`` for ``t >> max(1/gamma, t_mix)``."""
    return np.exp(log_longtime_attenuation(params, t))
