"""Scenario parameters, Ohmic-bath correlators and characteristic timescales.

Units have hbar = k_B = 1. Once the mass ``m`` and the slit separation ``d``
fix the mass and length scales, the energy scale is ``E = 1 / (m d**2)`` and
the physics depends only on ``sigma/d``, ``T/E`` and ``gamma/E``.

The correlators are the weak-damping (``gamma << T``) closed forms

    A(t) = (1 - exp(-gamma t)) / (2 m gamma)
    Q(t) = -(T / (m gamma)) * (t - (1 - exp(-gamma t)) / gamma)

which reduce to ``A = t / 2m`` and ``Q = -T t**2 / 2m`` at ``gamma = 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

#: Marker for timescales that do not exist (e.g. no decoherence at gamma = 0).
UNBOUNDED = math.inf

SIGMA_OVER_D_MAX = 0.25
SIGMA_OVER_D_WARN = 0.1

# Below this value of gamma*t the correlators are evaluated from their Taylor
# series; x + expm1(-x) loses ~log10(1/x) digits to cancellation otherwise.
_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 24


@dataclass(frozen=True)
class ScenarioParams:
    """Physical inputs of the double-slit scenario.

    Parameters
    ----------
    sigma : float
        Slit width parameter (each slit transmits a Gaussian of width ``2 sigma``).
    T : float
        Bath temperature in energy units.
    gamma : float
        Ohmic friction coefficient (energy, i.e. inverse time, units).
    m, d : float
        Particle mass and slit separation; both default to 1 so that ``E = 1``.
    """

    sigma: float
    T: float = 0.0
    gamma: float = 0.0
    m: float = 1.0
    d: float = 1.0

    def __post_init__(self):
        for name in ("sigma", "T", "gamma", "m", "d"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.m <= 0:
            raise ParameterError(f"mass must satisfy m > 0, got m={self.m}")
        if self.d <= 0:
            raise ParameterError(f"slit separation must satisfy d > 0, got d={self.d}")
        if self.sigma <= 0:
            raise ParameterError(f"slit width must satisfy sigma > 0, got sigma={self.sigma}")
        if self.T < 0:
            raise ParameterError(f"temperature must satisfy T >= 0, got T={self.T}")
        if self.gamma < 0:
            raise ParameterError(f"friction must satisfy gamma >= 0, got gamma={self.gamma}")
        ratio = self.sigma / self.d
        if ratio > SIGMA_OVER_D_MAX:
            raise ParameterError(
                f"slits must be separated: sigma/d <= {SIGMA_OVER_D_MAX} required, got {ratio:g}"
            )
        if ratio > SIGMA_OVER_D_WARN:
            warnings.warn(
                f"sigma/d = {ratio:g} exceeds {SIGMA_OVER_D_WARN}; results assume d >> sigma",
                stacklevel=3,
            )
        if self.gamma > 0 and not self.gamma < self.T:
            raise ParameterError(
                "weak-damping regime requires gamma < T whenever gamma > 0, "
                f"got gamma={self.gamma}, T={self.T}"
            )

    @classmethod
    def from_dimensionless(cls, sigma_over_d, T_over_E=0.0, gamma_over_E=0.0, m=1.0, d=1.0):
        """Build parameters from the three dimensionless inputs and a unit system."""
        E = 1.0 / (m * d * d)
        return cls(sigma=sigma_over_d * d, T=T_over_E * E, gamma=gamma_over_E * E, m=m, d=d)

    @property
    def E(self) -> float:
        return 1.0 / (self.m * self.d**2)

    @property
    def lambda_th_sq(self) -> float:
        """Squared thermal wavelength ``1/(m T)``; unbounded at ``T = 0``."""
        if self.T == 0:
            return UNBOUNDED
        return 1.0 / (self.m * self.T)

    @property
    def lambda_th(self) -> float:
        return math.sqrt(self.lambda_th_sq)

    @property
    def norm(self) -> float:
        """Two-slit normalisation ``N = 1 / (1 + exp(-d**2 / 8 sigma**2))``."""
        return 1.0 / (1.0 + math.exp(-self.d**2 / (8.0 * self.sigma**2)))

    @property
    def t_mix(self) -> float:
        return 2.0 * self.m * self.sigma * self.d

    def dimensionless(self) -> dict:
        return {
            "sigma_over_d": self.sigma / self.d,
            "T_over_E": self.T / self.E,
            "gamma_over_E": self.gamma / self.E,
        }


@dataclass(frozen=True)
class BathCorrelators:
    """Correlator values at time(s) ``t``; fields broadcast like ``t``."""

    t: np.ndarray
    A: np.ndarray
    Q: np.ndarray
    width_sq: np.ndarray

    @property
    def s(self):
        """FLO's thermal spreading ``s(t) = -2 Q(t)``."""
        return -2.0 * self.Q

    @property
    def commutator(self):
        """Imaginary value of ``[x(t1), x(t1 + t)]``, i.e. ``2 A(t)``."""
        return 2.0 * self.A


@dataclass(frozen=True)
class Timescales:
    t_mix: float
    t_spread: float
    t_dec: float
    t_s: float
    tau_flo: float
    lambda_th: float

    def ratios(self) -> dict:
        def ratio(a, b):
            return a / b if math.isfinite(a) else UNBOUNDED

        return {
            "t_spread/t_mix": ratio(self.t_spread, self.t_mix),
            "tau_flo/t_mix": ratio(self.tau_flo, self.t_mix),
            "t_dec/t_mix": ratio(self.t_dec, self.t_mix),
            "t_s/t_mix": ratio(self.t_s, self.t_mix),
            "t_s/t_dec": ratio(self.t_s, self.t_dec) if math.isfinite(self.t_dec) else UNBOUNDED,
        }


def _check_times(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ParameterError("time must be finite")
    if np.any(t < 0):
        raise ParameterError("time must satisfy t >= 0")
    return t


def _series(x, coeffs):
    # Horner evaluation of sum_k coeffs[k] * x**k
    out = np.zeros_like(x)
    for c in coeffs[::-1]:
        out = out * x + c
    return out


# (1 - e^-x)/x      = sum_k (-x)^k / (k+1)!
_A_COEFFS = [(-1.0) ** k / math.factorial(k + 1) for k in range(_SERIES_TERMS)]
# (x - 1 + e^-x)/x^2 = sum_k (-x)^k / (k+2)!
_Q_COEFFS = [(-1.0) ** k / math.factorial(k + 2) for k in range(_SERIES_TERMS)]


def _A_Q(params: ScenarioParams, t):
    m, T, g = params.m, params.T, params.gamma
    if g == 0:
        return t / (2.0 * m), -T * t * t / (2.0 * m)
    x = g * t
    small = x < _SERIES_CUTOFF
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    a_small = t / (2.0 * m) * _series(xs, _A_COEFFS)
    q_small = -(T * t * t / m) * _series(xs, _Q_COEFFS)
    # written through x = gamma t only, so a subnormal gamma cannot overflow
    a_large = t / (2.0 * m) * (-np.expm1(-xl) / xl)
    q_large = -(T * t * t / m) * ((xl + np.expm1(-xl)) / (xl * xl))
    return np.where(small, a_small, a_large), np.where(small, q_small, q_large)


def correlator(params: ScenarioParams, t) -> BathCorrelators:
    """Evaluate ``A(t)``, ``Q(t)`` and the packet width ``w(t)**2``."""
    t = _check_times(t)
    A, Q = _A_Q(params, t)
    s2 = params.sigma**2
    w2 = s2 + A * A / s2 - 2.0 * Q
    return BathCorrelators(t=t, A=A, Q=Q, width_sq=w2)


def width_squared(params: ScenarioParams, t):
    """``w(t)**2 = sigma**2 + A**2 / sigma**2 - 2 Q``."""
    return correlator(params, t).width_sq


def timescales(params: ScenarioParams) -> Timescales:
    m, d, s, T, g = params.m, params.d, params.sigma, params.T, params.gamma
    t_mix = 2.0 * m * s * d
    t_spread = 2.0 * m * s * s
    if T > 0:
        lam_sq = params.lambda_th_sq
        tau = s * s * math.sqrt(m) / (d * math.sqrt(T))
    else:
        lam_sq = UNBOUNDED
        tau = UNBOUNDED
    if T > 0 and g > 0:
        t_dec = lam_sq / (d * d * g)
        t_s = t_dec * d * d / (8.0 * s * s)
    else:
        t_dec = t_s = UNBOUNDED
    return Timescales(
        t_mix=t_mix,
        t_spread=t_spread,
        t_dec=t_dec,
        t_s=t_s,
        tau_flo=tau,
        lambda_th=math.sqrt(lam_sq),
    )
