"""Brute-force recomputation of P(x, t) from the diagonal propagation function.

The density is the two-dimensional integral

    P(x_f, t) = int dX dq  J0(X, x_f + q, t) * alpha*(q - X/2) alpha(q + X/2)

with ``J0(X, Y, t) = exp(i X Y / 2A + X**2 Q / 4A**2) / (4 pi A)``. The
two-point function of the double slit splits into four shifted copies of the
single-slit kernel ``t1``; each copy is integrated separately by tensor
Gauss-Legendre quadrature with panel doubling until successive estimates
agree.

Nothing here uses the closed-form widths or densities of
:mod:`brownslit.interference`. The only shared inputs are the correlators
``A(t)`` and ``Q(t)``.

Far in the tails the integrals are exponentially small results of rapidly
oscillating integrands, and real-axis quadrature loses every digit to
cancellation. Because the integrand is entire in ``(X, q)`` and Gaussian
damped, both contours are shifted by constant imaginary offsets through the
stationary point of the log-integrand. Cauchy's theorem makes any such shift
exact; the saddle is located numerically and only decides where the nodes go.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import ScenarioParams, correlator
from .errors import ConvergenceError, ParameterError

GL_ORDER = 16
DEFAULT_RTOL = 1e-11
DEFAULT_BUDGET = 6  # maximum number of panel doublings
TRUNCATION_SD = 8.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class KernelTerm:
    """One shifted copy ``t1(X + shift_X, q + shift_q)`` of the single-slit kernel."""

    shift_X: float
    shift_q: float
    weight: float
    label: str

    @property
    def is_interference(self) -> bool:
        return self.shift_X != 0.0


def base_kernel(sigma, X, q):
    """Single-slit two-point function ``t1(X, q)`` (real arguments)."""
    s2 = sigma * sigma
    return np.exp(-q * q / (2 * s2) - X * X / (8 * s2)) / math.sqrt(2 * math.pi * s2)


def kernel_terms(params: ScenarioParams, single_slit=False):
    """The four weighted shifted kernels of the double slit (or one for a single slit)."""
    if single_slit:
        return (KernelTerm(0.0, 0.0, 1.0, "single"),)
    d, w = params.d, params.norm / 2
    return (
        KernelTerm(0.0, -d / 2, w, "classical-"),
        KernelTerm(0.0, d / 2, w, "classical+"),
        KernelTerm(-d, 0.0, w, "interference-"),
        KernelTerm(d, 0.0, w, "interference+"),
    )


def kernel_decomposition(params: ScenarioParams, X, q):
    """Values of the four weighted terms at ``(X, q)`` and their sum."""
    X = np.asarray(X, dtype=float)
    q = np.asarray(q, dtype=float)
    values = tuple(
        term.weight * base_kernel(params.sigma, X + term.shift_X, q + term.shift_q)
        for term in kernel_terms(params)
    )
    return values, sum(values)


def _at_time(params, t):
    t = float(t)
    if t < 0:
        raise ParameterError("time must satisfy t >= 0")
    if t == 0:
        raise ParameterError(
            "J0 is singular at t = 0 (A = 0); use P(x, 0) = |alpha(x)|**2 instead"
        )
    c = correlator(params, t)
    return float(c.A), float(c.Q)


def j0(params: ScenarioParams, X, Y, t):
    """Diagonal propagation function ``J0(X, Y, t)``; requires ``t > 0``."""
    A, Q = _at_time(params, t)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return np.exp(1j * X * Y / (2 * A) + X * X * Q / (4 * A * A)) / (4 * math.pi * A)


def _log_integrand(X, q, x_f, A, Q, sigma, term):
    # log of J0(X, x_f + q) * t1(X + sX, q + sq) without the constant prefactors
    s2 = sigma * sigma
    Xs = X + term.shift_X
    qs = q + term.shift_q
    return 1j * X * (x_f + q) / (2 * A) + X * X * Q / (4 * A * A) - qs * qs / (2 * s2) - Xs * Xs / (8 * s2)


def _saddle(x_f, A, Q, sigma, term):
    """Stationary point and Hessian of the quadratic log-integrand, by finite differences.

    The Hessian does not depend on ``x_f``; the stationary point does (linearly).
    """
    hX, hq = 2.0 * sigma, sigma
    X0 = -term.shift_X
    q0 = -term.shift_q

    def f(dX, dq, x=x_f):
        return _log_integrand(X0 + dX, q0 + dq, x, A, Q, sigma, term)

    f00 = f(0.0, 0.0, 0.0)
    HXX = (f(hX, 0.0, 0.0) - 2 * f00 + f(-hX, 0.0, 0.0)) / hX**2
    Hqq = (f(0.0, hq, 0.0) - 2 * f00 + f(0.0, -hq, 0.0)) / hq**2
    HXq = (f(hX, hq, 0.0) - f(hX, -hq, 0.0) - f(-hX, hq, 0.0) + f(-hX, -hq, 0.0)) / (4 * hX * hq)
    gX = (f(hX, 0.0) - f(-hX, 0.0)) / (2 * hX)
    gq = (f(0.0, hq) - f(0.0, -hq)) / (2 * hq)
    det = HXX * Hqq - HXq * HXq
    # exact Newton step for a quadratic: delta = -H^{-1} g
    dX = -(Hqq * gX - HXq * gq) / det
    dq = -(HXX * gq - HXq * gX) / det
    return X0 + dX, q0 + dq, np.array([[HXX, HXq], [HXq, Hqq]])


def _panel_nodes(half_width, panels):
    edges = np.linspace(-half_width, half_width, panels + 1)
    h = 2.0 * half_width / panels
    nodes = (edges[:-1, None] + 0.5 * h * (_GL_NODES[None, :] + 1.0)).ravel()
    weights = np.tile(_GL_WEIGHTS * 0.5 * h, panels)
    return nodes, weights


def _term_integral(x_f, A, Q, sigma, term, panels):
    """Integral of one term at every ``x_f``, as (log of the peak value, scaled integral).

    Integrates along ``X = Re(X*) + u + i Im(X*)``, ``q = Re(q*) + v + i Im(q*)``
    where ``(X*, q*)`` is the saddle; ``u, v`` run over a box of
    ``TRUNCATION_SD`` standard deviations of the modulus.
    """
    Xs, qs, H = _saddle(x_f, A, Q, sigma, term)
    cov = np.linalg.inv(-H.real)
    u, wu = _panel_nodes(TRUNCATION_SD * math.sqrt(cov[0, 0]), panels)
    v, wv = _panel_nodes(TRUNCATION_SD * math.sqrt(cov[1, 1]), panels)
    log_peak = _log_integrand(Xs, qs, x_f, A, Q, sigma, term)
    X = Xs[:, None, None] + u[None, :, None]
    q = qs[:, None, None] + v[None, None, :]
    log_vals = _log_integrand(X, q, x_f[:, None, None], A, Q, sigma, term)
    vals = np.exp(log_vals - log_peak[:, None, None])
    return log_peak, np.einsum("kij,i,j->k", vals, wu, wv)


@dataclass(frozen=True)
class OracleResult:
    x: np.ndarray
    t: float
    density: np.ndarray
    imag_residue: np.ndarray
    error_estimate: np.ndarray
    terms: dict

    def pair(self, kind):
        """Sum of the ``classical`` or ``interference`` term contributions."""
        return sum(v for k, v in self.terms.items() if k.startswith(kind)).real


def oracle_density(
    params: ScenarioParams,
    x_f,
    t,
    single_slit=False,
    rtol=DEFAULT_RTOL,
    budget=DEFAULT_BUDGET,
) -> OracleResult:
    """Evaluate ``P(x_f, t)`` by adaptive quadrature of the propagation integral.

    Parameters
    ----------
    single_slit : bool
        Use one Gaussian slit centred at 0 instead of the double slit; the
        result is then the single-slit density ``P_1``.
    rtol : float
        Relative agreement required between successive panel doublings, per
        term and per point.
    budget : int
        Maximum number of doublings; exceeding it raises
        :class:`ConvergenceError` carrying the last estimate and its error.
    """
    A, Q = _at_time(params, t)
    x = np.atleast_1d(np.asarray(x_f, dtype=float))
    if budget < 1:
        raise ParameterError("quadrature budget must allow at least one refinement")
    pre = 1.0 / (4 * math.pi * A * math.sqrt(2 * math.pi * params.sigma**2))
    contributions = {}
    errors = np.zeros_like(x)
    for term in kernel_terms(params, single_slit=single_slit):
        panels = 1
        log_peak, prev = _term_integral(x, A, Q, params.sigma, term, panels)
        for _ in range(budget):
            panels *= 2
            _, cur = _term_integral(x, A, Q, params.sigma, term, panels)
            err = np.abs(cur - prev)
            if np.all(err <= rtol * np.abs(cur)):
                break
            prev = cur
        else:
            scale = np.exp(log_peak.real) * term.weight * pre
            raise ConvergenceError(
                f"quadrature of term {term.label} did not converge after {budget} refinements "
                f"(max relative change {np.max(err / np.abs(cur)):.3g})",
                estimate=(cur * np.exp(1j * log_peak.imag) * scale).real,
                error=err * scale,
            )
        value = term.weight * pre * np.exp(log_peak) * cur
        contributions[term.label] = value
        errors = errors + term.weight * pre * np.exp(log_peak.real) * err
    total = sum(contributions.values())
    return OracleResult(
        x=x,
        t=float(t),
        density=total.real,
        imag_residue=np.abs(total.imag),
        error_estimate=errors,
        terms=contributions,
    )
