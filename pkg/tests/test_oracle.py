import math

import numpy as np
import pytest

from brownslit import interference as itf
from brownslit.correlators import ScenarioParams
from brownslit.errors import ConvergenceError, ParameterError
from brownslit.oracle import (
    base_kernel,
    j0,
    kernel_decomposition,
    kernel_terms,
    oracle_density,
)


def params(T=1.0, gamma=0.0):
    return ScenarioParams.from_dimensionless(0.05, T, gamma)


def alpha(p, x):
    return itf.SlitPreparation.from_params(p).amplitude(x)


def test_j0_symmetry_and_prefactor():
    p = params()
    t = p.t_mix
    X = np.linspace(-0.4, 0.4, 7)
    Y = np.linspace(-1.0, 1.0, 7)
    np.testing.assert_allclose(j0(p, -X, Y, t), np.conj(j0(p, X, Y, t)), rtol=1e-14)
    assert j0(p, 0.0, 3.0, t) == pytest.approx(1 / (4 * math.pi * p.t_mix / 2))


def test_j0_rejects_zero_time():
    with pytest.raises(ParameterError, match="t = 0"):
        j0(params(), 0.0, 0.0, 0.0)
    with pytest.raises(ParameterError, match="t = 0"):
        oracle_density(params(), 0.0, 0.0)


def test_decomposition_at_origin():
    p = params()
    values, _ = kernel_decomposition(p, 0.0, 0.0)
    expected = p.norm / 2 * math.exp(-50.0) / math.sqrt(2 * math.pi * p.sigma**2)
    np.testing.assert_allclose(values, expected, rtol=1e-12)


def test_decomposition_sum_identity():
    p = params()
    rng = np.random.default_rng(7)
    X = rng.uniform(-1.5, 1.5, 100)
    q = rng.uniform(-1.0, 1.0, 100)
    _, total = kernel_decomposition(p, X, q)
    direct = alpha(p, q - X / 2) * alpha(p, q + X / 2)
    np.testing.assert_allclose(total, direct, rtol=1e-12, atol=1e-300)


def test_matches_closed_form_example_points():
    p = params()
    assert oracle_density(p, 0.0, p.t_mix).density[0] == pytest.approx(
        float(itf.total_density(p, 0.0, p.t_mix)), rel=1e-10
    )
    w = params(gamma=0.3)
    t = 0.3 * w.t_mix
    x = np.linspace(-1.0, 1.0, 11)
    np.testing.assert_allclose(oracle_density(w, x, t).density, itf.total_density(w, x, t), rtol=1e-10)


@pytest.mark.parametrize("T,gamma", [(0.0, 0.0), (1.0, 0.3)])
def test_single_slit_reduction(T, gamma):
    p = params(T, gamma)
    for f in (0.1, 1.0, 10.0):
        t = f * p.t_mix
        x = np.linspace(-3, 3, 25) * math.sqrt(float(itf.correlator(p, t).width_sq))
        got = oracle_density(p, x, t, single_slit=True).density
        np.testing.assert_allclose(got, itf.single_slit_density(p, x, t), rtol=1e-8)


def test_pairwise_decomposition():
    p = params(gamma=0.3)
    t = 0.7 * p.t_mix
    x = np.linspace(-2, 2, 31)
    res = oracle_density(p, x, t)
    np.testing.assert_allclose(res.pair("classical"), itf.classical_density(p, x, t)[0], rtol=1e-6)
    fringe = itf.interference_amplitude(p, x, t) * np.cos(itf.fringe_phase(p, x, t))
    peak = itf.interference_amplitude(p, 0.0, t)
    assert np.max(np.abs(res.pair("interference") - fringe)) < 1e-6 * peak
    assert np.all(res.imag_residue < 1e-10 * res.density.max())


def test_oracle_normalisation():
    p = params(gamma=0.3)
    t = p.t_mix
    x = itf.default_grid(p, t, count=1201)
    dens = oracle_density(p, x, t).density
    assert itf.trapezoid_sum(dens, x[1] - x[0]) == pytest.approx(1.0, abs=1e-5)


def test_tiny_budget_raises_with_estimate():
    p = params()
    with pytest.raises(ConvergenceError) as info:
        oracle_density(p, np.array([0.0, 0.3]), p.t_mix, budget=1)
    err = info.value
    assert err.exit_code == 2
    assert np.shape(err.estimate) == (2,)


def test_result_is_deterministic():
    p = params(gamma=0.3)
    x = np.linspace(-1, 1, 9)
    a = oracle_density(p, x, p.t_mix).density
    b = oracle_density(p, x, p.t_mix).density
    assert np.array_equal(a, b)


def test_kernel_terms_layout():
    p = params()
    labels = [k.label for k in kernel_terms(p)]
    assert labels == ["classical-", "classical+", "interference-", "interference+"]
    assert base_kernel(p.sigma, 0.0, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi * p.sigma**2))
