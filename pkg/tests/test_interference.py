import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brownslit import interference as itf
from brownslit.correlators import ScenarioParams, correlator, timescales
from brownslit.errors import GridError, UnsupportedRegimeError


def params(T=1.0, gamma=0.3, sod=0.05):
    return ScenarioParams.from_dimensionless(sod, T, gamma)


def test_initial_density_is_squared_amplitude():
    p = params()
    x = np.linspace(-1.0, 1.0, 801)
    prep = itf.SlitPreparation.from_params(p)
    np.testing.assert_allclose(itf.total_density(p, x, 0.0), prep.density(x), rtol=1e-12, atol=1e-300)


def test_initial_amplitude_is_normalised():
    p = params()
    x = np.linspace(-2.0, 2.0, 8001)
    assert itf.trapezoid_sum(itf.SlitPreparation.from_params(p).density(x), x[1] - x[0]) == pytest.approx(1.0, abs=1e-12)


def test_reconstruction_from_parts():
    p = params()
    t = 0.3 * p.t_mix
    prof = itf.profile(p, t)
    np.testing.assert_allclose(prof.P, prof.P_cl + prof.P_int * np.cos(prof.phase), rtol=1e-14, atol=0)
    np.testing.assert_allclose(prof.P_cl, 0.5 * (prof.P_cl_plus + prof.P_cl_minus), rtol=1e-13)


def test_envelope_bounds_density():
    p = params()
    for f in (0.1, 0.3, 1.0, 3.0):
        prof = itf.profile(p, f * p.t_mix)
        tol = 1e-13 * prof.P.max()
        assert np.all(prof.P <= prof.upper_envelope + tol)
        assert np.all(prof.P >= prof.lower_envelope - tol)
        assert np.all(prof.lower_envelope >= -tol)


def test_logs_match_direct_closed_form():
    p = params()
    t = np.array([0.02, 0.1, 1.0, 7.0])
    c = correlator(p, t)
    s2, d, N = p.sigma**2, p.d, p.norm
    w2 = c.width_sq
    direct_int = N / np.sqrt(2 * math.pi * w2) * np.exp(-(d * d * (s2 - 2 * c.Q) / (4 * s2)) / (2 * w2))
    np.testing.assert_allclose(np.exp(itf.log_interference_amplitude(p, 0.0, t)), direct_int, rtol=1e-12)
    direct_cl = N / np.sqrt(2 * math.pi * w2) * np.exp(-(d / 2) ** 2 / (2 * w2))
    np.testing.assert_allclose(itf.classical_density(p, 0.0, t)[0], direct_cl, rtol=1e-12)
    np.testing.assert_allclose(
        itf.log_attenuation_flo(p, t), c.Q * d * d / (4 * s2 * w2), rtol=1e-12
    )
    np.testing.assert_allclose(
        itf.log_attenuation_a2(p, t), -d * d * (s2 - 2 * c.Q) / (8 * s2 * w2), rtol=1e-12
    )


def test_attenuation_ratio_identity():
    # a_FLO / a_2 = exp(d^2 / 8 w^2) exactly, so the two agree once w >> d
    p = params(T=1.0, gamma=0.0)
    t = np.geomspace(1e-3, 1e3, 50) * p.t_mix
    lhs = itf.log_attenuation_flo(p, t) - itf.log_attenuation_a2(p, t)
    np.testing.assert_allclose(lhs, p.d**2 / (8 * correlator(p, t).width_sq), rtol=1e-10, atol=1e-13)


def test_attenuation_factors_agree_at_late_times():
    p = params(T=1.0, gamma=0.0)
    t = np.geomspace(12, 1000, 40) * p.t_mix
    rel = np.abs(itf.attenuation_flo(p, t) / itf.attenuation_a2(p, t) - 1)
    bound = np.expm1(p.d**2 / (8 * correlator(p, t).width_sq))
    assert np.all(rel < 1e-3)
    np.testing.assert_allclose(rel, bound, rtol=1e-8)


def test_x_resolved_flo_is_position_independent():
    p = params()
    t = 0.7 * p.t_mix
    x = np.linspace(-2, 2, 9)
    vals = itf.log_attenuation_flo_at(p, x, t)
    np.testing.assert_allclose(vals, vals[0], rtol=1e-12)
    assert vals[0] == pytest.approx(float(itf.log_attenuation_flo(p, t)), rel=1e-10)


def test_initial_suppression_value():
    assert float(itf.log_attenuation_a2(params(), 0.0)) == pytest.approx(-50.0, rel=1e-14)


def test_saturation_plateau():
    p = params(T=1.0, gamma=0.0)
    a_inf = itf.saturation_a_inf(p)
    assert a_inf == pytest.approx(math.exp(-1 / (8 * 0.0025 + 2)), rel=1e-14)
    assert float(itf.attenuation_a2(p, 1e6 * p.t_mix)) == pytest.approx(a_inf, rel=1e-6)
    assert itf.saturation_a_inf(params(T=0.0, gamma=0.0)) == 1.0


def test_fringes_flatten_with_temperature():
    # visibility at x = 0 after mixing falls as the thermal wavelength shrinks
    vis = [float(itf.attenuation_flo(params(T=T, gamma=0.0), 3 * 0.1)) for T in (0.0, 1.0, 4.0, 16.0)]
    assert all(a > b for a, b in zip(vis, vis[1:]))


def test_gaussian_law_holds_well_before_spreading_time():
    p = params(T=1.0, gamma=0.0)
    ts = timescales(p)
    t = np.linspace(0, 0.2 * ts.t_spread, 200)[1:]
    law = np.exp(-t * t / (8 * ts.tau_flo**2))
    rel = np.abs(itf.attenuation_flo(p, t) - law) / itf.attenuation_flo(p, t)
    assert rel.max() < 0.05


def test_longtime_law_values():
    p = params()
    ts = timescales(p)
    t = np.array([0.0, ts.t_dec, ts.t_s])
    np.testing.assert_allclose(
        itf.log_longtime_attenuation(p, t), [0.0, -1 / (1 + ts.t_dec / ts.t_s), -ts.t_s / (2 * ts.t_dec)]
    )
    with pytest.raises(UnsupportedRegimeError):
        itf.longtime_attenuation(params(gamma=0.0), 1.0)


@settings(max_examples=40, deadline=None)
@given(sod=st.floats(0.01, 0.1), T=st.one_of(st.just(0.0), st.floats(1e-3, 5.0)), gfrac=st.floats(0.0, 0.9), f=st.floats(0.0, 10.0))
def test_normalisation_property(sod, T, gfrac, f):
    p = params(T=T, gamma=gfrac * T, sod=sod)
    prof = itf.profile(p, f * p.t_mix)
    assert prof.integral() == pytest.approx(1.0, abs=1e-6)
    gap = itf.log_interference_amplitude(p, prof.x, prof.t) - itf.log_classical_density(p, prof.x, prof.t)[0]
    assert np.all(gap <= 1e-12)


def test_profile_rejects_narrow_and_ragged_grids():
    p = params()
    with pytest.raises(GridError, match="captures only"):
        itf.profile(p, p.t_mix, np.linspace(-1, 1, 401))
    with pytest.raises(GridError, match="uniform"):
        itf.profile(p, p.t_mix, np.array([-10.0, -1.0, 0.0, 10.0]))


def test_central_fringe_suppressed_by_bath():
    free = ScenarioParams.from_dimensionless(0.05, 0.0, 0.0)
    warm = params()
    ratio = float(itf.total_density(warm, 0.0, warm.t_mix) / itf.total_density(free, 0.0, free.t_mix))
    assert 0 < ratio < 1
