"""Q-factor, beta-factor, Purcell estimates and tuning arithmetic."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvreadout import cavity
from nvreadout.cavity import CavityParams, ModeFit
from nvreadout.errors import InvalidInput, InvalidProbability
from nvreadout.shell import load_spectrum

REFERENCE_CAVITY = CavityParams(2021, 0.35, 637.4, 360.0, 0.021, 2.4)
positive = st.floats(1e-3, 1e3, allow_nan=False)


def test_q_factor_examples():
    assert cavity.q_factor(644.8, 0.078) == pytest.approx(8266.67, abs=0.1)
    assert abs(cavity.q_factor(644.8, 0.078) - 8250) / 8250 < 0.01
    assert cavity.q_factor(637, 637 / 2060) == 2060
    with pytest.raises(InvalidInput):
        cavity.q_factor(637, 637)
    with pytest.raises(InvalidInput):
        cavity.q_factor(637, 0)


@given(positive, st.floats(1.01, 1e4), st.sampled_from([0.5, 2.0, 4.0, 1024.0]))
def test_q_factor_scale_invariance(fwhm, ratio, s):
    center = fwhm * ratio
    assert cavity.q_factor(s * center, s * fwhm) == cavity.q_factor(center, fwhm)


def test_beta_examples():
    assert cavity.beta_from_spectrum(ModeFit(637.4, 0.3, 2.0, 2.0)) == 1.0
    assert cavity.beta_from_spectrum(ModeFit(637.4, 0.3, 1e-12, 2.0)) == pytest.approx(0, abs=1e-11)
    with pytest.raises(InvalidInput):
        ModeFit(637.4, 0.3, 3.0, 2.0)
    with pytest.raises(InvalidInput):
        ModeFit(637.4, -0.3, 1.0, 2.0)


def test_purcell_from_beta_examples():
    assert 1 + cavity.purcell_from_beta(0.183) == pytest.approx(1.224, abs=0.001)
    assert cavity.purcell_from_beta(0.0) == 0.0
    assert cavity.purcell_from_beta(0.5) == 1.0
    for bad in (-0.1, 1.0, 1.5):
        with pytest.raises(InvalidProbability):
            cavity.purcell_from_beta(bad)


@given(st.floats(1e-9, 1 - 1e-9))
def test_beta_purcell_inverse_from_beta(b):
    assert cavity.beta_from_purcell(cavity.purcell_from_beta(b)) == pytest.approx(b, rel=1e-12, abs=1e-15)


@given(st.floats(1e-6, 1e3))
def test_beta_purcell_inverse_from_purcell(f):
    assert cavity.purcell_from_beta(cavity.beta_from_purcell(f)) == pytest.approx(f, rel=1e-12)


@given(st.floats(1e-6, 1e12))
def test_beta_purcell_inverse_large_purcell(f):
    # beta near 1 cannot carry 1 - beta to full precision, so large factors
    # are compared in beta space
    b = cavity.beta_from_purcell(f)
    assert cavity.beta_from_purcell(cavity.purcell_from_beta(b)) == pytest.approx(b, abs=1e-12)


def test_mode_spectrum_fixture_q(data):
    fit = cavity.mode_fit_from_spectrum(load_spectrum(data("mode_spectrum.csv")))
    assert fit.center == pytest.approx(644.8, abs=1e-3)
    assert cavity.q_factor(fit.center, fit.fwhm) == pytest.approx(8266.7, rel=0.02)


def test_resonant_fixture_beta(data):
    fit = cavity.mode_fit_from_spectrum(load_spectrum(data("resonant_spectrum.csv")))
    beta = cavity.beta_from_spectrum(fit)
    assert beta == pytest.approx(0.183, abs=0.01)
    assert 1 + cavity.purcell_from_beta(beta) == pytest.approx(1.224, abs=0.015)


def test_predict_purcell_matches_hand_arithmetic():
    nu_ghz = 299_792_458.0 / 637.4e-9 / 1e9
    q_eff = 1 / (1 / 2021 + 360.0 / nu_ghz)
    f = 3 / (4 * math.pi**2) * q_eff / 0.35
    f_zpl, total = cavity.predict_purcell(REFERENCE_CAVITY)
    assert f_zpl == pytest.approx(f, rel=1e-12)
    assert total == pytest.approx(1 + 0.021 * (f - 1), rel=1e-12)
    assert 3.7 <= total <= 6.1
    assert abs(total - 4.9) / 4.9 < 0.25


def test_predict_purcell_narrow_emitter_limit():
    p = CavityParams(2021, 0.35, 637.4, 1e-9, 0.021)
    assert cavity.effective_q(p) == pytest.approx(2021, rel=1e-9)


def test_predict_purcell_rejects_bad_params():
    with pytest.raises(InvalidInput):
        CavityParams(2021, 0.35, 637.4, 360.0, 0.0)
    with pytest.raises(InvalidInput):
        CavityParams(2021, 0.35, 637.4, 360.0, 1.0)
    with pytest.raises(InvalidInput):
        CavityParams(-1, 0.35, 637.4, 360.0, 0.02)
    with pytest.raises(InvalidInput):
        cavity.predict_purcell("not params")


def test_predict_purcell_monotone_on_grid():
    qs = np.linspace(500, 10000, 5)
    vs = np.linspace(0.2, 2.0, 5)
    ws = np.linspace(50, 1000, 5)

    def total(q, v, w):
        return cavity.predict_purcell(CavityParams(q, v, 637.4, w, 0.021))[1]

    for v, w in itertools.product(vs, ws):
        assert np.all(np.diff([total(q, v, w) for q in qs]) > 0)
    for q, w in itertools.product(qs, ws):
        assert np.all(np.diff([total(q, v, w) for v in vs]) < 0)
    for q, v in itertools.product(qs, vs):
        assert np.all(np.diff([total(q, v, w) for w in ws]) < 0)


def test_lifetime_ratio():
    assert cavity.lifetime_ratio(9.0, 8.0) == 1.125
    assert cavity.lifetime_ratio(9.0, 8.0) == pytest.approx(1.13, abs=0.01)
    assert cavity.lifetime_ratio(7.3, 7.3) == 1.0
    with pytest.raises(InvalidInput):
        cavity.lifetime_ratio(0, 8)


def test_tuning_examples():
    red = cavity.tuning_plan(634.0, 637.4, 1.8, 2.4)
    assert red.direction == "red"
    assert red.exposure_hours == pytest.approx(1.889, abs=1e-3)
    blue = cavity.tuning_plan(646.0, 634.0, 1.8, 12 / 5)
    assert blue.direction == "blue"
    assert blue.removal_nm == pytest.approx(5.0, rel=1e-12)
    assert cavity.tuning_plan(637.4, 637.4, 1.8, 2.4) == cavity.TuningPlan("none")
    with pytest.raises(InvalidInput):
        cavity.tuning_plan(634, 637, 0, 2.4)


@given(st.floats(600, 700), st.floats(600, 700), st.floats(0.1, 10), st.floats(0.1, 10))
def test_tuning_round_trip(current, target, red, blue):
    plan = cavity.tuning_plan(current, target, red, blue)
    if target > current:
        assert plan.direction == "red"
    elif target < current:
        assert plan.direction == "blue"
    assert abs(cavity.apply_tuning(current, plan, red, blue) - target) < 1e-9


def test_linewidth_conversion_round_trip():
    ghz = cavity.fwhm_nm_to_ghz(0.4877, 637.4)
    assert ghz == pytest.approx(360, rel=0.01)
    assert cavity.fwhm_ghz_to_nm(ghz, 637.4) == pytest.approx(0.4877, rel=1e-12)
