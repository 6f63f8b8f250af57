"""Joint rate fits to spin-dependent read-out traces."""

import numpy as np
import pytest

from nvreadout import levels
from nvreadout.errors import DimensionMismatch, IllConditioned, InvalidInput
from nvreadout.fitkit import compare_mixing_variants, fit_rates
from nvreadout.levels import MixingVariant, RateSet
from nvreadout.series import TimeTrace

K_F = 111.0
TRUE = {"k_0": 5.80, "k_s": 1.79, "k_m": 1.35}


def synthetic(variant, seed, noise=0.01):
    r = RateSet(K_F, K_F, TRUE["k_s"], TRUE["k_0"], TRUE["k_m"], variant)
    rng = np.random.default_rng(seed)
    out = []
    for prep in ("ms0", "ms1"):
        tr = levels.readout_trace(r, prep, levels.Ideal(), 3000.0, 1.0)
        out.append(TimeTrace(tr.times, tr.values * (1 + noise * rng.standard_normal(tr.values.size))))
    return out


def test_round_trip_at_reference_rates():
    t0, t1 = synthetic("radiative", 7)
    r = fit_rates(t0, t1, K_F)
    assert r.converged
    for k, v in TRUE.items():
        assert r[k] == pytest.approx(v, rel=0.05)
    assert r.derived["k_e"] == r.derived["k_f"] == K_F


def test_noiseless_round_trip_is_tight():
    t0, t1 = synthetic("radiative", 0, noise=0.0)
    r = fit_rates(t0, t1, K_F, initial_guess={k: 1.2 * v for k, v in TRUE.items()})
    for k, v in TRUE.items():
        assert r[k] == pytest.approx(v, rel=1e-6)


def test_fit_scale_recovers_detection_factor():
    t0, t1 = synthetic("radiative", 3, noise=0.0)
    t0 = TimeTrace(t0.times, 0.5 * t0.values)
    t1 = TimeTrace(t1.times, 0.5 * t1.values)
    r = fit_rates(t0, t1, K_F, fit_scale=True)
    assert r["scale"] == pytest.approx(0.5, rel=1e-5)
    assert r["k_m"] == pytest.approx(TRUE["k_m"], rel=1e-4)


@pytest.mark.parametrize("variant", ["radiative", "nonradiative"])
def test_comparison_prefers_generating_variant(variant):
    t0, t1 = synthetic(variant, 11, noise=0.002)
    c = compare_mixing_variants(t0, t1, K_F)
    assert c.preferred is MixingVariant.parse(variant)


def test_identical_traces_are_ill_conditioned():
    t0, _ = synthetic("radiative", 1)
    with pytest.raises(IllConditioned):
        fit_rates(t0, t0, K_F)


def test_zero_contrast_comparison_is_ill_conditioned():
    t = TimeTrace(np.arange(100.0), np.full(100, 3.0))
    with pytest.raises(IllConditioned):
        compare_mixing_variants(t, t, K_F)


def test_grid_mismatch_and_bad_k_f():
    t0, t1 = synthetic("radiative", 1)
    short = TimeTrace(t1.times[:-1], t1.values[:-1])
    with pytest.raises(DimensionMismatch):
        fit_rates(t0, short, K_F)
    with pytest.raises(InvalidInput):
        fit_rates(t0, t1, 0.0)


def test_shipped_readout_fixture(data):
    from nvreadout.shell import load_trace

    r = fit_rates(load_trace(data("readout_ms0.csv")), load_trace(data("readout_ms1.csv")), K_F)
    for k, v in TRUE.items():
        assert r[k] == pytest.approx(v, rel=0.05)
