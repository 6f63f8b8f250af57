"""Acceptance criteria, one test per criterion.

Each test records a PASS or FAIL line that is printed in the pytest terminal
summary (see conftest.py). Run on its own with

    pytest tests/test_acceptance.py
"""

import itertools
import math
from pathlib import Path

import numpy as np
import pytest

from nvreadout import cavity, collection, data_path, levels, snr
from nvreadout.cavity import CavityParams
from nvreadout.collection import REFERENCE_WEIGHTS
from nvreadout.fitkit import compare_mixing_variants, fit_saturation
from nvreadout.levels import MixingVariant, RateSet
from nvreadout.series import TimeTrace
from nvreadout.shell import COMMANDS, csvio, load_config, load_spectrum, main, run_pipeline

from . import oracles

RESULTS = {}
REFERENCE_INI = str(data_path("reference.ini"))


def record(number, title, ok, detail):
    RESULTS[number] = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}"
    assert ok, RESULTS[number]


def test_c01_zeta_zpl_only():
    r = run_pipeline(load_config(REFERENCE_INI), "snr")
    ratio, zeta = r.value("zpl_only.photon_ratio"), r.value("zpl_only.zeta")
    record(1, "zeta ZPL-only", 8.4 <= ratio <= 8.6 and 2.75 <= zeta <= 2.85,
           f"photon ratio {ratio:.4f}, zeta {zeta:.4f}")


def test_c02_zeta_broadband():
    r = run_pipeline(load_config(REFERENCE_INI), "snr")
    ratio, zeta = r.value("broadband.photon_ratio"), r.value("broadband.zeta")
    record(2, "zeta broadband", abs(ratio - 1.10) <= 0.01 and 0.004 <= zeta - 1 <= 0.008,
           f"photon ratio {ratio:.4f}, zeta - 1 = {zeta - 1:.5f}")


def test_c03_q_factor():
    q1 = cavity.q_factor(644.8, 0.078)
    q2 = cavity.q_factor(637, 637 / 2060)
    ok = abs(q1 - 8266.7) <= 0.1 and abs(q1 - 8250) / 8250 < 0.01 and q2 == 2060
    record(3, "Q-factor", ok, f"q(644.8, 0.078) = {q1:.2f}, q(637, 637/2060) = {q2!r}")


def test_c04_beta_purcell():
    fit = cavity.mode_fit_from_spectrum(load_spectrum(data_path("resonant_spectrum.csv")))
    beta = cavity.beta_from_spectrum(fit)
    total = 1 + cavity.purcell_from_beta(0.183)
    record(4, "beta/Purcell", abs(beta - 0.183) <= 0.01 and abs(total - 1.224) <= 0.002,
           f"beta {beta:.4f}, 1+F(0.183) = {total:.4f}")


def test_c05_purcell_prediction():
    _, total = cavity.predict_purcell(CavityParams(2021, 0.35, 637.4, 360.0, 0.021))
    grid = np.linspace(0.5, 2.0, 5)
    monotone = True
    for a, b, c in itertools.product(grid, grid, grid):
        base = cavity.predict_purcell(CavityParams(2021 * a, 0.35 * b, 637.4, 360 * c, 0.021))[1]
        up_q = cavity.predict_purcell(CavityParams(2021 * a * 1.1, 0.35 * b, 637.4, 360 * c, 0.021))[1]
        up_v = cavity.predict_purcell(CavityParams(2021 * a, 0.35 * b * 1.1, 637.4, 360 * c, 0.021))[1]
        up_w = cavity.predict_purcell(CavityParams(2021 * a, 0.35 * b, 637.4, 360 * c * 1.1, 0.021))[1]
        monotone &= up_q > base and up_v < base and up_w < base
    record(5, "Purcell prediction", 3.7 <= total <= 6.1 and monotone,
           f"total factor {total:.4f}, monotone on 5x5x5 grid: {monotone}")


def test_c06_contrast_reduction():
    red = levels.contrast_reduction(levels.REFERENCE_RATES, 9.0 / 8.0, gate_start=0.0, gate_width=250.0)
    golden = oracles.load_golden("contrast_reduction.json")["value"]
    ok = 0.02 <= red <= 0.06 and red == pytest.approx(golden, rel=1e-9)
    record(6, "contrast reduction", ok, f"1 - C*/C = {red:.6f} (golden {golden:.6f})")


def _noisy_traces(variant, seed):
    p = levels.REFERENCE_RATES
    r = RateSet(p.k_e, p.k_f, p.k_s, p.k_0, p.k_m, variant)
    rng = np.random.default_rng(seed)
    out = []
    for prep in ("ms0", "ms1"):
        tr = levels.readout_trace(r, prep, levels.Ideal(), 3000.0, 1.0)
        out.append(TimeTrace(tr.times, tr.values * (1 + 0.01 * rng.standard_normal(tr.values.size))))
    return out


def test_c07_rate_fit_round_trip():
    truth = {"k_0": 5.80, "k_s": 1.79, "k_m": 1.35}
    recovered, preferred, worst = 0, 0, 0.0
    for seed in range(10):
        c = compare_mixing_variants(*_noisy_traces("radiative", seed), 111.0)
        errs = [abs(c.radiative[k] - v) / v for k, v in truth.items()]
        worst = max(worst, *errs)
        recovered += max(errs) <= 0.05
        preferred += c.preferred is MixingVariant.RADIATIVE
    record(7, "rate-fit round trip", recovered == 10 and preferred >= 9,
           f"{recovered}/10 seeds within 5% (worst {100 * worst:.2f}%), "
           f"generating variant preferred in {preferred}/10")


def test_c08_propagator_oracle():
    rng = np.random.default_rng(8)
    worst_rel, worst_sum = 0.0, 0.0
    for _ in range(1000):
        k = rng.uniform(0.0, 200.0, 5)
        variant = "radiative" if rng.random() < 0.5 else "nonradiative"
        r = RateSet(*k, mixing_variant=variant)
        start = rng.dirichlet(np.ones(5))
        t = rng.uniform(1.0, 50.0)
        a = levels.evolve(start, r, t, method="eig").as_array()
        b = levels.evolve(start, r, t, method="rk4").as_array()
        scale = np.maximum(np.abs(a), 1e-12)
        worst_rel = max(worst_rel, float(np.max(np.abs(b - a) / scale)))
        worst_sum = max(worst_sum, abs(a.sum() - 1), abs(b.sum() - 1))
    record(8, "propagator oracle", worst_rel <= 1e-6 and worst_sum <= 1e-9,
           f"max componentwise relative difference {worst_rel:.2e}, "
           f"max population drift {worst_sum:.2e}")


def test_c09_photon_statistics():
    r = snr.monte_carlo(snr.CountPair(100, 64), 1_000_000, seed=20201019)
    target = 36 / math.sqrt(164)
    ok_mc = abs(r.var_diff - 164) / 164 < 0.02 and abs(r.empirical_snr - target) / target < 0.02
    rng = np.random.default_rng(9)
    worst = 0.0
    for n0, c in zip(rng.uniform(1e-3, 1e6, 10_000), rng.uniform(-0.999, 1.0, 10_000)):
        rhs = snr.snr_counts(snr.CountPair(n0, n0 * (1 - c)))
        worst = max(worst, abs(snr.snr_contrast(n0, c) - rhs) / max(1.0, abs(rhs)))
    record(9, "photon statistics", ok_mc and worst <= 1e-12,
           f"var {r.var_diff:.2f}, SNR {r.empirical_snr:.4f}, identity error {worst:.1e}")


def test_c10_saturation():
    fits = [fit_saturation(*csvio.load_saturation(data_path(n))[:2])
            for n in ("saturation_off.csv", "saturation_on.csv")]
    ratio = fits[1]["i_inf"] / fits[0]["i_inf"]
    record(10, "saturation", abs(ratio - 2.8) <= 0.1,
           f"i_inf {fits[0]['i_inf']:.2f} -> {fits[1]['i_inf']:.2f} kHz, ratio {ratio:.3f}")


def test_c11_collection_pipeline():
    table = csvio.load_efficiency_table(data_path("efficiency_table.csv"))

    def eff(F, wl):
        w = collection.emission_fractions(collection.effective_rates(111, REFERENCE_WEIGHTS, F))
        return collection.combined_efficiency(table, w, wl)

    off = eff((1, 1, 1), 640.8)
    on = eff((1, 1 + 0.224 / 0.24, 1), 637.4)
    rng = np.random.default_rng(11)
    worst = max(abs(math.fsum(collection.emission_fractions(r)) - 1)
                for r in rng.uniform(0, 1, (10_000, 3)) * 10.0 ** rng.uniform(-6, 6, (10_000, 1)))
    ok = abs(off - 0.039) <= 0.001 and abs(on - 0.034) <= 0.001 and abs(on / off - 0.87) <= 0.01
    record(11, "collection pipeline", ok and worst <= 1e-12,
           f"off {100 * off:.3f}%, on {100 * on:.3f}%, ratio {on / off:.4f}, "
           f"fraction-sum error {worst:.1e}")


def test_c12_reproducibility(tmp_path):
    differing = []
    for command in COMMANDS:
        outputs = []
        for run in ("a", "b"):
            d = tmp_path / f"{command}_{run}"
            code = main([command, "--config", REFERENCE_INI, "--seed", "7",
                         "--format", "csv", "--output", str(d)])
            assert code == 0, f"{command} exited with {code}"
            outputs.append({p.name: p.read_bytes() for p in Path(d).iterdir()})
        if outputs[0] != outputs[1]:
            differing.append(command)
    record(12, "reproducibility", not differing,
           f"{len(COMMANDS) - len(differing)}/{len(COMMANDS)} subcommands byte-identical")
