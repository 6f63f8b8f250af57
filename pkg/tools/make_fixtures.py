"""Regenerate the shipped fixture files in src/nvreadout/data.

Every fixture is synthetic: a noise-free model evaluated at documented
parameters plus seeded noise. Running this script twice yields identical
files.

    python3 tools/make_fixtures.py
"""

import math
from pathlib import Path

import numpy as np

from nvreadout import levels
from nvreadout.collection import EfficiencyTable
from nvreadout.series import Spectrum, TimeTrace
from nvreadout.shell import csvio

DATA = Path(__file__).resolve().parents[1] / "src" / "nvreadout" / "data"
SEED = 20201019


def lorentz(x, c, w, area):
    return area * (w / (2 * math.pi)) / ((x - c) ** 2 + (w / 2) ** 2)


def gauss(x, c, w, area):
    s = w / (2 * math.sqrt(2 * math.log(2)))
    return area / (s * math.sqrt(2 * math.pi)) * np.exp(-0.5 * ((x - c) / s) ** 2)


def noisy(y, rel, rng):
    return y * (1 + rel * rng.standard_normal(y.shape))


def grid(a, b, step):
    n = int(round((b - a) / step))
    return np.round(a + step * np.arange(n + 1), 10)


def mode_spectrum(rng):
    x = grid(643.8, 645.8, 0.004)
    y = 0.05 + lorentz(x, 644.8, 0.078, 1.0 * math.pi * 0.078 / 2)
    return Spectrum(x, noisy(y, 0.01, rng), "nm"), [
        "# synthetic cavity mode: Lorentzian at 644.8 nm, fwhm 0.078 nm, peak 1 above",
        "# a flat background of 0.05; 1% multiplicative noise",
    ]


def resonant_spectrum(rng):
    lo, hi, c, w, bg, beta = 635.0, 640.0, 637.4, 0.315, 1.0, 0.183
    inside = beta * bg * (hi - lo) / (1 - beta)
    frac = (math.atan(2 * (hi - c) / w) - math.atan(2 * (lo - c) / w)) / math.pi
    x = grid(lo, hi, 0.01)
    y = bg + lorentz(x, c, w, inside / frac)
    return Spectrum(x, noisy(y, 0.005, rng), "nm"), [
        "# synthetic on-resonance emission: mode at 637.4 nm, fwhm 0.315 nm, on a flat",
        "# background of 1 over 635-640 nm; mode area set to 18.3% of the total area",
        "# inside the window; 0.5% multiplicative noise",
    ]


def ple_spectrum(rng):
    c = 637.4
    w = 360.0 * c**2 / 299_792_458.0
    x = grid(636.2, 638.5, 0.01)
    y = 0.02 + lorentz(x, c, w, math.pi * w / 2)
    return Spectrum(x, noisy(y, 0.01, rng), "nm"), [
        "# synthetic PLE line: Lorentzian at 637.4 nm with fwhm 360 GHz (%.6f nm)" % w,
        "# unit peak on a 0.02 background; 1% multiplicative noise",
    ]


def zpl_doublet(rng):
    x = grid(-1500.0, 1500.0, 5.0)
    y = 0.01 + gauss(x, -250.0, 200.0, 100.0) + gauss(x, 300.0, 370.0, 150.0)
    return Spectrum(x, y + 0.005 * rng.standard_normal(x.shape), "GHz"), [
        "# synthetic ZPL doublet, abscissa is detuning from 470400 GHz",
        "# Gaussians at -250 GHz (fwhm 200 GHz, area 100) and +300 GHz (fwhm 370 GHz,",
        "# area 150) on a 0.01 background; additive noise sigma 0.005",
    ]


def odmr_spectrum(rng):
    x = grid(2.78, 2.96, 0.0005)
    w = 0.008

    def dip(c):
        return 1 / (1 + ((x - c) / (w / 2)) ** 2)

    y = 1000.0 * (1 - 0.04 * dip(2.823) - 0.04 * dip(2.917))
    return Spectrum(x, y + 2.0 * rng.standard_normal(x.shape), "GHz"), [
        "# synthetic ODMR: dips at 2.823 and 2.917 GHz, 4% depth, fwhm 8 MHz,",
        "# baseline 1000 counts; additive noise sigma 2",
    ]


def rabi_trace(rng):
    t = grid(0.0, 5000.0, 10.0)
    y = 1.0 + 0.03 * np.cos(2 * math.pi * t / 1100.0) * np.exp(-t / 1500.0)
    return TimeTrace(t, y + 0.002 * rng.standard_normal(t.shape)), [
        "# synthetic Rabi oscillation: period 1100 ns (pi-time 550 ns), decay 1500 ns,",
        "# amplitude 0.03 on offset 1; additive noise sigma 0.002",
    ]


def lifetime_trace(rng, tau):
    t = grid(0.0, 100.0, 0.1)
    y = 1000.0 * np.exp(-t / tau) + 300.0 * np.exp(-t / 1.0) + 2.0
    return TimeTrace(t, noisy(y, 0.01, rng)), [
        f"# synthetic lifetime decay: amplitudes 1000 (tau {tau} ns) and 300 (tau 1 ns)",
        "# plus offset 2; 1% multiplicative noise",
    ]


def saturation(rng, i_inf, p_sat):
    p = np.round(np.geomspace(0.05, 15.0, 24), 6)
    y = i_inf * p / (p + p_sat) + 0.3 * p
    return p, noisy(y, 0.01, rng), [
        f"# synthetic saturation curve: i_inf {i_inf} kHz, p_sat {p_sat} mW, linear",
        "# background 0.3 kHz/mW; 1% multiplicative noise",
    ]


def readout_traces(rng):
    out = []
    for prep in ("ms0", "ms1"):
        tr = levels.readout_trace(levels.REFERENCE_RATES, prep, levels.Ideal(), 3000.0, 1.0)
        out.append((TimeTrace(tr.times, noisy(tr.values, 0.01, rng)), [
            f"# synthetic read-out fluorescence (MHz) after preparing {prep}; rates",
            "# k_e = k_f = 111, k_s = 1.79, k_0 = 5.80, k_m = 1.35 MHz, radiative mixing,",
            "# ideal initialization; 1% multiplicative noise",
        ]))
    return out


def efficiency_table():
    wl = grid(630.0, 645.0, 0.1)
    half_width = 3.4 / math.sqrt((0.25 - 0.0440) / (0.25 - 0.0742) - 1)
    eps_y = 0.25 - (0.25 - 0.0440) / (1 + ((wl - 637.4) / half_width) ** 2)
    return EfficiencyTable(wl, np.full(wl.shape, 0.045), eps_y, np.full(wl.shape, 0.020)), [
        "# synthetic per-orientation collection efficiencies; flat eps_x = 0.045 and",
        "# eps_z = 0.020; eps_y has a Lorentzian dip centred at 637.4 nm reaching 0.0440,",
        "# equal to 0.0742 at 640.8 nm. With weights (0.24, 0.24, 0.52) this gives 3.9%",
        "# at 640.8 nm without enhancement and 3.4% at 637.4 nm with F_y = 1 + 0.224/0.24",
    ]


def main():
    rng = np.random.default_rng(SEED)
    DATA.mkdir(parents=True, exist_ok=True)
    for name, (sp, notes) in [
        ("mode_spectrum.csv", mode_spectrum(rng)),
        ("resonant_spectrum.csv", resonant_spectrum(rng)),
        ("ple_spectrum.csv", ple_spectrum(rng)),
        ("zpl_doublet.csv", zpl_doublet(rng)),
        ("odmr.csv", odmr_spectrum(rng)),
    ]:
        csvio.save_spectrum(sp, DATA / name, notes)
    tr, notes = rabi_trace(rng)
    csvio.save_trace(tr, DATA / "rabi.csv", notes)
    for name, tau in (("lifetime_off.csv", 9.0), ("lifetime_on.csv", 8.0)):
        tr, notes = lifetime_trace(rng, tau)
        csvio.save_trace(tr, DATA / name, notes)
    for name, i_inf, p_sat in (("saturation_off.csv", 13.6, 1.0),
                               ("saturation_on.csv", 37.5, 1.2)):
        p, y, notes = saturation(rng, i_inf, p_sat)
        csvio.save_saturation(p, y, DATA / name, notes)
    for name, (tr, notes) in zip(("readout_ms0.csv", "readout_ms1.csv"), readout_traces(rng)):
        csvio.save_trace(tr, DATA / name, notes)
    table, notes = efficiency_table()
    csvio.save_efficiency_table(table, DATA / "efficiency_table.csv", notes)


if __name__ == "__main__":
    main()
