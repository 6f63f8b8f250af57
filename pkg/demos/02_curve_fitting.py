"""Reducing spectra and traces with the built-in curve models.

Every data set here is one of the synthetic fixtures shipped with the
package; their headers record how they were generated.
"""

from nvreadout import cavity, data_path
from nvreadout.fitkit import (
    fit_double_exponential,
    fit_gaussian,
    fit_lorentzian,
    fit_odmr,
    fit_rabi,
    fit_saturation,
)
from nvreadout.shell import csvio

ple = csvio.load_spectrum(data_path("ple_spectrum.csv"))
r = fit_lorentzian(ple)
print(f"PLE line: center {r['center']:.3f} nm, fwhm {r['fwhm']:.4f} nm "
      f"= {cavity.fwhm_nm_to_ghz(r['fwhm'], r['center']):.0f} GHz")

doublet = csvio.load_spectrum(data_path("zpl_doublet.csv"))
r = fit_gaussian(doublet, components=2)
print(f"ZPL doublet: fwhm {r['fwhm1']:.1f} and {r['fwhm2']:.1f} GHz, "
      f"splitting {r['center2'] - r['center1']:.1f} GHz")

odmr = csvio.load_spectrum(data_path("odmr.csv"))
r = fit_odmr(odmr)
print(f"ODMR dips at {r['center1']:.4f} and {r['center2']:.4f} GHz")

rabi = csvio.load_trace(data_path("rabi.csv"))
r = fit_rabi(rabi)
print(f"Rabi: period {r['period']:.1f} ns, pi-pulse {r.derived['pi_time']:.1f} ns")

for name in ("lifetime_off.csv", "lifetime_on.csv"):
    r = fit_double_exponential(csvio.load_trace(data_path(name)))
    print(f"{name}: tau1 {r['tau1']:.3f} ns, tau2 {r['tau2']:.3f} ns")

i_inf = []
for name in ("saturation_off.csv", "saturation_on.csv"):
    power, counts, _ = csvio.load_saturation(data_path(name))
    r = fit_saturation(power, counts)
    i_inf.append(r["i_inf"])
    print(f"{name}: i_inf {r['i_inf']:.2f} kHz, p_sat {r['p_sat']:.2f} mW")
print(f"saturated count-rate gain on resonance: {i_inf[1] / i_inf[0]:.2f}")
