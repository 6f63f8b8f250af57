"""Cavity figures of merit: Q-factor, beta-factor, Purcell factor and tuning."""

from nvreadout import cavity, data_path
from nvreadout.shell import csvio

mode = cavity.mode_fit_from_spectrum(csvio.load_spectrum(data_path("mode_spectrum.csv")))
print(f"mode at {mode.center:.2f} nm, fwhm {mode.fwhm:.4f} nm, Q = {cavity.q_factor(mode.center, mode.fwhm):.0f}")

# on resonance, the Lorentzian share of the emission gives beta and the Purcell factor
res = cavity.mode_fit_from_spectrum(csvio.load_spectrum(data_path("resonant_spectrum.csv")))
beta = cavity.beta_from_spectrum(res)
print(f"beta = {beta:.3f}, 1 + F = {1 + cavity.purcell_from_beta(beta):.3f}")
print(f"lifetime ratio 9.0 ns / 8.0 ns = {cavity.lifetime_ratio(9.0, 8.0):.3f}")

# expected enhancement for a broad emitter in a Q = 2021, V = 0.35 (lambda/n)^3 cavity
params = cavity.CavityParams(2021, 0.35, 637.4, 360.0, 0.021)
f_zpl, total = cavity.predict_purcell(params)
print(f"effective Q {cavity.effective_q(params):.0f}, ZPL Purcell {f_zpl:.1f}, total {total:.2f}")

for current, target in ((634.0, 637.4), (646.0, 634.0)):
    plan = cavity.tuning_plan(current, target, red_rate=1.8, blue_sensitivity=2.4)
    print(f"{current} -> {target} nm: {plan}")
