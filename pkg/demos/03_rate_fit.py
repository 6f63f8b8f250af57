"""Extracting K_0, K_s and K_m from two read-out traces.

The traces were simulated at K_f = K_e = 111 MHz with 1% noise. Both
placements of the spin-mixing channel are fitted and the smaller residual
picks the better description.
"""

from nvreadout import data_path
from nvreadout.fitkit import compare_mixing_variants
from nvreadout.shell import csvio

t0 = csvio.load_trace(data_path("readout_ms0.csv"))
t1 = csvio.load_trace(data_path("readout_ms1.csv"))
comparison = compare_mixing_variants(t0, t1, k_f_fixed=111.0)
for name in ("radiative", "nonradiative"):
    r = getattr(comparison, name)
    rates = ", ".join(f"{k} = {r[k]:.3f} +- {r.stderr[k]:.3f}" for k in ("k_0", "k_s", "k_m"))
    print(f"{name:>12}: {rates} MHz, residual {r.residual_norm:.3f}")
print("preferred:", comparison.preferred.value)
