"""Read-out signal-to-noise ratio and its enhancement on resonance."""

import math

from nvreadout import collection, snr

pair = snr.CountPair(100, 64)
print(f"SNR from counts: {snr.snr_counts(pair):.4f}")
print(f"SNR from contrast: {snr.snr_contrast(pair.n0, snr.contrast(pair)):.4f}")

for scenario in (collection.REFERENCE_ZPL_SCENARIO, collection.REFERENCE_BROADBAND_SCENARIO):
    ratio = collection.photon_ratio(scenario)
    zeta = snr.enhancement(ratio, scenario.contrast_ratio)
    exact = snr.enhancement_exact(ratio, scenario.contrast_ratio, c_off=0.042)
    print(f"{scenario.mode.value:>9}: N0*/N0 = {ratio:.3f}, zeta = {zeta:.4f} (exact {exact:.4f})")

# photon-counting check: the count difference has variance N0 + N1
mc = snr.monte_carlo(pair, trials=1_000_000, seed=1)
print(f"Monte Carlo: variance {mc.var_diff:.2f} (expected 164), "
      f"SNR {mc.empirical_snr:.4f} (expected {36 / math.sqrt(164):.4f})")
