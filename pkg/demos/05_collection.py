"""Collection efficiency of an emitter whose y-dipole couples to the cavity.

Per-orientation efficiencies come from a table (normally an FDTD export);
the Purcell factor on the y-axis reweights the emission towards that dipole.
"""

import numpy as np

from nvreadout import collection, data_path
from nvreadout.shell import csvio

table = csvio.load_efficiency_table(data_path("efficiency_table.csv"))
weights = collection.REFERENCE_WEIGHTS

for label, purcell, wl in (("off resonance", (1, 1, 1), 640.8),
                           ("on resonance", (1, 1 + 0.224 / 0.24, 1), 637.4)):
    rates = collection.effective_rates(111.0, weights, purcell)
    w = collection.emission_fractions(rates)
    eff = collection.combined_efficiency(table, w, wl)
    print(f"{label:>14} at {wl} nm: fractions {np.round(w, 4)}, efficiency {100 * eff:.2f} %")

print("uniform in-plane average for a <111> dipole:",
      collection.inplane_dipole_weights([1, 1, 1]).as_array())
print(f"photon ratio, ZPL only:  {collection.photon_ratio(collection.REFERENCE_ZPL_SCENARIO):.3f}")
print(f"photon ratio, broadband: {collection.photon_ratio(collection.REFERENCE_BROADBAND_SCENARIO):.3f}")
