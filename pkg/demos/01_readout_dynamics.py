"""Spin read-out dynamics of the five-level NV model.

Starts from a spin-polarized ground state, switches the laser on and follows
how the two spin projections relax to a common steady state. The transient
difference in fluorescence is the read-out contrast; a Purcell-enhanced
optical decay shortens it.
"""

import numpy as np

from nvreadout import levels

rates = levels.REFERENCE_RATES
print("rates (MHz):", rates)

ss = levels.steady_state(rates)
print("steady-state populations (G0, G1, E0, E1, S):", np.round(ss.as_array(), 5))
print(f"steady-state fluorescence: {levels.steady_state_fluorescence(rates):.3f} MHz")

# fluorescence after preparing m_s = 0 and m_s = +-1
s0 = levels.readout_trace(rates, "ms0", levels.Ideal(), 3000.0, 1.0)
s1 = levels.readout_trace(rates, "ms1", levels.Ideal(), 3000.0, 1.0)
c = levels.contrast_trace(s0, s1, levels.steady_state_fluorescence(rates))
i = int(np.argmax(c.values))
print(f"peak contrast {c.values[i]:.4f} at {c.times[i]:.0f} ns")
print(f"relative difference after 3 us: {abs(s0.values[-1] - s1.values[-1]) / s0.values[-1]:.1e}")

# contrast in a 250 ns detection gate with and without a 9.0 ns -> 8.0 ns lifetime change
c_off = levels.gated_contrast(rates, gate_width=250.0)
c_on = levels.gated_contrast(rates.purcell_enhanced(9.0 / 8.0), gate_width=250.0)
print(f"gated contrast off/on resonance: {c_off:.4f} / {c_on:.4f}")
print(f"relative contrast reduction: {100 * (1 - c_on / c_off):.2f} %")

# the two propagators agree
start = levels.initialize(levels.Polarized(0.8), rates)
a = levels.evolve(start, rates, 100.0, method="eig").as_array()
b = levels.evolve(start, rates, 100.0, method="rk4").as_array()
print(f"eigen vs RK4 after 100 ns, max difference: {np.max(np.abs(a - b)):.1e}")
