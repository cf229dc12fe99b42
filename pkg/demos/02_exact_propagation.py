"""
Exact survival probability
==========================

The amplitudes obey ``i c' = eps H(u) c``.  The solver starts in the diabatic
state ``|1>`` far before the crossing and reads ``P = |c1|**2`` far after it.
Two checks accompany every result: the plateau of ``|c1|**2`` near the end,
and a repeat on a wider window.
"""
import math

import numpy as np

from nonad_lz import PropagationSettings, TlsModel, evolve, probability_scan, survival_probability

# %%
# Linear sweep: damping does not change P, which follows exp(-pi eps / 2).
for g in (0.0, 0.5, 2.0):
    r = survival_probability(TlsModel.power_law(1, g, 2.0))
    print(f"gamma={g:3.1f}  P={r.p:.10f}  exp(-pi)={math.exp(-math.pi):.10f}"
          f"  converged={r.window_converged}")

# %%
# A cubic sweep oscillates in eps: two crossings of the levels interfere.
eps = np.linspace(0.5, 10, 20)
p = probability_scan(TlsModel.power_law(3, 0.3), eps)
for e, v in zip(eps, p):
    print(f"eps={e:6.3f}  P={v:.3e}  " + "#" * int(max(0, 40 + 4 * math.log10(v))))

# %%
# Damping only removes population: the total norm never grows.
tr = evolve(TlsModel.power_law(3, 0.5, 3.0), PropagationSettings(adiabatic_ends=False))
print("\nlargest increase of |c1|^2 + |c2|^2:", np.max(np.diff(tr.population)))
print("steps:", tr.steps, "final norm:", tr.population[-1])
