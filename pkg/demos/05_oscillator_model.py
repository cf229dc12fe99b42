"""
A damped oscillator in the transit region
=========================================

For very steep sweeps the bias is nearly zero for ``|u| < 1`` and jumps to
large values outside.  Freezing ``w = 0`` inside turns the amplitude equation
into a damped harmonic oscillator, whose zeros give the critical ``eps``.
"""
import numpy as np

from nonad_lz import compare_with_exact, critical_epsilons_osc, solve_oscillator

for g in (0.0, 0.4, 1.0, 1.5):
    s = solve_oscillator(3.0, g)
    print(f"gamma={g:3.1f}  regime={s.params.regime:11s}  |c1(1)|^2={s.p_estimate:.6f}")

print("\ncritical values, gamma=0:", np.round(critical_epsilons_osc(0.0, 3).values, 6))
print("critical values, gamma=0.4:", np.round(critical_epsilons_osc(0.4, 3).values, 6))

# %%
# The estimate improves as the sweep steepens.
for n in (5, 51):
    rows = compare_with_exact(n, 0.0, 3)
    print(f"\nn={n}")
    for r in rows:
        print(f"  nu={r.nu}  oscillator={r.eps_osc:.4f}  exact={r.eps_exact:.4f}  rel. diff={r.rel_diff:.3f}")
