"""
Asymptotic probability from branch points
=========================================

For large ``eps`` the survival probability is a sum over the branch points
above the real axis.  Each contributes ``exp(i eps z_c)``, with ``z_c`` the
integral of the level splitting from 0 to the branch point.  For a cubic sweep
below critical damping two points share the smallest ``Im z_c`` and interfere.
"""
import numpy as np

from nonad_lz import (TlsModel, critical_epsilons_ddp, f_d_ns, h_plus, p_general,
                      p_underdamped, probability_scan)

n, g = 3, 0.3
m = TlsModel.power_law(n, g)
print(f"h_plus = {h_plus(n, g):.12f}   Fd_ns = {f_d_ns(m):.12f}")

# %%
# Two-point formula next to the exact solver.
eps = np.array([3.0, 5.0, 6.0, 8.0, 9.0, 10.0])
exact = probability_scan(m, eps)
for e, pe in zip(eps, exact):
    pd = p_underdamped(n, g, e).p
    pg = p_general(m.with_epsilon(e)).p
    print(f"eps={e:4.1f}  exact={pe:.4e}  two-point={pd:.4e}  all points={pg:.4e}"
          f"  rel. gap={abs(pd - pe) / pe:.3f}")

# %%
# Zeros of the interference factor.  The first one lies below the range where
# the asymptotics is accurate; the later ones track the exact minima closely.
print("\ninterference zeros:", np.round(critical_epsilons_ddp(n, g, 3).values, 4))
