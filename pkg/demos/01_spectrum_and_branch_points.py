"""
Adiabatic levels and their branch points
========================================

A decaying two-level system swept through resonance has complex adiabatic
energies.  Their real parts repel near ``u = 0`` while the imaginary parts
swap the decay between the levels.  The points where the two levels meet lie
off the real axis; for a sweep ``w = u**n`` they sit on two circles.
"""
import numpy as np

from nonad_lz import TlsModel, adiabatic_eigen, branch_points_closed, branch_points_numeric

m = TlsModel.power_law(3, 0.5)

# %%
# The levels along the real time axis.  ``E+ + E- = -i gamma`` at every u.
u = np.linspace(-1.5, 1.5, 7)
ep, em = adiabatic_eigen(m, u)
print("     u      Re E+     Im E+     Re E-     Im E-")
for row in zip(u, ep.real, ep.imag, em.real, em.imag):
    print("  ".join(f"{v:8.4f}" for v in row))

# %%
# Branch points: closed form against Newton's method on a seed grid.
closed = branch_points_closed(3, 0.5)
newton = branch_points_numeric(m)
print("\nfamily k      u_c                      z_c                  contributes")
for c, b in zip(closed, newton):
    print(f"{c.family.value:6s} {c.k}  {c.u_c:.6f}  {c.z_c:.6f}  {c.contributes}"
          f"   |du| = {abs(c.u_c - b.u_c):.1e}")

radii = sorted({round(abs(b.u_c), 10) for b in newton})
print("\ncircle radii:", radii, "expected", [0.5 ** (1 / 3), 1.5 ** (1 / 3)])
