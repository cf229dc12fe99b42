"""
Sweeps that are not pure powers
===============================

The branch-point machinery works for any odd crossing polynomial.  Branch
points are found by Newton's method and ``z_c`` by contour integration along
paths that avoid the other points.  Such sweeps are flagged experimental.
"""
import warnings

from nonad_lz import SweepProfile, TlsModel, branch_points_numeric, p_general, survival_probability

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    sweep = SweepProfile.polynomial([0.0, 0.2, 0.0, 1.0])  # w = 0.2 u + u**3

m = TlsModel(sweep, 0.3, 5.0)
for b in branch_points_numeric(m, (-3 - 3j, 3 + 3j), grid=31):
    print(f"{b.family.value:6s} u_c={b.u_c:.5f}  z_c={b.z_c:.5f}  contributes={b.contributes}")

for e in (3.0, 5.0, 8.0):
    me = m.with_epsilon(e)
    print(f"eps={e}:  exact={survival_probability(me).p:.4e}  branch-point sum={p_general(me).p:.4e}")
