"""
Above critical damping
======================

For ``gamma > 1`` the branch points leave the upper half plane and a single
point on the real ``z`` axis remains.  The oscillations disappear and
``P = exp(-eps Fd_ns)`` with no geometric prefactor.
"""
import numpy as np

from nonad_lz import TlsModel, f_d_ns, p_overdamped, probability_scan

for g in (1.01, 1.1, 50.0, 500.0):
    m = TlsModel.power_law(3, g)
    eps = np.array([1.0, 3.0, 10.0])
    exact = probability_scan(m, eps)
    print(f"gamma={g:7.2f}  Fd_ns={f_d_ns(m):.6f}")
    for e, pe in zip(eps, exact):
        print(f"    eps={e:5.1f}  exact={pe:.5e}  asymptotic={p_overdamped(m.with_epsilon(e)).p:.5e}")

# %%
# The prefactor P_exact / exp(-eps Fd_ns) tends to 1, but slowly.
m = TlsModel.power_law(3, 1.1)
eps = np.array([3.0, 5.0, 10.0, 15.0, 25.0])
ratio = probability_scan(m, eps) / np.exp(-eps * f_d_ns(m))
print("\nprefactor at gamma=1.1:", dict(zip(eps, np.round(ratio, 4))))
