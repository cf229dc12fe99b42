import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from nonad_lz.errors import DivergenceError, PathError
from nonad_lz.numerics import (adaptive_quadrature, bracket_real_roots, complex_newton_roots,
                               continue_sqrt_along, contour_integral, improper_tail)


def test_quarter_circle():
    r = adaptive_quadrature(lambda x: np.sqrt(np.maximum(1 - x * x, 0.0)), 0.0, 1.0, tol=1e-12,
                            endpoint_sqrt="b")
    assert r.converged
    assert abs(r.value - math.pi / 4) < 1e-12


def test_constant_is_exact():
    r = adaptive_quadrature(lambda x: np.ones_like(x), 0.0, 1.0)
    assert r.value == pytest.approx(1.0, abs=1e-15)


def test_reversed_limits_and_empty_interval():
    f = np.exp
    assert adaptive_quadrature(f, 1.0, 0.0).value == pytest.approx(-(math.e - 1), rel=1e-12)
    assert adaptive_quadrature(f, 2.0, 2.0).value == 0.0


def test_inverse_sqrt_endpoint_singularity():
    r = adaptive_quadrature(lambda x: 1 / np.sqrt(x), 0.0, 1.0, tol=1e-12, endpoint_sqrt="a")
    assert r.value == pytest.approx(2.0, abs=1e-11)


def test_h_integrand_against_beta():
    # int_0^1 sqrt(1 - x**6) dx, the gamma = 0 area under the n = 3 branch-point profile
    r = adaptive_quadrature(lambda x: np.sqrt(np.maximum(1 - x ** 6, 0.0)), 0.0, 1.0, tol=1e-13,
                            endpoint_sqrt="b")
    beta = special.beta(1 / 6, 3 / 2) / 6
    assert abs(r.value - beta) < 1e-8
    assert abs(r.value - 0.9108) < 1e-4


def test_non_convergence_is_flagged():
    r = adaptive_quadrature(lambda x: np.sin(1 / np.maximum(x, 1e-300)), 0.0, 1.0, tol=1e-15,
                            max_subdivisions=20)
    assert not r.converged


@given(st.sampled_from([1e-6, 1e-8, 1e-10, 1e-12]))
def test_tighter_tolerance_does_not_grow_error(tol):
    f = lambda x: np.sqrt(np.maximum(1 - x * x, 0.0))  # noqa: E731
    loose = adaptive_quadrature(f, 0.0, 1.0, tol=tol, endpoint_sqrt="b")
    tight = adaptive_quadrature(f, 0.0, 1.0, tol=tol / 2, endpoint_sqrt="b")
    assert tight.error_estimate <= loose.error_estimate


def test_improper_tail_power_law():
    r = improper_tail(lambda u: 1.0 / np.asarray(u) ** 2, 10.0, 2)
    assert r.value == pytest.approx(0.1, rel=1e-6)


def test_improper_tail_rejects_slow_decay():
    with pytest.raises(DivergenceError):
        improper_tail(lambda u: 1.0 / np.asarray(u), 10.0, 1)


def test_improper_tail_dynamical_integrand():
    # n = 3, gamma = 1.1 integrand beyond |w| = 50; the tail itself is O(1e-4),
    # what must be small is the uncertainty left after the fitted remainder
    g = 1.1

    def f(u):
        z = np.asarray(u) ** 3 + 1j * g
        return (-1.0 / (z + np.sqrt(z * z + 1.0))).imag

    a = 50.0 ** (1 / 3)
    r = improper_tail(f, a, 6, 1e-13)
    ref, _ = integrate.quad(f, a, np.inf, epsabs=1e-15, limit=200)
    assert r.error_estimate < 1e-8
    assert abs(r.value - ref) < 1e-8


def test_newton_unit_circle():
    seeds = np.exp(1j * np.linspace(0.1, 2 * np.pi, 12))
    roots = complex_newton_roots(lambda u: u * u + 1, lambda u: 2 * u, seeds)
    assert sorted(roots, key=lambda r: r.imag) == pytest.approx([-1j, 1j])


def test_newton_six_roots():
    g = lambda u: (u ** 3 + 0.5j) ** 2 + 1  # noqa: E731
    dg = lambda u: 6 * u ** 2 * (u ** 3 + 0.5j)  # noqa: E731
    xs = np.linspace(-2, 2, 21)
    roots = complex_newton_roots(g, dg, (xs[None, :] + 1j * xs[:, None]).ravel(), tol=1e-12)
    assert len(roots) == 6
    radii = sorted(abs(r) for r in roots)
    assert radii[:3] == pytest.approx([0.5 ** (1 / 3)] * 3, abs=1e-10)
    assert radii[3:] == pytest.approx([1.5 ** (1 / 3)] * 3, abs=1e-10)


def test_newton_dedup_and_empty():
    roots = complex_newton_roots(lambda u: u - 1, lambda u: np.ones_like(u), [0.3, 0.3, 0.3])
    assert roots == [1.0]
    assert complex_newton_roots(lambda u: u * 0 + 1, lambda u: u * 0 + 1, [0.0, 1.0]) == []


def test_continuation_towards_branch_point():
    eps = 1e-3
    cont = continue_sqrt_along([0j, 1j * (1 - eps)], lambda u: u * u + 1)
    t = np.linspace(0, 1, 401)
    y = (1 - eps) * t
    assert np.allclose(cont.sqrt_at(t), np.sqrt(1 - y * y), rtol=0, atol=1e-13)


def test_continuation_through_branch_point_raises():
    with pytest.raises(PathError):
        continue_sqrt_along([0j, 2j - 1e-3j], lambda u: u * u + 1)


def test_continuation_round_the_branch_point():
    # go around +i on the right; the continued root must match sqrt(1 + u**2) analytically
    path = [0j, 0.5 + 0.5j, 0.5 + 1.5j, 1.9j]
    cont = continue_sqrt_along(path, lambda u: u * u + 1)
    t = np.linspace(0, len(path) - 1, 301)
    s = cont.sqrt_at(t)
    assert np.max(np.abs(np.diff(s))) < 0.1
    # near the end the value equals the analytic continuation of sqrt(1+u^2) = sqrt(u-i) sqrt(u+i)
    u = cont.point(t[-1])
    assert s[-1] == pytest.approx(np.sqrt(u - 1j) * np.sqrt(u + 1j), rel=1e-12)


def test_continuation_constant_radicand():
    cont = continue_sqrt_along([0j, 1 + 1j, -2 + 0.5j], lambda u: np.ones_like(u), start_branch=-1)
    assert np.all(cont.sqrt_at(np.linspace(0, 2, 50)) == -1)


def test_contour_integral_quarter_circle():
    cont = continue_sqrt_along([0j, 1j], lambda u: u * u + 1)
    r = contour_integral(cont, lambda u, s: s)
    assert abs(r.value - 1j * math.pi / 4) < 1e-8


def test_bracket_roots():
    assert bracket_real_roots(np.cos, 0.0, 10.0) == pytest.approx([math.pi / 2, 3 * math.pi / 2,
                                                                   5 * math.pi / 2], abs=1e-10)
    assert bracket_real_roots(lambda x: x + 1.0, 0.0, 10.0) == []


def test_bracket_oscillator_condition():
    roots = bracket_real_roots(lambda e: math.cos(e), 0.0, 8.0)
    assert roots == pytest.approx([(2 * nu - 1) * math.pi / 2 for nu in (1, 2, 3)], abs=1e-10)
