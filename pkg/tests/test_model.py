import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonad_lz import (PhysicalParams, SweepProfile, TlsModel, adiabatic_eigen, alpha_general,
                      alpha_pm, dimensionless_from_physical, eigen_general, matrix_at,
                      tail_expansion)
from nonad_lz.errors import (DegenerateModelError, DomainError, ExperimentalSweepWarning,
                             InvalidParameterError)
from nonad_lz.model import HamiltonianMatrix

gammas = st.sampled_from([0.0, 0.5, 1.5]) | st.floats(0, 5)
reals = st.floats(-5, 5)
odd_n = st.sampled_from([1, 3, 5, 7])


def test_physical_to_dimensionless():
    assert dimensionless_from_physical(PhysicalParams(2.0, 1.0, 0.0, 1.0)) == (0.0, 4.0)
    assert dimensionless_from_physical(PhysicalParams(1.0, 0.1, 1.0, 1.0)) == pytest.approx((1.0, 10.0))


@pytest.mark.parametrize("bad", [PhysicalParams(0.0, 1.0), PhysicalParams(1.0, -1.0),
                                 PhysicalParams(1.0, 1.0, -0.1), PhysicalParams(1.0, 1.0, 0.0, 0.0)])
def test_physical_rejects_bad_inputs(bad):
    with pytest.raises(InvalidParameterError):
        dimensionless_from_physical(bad)


def test_sweep_constructors():
    assert SweepProfile.linear().w(2.5) == 2.5
    assert SweepProfile.power_law(3).w(2.0) == 8.0
    assert SweepProfile.power_law(3).dw(2.0) == 12.0
    assert SweepProfile.power_law(3).w(1j) == pytest.approx(-1j)
    with pytest.raises(InvalidParameterError):
        SweepProfile.power_law(2)
    with pytest.raises(InvalidParameterError):
        SweepProfile.polynomial([1.0, 1.0])
    with pytest.raises(InvalidParameterError):
        SweepProfile.polynomial([0.0, 0.0, 1.0])
    with pytest.warns(ExperimentalSweepWarning):
        sw = SweepProfile.polynomial([0.0, 0.5, 0.0, 1.0])
    assert sw.experimental
    assert SweepProfile.polynomial([0, 0, 0, 1]).is_power_law


@pytest.mark.parametrize("n", [1, 3, 5])
def test_u_for_bias(n):
    sw = SweepProfile.power_law(n)
    u = sw.u_for_bias(20.0)
    assert sw.w(u) == pytest.approx(20.0)


def test_model_validation():
    with pytest.raises(InvalidParameterError):
        TlsModel.power_law(3, -0.1)
    with pytest.raises(InvalidParameterError):
        TlsModel.power_law(3, 0.1, 0.0)
    m = TlsModel.power_law(3, 0.2, 4.0)
    assert m.delta == 0.25
    assert m.with_epsilon(2.0).epsilon_tilde == 2.0


def test_matrix_examples():
    h = matrix_at(TlsModel.power_law(1, 0.0), 0.0)
    assert np.allclose(h.as_array(), [[0, 0.5], [0.5, 0]])
    h = matrix_at(TlsModel.power_law(1, 0.5), 0.0)
    assert np.allclose(h.as_array(), [[0, 0.5], [0.5, -0.5j]])
    h = matrix_at(TlsModel.power_law(3, 0.0), 2.0)
    assert h.h11 == 4 and h.h22 == -4


def test_eigen_examples():
    ep, em = adiabatic_eigen(TlsModel.power_law(1, 0.0), 0.0)
    assert (ep, em) == (0.5, -0.5)
    ep, em = adiabatic_eigen(TlsModel.power_law(1, 0.5), 0.0)
    assert ep == pytest.approx(0.4330127019 - 0.25j)
    assert em == pytest.approx(-0.4330127019 - 0.25j)
    ep, em = adiabatic_eigen(TlsModel.power_law(3, 0.0), 1.0)
    assert ep == pytest.approx(math.sqrt(2) / 2) and em == pytest.approx(-math.sqrt(2) / 2)


def test_alpha_examples():
    assert np.allclose(alpha_pm(TlsModel.power_law(1, 0.0), 0.0), (1, -1))
    ap, am = alpha_pm(TlsModel.power_law(1, 0.5), 0.0)
    assert ap == pytest.approx(0.8660254038 - 0.5j)
    assert am == pytest.approx(-0.8660254038 - 0.5j)


def test_alpha_general_rejects_zero_coupling():
    with pytest.raises(DegenerateModelError):
        alpha_general(HamiltonianMatrix(1.0, 0.0, 0.0, -1.0))


def test_tail_expansion_examples():
    m = TlsModel.power_law(1, 0.0)
    assert tail_expansion(m, 100.0, +1) == pytest.approx(50.0025, abs=1e-12)
    m = TlsModel.power_law(1, 0.4)
    assert tail_expansion(m, 100.0, +1).imag == pytest.approx(-1e-5, rel=1e-12)
    assert abs(tail_expansion(m, 100.0, +1) - adiabatic_eigen(m, 100.0)[0]) < 1e-5
    assert abs(tail_expansion(m, -100.0, -1) - adiabatic_eigen(m, -100.0)[1]) < 1e-5
    with pytest.raises(DomainError):
        tail_expansion(m, 5.0)


@given(odd_n, gammas, reals)
def test_trace_and_determinant(n, g, u):
    m = TlsModel.power_law(n, g)
    h = matrix_at(m, u)
    ep, em = adiabatic_eigen(m, u)
    scale = 1 + abs(h.det)
    assert abs(ep + em - h.trace) <= 1e-12 * (1 + abs(h.trace))
    assert abs(ep * em - h.det) <= 1e-12 * scale


@given(gammas, reals)
def test_ratio_product_and_residual(g, u):
    m = TlsModel.power_law(1, g)
    h = matrix_at(m, u)
    ep, em = adiabatic_eigen(m, u)
    ap, am = alpha_pm(m, u)
    assert abs(ap * am + 1) < 1e-12 * (1 + abs(ap * am))
    assert abs(h.h11 - ep + h.h12 * ap) < 1e-12 * (1 + abs(u))
    assert abs(h.h11 - em + h.h12 * am) < 1e-12 * (1 + abs(u))


@given(gammas, reals)
def test_closed_forms_match_general(g, u):
    m = TlsModel.power_law(1, g)
    h = matrix_at(m, u)
    closed, general = adiabatic_eigen(m, u), eigen_general(h)
    for a, b in zip(closed, general):
        assert abs(a - b) < 1e-12 * (1 + abs(a))
    for a, b in zip(alpha_pm(m, u), alpha_general(h)):
        assert abs(a - b) < 1e-12 * (1 + abs(a) + abs(u))


@given(odd_n, reals)
def test_sweep_is_odd(n, u):
    sw = SweepProfile.power_law(n)
    assert sw.w(-u) == -sw.w(u)


def test_principal_branch_on_real_axis():
    m = TlsModel.power_law(3, 0.0)
    u = np.linspace(-3, 3, 101)
    ep, em = adiabatic_eigen(m, u)
    assert np.all(ep.real > 0) and np.all(em.real < 0)
