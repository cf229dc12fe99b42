"""Decaying two-level Hamiltonian in dimensionless form and its adiabatic frame.

All energies are in units of the tunnelling element Delta and time is the
dimensionless ``u = v t / Delta``.  The pinned matrix is

    H(u) / Delta = [[ w(u)/2,  1/2              ],
                    [ 1/2,    -w(u)/2 - i*gamma ]]

so that the level which is upper at ``u -> -inf`` (level 2) carries the damping.
Functions accept scalars or numpy arrays of (possibly complex) ``u``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import (DegenerateModelError, DomainError, ExperimentalSweepWarning,
                     InvalidParameterError)

__all__ = [
    "PhysicalParams", "SweepProfile", "TlsModel", "HamiltonianMatrix", "AdiabaticFrame",
    "dimensionless_from_physical", "matrix_at", "adiabatic_eigen", "alpha_pm",
    "eigen_general", "alpha_general", "adiabatic_frame", "tail_expansion",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensionful inputs: coupling Delta, sweep rate v, damping gamma, hbar."""

    delta_coupling: float
    sweep_rate: float
    gamma: float = 0.0
    hbar: float = 1.0


def dimensionless_from_physical(p: PhysicalParams) -> tuple[float, float]:
    """Return ``(gamma_tilde, epsilon_tilde) = (gamma/Delta, Delta**2/(hbar v))``."""
    for name in ("delta_coupling", "sweep_rate", "hbar"):
        if not getattr(p, name) > 0:
            raise InvalidParameterError(f"{name} must be positive, got {getattr(p, name)!r}")
    if not p.gamma >= 0:
        raise InvalidParameterError(f"gamma must be non-negative, got {p.gamma!r}")
    return p.gamma / p.delta_coupling, p.delta_coupling ** 2 / (p.hbar * p.sweep_rate)


@dataclass(frozen=True)
class SweepProfile:
    """Polynomial bias ``w(u) = sum_k coefficients[k] * u**k``.

    Only crossing sweeps are accepted: ``w(0) = 0`` and an odd degree with a
    positive leading coefficient, so ``w(+-inf) = +-inf``.  Use the
    :meth:`power_law`, :meth:`linear` and :meth:`polynomial` constructors.
    """

    coefficients: tuple[float, ...]
    kind: str = "polynomial"
    exponent: int | None = None
    experimental: bool = field(default=False, compare=False)

    def __post_init__(self):
        c = tuple(float(x) for x in self.coefficients)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coefficients", c)
        deg = len(c) - 1
        if c[0] != 0.0:
            raise InvalidParameterError("sweep must satisfy w(0) = 0")
        if deg < 1 or deg % 2 == 0 or c[-1] <= 0:
            raise InvalidParameterError(
                "crossing sweep needs odd degree and positive leading coefficient")

    @classmethod
    def power_law(cls, n: int) -> "SweepProfile":
        n = int(n)
        if n < 1 or n % 2 == 0:
            raise InvalidParameterError(f"power-law exponent must be odd and positive, got {n}")
        return cls(tuple([0.0] * n + [1.0]), kind="linear" if n == 1 else "power_law", exponent=n)

    @classmethod
    def linear(cls) -> "SweepProfile":
        return cls.power_law(1)

    @classmethod
    def polynomial(cls, coefficients: Sequence[float]) -> "SweepProfile":
        """General crossing polynomial (ascending coefficients); flagged experimental."""
        prof = cls(tuple(coefficients))
        nz = [k for k, a in enumerate(prof.coefficients) if a != 0.0]
        if len(nz) == 1 and prof.coefficients[nz[0]] == 1.0:
            return cls.power_law(nz[0])
        warnings.warn("non power-law sweeps are experimental", ExperimentalSweepWarning,
                      stacklevel=2)
        object.__setattr__(prof, "experimental", True)
        return prof

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_power_law(self) -> bool:
        return self.exponent is not None

    def w(self, u):
        """Bias ``w(u)``; exact for complex ``u``."""
        return np.polynomial.polynomial.polyval(u, self.coefficients)

    def dw(self, u):
        """Derivative ``dw/du``."""
        return np.polynomial.polynomial.polyval(
            u, np.polynomial.polynomial.polyder(self.coefficients))

    def antiderivative_coefficients(self) -> tuple[float, ...]:
        """Coefficients of ``W(u) = int_0^u w``."""
        return tuple(np.polynomial.polynomial.polyint(self.coefficients))

    def W(self, u):
        return np.polynomial.polynomial.polyval(u, self.antiderivative_coefficients())

    def u_for_bias(self, target: float) -> float:
        """Smallest ``U > 0`` with ``w(u) >= target`` and ``w(-u) <= -target`` for all ``u >= U``."""
        if self.is_power_law:
            return float(target) ** (1.0 / self.exponent)
        u = 1.0
        while True:
            grid = np.linspace(u, 4 * u, 64)
            if (self.w(u) >= target and -self.w(-u) >= target
                    and np.all(self.dw(grid) > 0) and np.all(self.dw(-grid) > 0)):
                break
            u *= 1.5
        lo, hi = 0.0, u
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if min(self.w(mid), -self.w(-mid)) >= target:
                hi = mid
            else:
                lo = mid
        return hi


@dataclass(frozen=True)
class TlsModel:
    """Dimensionless model: sweep profile, damping ``gamma_tilde``, adiabaticity ``epsilon_tilde``."""

    sweep: SweepProfile
    gamma_tilde: float
    epsilon_tilde: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.gamma_tilde) or self.gamma_tilde < 0:
            raise InvalidParameterError(f"gamma_tilde must be >= 0, got {self.gamma_tilde!r}")
        if not np.isfinite(self.epsilon_tilde) or self.epsilon_tilde <= 0:
            raise InvalidParameterError(f"epsilon_tilde must be > 0, got {self.epsilon_tilde!r}")

    @classmethod
    def power_law(cls, n: int, gamma_tilde: float, epsilon_tilde: float = 1.0) -> "TlsModel":
        return cls(SweepProfile.power_law(n), float(gamma_tilde), float(epsilon_tilde))

    @property
    def delta(self) -> float:
        """Adiabaticity parameter ``1 / epsilon_tilde``."""
        return 1.0 / self.epsilon_tilde

    def with_epsilon(self, epsilon_tilde: float) -> "TlsModel":
        return replace(self, epsilon_tilde=float(epsilon_tilde))

    def zeta(self, u):
        """Shifted bias ``w(u) + i*gamma``."""
        return self.sweep.w(u) + 1j * self.gamma_tilde

    def radicand(self, u):
        """``(w(u) + i gamma)**2 + 1``; its zeros are the branch points."""
        z = self.zeta(u)
        return z * z + 1.0


@dataclass(frozen=True)
class HamiltonianMatrix:
    h11: complex
    h12: complex
    h21: complex
    h22: complex

    @property
    def trace(self):
        return self.h11 + self.h22

    @property
    def det(self):
        return self.h11 * self.h22 - self.h12 * self.h21

    def as_array(self) -> np.ndarray:
        return np.array([[self.h11, self.h12], [self.h21, self.h22]], dtype=complex)


@dataclass(frozen=True)
class AdiabaticFrame:
    u: complex
    e_plus: complex
    e_minus: complex
    alpha_plus: complex
    alpha_minus: complex


def matrix_at(m: TlsModel, u) -> HamiltonianMatrix:
    w = m.sweep.w(u)
    half = 0.5 + 0.0j
    return HamiltonianMatrix(0.5 * w + 0j, half, half, -0.5 * w - 1j * m.gamma_tilde)


def _sqrt_radicand(m: TlsModel, u):
    return np.sqrt(np.asarray(m.radicand(u), dtype=complex))


def adiabatic_eigen(m: TlsModel, u):
    """Closed-form ``E_pm(u) = (-i gamma +- sqrt((w + i gamma)**2 + 1)) / 2`` (principal root)."""
    s = _sqrt_radicand(m, u)
    base = -0.5j * m.gamma_tilde
    return base + 0.5 * s, base - 0.5 * s


def alpha_pm(m: TlsModel, u):
    """Component ratios ``alpha_pm = e2/e1 = -(w + i gamma) +- sqrt(...)`` of the right eigenvectors."""
    z = np.asarray(m.zeta(u), dtype=complex)
    s = np.sqrt(z * z + 1.0)
    return -z + s, -z - s


def eigen_general(h: HamiltonianMatrix):
    """Eigenvalues from trace and determinant: ``(T +- sqrt(T**2 - 4 D)) / 2``."""
    t, d = h.trace, h.det
    r = np.sqrt(np.asarray(t * t - 4.0 * d, dtype=complex))
    return 0.5 * (t + r), 0.5 * (t - r)


def alpha_general(h: HamiltonianMatrix):
    """Ratios ``(-H11 + H22 +- sqrt(T**2 - 4 D)) / (2 H12)`` for any 2x2 matrix."""
    h12 = np.asarray(h.h12, dtype=complex)
    if np.any(h12 == 0):
        raise DegenerateModelError("off-diagonal coupling H12 vanishes")
    t, d = h.trace, h.det
    r = np.sqrt(np.asarray(t * t - 4.0 * d, dtype=complex))
    return (-h.h11 + h.h22 + r) / (2 * h12), (-h.h11 + h.h22 - r) / (2 * h12)


def adiabatic_frame(m: TlsModel, u: complex) -> AdiabaticFrame:
    ep, em = adiabatic_eigen(m, u)
    ap, am = alpha_pm(m, u)
    return AdiabaticFrame(complex(u), complex(ep), complex(em), complex(ap), complex(am))


def tail_expansion(m: TlsModel, u: float, branch: int = +1) -> complex:
    """Large-``|w|`` expansion of ``E_branch(u)`` through order ``w**-2``.

    The branch that follows the bias (``E+`` for ``w > 0``, ``E-`` for ``w < 0``)
    is ``(w + 1/(2w) - i gamma/(2 w**2)) / 2``; the other one follows from
    ``E+ + E- = -i gamma``.
    """
    w = float(np.real(m.sweep.w(u)))
    if abs(w) < 10.0:
        raise DomainError(f"tail expansion needs |w(u)| >= 10, got {w:.3g}")
    if branch not in (+1, -1):
        raise InvalidParameterError("branch must be +1 or -1")
    g = m.gamma_tilde
    follow = 0.5 * (w + 1.0 / (2 * w) - 1j * g / (2 * w * w))
    if (branch > 0) == (w > 0):
        return complex(follow)
    return complex(-1j * g - follow)
