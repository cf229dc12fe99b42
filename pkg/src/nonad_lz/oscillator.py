"""Damped-oscillator picture of the transition region.

Freezing the bias at ``w = 0`` over the transit window ``|u| <= u_trans``
turns the amplitude equations into

    c1'' + 2 mu c1' + omega0**2 c1 = 0,   mu = eps gamma / 2,  omega0 = eps / 2,

with ``c1 = 1`` and ``c1' = 0`` at ``u = -u_trans``.  The survival probability
is estimated by ``|c1(+u_trans)|**2``; its zeros in ``eps`` approximate the
critical sweep rates of steep power-law sweeps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .ddp import CriticalSet, Source
from .errors import InvalidParameterError, RegimeError
from .model import TlsModel
from .propagate import PropagationSettings, exact_minima

__all__ = ["OscillatorParams", "OscillatorSolution", "ComparisonRow", "oscillator_params",
           "solve_oscillator", "critical_epsilons_osc", "compare_with_exact"]


@dataclass(frozen=True)
class OscillatorParams:
    """``mu``, ``omega0`` and ``big_omega = sqrt(|omega0**2 - mu**2|)``.

    ``regime`` is ``'underdamped'``, ``'critical'`` or ``'overdamped'``; in the
    last case ``big_omega`` is the real decay-rate split ``sqrt(mu**2 - omega0**2)``.
    """

    mu: float
    omega0: float
    big_omega: float
    regime: str


def oscillator_params(epsilon_tilde: float, gamma_tilde: float) -> OscillatorParams:
    eps, g = float(epsilon_tilde), float(gamma_tilde)
    if not eps > 0:
        raise InvalidParameterError("epsilon_tilde must be positive")
    if not g >= 0:
        raise InvalidParameterError("gamma_tilde must be >= 0")
    mu, w0 = 0.5 * eps * g, 0.5 * eps
    if g < 1:
        return OscillatorParams(mu, w0, w0 * math.sqrt(1 - g * g), "underdamped")
    if g == 1:
        return OscillatorParams(mu, w0, 0.0, "critical")
    return OscillatorParams(mu, w0, w0 * math.sqrt(g * g - 1), "overdamped")


@dataclass
class OscillatorSolution:
    params: OscillatorParams
    u_trans: float
    amplitude: Callable
    derivative: Callable
    p_estimate: float


def solve_oscillator(epsilon_tilde: float, gamma_tilde: float, *, u_trans: float = 1.0
                     ) -> OscillatorSolution:
    """Closed-form solution on ``[-u_trans, u_trans]``.

    Parameters
    ----------
    epsilon_tilde, gamma_tilde
        Adiabaticity and damping.
    u_trans
        Half-width of the transit window.  The default of 1 is the natural
        scale of the dimensionless time; other values are for sensitivity
        studies only.

    Returns
    -------
    OscillatorSolution
        ``amplitude(u)`` and ``derivative(u)`` evaluate ``c1`` and ``dc1/du``;
        ``p_estimate = |c1(u_trans)|**2``.
    """
    if not u_trans > 0:
        raise InvalidParameterError("u_trans must be positive")
    prm = oscillator_params(epsilon_tilde, gamma_tilde)
    mu, w0, om = prm.mu, prm.omega0, prm.big_omega

    if prm.regime == "underdamped":
        def amp(u):
            t = np.asarray(u) + u_trans
            return np.exp(-mu * t) * (np.cos(om * t) + (mu / om) * np.sin(om * t))

        def der(u):
            t = np.asarray(u) + u_trans
            return -(w0 * w0 / om) * np.exp(-mu * t) * np.sin(om * t)
    elif prm.regime == "critical":
        def amp(u):
            t = np.asarray(u) + u_trans
            return np.exp(-mu * t) * (1.0 + mu * t)

        def der(u):
            t = np.asarray(u) + u_trans
            return -mu * mu * t * np.exp(-mu * t)
    else:
        # written with decaying exponentials only, so large eps cannot overflow
        def amp(u):
            t = np.asarray(u) + u_trans
            slow, fast = np.exp(-(mu - om) * t), np.exp(-(mu + om) * t)
            return 0.5 * (1 + mu / om) * slow + 0.5 * (1 - mu / om) * fast

        def der(u):
            t = np.asarray(u) + u_trans
            slow, fast = np.exp(-(mu - om) * t), np.exp(-(mu + om) * t)
            return -(w0 * w0 / (2 * om)) * (slow - fast)

    c_end = float(amp(u_trans))
    return OscillatorSolution(prm, float(u_trans), amp, der, c_end * c_end)


def critical_epsilons_osc(gamma_tilde: float, nu_max: int) -> CriticalSet:
    """Zeros in ``eps`` of ``cos(eps b) + (gamma/b) sin(eps b)``, ``b = sqrt(1 - gamma**2)``.

    There is exactly one zero of ``eps b`` in each interval
    ``((nu - 1) pi, nu pi]``; it is refined with Brent's method.
    """
    g = float(gamma_tilde)
    if not 0 <= g < 1:
        raise RegimeError("oscillator zeros exist only for 0 <= gamma < 1")
    if int(nu_max) < 1:
        raise InvalidParameterError("nu_max must be >= 1")
    b = math.sqrt(1 - g * g)
    c = g / b

    def f(x):
        return math.cos(x) + c * math.sin(x)

    out = []
    for nu in range(1, int(nu_max) + 1):
        x = brentq(f, (nu - 1) * math.pi, nu * math.pi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        out.append(x / b)
    return CriticalSet(g, tuple(out), Source.OSCILLATOR)


@dataclass
class ComparisonRow:
    nu: int
    eps_osc: float
    eps_exact: float
    rel_diff: float
    found: bool


def compare_with_exact(n: int, gamma_tilde: float, nu_max: int, *,
                       eps_range: tuple[float, float] | None = None, samples: int = 128,
                       settings: PropagationSettings = PropagationSettings(),
                       depth_threshold: float = 1e3, workers: int = 1) -> list[ComparisonRow]:
    """Oscillator critical values next to the deep minima of the exact ``P(eps)``.

    The ``nu``-th oscillator value is paired with the ``nu``-th exact minimum
    (ascending).  Missing minima give rows with ``found=False`` and NaN entries.
    """
    osc = critical_epsilons_osc(gamma_tilde, nu_max).values
    if eps_range is None:
        eps_range = (0.25 * osc[0], 1.35 * osc[-1] + 1.0)
    mins = exact_minima(TlsModel.power_law(n, gamma_tilde), eps_range[0], eps_range[1], samples,
                        settings=settings, depth_threshold=depth_threshold, workers=workers)
    rows = []
    for nu, e_osc in enumerate(osc, start=1):
        if nu <= len(mins):
            e_ex = mins[nu - 1].epsilon
            rows.append(ComparisonRow(nu, e_osc, e_ex, abs(e_osc - e_ex) / e_ex, True))
        else:
            rows.append(ComparisonRow(nu, e_osc, float("nan"), float("nan"), False))
    return rows
