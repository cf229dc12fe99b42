"""Exact numerical propagation of ``i dc/du = eps H(u) c`` for the decaying TLS.

The stepper is a Dormand-Prince 5(4) embedded pair compiled with numba; the
error norm runs over the four real components of ``(c1, c2)``.

Finite windows ``[-U, U]`` are closed with the adiabatic picture outside:

* the run starts in the adiabatic state that tends to ``|1>`` at ``-inf``,
  scaled by the decay it accumulates on ``(-inf, -U]``;
* at ``+U`` the state is projected on the adiabatic state that tends to
  ``|1>`` at ``+inf`` and scaled by the decay on ``[U, inf)``.

Both scalings are products of a dynamical factor (integral of ``Im E``) and a
geometrical factor (closed-form antiderivative in ``zeta = w + i gamma``).  Set
``adiabatic_ends=False`` for the bare protocol: start in ``|1>`` and read
``|c1(U)|**2``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numba
import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceError, InvalidParameterError
from .model import TlsModel
from .numerics import adaptive_quadrature, improper_tail

__all__ = [
    "PropagationSettings", "Trajectory", "SurvivalResult", "PMinimum",
    "evolve", "survival_probability", "window_convergence_report",
    "integrate_two_level", "probability_scan", "locate_minima", "exact_minima",
]

DIABATIC, INTERACTION = "diabatic", "interaction"


@dataclass(frozen=True)
class PropagationSettings:
    """Solver knobs.

    ``window_half_width=None`` picks the smallest ``U`` with ``|w(+-U)| >= bias_target``
    and ``|w'| / (eps w**2) <= adiabatic_tol`` at both edges; the second rule keeps
    steep sweeps from starting inside their own non-adiabatic region.
    ``picture=None`` uses the interaction picture for sweeps of degree >= 3 and
    the diabatic picture for linear sweeps.
    """

    window_half_width: float | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    picture: str | None = None
    plateau_tol: float = 1e-6
    max_steps: int = 5_000_000
    bias_target: float = 20.0
    adiabatic_ends: bool = True
    adiabatic_tol: float = 1e-3

    def __post_init__(self):
        if self.window_half_width is not None and not self.window_half_width > 0:
            raise InvalidParameterError("window_half_width must be positive")
        if not 0 < self.rel_tol <= 1e-3:
            raise InvalidParameterError("rel_tol must lie in (0, 1e-3]")
        if not self.abs_tol > 0:
            raise InvalidParameterError("abs_tol must be positive")
        if self.picture not in (None, DIABATIC, INTERACTION):
            raise InvalidParameterError(f"unknown picture {self.picture!r}")
        if not self.bias_target > 0:
            raise InvalidParameterError("bias_target must be positive")
        if not self.adiabatic_tol > 0:
            raise InvalidParameterError("adiabatic_tol must be positive")

    def resolved_picture(self, m: TlsModel) -> str:
        if self.picture is not None:
            return self.picture
        return INTERACTION if m.sweep.degree >= 3 else DIABATIC

    def window(self, m: TlsModel) -> float:
        if self.window_half_width is not None:
            return float(self.window_half_width)
        return max(m.sweep.u_for_bias(self.bias_target), _adiabatic_edge(m, self.adiabatic_tol))


def _adiabatic_edge(m: TlsModel, tol: float) -> float:
    """Smallest ``u`` beyond which ``|w'(+-u)| / (eps w(+-u)**2) <= tol``."""
    sw, eps = m.sweep, m.epsilon_tilde
    if sw.is_power_law:
        n = sw.exponent
        return (n / (eps * tol)) ** (1.0 / (n + 1))

    def bad(u):
        return max(abs(sw.dw(x)) / (eps * sw.w(x) ** 2) for x in (u, -u)) > tol

    hi = sw.u_for_bias(1.0)
    while bad(hi):
        hi *= 1.5
    lo = hi / 1.5
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if bad(mid) else (lo, mid)
    return hi


@dataclass
class Trajectory:
    """Diabatic amplitudes at every accepted step, ``u`` strictly increasing."""

    u: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    steps: int
    error_sum: float
    picture: str

    @property
    def samples(self):
        return list(zip(self.u, self.c1, self.c2))

    @property
    def population(self) -> np.ndarray:
        return np.abs(self.c1) ** 2 + np.abs(self.c2) ** 2


@dataclass
class SurvivalResult:
    p: float
    plateau_residual: float
    window_converged: bool
    steps_used: int
    window: float = float("nan")
    error_estimate: float = float("nan")
    p_doubled: float = float("nan")


# ---------------------------------------------------------------- kernel

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, 0] = 1 / 5
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
_B = _A[6].copy()
_E = _B - np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@numba.njit(cache=True)
def _horner(coef, u):
    acc = 0.0
    for k in range(coef.shape[0] - 1, -1, -1):
        acc = acc * u + coef[k]
    return acc


@numba.njit(cache=True)
def _rhs(u, y1, y2, eps, gamma, coef, acoef, interaction):
    if interaction:
        ph = np.exp(1j * eps * _horner(acoef, u))
        d1 = -0.5j * eps * y2 * ph
        d2 = -0.5j * eps * y1 / ph - eps * gamma * y2
    else:
        w = _horner(coef, u)
        d1 = -1j * eps * (0.5 * w * y1 + 0.5 * y2)
        d2 = -1j * eps * (0.5 * y1 + (-0.5 * w - 1j * gamma) * y2)
    return d1, d2


@numba.njit(cache=True)
def _dopri(y1, y2, u0, u1, eps, gamma, coef, acoef, interaction, rtol, atol, max_steps, h0,
           A, B, C, E):
    cap = 1024
    us = np.empty(cap)
    ys1 = np.empty(cap, dtype=np.complex128)
    ys2 = np.empty(cap, dtype=np.complex128)
    us[0] = u0
    ys1[0] = y1
    ys2[0] = y2
    n = 1
    k1 = np.empty(7, dtype=np.complex128)
    k2 = np.empty(7, dtype=np.complex128)
    u = u0
    h = h0
    steps = 0
    err_sum = 0.0
    a1, a2 = _rhs(u, y1, y2, eps, gamma, coef, acoef, interaction)
    k1[0] = a1
    k2[0] = a2
    while u < u1:
        if steps >= max_steps:
            return us[:n], ys1[:n], ys2[:n], steps, 1, err_sum
        if u + h > u1:
            h = u1 - u
        for s in range(1, 7):
            t1 = y1
            t2 = y2
            for j in range(s):
                t1 += h * A[s, j] * k1[j]
                t2 += h * A[s, j] * k2[j]
            a1, a2 = _rhs(u + C[s] * h, t1, t2, eps, gamma, coef, acoef, interaction)
            k1[s] = a1
            k2[s] = a2
        n1 = y1
        n2 = y2
        e1 = 0.0j
        e2 = 0.0j
        for j in range(7):
            n1 += h * B[j] * k1[j]
            n2 += h * B[j] * k2[j]
            e1 += h * E[j] * k1[j]
            e2 += h * E[j] * k2[j]
        sc = atol + rtol * max(abs(y1.real), abs(n1.real))
        acc = (e1.real / sc) ** 2
        sc = atol + rtol * max(abs(y1.imag), abs(n1.imag))
        acc += (e1.imag / sc) ** 2
        sc = atol + rtol * max(abs(y2.real), abs(n2.real))
        acc += (e2.real / sc) ** 2
        sc = atol + rtol * max(abs(y2.imag), abs(n2.imag))
        acc += (e2.imag / sc) ** 2
        err = math.sqrt(acc / 4.0)
        steps += 1
        if err <= 1.0:
            u = u + h if u + h < u1 else u1
            y1 = n1
            y2 = n2
            k1[0] = k1[6]
            k2[0] = k2[6]
            err_sum += max(abs(e1), abs(e2))
            if n >= cap:
                cap *= 2
                nu = np.empty(cap)
                n1s = np.empty(cap, dtype=np.complex128)
                n2s = np.empty(cap, dtype=np.complex128)
                nu[:n] = us[:n]
                n1s[:n] = ys1[:n]
                n2s[:n] = ys2[:n]
                us, ys1, ys2 = nu, n1s, n2s
            us[n] = u
            ys1[n] = y1
            ys2[n] = y2
            n += 1
        fac = 0.9 * err ** -0.2 if err > 0 else 5.0
        if err > 1.0:
            fac = min(fac, 1.0)
        h = h * min(5.0, max(0.2, fac))
        if h <= 1e-14 * max(1.0, abs(u)):
            return us[:n], ys1[:n], ys2[:n], steps, 2, err_sum
    return us[:n], ys1[:n], ys2[:n], steps, 0, err_sum


def integrate_two_level(m: TlsModel, c0: tuple[complex, complex], u0: float, u1: float, *,
                        picture: str = INTERACTION, rel_tol: float = 1e-10, abs_tol: float = 1e-13,
                        max_steps: int = 5_000_000, coefficients: Sequence[float] | None = None
                        ) -> Trajectory:
    """Integrate from ``u0`` to ``u1`` starting from diabatic amplitudes ``c0``.

    ``coefficients`` overrides the sweep polynomial (e.g. ``[0.0]`` for a frozen
    bias); the model's sweep is used otherwise.
    """
    coef = np.asarray(m.sweep.coefficients if coefficients is None else coefficients, dtype=float)
    acoef = np.polynomial.polynomial.polyint(coef) if coef.size else np.zeros(1)
    eps, gamma = float(m.epsilon_tilde), float(m.gamma_tilde)
    interaction = picture == INTERACTION
    y1, y2 = complex(c0[0]), complex(c0[1])
    if interaction:
        ph = np.exp(0.5j * eps * _horner(acoef, u0))
        y1, y2 = y1 * ph, y2 / ph
    wmax = max(abs(_horner(coef, u0)), abs(_horner(coef, u1)), 1.0)
    h0 = min(abs(u1 - u0), 0.01 / (eps * (wmax + gamma + 1.0)))
    us, a1, a2, steps, status, err_sum = _dopri(
        y1, y2, float(u0), float(u1), eps, gamma, coef, acoef, interaction,
        float(rel_tol), float(abs_tol), int(max_steps), h0, _A, _B, _C, _E)
    if status:
        raise ConvergenceError(
            "step budget exhausted" if status == 1 else "step size underflow",
            {"u_reached": float(us[-1]), "steps": int(steps), "target": float(u1),
             "epsilon_tilde": eps, "gamma_tilde": gamma})
    if interaction:
        ph = np.exp(-0.5j * eps * np.polynomial.polynomial.polyval(us, acoef))
        c1, c2 = a1 * ph, a2 / ph
    else:
        c1, c2 = a1, a2
    return Trajectory(us, c1, c2, int(steps), float(err_sum), picture)


# ---------------------------------------------------------------- adiabatic ends

def _final_integrand(m: TlsModel):
    """``-2 Im E+(u)`` for ``u > 0`` in cancellation-free form."""
    g = m.gamma_tilde

    def f(u):
        z = m.sweep.w(u) + 1j * g
        s = np.sqrt(z * z + 1.0)
        return -np.imag(1.0 / (z + s))
    return f


def _initial_integrand(m: TlsModel):
    """``-2 Im E-(-x)`` for ``x > 0``."""
    g = m.gamma_tilde

    def f(x):
        z = m.sweep.w(-x) + 1j * g
        s = np.sqrt(z * z + 1.0)
        return np.imag(1.0 / (s - z))
    return f


def _tail_integral(f, a: float, m: TlsModel) -> float:
    if m.gamma_tilde == 0.0:
        return 0.0
    return float(improper_tail(f, a, 2 * m.sweep.degree, tol=1e-13).value)


def _final_log_gain(m: TlsModel, u: float, t_plus: float) -> float:
    z = m.sweep.w(u) + 1j * m.gamma_tilde
    s = np.sqrt(z * z + 1.0)
    geo = 0.5 * math.log(2.0) + 0.5 * math.log(abs(s)) - 0.5 * math.log(abs(z + s))
    return -0.5 * m.epsilon_tilde * t_plus + geo


def _coupling(m: TlsModel, u, z, s):
    """Non-adiabatic coupling ``<v+~| d/du |v->`` = ``alpha_minus' / (alpha_plus - alpha_minus)``."""
    return -m.sweep.dw(u) * (s + z) / (2.0 * s * s)


def _initial_state(m: TlsModel, U: float):
    z = m.sweep.w(-U) + 1j * m.gamma_tilde
    s = np.sqrt(z * z + 1.0)
    alpha_minus = -1.0 / (s - z)
    alpha_plus = s - z
    t_minus = _tail_integral(_initial_integrand(m), U, m)
    geo = -0.5 * math.log(abs(s)) + 0.5 * math.log(abs(s - z)) - 0.5 * math.log(2.0)
    amp = math.exp(-0.5 * m.epsilon_tilde * t_minus + geo)
    # leakage into the other adiabatic state accumulated on (-inf, -U], first order
    amp_plus = -_coupling(m, -U, z, s) * amp / (1j * m.epsilon_tilde * s)
    return amp + amp_plus, amp * alpha_minus + amp_plus * alpha_plus


def _project_plus(m: TlsModel, u, c1, c2):
    """Amplitude on the adiabatic state that tends to ``|1>``, plus first-order leakage on ``[u, inf)``."""
    z = m.sweep.w(u) + 1j * m.gamma_tilde
    s = np.sqrt(z * z + 1.0)
    alpha_minus = -(z + s)
    alpha_plus = 1.0 / (z + s)
    a_plus = (c2 - alpha_minus * c1) / (2.0 * s)
    a_minus = (alpha_plus * c1 - c2) / (2.0 * s)
    return a_plus + _coupling(m, u, z, s) * a_minus / (1j * m.epsilon_tilde * s)


def evolve(m: TlsModel, s: PropagationSettings = PropagationSettings()) -> Trajectory:
    """Propagate across ``[-U, U]`` from the initial state fixed by ``s``."""
    U = s.window(m)
    c0 = _initial_state(m, U) if s.adiabatic_ends else (1.0 + 0j, 0j)
    return integrate_two_level(m, c0, -U, U, picture=s.resolved_picture(m), rel_tol=s.rel_tol,
                               abs_tol=s.abs_tol, max_steps=s.max_steps)


def _read_probability(m: TlsModel, s: PropagationSettings, traj: Trajectory):
    """Return ``(P, plateau_residual, error_estimate)`` for a finished trajectory."""
    U = traj.u[-1]
    if not s.adiabatic_ends:
        p = abs(traj.c1[-1]) ** 2
        sel = traj.u >= traj.u[0] + 0.95 * (U - traj.u[0])
        pops = np.abs(traj.c1[sel]) ** 2
        err = (2 * math.sqrt(p) + traj.error_sum) * traj.error_sum
        return float(p), float(np.ptp(pops)), float(err)
    f = _final_integrand(m)
    t_plus = _tail_integral(f, U, m)
    a = _project_plus(m, U, traj.c1[-1], traj.c2[-1])
    gain = math.exp(2 * _final_log_gain(m, U, t_plus))
    p = abs(a) ** 2 * gain
    # the same estimate at a few samples in the last tenth of the window
    idx = np.flatnonzero(traj.u >= 0.9 * U)
    idx = idx[np.linspace(0, len(idx) - 1, min(len(idx), 6)).astype(int)]
    ests = []
    for i in idx:
        ui = traj.u[i]
        extra = 0.0 if m.gamma_tilde == 0 else adaptive_quadrature(f, ui, U, tol=1e-14).value
        ai = _project_plus(m, ui, traj.c1[i], traj.c2[i])
        ests.append(abs(ai) ** 2 * math.exp(2 * _final_log_gain(m, ui, t_plus + extra)))
    resid = float(np.ptp(ests)) if ests else 0.0
    e = traj.error_sum
    err = (2 * abs(a) + e) * e * gain
    return float(p), resid, float(err)


def _doubled(m: TlsModel, s: PropagationSettings) -> PropagationSettings:
    # doubling the bias at the window edge: 2U for linear sweeps, milder for steep ones
    return replace(s, window_half_width=s.window(m) * 2.0 ** (1.0 / m.sweep.degree))


def survival_probability(m: TlsModel, s: PropagationSettings = PropagationSettings(), *,
                         check_window: bool = True) -> SurvivalResult:
    """Survival probability in ``|1>`` after the full sweep.

    With ``check_window`` the run is repeated on a window whose edge bias is
    doubled; ``window_converged`` requires both the repeat and the plateau
    residual to sit within ``plateau_tol``.
    """
    traj = evolve(m, s)
    p, resid, err = _read_probability(m, s, traj)
    res = SurvivalResult(p, resid, False, traj.steps, s.window(m), err)
    if check_window:
        s2 = _doubled(m, s)
        traj2 = evolve(m, s2)
        p2, _, _ = _read_probability(m, s2, traj2)
        res.p_doubled = p2
        res.window_converged = bool(abs(p2 - p) < s.plateau_tol and resid < s.plateau_tol)
    return res


def window_convergence_report(m: TlsModel, s: PropagationSettings = PropagationSettings()):
    """``(p_U, p_2U, |p_U - p_2U|)`` with the doubled-bias window of :func:`survival_probability`."""
    r = survival_probability(m, s, check_window=True)
    return r.p, r.p_doubled, abs(r.p - r.p_doubled)


# ---------------------------------------------------------------- scans

def _p_only(args):
    m, s = args
    return survival_probability(m, s, check_window=False).p


def probability_scan(m: TlsModel, eps_values: Sequence[float],
                     s: PropagationSettings = PropagationSettings(), *, workers: int = 1
                     ) -> np.ndarray:
    """Exact ``P`` for each ``epsilon_tilde``; order follows ``eps_values``."""
    jobs = [(m.with_epsilon(e), s) for e in eps_values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return np.array(list(ex.map(_p_only, jobs, chunksize=max(1, len(jobs) // (4 * workers)))))
    return np.array([_p_only(j) for j in jobs])


@dataclass
class PMinimum:
    epsilon: float
    p: float
    envelope: float
    depth: float


def locate_minima(eps: np.ndarray, p: np.ndarray, refine=None, *, xatol: float = 1e-7
                  ) -> list[PMinimum]:
    """Interior local minima of sampled ``P(eps)``.

    The envelope at a minimum interpolates the neighbouring local maxima
    linearly in ``log P``; ``depth = envelope / P_min``.  ``refine(eps) -> P``
    turns on a bounded Brent search (golden section with parabolic steps)
    between the grid neighbours.
    """
    eps = np.asarray(eps, float)
    p = np.asarray(p, float)
    idx = [i for i in range(1, len(p) - 1) if p[i] < p[i - 1] and p[i] <= p[i + 1]]
    maxima = [0] + [i for i in range(1, len(p) - 1) if p[i] >= p[i - 1] and p[i] > p[i + 1]] \
        + [len(p) - 1]
    out = []
    for i in idx:
        e_min, p_min = eps[i], p[i]
        if refine is not None:
            r = minimize_scalar(lambda e: math.log(max(refine(e), 1e-300)),
                                bounds=(eps[i - 1], eps[i + 1]), method="bounded",
                                options={"xatol": xatol})
            if math.exp(r.fun) < p_min:
                e_min, p_min = float(r.x), float(math.exp(r.fun))
        left = max(j for j in maxima if j < i)
        right = min(j for j in maxima if j > i)
        pl, pr = max(p[left], 1e-300), max(p[right], 1e-300)
        t = (e_min - eps[left]) / (eps[right] - eps[left])
        env = math.exp((1 - t) * math.log(pl) + t * math.log(pr))
        out.append(PMinimum(float(e_min), float(p_min), env, env / max(p_min, 1e-300)))
    return out


def exact_minima(m: TlsModel, eps_lo: float, eps_hi: float, samples: int = 128, *,
                 settings: PropagationSettings = PropagationSettings(), depth_threshold: float = 1e3,
                 log_spacing: bool = False, workers: int = 1) -> list[PMinimum]:
    """Complete-transition candidates of the exact ``P(eps)`` in ``[eps_lo, eps_hi]``.

    Keeps refined minima at least ``depth_threshold`` below the local envelope.
    """
    grid = (np.geomspace if log_spacing else np.linspace)(eps_lo, eps_hi, samples)
    p = probability_scan(m, grid, settings, workers=workers)

    def refine(e):
        return survival_probability(m.with_epsilon(e), settings, check_window=False).p

    return [mn for mn in locate_minima(grid, p, refine) if mn.depth >= depth_threshold]
