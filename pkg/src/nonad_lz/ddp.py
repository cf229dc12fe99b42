"""Generalized DDP asymptotics for the decaying two-level system.

The transition probability is assembled as

    P = exp(-(Fg_ns + eps Fd_ns)) * |sum_k exp(Fg_s(k)) exp(i eps z_c(k))|**2

from the branch points ``u_c`` of ``E+ - E-``, their images
``z_c = int_0^{u_c} (E+ - E-) du`` and the nonsingular geometrical (``Fg_ns``)
and dynamical (``Fd_ns``) factors.  Closed forms for power-law sweeps
``w = u**n`` sit next to generic quadrature/contour routes so that each can be
checked against the other.

Conventions
-----------
Branch points of ``w = u**n`` come in two families, labelled by the value of
``zeta_c = w(u_c) + i gamma``: ``plus`` for ``zeta_c = +i`` and ``minus`` for
``zeta_c = -i``.  For ``gamma < 1``::

    u_c^+(k) =  (1 - gamma)**(1/n) exp(i theta_k)
    u_c^-(k) = -(1 + gamma)**(1/n) exp(i theta_k)

and for ``gamma > 1`` both families lie on the rays ``-exp(i theta_k)`` with
radii ``(gamma -+ 1)**(1/n)``; ``theta_k = pi/(2n) + 2 pi k/n``.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import (BranchAmbiguityWarning, CriticalDampingError, DomainError, EmptySumError,
                     InvalidParameterError, PathError, RegimeError)
from .model import SweepProfile, TlsModel
from .numerics import (adaptive_quadrature, complex_newton_roots, contour_integral,
                       continue_sqrt_along, improper_tail)

__all__ = [
    "Family", "Regime", "Source", "BranchPoint", "DdpBreakdown", "CriticalSet",
    "branch_points_closed", "branch_points_numeric", "h_plus", "h_minus",
    "z_at_branch", "z_closed", "z_map", "z_along", "f_g_ns_closed", "f_g_ns_numeric", "f_d_ns",
    "f_g_s", "p_underdamped", "p_linear", "p_overdamped", "p_general", "p_ddp",
    "critical_epsilons_ddp",
]


class Family(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


class Regime(str, Enum):
    UNDERDAMPED = "underdamped"
    LINEAR = "linear"
    OVERDAMPED = "overdamped"


class Source(str, Enum):
    DDP = "ddp"
    OSCILLATOR = "oscillator"
    EXACT_SCAN = "exact_scan"


@dataclass(frozen=True)
class BranchPoint:
    """A zero of ``(w(u) + i gamma)**2 + 1`` with its image in the z-plane."""

    u_c: complex
    z_c: complex
    family: Family
    k: int
    upper_half_u: bool
    contributes: bool


@dataclass
class DdpBreakdown:
    """Factors entering the asymptotic probability.

    ``contributions`` holds ``(z_c, f_g_s)`` for every point kept in the sum.
    ``dominance_gap`` is the distance in ``Im z`` between the smallest level and
    the next one (``inf`` when only one level exists).
    """

    f_g_ns: float
    f_d_ns: float
    contributions: list[tuple[complex, complex]]
    p: float
    regime: Regime
    epsilon_tilde: float = float("nan")
    gamma_tilde: float = float("nan")
    dominance_gap: float = float("inf")
    notes: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class CriticalSet:
    gamma_tilde: float
    values: tuple[float, ...]
    source: Source

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if np.any(v <= 0) or np.any(np.diff(v) <= 0):
            raise InvalidParameterError("critical values must be positive and strictly increasing")


# ---------------------------------------------------------------- helpers

def _check_n(n) -> int:
    n = int(n)
    if n < 1 or n % 2 == 0:
        raise InvalidParameterError(f"n must be an odd positive integer, got {n}")
    return n


def _theta(n: int, k: int) -> float:
    return math.pi / (2 * n) + 2 * math.pi * k / n


def _is_power_law(m: TlsModel) -> bool:
    return m.sweep.is_power_law


# ---------------------------------------------------------------- h integrals

@lru_cache(maxsize=1024)
def h_plus(n: int, gamma_tilde: float) -> float:
    """``int_0^{(1-gamma)**(1/n)} sqrt(1 - (gamma + x**n)**2) dx`` for ``0 <= gamma < 1``."""
    n, g = _check_n(n), float(gamma_tilde)
    if not 0 <= g < 1:
        raise DomainError(f"h_plus needs 0 <= gamma < 1, got {g}")
    top = (1 - g) ** (1 / n)
    r = adaptive_quadrature(lambda x: np.sqrt(np.maximum(1 - (g + x ** n) ** 2, 0.0)), 0.0, top,
                            tol=1e-13, endpoint_sqrt="b")
    return float(r.value)


@lru_cache(maxsize=1024)
def h_minus(n: int, gamma_tilde: float) -> float:
    """``int_0^{(1+gamma)**(1/n)} sqrt(1 - (gamma - x**n)**2) dx`` for ``0 <= gamma < 1``."""
    n, g = _check_n(n), float(gamma_tilde)
    if not 0 <= g < 1:
        raise DomainError(f"h_minus needs 0 <= gamma < 1, got {g}")
    top = (1 + g) ** (1 / n)
    r = adaptive_quadrature(lambda x: np.sqrt(np.maximum(1 - (g - x ** n) ** 2, 0.0)), 0.0, top,
                            tol=1e-13, endpoint_sqrt="b")
    return float(r.value)


@lru_cache(maxsize=1024)
def _overdamped_integrals(n: int, g: float) -> tuple[float, float]:
    # g_in: along the ray up to the inner point, where the radicand is negative
    # q_out: between inner and outer point, where it is positive again
    r_in, r_out = (g - 1) ** (1 / n), (g + 1) ** (1 / n)
    g_in = adaptive_quadrature(lambda x: np.sqrt(np.maximum((g - x ** n) ** 2 - 1, 0.0)),
                               0.0, r_in, tol=1e-13, endpoint_sqrt="b").value
    q_out = adaptive_quadrature(lambda x: np.sqrt(np.maximum(1 - (g - x ** n) ** 2, 0.0)),
                                r_in, r_out, tol=1e-13, endpoint_sqrt="both").value
    return float(g_in), float(q_out)


# ---------------------------------------------------------------- branch points

def _contributes(gamma: float, u_c: complex, z_c: complex) -> bool:
    if gamma < 1:
        return u_c.imag > 0
    # above critical damping only the point imaged onto the real z axis is kept
    return abs(z_c.imag) <= 1e-9 * max(1.0, abs(z_c))


def z_closed(n: int, gamma_tilde: float, family: Family, k: int) -> complex:
    """Closed-form ``z_c`` of a power-law branch point.

    For ``gamma > 1`` the outer (``minus``) points are reached around the inner
    point on the same ray, passing it on the left of the outward direction.
    """
    n, g = _check_n(n), float(gamma_tilde)
    e = cmath.exp(1j * _theta(n, k))
    if g < 1:
        return complex(h_plus(n, g) * e) if family == Family.PLUS else complex(-h_minus(n, g) * e)
    if g == 1:
        raise CriticalDampingError("branch-point families merge at gamma = 1")
    g_in, q_out = _overdamped_integrals(n, g)
    if family == Family.PLUS:
        return complex(-e * 1j * g_in)
    return complex(-e * (1j * g_in + q_out))


def branch_points_closed(n: int, gamma_tilde: float) -> list[BranchPoint]:
    """All ``2n`` branch points of ``w = u**n``, plus family first, each ordered by ``k``."""
    n, g = _check_n(n), float(gamma_tilde)
    if g < 0:
        raise InvalidParameterError("gamma_tilde must be >= 0")
    if g == 1:
        raise CriticalDampingError("at gamma = 1 the inner branch points sit at u = 0")
    out = []
    for fam in (Family.PLUS, Family.MINUS):
        for k in range(n):
            e = cmath.exp(1j * _theta(n, k))
            if g < 1:
                u = (1 - g) ** (1 / n) * e if fam == Family.PLUS else -(1 + g) ** (1 / n) * e
            else:
                u = -(g - 1) ** (1 / n) * e if fam == Family.PLUS else -(g + 1) ** (1 / n) * e
            z = z_closed(n, g, fam, k)
            out.append(BranchPoint(complex(u), z, fam, k, u.imag > 0, _contributes(g, u, z)))
    return out


def _label(m: TlsModel, u: complex) -> tuple[Family, int]:
    fam = Family.PLUS if (m.sweep.w(u) + 1j * m.gamma_tilde).imag > 0 else Family.MINUS
    if not _is_power_law(m):
        return fam, -1
    n = m.sweep.exponent
    ray = u if (fam == Family.PLUS and m.gamma_tilde < 1) else -u
    k = int(round((cmath.phase(ray) - math.pi / (2 * n)) * n / (2 * math.pi))) % n
    return fam, k


def branch_points_numeric(m: TlsModel, search_box: tuple[complex, complex] = (-2 - 2j, 2 + 2j),
                          *, grid: int = 21) -> list[BranchPoint]:
    """Branch points by Newton iteration on ``(w + i gamma)**2 + 1``.

    Seeds form a ``grid x grid`` lattice over ``search_box``; roots reached
    from those seeds are kept even if they lie outside it. images ``z_c`` come from
    :func:`z_at_branch`.  Returns an empty list (with a warning) when no seed
    converges.
    """
    lo, hi = complex(search_box[0]), complex(search_box[1])
    xs = np.linspace(lo.real, hi.real, grid)
    ys = np.linspace(lo.imag, hi.imag, grid)
    seeds = (xs[None, :] + 1j * ys[:, None]).ravel()
    sw, g = m.sweep, m.gamma_tilde

    def f(u):
        z = sw.w(u) + 1j * g
        return z * z + 1.0

    def df(u):
        return 2.0 * (sw.w(u) + 1j * g) * sw.dw(u)

    roots = complex_newton_roots(f, df, seeds, tol=1e-12)
    if not roots:
        warnings.warn("no Newton seed converged to a branch point", RuntimeWarning, stacklevel=2)
        return []
    labelled = []
    for r in roots:
        fam, k = _label(m, r)
        labelled.append((r, fam, k))
    if not _is_power_law(m):
        for fam in Family:
            same = sorted((x for x in labelled if x[1] == fam), key=lambda x: cmath.phase(x[0]) % (2 * math.pi))
            for j, x in enumerate(same):
                labelled[labelled.index(x)] = (x[0], fam, j)
    others = [r for r, _, _ in labelled]
    out = []
    for r, fam, k in labelled:
        z = z_at_branch(m, r, obstacles=others)
        out.append(BranchPoint(r, z, fam, k, r.imag > 0, _contributes(g, r, z)))
    out.sort(key=lambda b: (b.family != Family.PLUS, b.k, b.u_c.real, b.u_c.imag))
    return out


# ---------------------------------------------------------------- z mapping

def z_along(m: TlsModel, path, *, ends_on_branch: bool = True, tol: float = 1e-12) -> complex:
    """``int (E+ - E-) du`` along a polyline from ``path[0]``, root continued from the principal value."""
    cont = continue_sqrt_along(path, m.radicand, +1)
    return complex(contour_integral(cont, lambda u, s: s, tol, sqrt_at_end=ends_on_branch).value)


def z_map(m: TlsModel, u) -> complex:
    """``z(u) = int_0^u (E+ - E-)`` along the straight segment from 0."""
    u = complex(u)
    if u == 0:
        return 0j
    return z_along(m, [0j, u], ends_on_branch=False)


def _dist_to_segment(p: complex, a: complex, b: complex) -> tuple[float, float]:
    d = b - a
    t = ((p - a) * d.conjugate()).real / abs(d) ** 2
    return abs(p - (a + min(max(t, 0.0), 1.0) * d)), t


def _path_to(m: TlsModel, u_c: complex, obstacles) -> list[complex]:
    """Straight path ``0 -> u_c``, with a left-hand detour around any branch point on it."""
    path = [0j]
    d = u_c / abs(u_c)
    hits = []
    for o in obstacles:
        if abs(o - u_c) < 1e-12 or abs(o) < 1e-14:
            continue
        dist, t = _dist_to_segment(o, 0j, u_c)
        if dist < 1e-6 and 0 < t < 1:
            hits.append((t, o))
    for t, o in sorted(hits):
        eta = 0.5 * min(abs(u_c - o), abs(o))
        path.append(o + 1j * d * eta)
    path.append(u_c)
    return path


def _obstacles(m: TlsModel, u_c: complex):
    if _is_power_law(m) and m.gamma_tilde != 1:
        return [b.u_c for b in branch_points_closed(m.sweep.exponent, m.gamma_tilde)]
    r = 2.0 * abs(u_c) + 1.0
    sw, g = m.sweep, m.gamma_tilde
    xs = np.linspace(-r, r, 31)
    seeds = (xs[None, :] + 1j * xs[:, None]).ravel()
    return complex_newton_roots(lambda u: (sw.w(u) + 1j * g) ** 2 + 1.0,
                                lambda u: 2.0 * (sw.w(u) + 1j * g) * sw.dw(u), seeds, tol=1e-12)


def z_at_branch(m: TlsModel, bp, *, obstacles=None) -> complex:
    """Numeric ``z_c`` by contour integration from ``u = 0`` to the branch point.

    ``bp`` is a :class:`BranchPoint` or a bare complex ``u_c``.  The path is a
    straight segment; other branch points within ``1e-6`` of it are passed on
    the left.  A failing deformed path raises :class:`PathError`.
    """
    u_c = complex(bp.u_c if isinstance(bp, BranchPoint) else bp)
    res = abs(m.radicand(u_c))
    if res > 1e-8:
        raise DomainError(f"u = {u_c} is not a branch point (residual {res:.2e})")
    obs = _obstacles(m, u_c) if obstacles is None else obstacles
    try:
        return z_along(m, _path_to(m, u_c, obs))
    except PathError:
        # the straight path grazed a point that the obstacle list missed; go round it
        d = u_c / abs(u_c)
        try:
            return z_along(m, [0j, 0.5 * u_c + 0.25j * d * abs(u_c), u_c])
        except PathError as exc:
            raise PathError(f"no admissible path from 0 to {u_c}") from exc


# ---------------------------------------------------------------- factors

def f_g_ns_closed(gamma_tilde: float) -> float:
    """``2 Re ln(i gamma + sqrt(1 - gamma**2))`` on the principal branch.

    Zero for every ``gamma < 1``.  Above 1 the root is imaginary and the value
    depends on the branch, so a :class:`BranchAmbiguityWarning` is issued.
    """
    g = float(gamma_tilde)
    if g < 0:
        raise InvalidParameterError("gamma_tilde must be >= 0")
    if g > 1:
        warnings.warn("nonsingular geometrical factor is branch dependent for gamma > 1",
                      BranchAmbiguityWarning, stacklevel=2)
    return float(2.0 * np.log(1j * g + np.sqrt(complex(1.0 - g * g))).real)


def _fg_ns_integrands(m: TlsModel):
    sw, g = m.sweep, m.gamma_tilde

    # alpha+' / (alpha+ - alpha-) on u > 0, with s - zeta = 1/(s + zeta)
    def right(u):
        z = sw.w(u) + 1j * g
        s = np.sqrt(z * z + 1.0)
        return -sw.dw(u) / (2.0 * s * s * (z + s))

    # alpha-' / (alpha+ - alpha-) on u < 0, written in x = -u > 0
    def left(x):
        u = -np.asarray(x)
        z = sw.w(u) + 1j * g
        s = np.sqrt(z * z + 1.0)
        return -sw.dw(u) / (2.0 * s * s * (s - z))

    return right, left


def _half_line(f, cut: float, decay: float, tol: float) -> complex:
    head = adaptive_quadrature(f, 0.0, cut, tol=tol)
    tail = improper_tail(f, cut, decay, tol=tol)
    return head.value + tail.value


def _cutoff(sw: SweepProfile, g: float) -> float:
    return sw.u_for_bias(50.0 * max(1.0, g))


@lru_cache(maxsize=512)
def _f_g_ns_numeric(sweep: SweepProfile, g: float) -> float:
    m = TlsModel(sweep, g)
    right, left = _fg_ns_integrands(m)
    cut = _cutoff(sweep, g)
    decay = 2 * sweep.degree + 1
    i_right = _half_line(right, cut, decay, 1e-13)
    i_left = _half_line(left, cut, decay, 1e-13)
    return float(2.0 * (i_right - i_left).real)


def f_g_ns_numeric(m: TlsModel) -> float:
    """Nonsingular geometrical factor from the two real-axis integrals of ``alpha'``.

    Only defined below critical damping, where ``alpha_pm`` are continuous on
    the real axis.
    """
    if m.gamma_tilde >= 1:
        raise RegimeError("numeric nonsingular geometrical factor needs gamma < 1")
    return _f_g_ns_numeric(m.sweep, float(m.gamma_tilde))


@lru_cache(maxsize=512)
def _f_d_ns(sweep: SweepProfile, g: float, symmetric: bool) -> float:
    if g == 0.0:
        return 0.0

    # gamma - Im s on u > 0 and gamma + Im s on u < 0, both cancellation free
    def right(u):
        z = sweep.w(u) + 1j * g
        return (-1.0 / (z + np.sqrt(z * z + 1.0))).imag

    def left(x):
        z = sweep.w(-np.asarray(x)) + 1j * g
        return (1.0 / (np.sqrt(z * z + 1.0) - z)).imag

    cut = _cutoff(sweep, g)
    decay = 2 * sweep.degree
    r = _half_line(right, cut, decay, 1e-13)
    if symmetric:
        return float(2.0 * r)
    return float(r + _half_line(left, cut, decay, 1e-13))


def f_d_ns(m: TlsModel, *, symmetric: bool | None = None) -> float:
    """Nonsingular dynamical factor ``-2 Im[int_0^inf E+ + int_-inf^0 E-]``.

    ``symmetric=True`` uses ``2 int_0^inf (gamma - Im s)``, valid for odd
    sweeps; the default picks it for power laws and integrates both half lines
    otherwise.  The quadrature stops where ``|w| = 50 max(1, gamma)`` and the
    rest is a fitted ``u**(-2 deg)`` tail.
    """
    if symmetric is None:
        symmetric = _is_power_law(m)
    return _f_d_ns(m.sweep, float(m.gamma_tilde), bool(symmetric))


def f_g_s(m: TlsModel, bp: BranchPoint, *, method: str = "closed") -> complex:
    """Singular geometrical factor of one branch point.

    ``method='closed'`` returns ``ln(i gamma + sqrt(1 - gamma**2)) + i pi``,
    the same for every point.  ``method='numeric'`` integrates
    ``(alpha+' + alpha-') / (alpha+ - alpha-) = -w'/s`` from 0 to ``u_c`` on the
    path used for ``z_c``; its real part equals the closed one while the
    imaginary part is a family-wide constant that differs from ``pi``.
    """
    g = m.gamma_tilde
    if method == "closed":
        return complex(np.log(1j * g + np.sqrt(complex(1.0 - g * g))) + 1j * math.pi)
    if method != "numeric":
        raise InvalidParameterError(f"unknown method {method!r}")
    u_c = bp.u_c
    path = _path_to(m, u_c, _obstacles(m, u_c))
    cont = continue_sqrt_along(path, m.radicand, +1)
    sw = m.sweep
    return complex(contour_integral(cont, lambda u, s: -sw.dw(u) / s, 1e-12).value)


# ---------------------------------------------------------------- probabilities

def p_linear(gamma_tilde: float, epsilon_tilde: float) -> DdpBreakdown:
    """Single-point DDP result for ``w = u``: ``exp(-eps (Fd_ns + 2 Im z_c))``.

    The two terms are computed separately, so the cancellation of ``gamma`` in
    the sum (giving ``exp(-pi eps / 2)``) is a result, not an input.
    """
    g, eps = float(gamma_tilde), float(epsilon_tilde)
    if not 0 <= g < 1:
        raise RegimeError("p_linear needs 0 <= gamma < 1; use p_overdamped above")
    if not eps > 0:
        raise InvalidParameterError("epsilon_tilde must be positive")
    m = TlsModel.power_law(1, g, eps)
    fd = f_d_ns(m)
    z = z_closed(1, g, Family.PLUS, 0)
    fgs = f_g_s(m, None)
    fgn = f_g_ns_closed(g)
    p = math.exp(-fgn + 2 * fgs.real - eps * (fd + 2 * z.imag))
    notes = ["outside asymptotic range"] if eps < 1 else []
    return DdpBreakdown(fgn, fd, [(z, fgs)], p, Regime.LINEAR, eps, g, float("inf"), notes)


def p_underdamped(n: int, gamma_tilde: float, epsilon_tilde: float) -> DdpBreakdown:
    """Two-point interference result for ``w = u**n``, ``n >= 3``, ``gamma < 1``::

        P = 4 cos(eps h cos(pi/2n))**2 exp(-eps (Fd_ns + 2 h sin(pi/2n)))

    with ``h = h_plus(n, gamma)``.  ``n = 1`` goes to :func:`p_linear` and
    ``gamma >= 1`` to :func:`p_overdamped`.
    """
    n, g, eps = _check_n(n), float(gamma_tilde), float(epsilon_tilde)
    if n == 1:
        return p_linear(g, eps)
    if g >= 1:
        return p_overdamped(TlsModel.power_law(n, g, eps))
    if not eps > 0:
        raise InvalidParameterError("epsilon_tilde must be positive")
    m = TlsModel.power_law(n, g, eps)
    h = h_plus(n, g)
    c, s = math.cos(math.pi / (2 * n)), math.sin(math.pi / (2 * n))
    fd = f_d_ns(m)
    fgn = f_g_ns_closed(g)
    fgs = f_g_s(m, None)
    geo = math.exp(-fgn + 2 * fgs.real)
    p = geo * 4.0 * math.cos(eps * h * c) ** 2 * math.exp(-eps * (fd + 2.0 * h * s))
    pair = [(z_closed(n, g, Family.PLUS, 0), fgs), (z_closed(n, g, Family.PLUS, (n - 1) // 2), fgs)]
    gap = _level_gap([b.z_c for b in branch_points_closed(n, g) if b.contributes])
    return DdpBreakdown(fgn, fd, pair, p, Regime.UNDERDAMPED, eps, g, gap)


def p_overdamped(m: TlsModel) -> DdpBreakdown:
    """``exp(-eps Fd_ns)``: a single contributing point on the real z axis, no geometry."""
    g = m.gamma_tilde
    if g <= 1:
        raise RegimeError("p_overdamped needs gamma > 1")
    fd = f_d_ns(m)
    p = math.exp(-m.epsilon_tilde * fd)
    contrib = []
    if _is_power_law(m):
        contrib = [(b.z_c, 0j) for b in branch_points_closed(m.sweep.exponent, g) if b.contributes]
    return DdpBreakdown(float("nan"), fd, contrib, p, Regime.OVERDAMPED, m.epsilon_tilde, g)


def _level_gap(zs) -> float:
    levels = sorted(z.imag for z in zs)
    if not levels:
        return float("inf")
    tie = 1e-10 * max(1.0, abs(levels[0]))
    higher = [v for v in levels if v - levels[0] > tie]
    return higher[0] - levels[0] if higher else float("inf")


def p_general(m: TlsModel, *, keep: str = "all", phases: str = "numeric",
              points: list[BranchPoint] | None = None) -> DdpBreakdown:
    """Full sum over the contributing branch points.

    ``keep='dominant'`` retains only the points with the smallest ``Im z_c``.
    ``phases`` selects how ``Fg_s`` is evaluated per point (``'numeric'`` path
    integral or the ``'closed'`` constant).  ``z_c`` always comes from contour
    integration.  Below critical damping ``Fg_ns`` is the numeric real-axis
    value; above it the principal-branch closed form is used.
    """
    g, eps = m.gamma_tilde, m.epsilon_tilde
    if g == 1:
        raise CriticalDampingError("gamma = 1 is not covered by the asymptotic formula")
    if points is None:
        if _is_power_law(m):
            points = [BranchPoint(b.u_c, z_at_branch(m, b), b.family, b.k, b.upper_half_u, False)
                      for b in branch_points_closed(m.sweep.exponent, g)]
        else:
            r = 2.0 * max(1.0, (1.0 + g)) ** (1.0 / m.sweep.degree) + 1.0
            points = branch_points_numeric(m, (complex(-r, -r), complex(r, r)), grid=31)
        points = [BranchPoint(b.u_c, b.z_c, b.family, b.k, b.upper_half_u,
                              _contributes(g, b.u_c, b.z_c)) for b in points]
    live = [b for b in points if b.contributes]
    if not live:
        raise EmptySumError("no branch point lies above the contour")
    gap = _level_gap([b.z_c for b in live])
    if keep == "dominant":
        lowest = min(b.z_c.imag for b in live)
        live = [b for b in live if b.z_c.imag - lowest < 1e-10 * max(1.0, abs(lowest))]
    elif keep != "all":
        raise InvalidParameterError(f"keep must be 'all' or 'dominant', got {keep!r}")
    if g < 1:
        fgn = f_g_ns_numeric(m)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BranchAmbiguityWarning)
            fgn = f_g_ns_closed(g)
    fd = f_d_ns(m)
    contrib = [(b.z_c, f_g_s(m, b, method=phases)) for b in live]
    # factor out the smallest Im z so that large eps does not underflow the sum
    lowest = min(z.imag for z, _ in contrib)
    amp = sum(cmath.exp(f + 1j * eps * z + eps * lowest) for z, f in contrib)
    log_p = -fgn - eps * fd - 2 * eps * lowest + 2 * math.log(abs(amp)) if amp != 0 else -math.inf
    p = math.exp(log_p)
    regime = Regime.OVERDAMPED if g > 1 else (Regime.LINEAR if m.sweep.degree == 1 else Regime.UNDERDAMPED)
    return DdpBreakdown(fgn, fd, contrib, p, regime, eps, g, gap)


def p_ddp(m: TlsModel) -> DdpBreakdown:
    """Closed-form DDP probability for the regime of ``m`` (power-law sweeps)."""
    if not _is_power_law(m):
        return p_general(m)
    n, g = m.sweep.exponent, m.gamma_tilde
    if g == 1:
        raise CriticalDampingError("gamma = 1 is not covered by the asymptotic formula")
    if g > 1:
        return p_overdamped(m)
    return p_underdamped(n, g, m.epsilon_tilde)


def critical_epsilons_ddp(n: int, gamma_tilde: float, nu_max: int) -> CriticalSet:
    """Zeros of the interference factor: ``(2 nu - 1) pi / (2 h cos(pi/2n))``."""
    n, g = _check_n(n), float(gamma_tilde)
    if n < 3:
        raise RegimeError("a single branch point gives no interference zeros (n = 1)")
    if not 0 <= g < 1:
        raise RegimeError("interference zeros exist only for gamma < 1")
    if int(nu_max) < 1:
        raise InvalidParameterError("nu_max must be >= 1")
    base = math.pi / (2 * h_plus(n, g) * math.cos(math.pi / (2 * n)))
    return CriticalSet(g, tuple((2 * nu - 1) * base for nu in range(1, int(nu_max) + 1)), Source.DDP)
