"""Shared numerical kernels.

* globally adaptive Gauss-Kronrod (7/15) quadrature with optional square-root
  endpoint substitution, real or complex integrands;
* semi-infinite integrals with a fitted power-law tail;
* complex Newton iteration from a seed set, with deduplication;
* branch-continued square roots along polylines and contour integrals over them;
* sign-change bracketing of real roots.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DivergenceError, PathError

__all__ = [
    "QuadratureResult", "PathContinuation", "adaptive_quadrature", "improper_tail",
    "complex_newton_roots", "continue_sqrt_along", "contour_integral", "bracket_real_roots",
]

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[9, 11, 13]] = _WG[2::-1]
_GW[7] = _WG[3]


@dataclass
class QuadratureResult:
    value: complex | float
    error_estimate: float
    subdivisions: int
    converged: bool = True


def _gk15(f, a, b):
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    fx = np.asarray(f(c + h * _NODES))
    k = h * np.dot(_KW, fx)
    g = h * np.dot(_GW, fx)
    err = abs(k - g)
    # QUADPACK-style rescaling: sharper than |K - G| once the rule resolves f
    mean = k / (b - a) if b != a else 0.0
    resasc = abs(h) * np.dot(_KW, np.abs(fx - mean))
    if resasc != 0 and err != 0:
        err = resasc * min(1.0, (200 * err / resasc) ** 1.5)
    resabs = abs(h) * np.dot(_KW, np.abs(fx))
    return k, max(err, 50 * np.finfo(float).eps * resabs)


def _substituted(f, a, b, endpoint_sqrt):
    """Rewrite ``int_a^b f`` so that square-root endpoint behaviour becomes smooth."""
    if endpoint_sqrt in (None, False):
        return [(f, a, b)]
    if endpoint_sqrt == "b":
        return [(lambda t: f(b - t * t) * 2 * t, 0.0, np.sqrt(b - a))]
    if endpoint_sqrt == "a":
        return [(lambda t: f(a + t * t) * 2 * t, 0.0, np.sqrt(b - a))]
    if endpoint_sqrt == "both":
        mid = 0.5 * (a + b)
        return _substituted(f, a, mid, "a") + _substituted(f, mid, b, "b")
    raise ValueError(f"endpoint_sqrt must be None, 'a', 'b' or 'both', got {endpoint_sqrt!r}")


def adaptive_quadrature(f: Callable, a: float, b: float, tol: float = 1e-10, *,
                        rel_tol: float = 0.0, endpoint_sqrt: str | None = None,
                        max_subdivisions: int = 4000) -> QuadratureResult:
    """Globally adaptive G7/K15 integration of a vectorised ``f`` over ``[a, b]``.

    ``endpoint_sqrt`` in ``{'a', 'b', 'both'}`` applies ``x = b - t**2`` (or the
    mirror) so that integrable ``(b - x)**(+-1/2)`` behaviour is regularised.
    On failure the best value is returned with ``converged=False``.
    """
    a, b = float(a), float(b)
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if b < a:
        r = adaptive_quadrature(f, b, a, tol, rel_tol=rel_tol, max_subdivisions=max_subdivisions,
                                endpoint_sqrt={"a": "b", "b": "a"}.get(endpoint_sqrt, endpoint_sqrt))
        r.value = -r.value
        return r
    heap = []
    total, err_total = 0.0, 0.0
    counter = 0
    for g, lo, hi in _substituted(f, a, b, endpoint_sqrt):
        v, e = _gk15(g, lo, hi)
        heapq.heappush(heap, (-e, counter, lo, hi, v, g))
        counter += 1
        total = total + v
        err_total += e
    n_sub = len(heap)
    while err_total > max(tol, rel_tol * abs(total)):
        if n_sub >= max_subdivisions:
            return QuadratureResult(total, float(err_total), n_sub, converged=False)
        neg_e, _, lo, hi, v, g = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:  # interval exhausted in floating point
            return QuadratureResult(total, float(err_total), n_sub, converged=False)
        v1, e1 = _gk15(g, lo, mid)
        v2, e2 = _gk15(g, mid, hi)
        total = total - v + v1 + v2
        err_total = err_total + neg_e + e1 + e2
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, g))
        heapq.heappush(heap, (-e2, counter + 1, mid, hi, v2, g))
        counter += 2
        n_sub += 1
    # recompute totals to shed accumulated round-off in the running sums
    total = sum(item[4] for item in heap)
    err_total = float(sum(-item[0] for item in heap))
    return QuadratureResult(total, err_total, n_sub)


def improper_tail(f: Callable, a: float, decay_order: float, tol: float = 1e-12, *,
                  max_doublings: int = 80) -> QuadratureResult:
    """``int_a^inf f`` for ``|f(u)| <= C u**-decay_order``.

    Integrates over geometrically growing panels until the fitted power-law
    remainder ``f(c) c / (p - 1)`` drops below ``tol``, then adds that remainder
    to the value; the disagreement between fits at ``c`` and ``c/2`` goes into
    ``error_estimate``.
    """
    p = float(decay_order)
    if p < 2:
        raise DivergenceError(f"decay order {p} < 2: tail not bounded")
    lo = float(a)
    hi = lo + 1.0 if lo <= 0 else 2.0 * lo
    total, err, nsub = 0.0, 0.0, 0
    for _ in range(max_doublings):
        r = adaptive_quadrature(f, lo, hi, tol=0.25 * tol)
        total, err, nsub = total + r.value, err + r.error_estimate, nsub + r.subdivisions
        fc = complex(np.asarray(f(np.array([hi])))[0])
        tail = fc * hi / (p - 1.0)
        if abs(tail) < tol:
            fh = complex(np.asarray(f(np.array([0.5 * hi])))[0])
            tail_half = fh * (0.5 * hi) ** p * hi ** (1.0 - p) / (p - 1.0)
            err += abs(tail - tail_half) + abs(tail) * 1e-3
            if np.isrealobj(np.asarray(f(np.array([hi])))):
                tail = tail.real
            return QuadratureResult(total + tail, float(err), nsub)
        lo, hi = hi, 2.0 * hi
    return QuadratureResult(total, float(err) + abs(tail), nsub, converged=False)


def complex_newton_roots(g: Callable, dg: Callable, seeds: Sequence[complex], tol: float = 1e-10,
                         *, max_iter: int = 100, dedup_radius: float = 1e-8) -> list[complex]:
    """Newton's method from every seed; converged roots (``|g| < tol``) deduplicated."""
    z = np.array(seeds, dtype=complex).ravel()
    active = np.ones(z.shape, bool)
    done = np.zeros(z.shape, bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            if not active.any():
                break
            za = z[active]
            step = g(za) / dg(za)
            bad = ~np.isfinite(step)
            za = za - np.where(bad, 0, step)
            z[active] = za
            idx = np.flatnonzero(active)
            small = np.abs(step) <= 1e-14 * np.maximum(1.0, np.abs(za))
            done[idx[small & ~bad]] = True
            active[idx[small | bad]] = False
        # two polishing steps on every finite candidate
        fin = np.isfinite(z)
        for _ in range(2):
            zf = z[fin]
            z[fin] = zf - g(zf) / dg(zf)
        res = np.abs(g(z))
    ok = np.isfinite(z) & (res < tol)
    roots: list[complex] = []
    for r in z[ok]:
        if all(abs(r - q) >= dedup_radius for q in roots):
            roots.append(complex(r))
    return roots


@dataclass
class PathContinuation:
    """Branch-consistent samples of ``sqrt(radicand)`` on a refined polyline.

    ``params`` run from 0 to ``len(path) - 1``; segment ``j`` covers ``[j, j+1]``.
    """

    path: np.ndarray
    params: np.ndarray
    nodes: np.ndarray
    samples: np.ndarray
    radicand: Callable

    def point(self, t):
        t = np.asarray(t, dtype=float)
        j = np.clip(np.floor(t).astype(int), 0, len(self.path) - 2)
        frac = t - j
        return self.path[j] + frac * (self.path[j + 1] - self.path[j])

    def sqrt_at(self, t):
        """Continued ``sqrt(radicand)`` at polyline parameter ``t`` (vectorised)."""
        t = np.asarray(t, dtype=float)
        r = np.sqrt(np.asarray(self.radicand(self.point(t)), dtype=complex))
        k = np.clip(np.searchsorted(self.params, t), 1, len(self.params) - 1)
        left = np.abs(t - self.params[k - 1]) <= np.abs(self.params[k] - t)
        ref = np.where(left, self.samples[k - 1], self.samples[k])
        return np.where(np.abs(r - ref) <= np.abs(r + ref), r, -r)


def _arg_jump(a, b, floor):
    if abs(a) <= floor or abs(b) <= floor:
        return 0.0
    return abs(np.angle(b / a))


def continue_sqrt_along(path: Sequence[complex], radicand: Callable, start_branch: int = +1,
                        *, max_nodes: int = 2 ** 16, zero_tol: float = 1e-12) -> PathContinuation:
    """Continue ``sqrt(radicand)`` analytically along a polyline.

    The start value is ``start_branch * principal_sqrt``; nodes are doubled
    until adjacent samples differ in argument by less than pi/2.  A radicand
    zero in the interior of the path raises :class:`PathError`; zeros at the
    endpoints are allowed.
    """
    path = np.asarray(path, dtype=complex)
    if path.ndim != 1 or len(path) < 2:
        raise ValueError("path needs at least two nodes")
    nseg = len(path) - 1
    per_seg = 8
    while True:
        params = np.concatenate([np.linspace(j, j + 1, per_seg + 1)[:-1] for j in range(nseg)]
                                + [np.array([float(nseg)])])
        j = np.clip(np.floor(params).astype(int), 0, nseg - 1)
        pts = path[j] + (params - j) * (path[j + 1] - path[j])
        rad = np.asarray(radicand(pts), dtype=complex)
        scale = np.max(np.abs(rad)) or 1.0
        interior = np.abs(rad[1:-1]) < zero_tol * scale
        if interior.any():
            raise PathError(f"radicand vanishes on the path interior near {pts[1:-1][interior][0]}")
        r = np.sqrt(rad)
        samples = np.empty_like(r)
        samples[0] = start_branch * r[0]
        floor = 1e-8 * np.sqrt(scale)
        ok = True
        for i in range(1, len(r)):
            cand = r[i] if abs(r[i] - samples[i - 1]) <= abs(r[i] + samples[i - 1]) else -r[i]
            samples[i] = cand
            if _arg_jump(samples[i - 1], cand, floor) >= np.pi / 2:
                ok = False
        if ok or len(params) >= max_nodes:
            if not ok:
                raise PathError("branch tracking did not resolve within the node budget")
            return PathContinuation(path, params, pts, samples, radicand)
        per_seg *= 2


def contour_integral(cont: PathContinuation, integrand: Callable, tol: float = 1e-12, *,
                     sqrt_at_end: bool = True) -> QuadratureResult:
    """``int f(u, s(u)) du`` along the polyline of ``cont``, ``s`` the continued root.

    The last segment uses the square-root endpoint substitution when
    ``sqrt_at_end`` is set (the contour ends on a branch point).
    """
    total, err, nsub = 0.0 + 0.0j, 0.0, 0
    nseg = len(cont.path) - 1
    for j in range(nseg):
        du = cont.path[j + 1] - cont.path[j]

        def f(t, j=j, du=du):
            tt = j + np.asarray(t)
            return integrand(cont.point(tt), cont.sqrt_at(tt)) * du

        last = j == nseg - 1
        r = adaptive_quadrature(f, 0.0, 1.0, tol=tol / nseg,
                                endpoint_sqrt="b" if (last and sqrt_at_end) else None)
        total += r.value
        err += r.error_estimate
        nsub += r.subdivisions
    return QuadratureResult(complex(total), err, nsub)


def bracket_real_roots(f: Callable, lo: float, hi: float, grid: int = 400,
                       tol: float = 1e-10) -> list[float]:
    """Roots of a continuous ``f`` on ``[lo, hi]`` from sign changes on a uniform grid.

    Each bracket is refined with Brent's bisection/secant hybrid to ``tol``.
    """
    x = np.linspace(lo, hi, int(grid) + 1)
    y = np.array([f(v) for v in x], dtype=float)
    roots = []
    for i in range(len(x) - 1):
        if y[i] == 0.0:
            roots.append(float(x[i]))
        elif y[i] * y[i + 1] < 0:
            roots.append(float(brentq(f, x[i], x[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps)))
    if y[-1] == 0.0:
        roots.append(float(x[-1]))
    return roots
