"""Cross-validation suite shared by ``nonad-lz validate`` and the test-suite.

Each ``criterion_<k>()`` returns a list of :class:`Check` rows; a criterion
passes when all of its rows pass.  Tolerances are fixed here and are never
relaxed by callers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ddp import (Family, branch_points_closed, branch_points_numeric, f_d_ns, f_g_ns_numeric,
                  f_g_s, h_plus, p_underdamped, z_along, z_at_branch, z_map)
from .model import TlsModel, adiabatic_eigen, alpha_pm, matrix_at
from .numerics import adaptive_quadrature
from .oscillator import compare_with_exact, critical_epsilons_osc
from .propagate import (PropagationSettings, evolve, exact_minima, locate_minima,
                        probability_scan, survival_probability)

__all__ = ["Check", "CRITERIA", "run_criteria"]


@dataclass
class Check:
    criterion: int
    label: str
    value: float
    limit: float
    relation: str  # "<=", ">=", "<", ">"
    passed: bool = False

    def __post_init__(self):
        ops = {"<=": np.less_equal, ">=": np.greater_equal, "<": np.less, ">": np.greater}
        self.passed = bool(np.isfinite(self.value) and ops[self.relation](self.value, self.limit))

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.criterion:>2} {self.label}: {self.value:.6g} {self.relation} {self.limit:.6g}"


def _rel(a, b):
    return abs(a - b) / abs(b)


def criterion_1() -> list[Check]:
    """Linear sweep: exact P against exp(-pi eps/2), and its spread over gamma."""
    out = []
    for eps in (2.0, 3.0, 5.0):
        ref = math.exp(-math.pi * eps / 2)
        ps = [survival_probability(TlsModel.power_law(1, g, eps)).p for g in (0.0, 0.5, 0.9, 2.0)]
        out.append(Check(1, f"n=1 eps={eps:g} max rel. error vs exp(-pi eps/2)",
                         max(_rel(p, ref) for p in ps), 0.05, "<="))
        spread = max(_rel(a, b) for a in ps for b in ps)
        out.append(Check(1, f"n=1 eps={eps:g} max pairwise spread over gamma", spread, 0.02, "<"))
    return out


def criterion_2() -> list[Check]:
    """Two-point DDP formula against the exact solver at n=3, gamma=0.3, eps=5."""
    exact = survival_probability(TlsModel.power_law(3, 0.3, 5.0)).p
    ddp = p_underdamped(3, 0.3, 5.0).p
    return [Check(2, "n=3 gamma=0.3 eps=5 |P_ddp - P_exact|/P_exact", _rel(ddp, exact), 0.05, "<=")]


def criterion_3() -> list[Check]:
    """Both nonsingular factors vanish without damping (quadrature routes)."""
    out = []
    for n in (1, 3, 5):
        m = TlsModel.power_law(n, 0.0)
        out.append(Check(3, f"n={n} |Fg_ns(0)| by quadrature", abs(f_g_ns_numeric(m)), 1e-10, "<"))
        out.append(Check(3, f"n={n} |Fd_ns(0)| by quadrature", abs(f_d_ns(m)), 1e-10, "<"))
    return out


def criterion_4() -> list[Check]:
    """Linear sweep: Fd_ns + 2 h_1^+ = pi/2."""
    return [Check(4, f"gamma={g:g} |Fd_ns + 2 h_1^+ - pi/2|",
                  abs(f_d_ns(TlsModel.power_law(1, g)) + 2 * h_plus(1, g) - math.pi / 2), 1e-6, "<=")
            for g in (0.0, 0.3, 0.7, 0.95)]


def criterion_5() -> list[Check]:
    """Newton roots against the closed-form branch points; circle radii for n=3."""
    out = []
    for n in (1, 3, 5):
        for g in (0.2, 0.5, 1.5):
            closed = branch_points_closed(n, g)
            num = branch_points_numeric(TlsModel.power_law(n, g))
            worst = max(min(abs(c.u_c - b.u_c) for b in num) for c in closed) if num else math.inf
            out.append(Check(5, f"n={n} gamma={g:g} closed vs Newton ({len(num)}/{len(closed)} found)",
                             worst if len(num) == len(closed) else math.inf, 1e-10, "<="))
    for g in (0.2, 0.5, 1.5):
        radii = sorted({round(abs(b.u_c), 12) for b in branch_points_numeric(TlsModel.power_law(3, g))})
        want = sorted([abs(1 - g) ** (1 / 3), (1 + g) ** (1 / 3)])
        dev = max(abs(a - b) for a, b in zip(radii, want)) if len(radii) == 2 else math.inf
        out.append(Check(5, f"n=3 gamma={g:g} circle radii vs (|1-gamma|, 1+gamma)^(1/3)", dev, 1e-10, "<="))
    return out


def criterion_6() -> list[Check]:
    """exp(-Fg_ns) exp(2 Re Fg_s) = 1 with both factors from their integral definitions."""
    out = []
    for g in (0.0, 0.3, 0.9):
        m = TlsModel.power_law(3, g)
        fgn = f_g_ns_numeric(m)
        worst = max(abs(math.exp(-fgn + 2 * f_g_s(m, b, method="numeric").real) - 1.0)
                    for b in branch_points_closed(3, g) if b.contributes)
        out.append(Check(6, f"n=3 gamma={g:g} |exp(-Fg_ns + 2 Re Fg_s) - 1|", worst, 1e-8, "<="))
    return out


def criterion_7() -> list[Check]:
    """Oscillations below critical damping, monotone decay above it (n=3, eps in [1, 15])."""
    eps = np.geomspace(1.0, 15.0, 64)
    out = []
    m09 = TlsModel.power_law(3, 0.9)
    p09 = probability_scan(m09, eps)
    mins = locate_minima(eps, p09, lambda e: survival_probability(m09.with_epsilon(e),
                                                                  check_window=False).p)
    deep = [mn for mn in mins if mn.depth >= 100]
    out.append(Check(7, "gamma=0.9 interior minima >= 100x below envelope", len(deep), 2, ">="))
    m11 = TlsModel.power_law(3, 1.1)
    p11 = probability_scan(m11, eps)
    rise = float(np.max(np.diff(np.log(p11))))
    out.append(Check(7, "gamma=1.1 largest step up in log P", rise, 1e-6, "<="))
    ref = np.exp(-eps * f_d_ns(m11))
    sel = eps >= 3
    out.append(Check(7, "gamma=1.1 eps>=3 max |P_exact/exp(-eps Fd_ns) - 1|",
                     float(np.max(np.abs(p11[sel] / ref[sel] - 1))), 0.10, "<="))
    return out


def criterion_8() -> list[Check]:
    """First two exact minima against the interference zeros, n=3."""
    out = []
    for g in (0.0, 0.3):
        h = h_plus(3, g)
        pred = [(2 * nu - 1) * math.pi / (2 * h * math.cos(math.pi / 6)) for nu in (1, 2)]
        mins = exact_minima(TlsModel.power_law(3, g), 0.5, 1.25 * pred[1] + 1.0, 128)
        for nu in (1, 2):
            val = _rel(mins[nu - 1].epsilon, pred[nu - 1]) if len(mins) >= nu else math.inf
            out.append(Check(8, f"n=3 gamma={g:g} nu={nu} |eps_exact - eps_ddp|/eps_ddp", val, 0.05, "<="))
    return out


def criterion_9() -> list[Check]:
    """Oscillator critical values against exact minima: close for n=51, worse for n=5."""
    out = []
    for g in (0.0, 0.4):
        r51 = compare_with_exact(51, g, 3)
        r5 = compare_with_exact(5, g, 3)
        for a, b in zip(r51, r5):
            out.append(Check(9, f"n=51 gamma={g:g} nu={a.nu} rel. diff", a.rel_diff if a.found else math.inf,
                             0.10, "<"))
            gap = (b.rel_diff - a.rel_diff) if (a.found and b.found) else -math.inf
            out.append(Check(9, f"gamma={g:g} nu={a.nu} rel. diff n=5 minus n=51", gap, 0.0, ">"))
    return out


def criterion_10() -> list[Check]:
    """Oscillator lower bound pi/2 on the first critical value."""
    out = [Check(10, "|eps_c1(0) - pi/2|", abs(critical_epsilons_osc(0.0, 1).values[0] - math.pi / 2),
                 1e-10, "<=")]
    for g in (0.2, 0.5, 0.8):
        out.append(Check(10, f"gamma={g:g} eps_c1 - pi/2", critical_epsilons_osc(g, 1).values[0] - math.pi / 2,
                         0.0, ">"))
    return out


def criterion_11() -> list[Check]:
    """Property suites: model algebra, conformality, quadrature, path independence, damping."""
    rng = np.random.default_rng(20240611)
    out = []
    us = rng.uniform(-5, 5, 100)
    for g in (0.0, 0.5, 1.5):
        m = TlsModel.power_law(1, g)
        h = matrix_at(m, us)
        ep, em = adiabatic_eigen(m, us)
        ap, am = alpha_pm(m, us)
        worst = max(np.max(np.abs(ep + em - h.trace)), np.max(np.abs(ep * em - h.det)),
                    np.max(np.abs(ap * am + 1)),
                    np.max(np.abs(h.h11 - ep + h.h12 * ap)), np.max(np.abs(h.h11 - em + h.h12 * am)))
        out.append(Check(11, f"model invariants gamma={g:g} (trace, det, ratio product, residual)",
                         float(worst), 1e-12, "<="))
    m = TlsModel.power_law(3, 0.5)
    xs = np.linspace(-1.5, 1.5, 20)
    hstep = 1e-4
    dev = 0.0
    for x in xs:
        fd = (z_map(m, x + hstep) - z_map(m, x - hstep)) / (2 * hstep)
        s = complex(np.sqrt(m.radicand(x)))
        dev = max(dev, abs(fd - s) / abs(s))
    out.append(Check(11, "z-map conformality dz/du vs E+ - E-", dev, 1e-6, "<="))
    r = adaptive_quadrature(lambda x: np.sqrt(np.maximum(1 - x * x, 0.0)), 0.0, 1.0, tol=1e-12,
                            endpoint_sqrt="b")
    out.append(Check(11, "quadrature pi/4 benchmark", abs(r.value - math.pi / 4), 1e-12, "<="))
    worst = 0.0
    for b in branch_points_closed(3, 0.5):
        straight = z_at_branch(m, b)
        bend = z_along(m, [0j, 0.5 * b.u_c * (1 + 0.3j), b.u_c])
        worst = max(worst, abs(straight - bend))
    out.append(Check(11, "z_c path independence (straight vs two-segment)", worst, 1e-8, "<="))
    tr = evolve(TlsModel.power_law(3, 0.5, 3.0), PropagationSettings(adiabatic_ends=False))
    rise = float(np.max(np.diff(tr.population)))
    out.append(Check(11, "largest rise of |c1|^2 + |c2|^2 along trajectory", rise, 1e-9, "<="))
    return out


CRITERIA: dict[int, Callable[[], list[Check]]] = {
    k: globals()[f"criterion_{k}"] for k in range(1, 12)
}


def run_criteria(which=None) -> list[Check]:
    rows = []
    for k in sorted(which or CRITERIA):
        rows.extend(CRITERIA[k]())
    return rows
