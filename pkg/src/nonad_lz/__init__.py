"""Nonadiabatic transitions in a decaying two-level system.

Three routes to the survival probability ``P`` of a swept, damped two-level
system: exact propagation (:mod:`.propagate`), generalized DDP asymptotics
(:mod:`.ddp`) and a damped-oscillator model of the transit region
(:mod:`.oscillator`).  Everything is dimensionless: energies in units of the
coupling, ``gamma_tilde`` the damping, ``epsilon_tilde`` the adiabaticity.
"""
from .errors import *  # noqa: F401,F403
from .model import (AdiabaticFrame, HamiltonianMatrix, PhysicalParams, SweepProfile, TlsModel,
                    adiabatic_eigen, adiabatic_frame, alpha_general, alpha_pm,
                    dimensionless_from_physical, eigen_general, matrix_at, tail_expansion)
from .propagate import (PropagationSettings, SurvivalResult, Trajectory, evolve, exact_minima,
                        probability_scan, survival_probability, window_convergence_report)
from .ddp import (BranchPoint, CriticalSet, DdpBreakdown, branch_points_closed,
                  branch_points_numeric, critical_epsilons_ddp, f_d_ns, f_g_ns_closed,
                  f_g_ns_numeric, f_g_s, h_plus, p_ddp, p_general, p_linear, p_overdamped,
                  p_underdamped, z_at_branch)
from .oscillator import compare_with_exact, critical_epsilons_osc, solve_oscillator

__version__ = "0.1.0"
