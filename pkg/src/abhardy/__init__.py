"""Numerics for magnetic Hardy-Sobolev inequalities with an Aharonov-Bohm flux.

Closed-form thresholds and constants, energies on the Emden-Fowler
cylinder, a constrained minimizer, and the linearized eigenvalue problems
that locate symmetry breaking.
"""
from .errors import DomainError, NumericError
from .params import FluxProfile, Params, average_flux, dual_exponent, reduce_flux
from .closed_form import (
    Thresholds, c_star, gap, h_mu, invert_h, k_star, lambda_bullet, lambda_fs,
    lambda_star, mu_bullet, mu_star, q_poly, thresholds, zeta_opt,
)
from .cylinder import CylinderField, CylinderGrid, ModulusPhase, build_grid
from .minimize import MinimizeOptions, minimize_magnetic
from .spectral import (
    CoupledSystem, PoschlTellerProblem, ground_state_coupled, instability_scan,
    mode_eigenvalue, solve_poschl_teller,
)

__version__ = "0.1.0"
