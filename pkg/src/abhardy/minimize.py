"""Normalized gradient flow for the magnetic energy on the ``L^p`` sphere.

We minimize ``E[psi]`` (see :func:`cylinder.energy_magnetic`) subject to
``int |psi|^p = 1``. At a constrained critical point ``H psi = E |psi|^(p-2) psi``
with ``H = -d_s^2 - (d_theta - i a)^2 + lambda``, so the residual
``r = H psi - E |psi|^(p-2) psi`` measures stationarity.

Each step moves along ``-H^{-1} r`` (``H`` is diagonal in the sine x Fourier
basis, so the preconditioner is free), projects back to the sphere, and is
accepted only if the energy does not increase (up to a few ulps of ``E``,
and then only if the residual drops). Without the preconditioner
the stiffness ``~ Ns^2`` makes plain steepest descent hopeless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import closed_form as cf
from . import cylinder as cy
from .errors import DomainError, NumericError
from .params import Params

INIT_KINDS = ("w_star", "ansatz", "random")


@dataclass(frozen=True)
class MinimizeOptions:
    step: float = 1.0
    max_iter: int = 2000
    tol: float = 1e-8
    max_step: float = 8.0   # a cap of 2 already slows convergence to a crawl
    grow: float = 1.5
    min_step: float = 1e-12
    amplitude: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not (self.step > 0 and self.max_step >= self.step and self.tol > 0):
            raise DomainError("step, max_step and tol must be positive with step <= max_step")
        if self.max_iter < 0:
            raise DomainError("max_iter must be non-negative")


@dataclass
class MinimizeReport:
    converged: bool
    iterations: int
    residual: float
    energy_history: list = field(default_factory=list)
    recovered_constant: float = float("nan")
    symmetric_value: float = float("nan")
    message: str = ""

    def as_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "residual": self.residual,
            "recovered_constant": self.recovered_constant,
            "symmetric_value": self.symmetric_value,
            "message": self.message,
        }


class MinimizeResult(NamedTuple):
    field: cy.CylinderField
    energy: float
    report: MinimizeReport


class _Operator:
    """``H`` and ``H^{-1}`` for fixed ``(a, lambda)`` on a grid."""

    def __init__(self, grid: cy.CylinderGrid, a: float, lam: float):
        self.grid = grid
        self.symbol = grid.s_symbol[:, None] + grid.angular_symbol(a)[None, :] + lam
        if np.min(self.symbol) <= 0:
            raise DomainError("operator is not positive on this grid; need lambda > -a^2")

    def apply(self, f):
        return cy.from_spectral(self.symbol * cy.to_spectral(f))

    def solve(self, f):
        return cy.from_spectral(cy.to_spectral(f) / self.symbol)

    def energy(self, f) -> float:
        return float(np.sum(self.symbol * np.abs(cy.to_spectral(f)) ** 2)) * self.grid.cell


_FLAT_ULPS = 8


def _residual(op: _Operator, f, e: float, p: float, cell: float) -> float:
    r = op.apply(f) - e * np.abs(f) ** (p - 2.0) * f
    return math.sqrt(float(np.sum(np.abs(r) ** 2)) * cell)


def initial_field(kind, params: Params, grid: cy.CylinderGrid,
                  amplitude: float = 0.05, seed: int = 0) -> np.ndarray:
    """Starting field: ``w_star``, ``w_star`` + ansatz bump, seeded random, or an array."""
    if not isinstance(kind, str):
        values = np.asarray(kind.values if isinstance(kind, cy.CylinderField) else kind, dtype=complex)
        if values.shape != grid.shape:
            raise DomainError(f"initial field shape {values.shape} does not match grid {grid.shape}")
        return values.copy()
    if kind not in INIT_KINDS:
        raise DomainError(f"init must be one of {INIT_KINDS} or an array, got {kind!r}")
    w = cy.symmetric_profile(grid, params)[:, None] * np.ones(grid.Ntheta)[None, :]
    if kind == "w_star":
        return w.astype(complex)
    if kind == "ansatz":
        phi, chi = cy.ansatz_fields(cy.ansatz_zeta(params) or 1.0, grid, params)
        return (w + amplitude * phi) * np.exp(1j * amplitude * chi)
    rng = np.random.default_rng(seed)
    # smooth, few-mode perturbation of the modulus and phase
    s = grid.s_nodes[:, None] * params.omega
    th = grid.theta_nodes[None, :]
    bump = np.zeros(grid.shape)
    phase = np.zeros(grid.shape)
    for m in range(1, 4):
        c = rng.normal(size=4)
        env = np.exp(-(s - c[3]) ** 2)
        bump += env * (c[0] * np.cos(m * th) + c[1] * np.sin(m * th))
        phase += env * c[2] * np.sin(m * th + c[3])
    return (w * (1.0 + amplitude * bump)) * np.exp(1j * amplitude * phase)


def minimize_magnetic(params: Params, grid: cy.CylinderGrid, init="ansatz",
                      options: MinimizeOptions | None = None) -> MinimizeResult:
    """Minimize ``E[psi]`` on ``int |psi|^p = 1``.

    Returns the field, its energy and a :class:`MinimizeReport`. If the
    residual does not drop below ``options.tol`` the last accepted field is
    returned with ``converged=False``. ``report.recovered_constant`` is the
    energy rescaled to the planar constant, ``E (2 pi)^(1 - 2/p)``.
    """
    options = options or MinimizeOptions()
    p = params.p
    op = _Operator(grid, params.a, params.lam)
    cell = grid.cell

    def project(f):
        nrm = float(np.sum(np.abs(f) ** p)) * cell
        if not (nrm > 0 and math.isfinite(nrm)):
            raise NumericError("normalization failed (zero or non-finite L^p norm)")
        return f / nrm ** (1.0 / p)

    psi = initial_field(init, params, grid, options.amplitude, options.seed)
    if (float(np.sum(np.abs(psi) ** p)) * cell) ** (1.0 / p) < 1e-14:
        raise DomainError("initial field is (numerically) zero")
    psi = project(psi)
    e = op.energy(psi)
    history = [e]
    tau = options.step
    converged = False
    message = "max_iter reached"
    it = 0
    res = float("inf")
    for it in range(options.max_iter + 1):
        r = op.apply(psi) - e * np.abs(psi) ** (p - 2.0) * psi
        res = math.sqrt(float(np.sum(np.abs(r) ** 2)) * cell)
        if not math.isfinite(res):
            raise NumericError(f"non-finite residual at iteration {it}")
        if res < options.tol:
            converged = True
            message = "converged"
            break
        if it == options.max_iter:
            break
        g = op.solve(r)
        flat = _FLAT_ULPS * np.finfo(float).eps * abs(e)
        while True:
            trial = project(psi - tau * g)
            e_trial = op.energy(trial)
            if not math.isfinite(e_trial):
                raise NumericError(f"non-finite energy at iteration {it}")
            if e_trial <= e:
                break
            # near convergence the true decrease (~ residual^2) drops below
            # round-off in E; then accept energy-flat steps that cut the residual
            if e_trial <= e + flat and _residual(op, trial, e_trial, p, cell) < res:
                break
            tau *= 0.5
            if tau < options.min_step:
                break
        if tau < options.min_step:
            message = "step size underflow (round-off floor reached)"
            break
        psi, e = trial, e_trial
        history.append(e)
        tau = min(tau * options.grow, options.max_step)

    report = MinimizeReport(
        converged=converged,
        iterations=it,
        residual=res,
        energy_history=history,
        recovered_constant=e * cf.TWO_PI ** (1.0 - 2.0 / p),
        symmetric_value=cf.k_star(math.sqrt(params.kappa), p),
        message=message,
    )
    return MinimizeResult(cy.CylinderField(psi, grid), e, report)
