"""Linearized eigenvalue problems around the symmetric optimizer.

Two problems live here:

* the 1-D Poschl-Teller operator ``-d^2/ds^2 + kappa - (p-1) w_star^(p-2)``
  and its separated angular modes;
* the coupled modulus/phase system obtained by restricting the second
  variation to the first angular mode, ``phi = H(s) cos theta`` and
  ``chi = G(s) sin theta / w_star``. In ``z = tanh(omega s)`` it reads, in
  weak form, ``2 omega Qs(G, H)`` against the constraint
  ``int (G^2 + H^2) / (1 - z^2) dz``; its ground state ``Lambda`` is negative
  exactly on the linear instability range.

The coupled system is discretized by a Galerkin method on
``(1 - z^2)^gamma P_k^(c, c)(z)`` (Jacobi polynomials, ``gamma = p/(2(p-2))``,
``c = 2 gamma - 1``). All form integrands are then polynomial times the
Jacobi weight, so Gauss-Jacobi quadrature is exact, and the nested
trial spaces make ``Lambda`` decrease monotonically as ``N`` grows.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg, optimize
from scipy.special import eval_jacobi, roots_jacobi

from . import closed_form as cf
from .errors import DomainError, NumericError
from .params import Params, reduce_flux


@dataclass(frozen=True)
class EigenResult:
    value: float
    profiles: tuple
    residual: float
    grid_size: int


# Poschl-Teller -------------------------------------------------------------

@dataclass(frozen=True)
class PoschlTellerProblem:
    kappa: float
    p: float
    N: int = 2048
    L: float | None = None

    def __post_init__(self):
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise DomainError(f"kappa must be positive, got {self.kappa!r}")
        cf._check_p(self.p)
        if int(self.N) != self.N or self.N < 64:
            raise DomainError(f"N must be an integer >= 64, got {self.N!r}")
        if self.L is None:
            object.__setattr__(self, "L", 12.0 / self.omega)
        elif not self.L > 0:
            raise DomainError(f"L must be positive, got {self.L!r}")

    @property
    def omega(self) -> float:
        return 0.5 * (self.p - 2.0) * math.sqrt(self.kappa)

    @property
    def nodes(self) -> np.ndarray:
        h = 2.0 * self.L / (self.N + 1)
        return -self.L + h * np.arange(1, self.N + 1)

    def potential(self) -> np.ndarray:
        params = Params(0.0, self.p, self.kappa)
        w = cf.w_star(self.nodes, params)
        return self.kappa - (self.p - 1.0) * w ** (self.p - 2.0)


def _banded_laplacian(N: int, h: float, diag_extra: np.ndarray) -> np.ndarray:
    # 5-point fourth-order -d^2/ds^2 in upper banded storage (2 superdiagonals)
    ab = np.zeros((3, N))
    ab[2] = 30.0 / (12.0 * h * h) + diag_extra
    ab[1, 1:] = -16.0 / (12.0 * h * h)
    ab[0, 2:] = 1.0 / (12.0 * h * h)
    return ab


def _banded_matvec(ab: np.ndarray, x: np.ndarray) -> np.ndarray:
    y = ab[2] * x
    y[:-1] += ab[1, 1:] * x[1:]
    y[1:] += ab[1, 1:] * x[:-1]
    y[:-2] += ab[0, 2:] * x[2:]
    y[2:] += ab[0, 2:] * x[:-2]
    return y


def solve_poschl_teller(prob: PoschlTellerProblem) -> EigenResult:
    """Ground state of ``-d^2/ds^2 + kappa - (p-1) w_star^(p-2)`` on ``[-L, L]``, Dirichlet.

    The eigenfunction is returned positive and normalized in discrete ``L^2``.
    """
    s = prob.nodes
    h = s[1] - s[0]
    ab = _banded_laplacian(prob.N, h, prob.potential())
    try:
        vals, vecs = linalg.eig_banded(ab, lower=False, select="i", select_range=(0, 0))
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"banded eigensolver failed for {prob!r}: {exc}") from exc
    vec = vecs[:, 0]
    vec = vec * np.sign(vec[np.argmax(np.abs(vec))])
    vec = vec / math.sqrt(float(np.sum(vec ** 2)) * h)
    resid = float(np.linalg.norm(_banded_matvec(ab, vec) - vals[0] * vec)) * math.sqrt(h)
    if not math.isfinite(vals[0]):
        raise NumericError("non-finite eigenvalue")
    return EigenResult(float(vals[0]), (s, vec), resid, prob.N)


def mode_eigenvalue(kappa: float, nu: float, p: float, m: int, N: int = 2048) -> float:
    """Lowest eigenvalue of the angular mode ``m``: Poschl-Teller ground state + ``nu m^2``."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu!r}")
    if int(m) != m or m < 0:
        raise DomainError(f"mode index must be a non-negative integer, got {m!r}")
    return solve_poschl_teller(PoschlTellerProblem(kappa, p, N)).value + nu * m * m


# coupled system -------------------------------------------------------------

@dataclass(frozen=True)
class CoupledSystem:
    a: float
    p: float
    lam: float
    N: int = 64

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 64:
            raise DomainError(f"N must be an integer >= 64, got {self.N!r}")
        # validates p > 2 and lam > -a^2
        params = Params(self.a, self.p, self.lam)
        object.__setattr__(self, "a", params.a)

    @property
    def kappa(self) -> float:
        return self.lam + self.a * self.a

    @property
    def omega(self) -> float:
        return 0.5 * (self.p - 2.0) * math.sqrt(self.kappa)

    @property
    def gamma(self) -> float:
        return self.p / (2.0 * (self.p - 2.0))


@dataclass(frozen=True)
class CoupledMatrices:
    A: np.ndarray
    B: np.ndarray
    nodes: np.ndarray
    basis: np.ndarray  # (N, nodes): basis functions / (1 - z^2)^gamma at the nodes
    system: CoupledSystem


def _jacobi_tables(N: int, c: float, nq: int):
    z, wq = roots_jacobi(nq, c, c)
    P = np.empty((N, nq))
    dP = np.zeros((N, nq))
    for n in range(N):
        P[n] = eval_jacobi(n, c, c, z)
        if n > 0:
            dP[n] = 0.5 * (n + 2.0 * c + 1.0) * eval_jacobi(n - 1, c + 1.0, c + 1.0, z)
    return z, wq, P, dP


def assemble_coupled(sys: CoupledSystem) -> CoupledMatrices:
    """Galerkin matrices for ``A x = Lambda B x``, ``x = (G coefficients, H coefficients)``.

    For ``F = (1 - z^2)^gamma P`` and the weight ``(1 - z^2)^c``::

        omega^2 int (1-z^2) F'^2   -> omega^2 int w_c ((1-z^2)P' - 2 gamma z P)^2
        int F^2 / (1-z^2)          -> int w_c P^2
        int F^2                    -> int w_c (1-z^2) P^2

    and ``w_star^(p-2) = V (1 - z^2)`` with ``V = 2 p omega^2 / (p-2)^2``.
    """
    N, p = sys.N, sys.p
    g = sys.gamma
    c = 2.0 * g - 1.0
    z, wq, P, dP = _jacobi_tables(N, c, N + 4)
    one = 1.0 - z * z
    Q = one * dP - 2.0 * g * z * P
    om2 = sys.omega ** 2
    Kd = om2 * (Q * wq) @ Q.T
    M1 = (P * wq) @ P.T
    M0 = (P * (wq * one)) @ P.T
    V = 2.0 * p * om2 / (p - 2.0) ** 2
    base = Kd + (1.0 + sys.kappa) * M1
    AG = base - V * M0
    AH = base - (p - 1.0) * V * M0
    C = -2.0 * sys.a * M1
    A = np.block([[AG, C], [C, AH]])
    Z = np.zeros_like(M1)
    B = np.block([[M1, Z], [Z, M1]])
    A = 0.5 * (A + A.T)
    B = 0.5 * (B + B.T)
    return CoupledMatrices(A, B, z, P, sys)


def ground_state_coupled(sys_or_mats) -> EigenResult:
    """Smallest ``Lambda`` and its ``(G, H)`` sampled at the quadrature nodes.

    ``profiles`` is ``(z, G, H)``; ``residual`` is ``||A x - Lambda B x|| / ||B x||``.
    """
    mats = sys_or_mats if isinstance(sys_or_mats, CoupledMatrices) else assemble_coupled(sys_or_mats)
    try:
        linalg.cholesky(mats.B)
    except linalg.LinAlgError as exc:
        raise NumericError("constraint matrix is not positive definite") from exc
    vals, vecs = linalg.eigh(mats.A, mats.B, subset_by_index=[0, 0])
    x = vecs[:, 0]
    lam0 = float(vals[0])
    Bx = mats.B @ x
    resid = float(np.linalg.norm(mats.A @ x - lam0 * Bx) / np.linalg.norm(Bx))
    N = mats.system.N
    env = (1.0 - mats.nodes ** 2) ** mats.system.gamma
    G = env * (x[:N] @ mats.basis)
    H = env * (x[N:] @ mats.basis)
    if np.sum(H) < 0:
        G, H = -G, -H
    return EigenResult(lam0, (mats.nodes, G, H), resid, N)


def restricted_rayleigh(sys: CoupledSystem, zeta: float | None = None) -> float:
    """Rayleigh quotient of ``(zeta H0, H0)``, ``H0 = (1 - z^2)^gamma``.

    With ``zeta=None`` the minimizing ``zeta`` for these parameters is used.
    """
    mats = assemble_coupled(sys)
    N = sys.N
    agg, ahh, cgh, m = mats.A[0, 0], mats.A[N, N], mats.A[0, N], mats.B[0, 0]
    if zeta is None:
        zeta = -cgh / agg
    return float((zeta * zeta * agg + 2.0 * zeta * cgh + ahh) / ((zeta * zeta + 1.0) * m))


# scan -----------------------------------------------------------------------

@dataclass
class InstabilityReport:
    a: float
    p: float
    lambdas: list
    values: list
    residuals: list
    signs: list
    boundary: list
    interval: bool
    inclusion_ok: bool
    violations: list = field(default_factory=list)
    lambda_star: float = float("nan")
    lambda_bullet: float = float("nan")
    N: int = 64

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "p": self.p,
            "N": self.N,
            "lambda_star": self.lambda_star,
            "lambda_bullet": self.lambda_bullet,
            "lambdas": self.lambdas,
            "values": self.values,
            "residuals": self.residuals,
            "signs": self.signs,
            "boundary": self.boundary,
            "interval": self.interval,
            "inclusion_ok": self.inclusion_ok,
            "violations": self.violations,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.as_dict(), **kwargs)


def max_workers(requested: int | None = None) -> int:
    cap = os.environ.get("ABHARDY_MAX_WORKERS")
    limit = max(1, int(cap)) if cap else (os.cpu_count() or 1)
    return max(1, min(requested or 1, limit))


def ground_value(a: float, p: float, lam: float, N: int = 64) -> float:
    return ground_state_coupled(CoupledSystem(a, p, lam, N)).value


def instability_scan(a: float, p: float, lambda_range: Sequence[float], steps: int,
                     N: int = 64, workers: int | None = None, xtol: float = 1e-6,
                     neg_tol: float = 1e-6) -> InstabilityReport:
    """Sample ``Lambda`` on an even ``lambda`` grid and locate its sign changes.

    ``signs`` uses ``-1`` for ``Lambda < -neg_tol``, ``+1`` otherwise.
    Sign changes between samples are refined by Brent's method to ``xtol``.
    Inclusion checks: ``lambda > lambda_bullet`` must give ``Lambda < 0`` and
    ``lambda <= lambda_star`` must give ``Lambda >= -neg_tol``.
    """
    a = reduce_flux(a)
    cf._check_p(p)
    lo, hi = float(lambda_range[0]), float(lambda_range[1])
    if not (lo > -a * a and hi >= lo) or steps < 1:
        raise DomainError(f"lambda range must lie in (-a^2, inf) with lo <= hi, got {lambda_range!r}")
    lambdas = [lo] if steps == 1 else list(np.linspace(lo, hi, steps))
    with ThreadPoolExecutor(max_workers=max_workers(workers)) as ex:
        results = list(ex.map(lambda lam: ground_state_coupled(CoupledSystem(a, p, lam, N)), lambdas))
    values = [r.value for r in results]
    signs = [-1 if v < -neg_tol else 1 for v in values]

    boundary = []
    for i in range(len(lambdas) - 1):
        if (values[i] < 0) != (values[i + 1] < 0):
            root = optimize.brentq(lambda lam: ground_value(a, p, lam, N),
                                   lambdas[i], lambdas[i + 1], xtol=xtol)
            boundary.append(float(root))

    neg = [i for i, sg in enumerate(signs) if sg < 0]
    interval = not neg or neg == list(range(neg[0], neg[-1] + 1))

    ls, lb = cf.lambda_star(a, p), cf.lambda_bullet(a, p)
    violations = []
    for lam, v in zip(lambdas, values):
        if lam > lb and not v < 0:
            violations.append({"lambda": float(lam), "value": v, "rule": "lambda > lambda_bullet needs Lambda < 0"})
        if lam <= ls and v < -neg_tol:
            violations.append({"lambda": float(lam), "value": v, "rule": "lambda <= lambda_star needs Lambda >= 0"})
    return InstabilityReport(
        a=a, p=float(p), lambdas=[float(x) for x in lambdas], values=values,
        residuals=[r.residual for r in results], signs=signs, boundary=boundary,
        interval=interval, inclusion_ok=not violations, violations=violations,
        lambda_star=ls, lambda_bullet=lb, N=N,
    )
