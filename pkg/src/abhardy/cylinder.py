"""Fields on the truncated Emden-Fowler cylinder and the functionals on them.

Grid conventions
----------------
* ``s`` nodes are uniform on ``[-L, L]`` (endpoints included); fields are
  taken to vanish one step beyond each end, so the ``s`` direction is
  diagonalized by the type-I sine transform.
* ``theta`` nodes are uniform and periodic; the angular direction is
  diagonalized by the FFT.
* Integrals use the measure ``ds dsigma`` with ``dsigma = dtheta / (2 pi)``.

Quadratic energies are evaluated through Parseval in this sine x Fourier
basis. Pointwise derivatives (needed for ``|psi|`` and for weighted
integrands) are spectral as well; their ``theta`` derivative has the
Nyquist coefficient zeroed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy import fft as sfft

from . import closed_form as cf
from .errors import DomainError
from .params import Params

S_SCHEMES = ("spectral", "fd2")


@dataclass(frozen=True)
class CylinderGrid:
    L: float
    Ns: int
    Ntheta: int
    s_scheme: str = "spectral"

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise DomainError(f"half-length L must be positive, got {self.L!r}")
        if int(self.Ns) != self.Ns or self.Ns < 16:
            raise DomainError(f"Ns must be an integer >= 16, got {self.Ns!r}")
        if int(self.Ntheta) != self.Ntheta or self.Ntheta < 8 or self.Ntheta % 2:
            raise DomainError(f"Ntheta must be an even integer >= 8, got {self.Ntheta!r}")
        if self.s_scheme not in S_SCHEMES:
            raise DomainError(f"s_scheme must be one of {S_SCHEMES}, got {self.s_scheme!r}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "Ns", int(self.Ns))
        object.__setattr__(self, "Ntheta", int(self.Ntheta))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.Ns, self.Ntheta)

    @property
    def ds(self) -> float:
        return 2.0 * self.L / (self.Ns - 1)

    @property
    def cell(self) -> float:
        """Quadrature weight of one node for ``ds dsigma``."""
        return self.ds / self.Ntheta

    @cached_property
    def s_nodes(self) -> np.ndarray:
        return _frozen(-self.L + self.ds * np.arange(self.Ns))

    @cached_property
    def theta_nodes(self) -> np.ndarray:
        return _frozen(2.0 * np.pi * np.arange(self.Ntheta) / self.Ntheta)

    @cached_property
    def xi(self) -> np.ndarray:
        """Sine-transform wavenumbers ``pi k / ((Ns + 1) ds)``, ``k = 1..Ns``."""
        return _frozen(np.pi * np.arange(1, self.Ns + 1) / ((self.Ns + 1) * self.ds))

    @cached_property
    def s_symbol(self) -> np.ndarray:
        """Symbol of ``-d^2/ds^2`` (spectral, or the 3-point stencil for ``fd2``)."""
        if self.s_scheme == "fd2":
            return _frozen((2.0 - 2.0 * np.cos(self.xi * self.ds)) / self.ds ** 2)
        return _frozen(self.xi ** 2)

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer angular frequencies in FFT order (Nyquist stored as ``-N/2``)."""
        return _frozen(np.fft.fftfreq(self.Ntheta, 1.0 / self.Ntheta))

    def angular_symbol(self, a: float) -> np.ndarray:
        """Symbol of ``|(d_theta - i a) .|^2``; the Nyquist mode gets ``(N/2)^2 + a^2``."""
        sym = (self.modes - a) ** 2
        sym[self.Ntheta // 2] = (self.Ntheta / 2) ** 2 + a * a
        return sym

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape, dtype=complex)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def build_grid(L: float, Ns: int, Ntheta: int, s_scheme: str = "spectral") -> CylinderGrid:
    return CylinderGrid(L, Ns, Ntheta, s_scheme)


def default_half_length(params: Params) -> float:
    """``12 / omega``: the symmetric profile has decayed far below round-off there."""
    return 12.0 / params.omega


@dataclass
class CylinderField:
    """Complex samples ``psi(s_i, theta_j)`` with shape ``(Ns, Ntheta)``."""

    values: np.ndarray
    grid: CylinderGrid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise DomainError(f"field shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("field has non-finite entries")

    @classmethod
    def from_function(cls, func, grid: CylinderGrid) -> "CylinderField":
        s, th = np.meshgrid(grid.s_nodes, grid.theta_nodes, indexing="ij")
        return cls(np.broadcast_to(func(s, th), grid.shape).astype(complex), grid)

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.values)

    def integrate(self, density: np.ndarray) -> float:
        return float(np.sum(density)) * self.grid.cell

    def l2_sq(self) -> float:
        return self.integrate(np.abs(self.values) ** 2)

    def lp_power(self, p: float) -> float:
        """``int |psi|^p ds dsigma``."""
        return self.integrate(np.abs(self.values) ** p)

    def norm_p(self, p: float) -> float:
        return self.lp_power(p) ** (1.0 / p)

    def copy_with(self, values) -> "CylinderField":
        return CylinderField(values, self.grid)


@dataclass(frozen=True)
class ModulusPhase:
    """Polar decomposition ``psi = u exp(i S)``, ``u > 0``, on a grid."""

    u: np.ndarray
    S: np.ndarray
    grid: CylinderGrid

    def __post_init__(self):
        for name in ("u", "S"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != self.grid.shape:
                raise DomainError(f"{name} has shape {arr.shape}, grid is {self.grid.shape}")
            object.__setattr__(self, name, arr)

    def field(self) -> CylinderField:
        return CylinderField(self.u * np.exp(1j * self.S), self.grid)


# transforms ---------------------------------------------------------------

def to_spectral(values: np.ndarray) -> np.ndarray:
    """Orthonormal sine (axis 0) x Fourier (axis 1) coefficients."""
    return sfft.fft(sfft.dst(values, type=1, norm="ortho", axis=0), axis=1, norm="ortho")


def from_spectral(coef: np.ndarray) -> np.ndarray:
    return sfft.idst(sfft.ifft(coef, axis=1, norm="ortho"), type=1, norm="ortho", axis=0)


def d_theta(values: np.ndarray) -> np.ndarray:
    """Spectral ``d/dtheta`` along axis 1 (Nyquist coefficient zeroed)."""
    n = values.shape[-1]
    k = np.fft.fftfreq(n, 1.0 / n)
    k[n // 2] = 0.0
    out = np.fft.ifft(1j * k * np.fft.fft(values, axis=-1), axis=-1)
    return out.real if np.isrealobj(values) else out


def d_s(values: np.ndarray, ds: float) -> np.ndarray:
    """Spectral ``d/ds`` along axis 0 for Dirichlet data (odd periodic extension)."""
    ns = values.shape[0]
    pad = np.zeros((1,) + values.shape[1:], dtype=values.dtype)
    ext = np.concatenate([pad, values, pad, -values[::-1]], axis=0)
    n = ext.shape[0]
    k = 2.0 * np.pi * np.fft.fftfreq(n, ds)
    k[n // 2] = 0.0
    der = np.fft.ifft(1j * k[:, None] * np.fft.fft(ext, axis=0), axis=0)[1:ns + 1]
    return der.real if np.isrealobj(values) else der


def _quadratic(grid: CylinderGrid, values: np.ndarray, symbol: np.ndarray) -> float:
    return float(np.sum(symbol * np.abs(to_spectral(values)) ** 2)) * grid.cell


def _modulus_derivatives(values: np.ndarray, grid: CylinderGrid):
    # d|psi| = Re(conj(psi) d psi) / |psi|, taken as 0 where psi = 0
    u = np.abs(values)
    safe = np.where(u > 0, u, 1.0)
    us = np.where(u > 0, np.real(np.conj(values) * d_s(values, grid.ds)) / safe, 0.0)
    ut = np.where(u > 0, np.real(np.conj(values) * d_theta(values)) / safe, 0.0)
    return u, us, ut


def _require_nonzero(psi: CylinderField, p: float = 2.0):
    if psi.norm_p(p) < 1e-14:
        raise DomainError("field is (numerically) zero")


# energies -----------------------------------------------------------------

def energy_magnetic(psi: CylinderField, a: "float | Params", lam: float | None = None) -> float:
    """``int (|d_s psi|^2 + |(d_theta - i a) psi|^2 + lam |psi|^2) ds dsigma``.

    Pass either ``Params`` or raw ``(a, lam)``. A raw flux is used as given
    (no reduction), which keeps the gauge identity
    ``E_a[exp(i k theta) chi] = E_{a-k}[chi]`` available for any ``k``.
    """
    if isinstance(a, Params):
        a, lam = a.a, a.lam if lam is None else lam
    elif lam is None:
        raise TypeError("energy_magnetic needs Params or both a and lam")
    _require_nonzero(psi)
    g = psi.grid
    symbol = g.s_symbol[:, None] + g.angular_symbol(a)[None, :] + lam
    return _quadratic(g, psi.values, symbol)


def modulus_kinetic(psi: CylinderField) -> float:
    """``int (|d_s |psi||^2 + |d_theta |psi||^2) ds dsigma`` from pointwise derivatives."""
    _, us, ut = _modulus_derivatives(psi.values, psi.grid)
    return psi.integrate(us ** 2 + ut ** 2)


def lp_functional(psi: CylinderField, p: float) -> float:
    """``(int |psi|^p ds dsigma)^(2/p)``."""
    _require_nonzero(psi, p)
    return psi.lp_power(p) ** (2.0 / p)


def energy_deficit(psi: CylinderField, params: Params, mu: float) -> float:
    """Deficit of the magnetic inequality in cylinder units.

    Equals ``E[psi] - (2 pi)^(2/p - 1) mu (int |psi|^p)^(2/p)``, i.e. the
    planar deficit divided by ``2 pi``. Vanishes on the symmetric optimizer
    when ``mu = h_mu(lambda)``.
    """
    p = params.p
    return (energy_magnetic(psi, params)
            - cf.TWO_PI ** (2.0 / p - 1.0) * mu * lp_functional(psi, p))


def kinetic_phase_optimized(mp: ModulusPhase, a: "float | Params") -> float:
    """Kinetic energy of ``u`` plus the phase-optimized magnetic term.

    ``int (|d_s u|^2 + |d_theta u|^2) + a^2 int (oint u^-2 dsigma)^-1 ds``,
    a lower bound for the magnetic kinetic energy of ``u exp(iS)`` for
    every single-valued phase when ``0 <= a <= 1/2``.
    """
    if isinstance(a, Params):
        a = a.a
    u = mp.u
    if np.min(u) < 1e-12:
        raise DomainError("phase-optimized bound needs u > 0 on the whole grid")
    g = mp.grid
    us = d_s(u, g.ds)
    ut = d_theta(u)
    inv_mean = 1.0 / np.mean(u ** -2, axis=1)
    return float(np.sum(us ** 2 + ut ** 2)) * g.cell + a * a * float(np.sum(inv_mean)) * g.ds


def optimal_phase(u: np.ndarray, a: float) -> np.ndarray:
    """Phase attaining the phase-optimized bound: ``d_theta S = a - a / (u^2 oint u^-2)``."""
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    dS = a - a / (u ** 2 * np.mean(u ** -2, axis=-1, keepdims=True))
    # zero-mean derivative -> periodic antiderivative via FFT
    k = np.fft.fftfreq(n, 1.0 / n)
    F = np.fft.fft(dS, axis=-1)
    inv = np.zeros_like(k, dtype=complex)
    inv[k != 0] = 1.0 / (1j * k[k != 0])
    inv[n // 2] = 0.0
    return np.fft.ifft(F * inv, axis=-1).real


def kinetic_lower_bound_circle(psi_circle, a: float) -> tuple[float, float]:
    """Both sides of ``oint |psi' - i a psi|^2 >= (1 - 4a^2) oint |u'|^2 + a^2 oint u^2``.

    ``psi_circle`` holds samples on a uniform grid of the circle;
    integrals are means (probability measure).
    """
    psi = np.asarray(psi_circle, dtype=complex).ravel()
    n = psi.size
    k = np.fft.fftfreq(n, 1.0 / n)
    sym = (k - a) ** 2
    if n % 2 == 0:
        sym[n // 2] = (n / 2) ** 2 + a * a
    coef = np.fft.fft(psi) / n
    left = float(np.sum(sym * np.abs(coef) ** 2))
    u = np.abs(psi)
    safe = np.where(u > 0, u, 1.0)
    du = np.where(u > 0, np.real(np.conj(psi) * d_theta(psi)) / safe, 0.0)
    right = (1.0 - 4.0 * a * a) * float(np.mean(du ** 2)) + a * a * float(np.mean(u ** 2))
    return left, right


def energy_F(w: CylinderField, kappa: float, nu: float, p: float) -> float:
    """``int (w_s^2 + nu w_theta^2 + kappa w^2) - k_star(sqrt kappa) (int |w|^p)^(2/p)``."""
    if not (kappa > 0 and nu > 0):
        raise DomainError(f"energy_F needs kappa > 0 and nu > 0, got {kappa!r}, {nu!r}")
    g = w.grid
    ang = g.modes.astype(float) ** 2
    ang[g.Ntheta // 2] = (g.Ntheta / 2) ** 2
    symbol = g.s_symbol[:, None] + nu * ang[None, :] + kappa
    quad = _quadratic(g, w.values.real, symbol)
    return quad - cf.k_star(math.sqrt(kappa), p) * lp_functional(w, p)


# symmetry -----------------------------------------------------------------

class SymmetryVerdict(NamedTuple):
    label: str  # "symmetric" or "broken"
    score: float

    @property
    def symmetric(self) -> bool:
        return self.label == "symmetric"


def symmetry_score(psi: CylinderField) -> float:
    """``int Var_theta(|psi|) ds / ||psi||_2^2``; depends on the modulus only."""
    u = psi.modulus
    var = np.var(u, axis=1)
    return float(np.sum(var)) * psi.grid.ds / psi.l2_sq()


def classify_symmetry(psi: CylinderField, tolerance: float = 1e-4) -> SymmetryVerdict:
    """``symmetric`` iff the angular-variance score is strictly below ``tolerance``."""
    _require_nonzero(psi)
    score = symmetry_score(psi)
    return SymmetryVerdict("symmetric" if score < tolerance else "broken", score)


# second variation ---------------------------------------------------------

def symmetric_profile(grid: CylinderGrid, params: Params) -> np.ndarray:
    return cf.w_star(grid.s_nodes, params)


def quadratic_Q(phi: CylinderField | np.ndarray, chi: CylinderField | np.ndarray,
                params: Params, grid: CylinderGrid | None = None) -> float:
    """Second variation of the magnetic deficit at the symmetric optimizer.

    ``phi`` perturbs the modulus and ``chi`` the phase of ``w_star``::

        int w^2 (chi_s^2 + (chi_theta - a)^2 - a^2) - 4a int w phi chi_theta
        + int (phi_s^2 + phi_theta^2 + kappa phi^2) - (p-1) int w^(p-2) phi^2
    """
    if grid is None:
        grid = phi.grid if isinstance(phi, CylinderField) else chi.grid
    phi = np.real(phi.values if isinstance(phi, CylinderField) else np.asarray(phi))
    chi = np.real(chi.values if isinstance(chi, CylinderField) else np.asarray(chi))
    a, p, kappa = params.a, params.p, params.kappa
    w = symmetric_profile(grid, params)[:, None]
    chi_s, chi_t = d_s(chi, grid.ds), d_theta(chi)
    phase = np.sum(w ** 2 * (chi_s ** 2 + (chi_t - a) ** 2 - a * a)) - 4.0 * a * np.sum(w * phi * chi_t)
    ang = grid.modes.astype(float) ** 2
    ang[grid.Ntheta // 2] = (grid.Ntheta / 2) ** 2
    modulus = _quadratic(grid, phi, grid.s_symbol[:, None] + ang[None, :] + kappa)
    potential = (p - 1.0) * np.sum(w ** (p - 2.0) * phi ** 2)
    return float(phase - potential) * grid.cell + modulus


def ansatz_fields(zeta: float, grid: CylinderGrid, params: Params) -> tuple[np.ndarray, np.ndarray]:
    """Coupled test direction: ``phi = c^(-p/(p-2)) cos theta``, ``chi = (zeta/zeta_star) c^-1 sin theta``."""
    p = params.p
    spec = cf.profile("w_star_cylinder", params)
    c = np.cosh(spec.alpha_or_omega * grid.s_nodes)[:, None]
    th = grid.theta_nodes[None, :]
    phi = c ** (-p / (p - 2.0)) * np.cos(th)
    chi = (zeta / spec.amplitude) / c * np.sin(th)
    return phi, chi


def _ansatz_coefficients(params: Params):
    a, p, kappa = params.a, params.p, params.kappa
    omega = params.omega
    alpha = 2.0 * p / (p - 2.0)
    I = cf.integral_I(alpha, omega)
    J = cf.integral_J(alpha + 2.0, omega)
    I2 = cf.integral_I(alpha + 2.0, omega)
    zstar_pow = 0.5 * p * kappa  # zeta_star^(p-2)
    quad = omega ** 2 * J + I
    lin = -4.0 * a * I
    const = (p * omega / (p - 2.0)) ** 2 * J + (1.0 + kappa) * I - (p - 1.0) * zstar_pow * I2
    return quad, lin, const


def ansatz_Q(zeta: float, params: Params) -> float:
    """Closed-form value of :func:`quadratic_Q` along :func:`ansatz_fields`.

    The angular average of ``cos^2`` / ``sin^2`` contributes the overall
    factor ``1/2``, so this equals the grid quadrature with ``dsigma``.
    """
    quad, lin, const = _ansatz_coefficients(params)
    return 0.5 * (quad * zeta ** 2 + lin * zeta + const)


def ansatz_zeta(params: Params) -> float:
    """Minimizer ``2 a I / (omega^2 J + I)`` of :func:`ansatz_Q` at the given lambda."""
    quad, lin, _ = _ansatz_coefficients(params)
    return -lin / (2.0 * quad)


def modulus_mode_Q(params: Params, grid: CylinderGrid) -> float:
    """:func:`quadratic_Q` with ``chi = 0`` and ``phi = w^(p/2) cos theta``."""
    w = symmetric_profile(grid, params)
    phi = (w ** (params.p / 2.0))[:, None] * np.cos(grid.theta_nodes)[None, :]
    return quadratic_Q(phi, np.zeros(grid.shape), params, grid)
