"""Closed-form thresholds, optimal constants and profiles.

Everything here is a pure function of ``(a, p)`` or ``(lambda, a, p)``.
The flux ``a`` is expected in the reduced range ``[0, 1/2]``; use
:func:`abhardy.params.reduce_flux` first for other values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericError
from .params import Params

TWO_PI = 2.0 * math.pi


def _check_p(p: float) -> float:
    p = float(p)
    if not (math.isfinite(p) and p > 2.0):
        raise DomainError(f"exponent must satisfy p > 2, got p={p!r}")
    return p


def _check_ap(a: float, p: float) -> tuple[float, float]:
    a = float(a)
    if not (math.isfinite(a) and 0.0 <= a <= 0.5):
        raise DomainError(f"flux must lie in [0, 1/2], got a={a!r} (reduce it first)")
    return a, _check_p(p)


def gamma_fn(x: float) -> float:
    """Euler's Gamma function on the positive axis."""
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"gamma_fn needs x > 0, got x={x!r}")
    return math.gamma(x)


def _gamma_factor(p: float) -> float:
    # 2 sqrt(pi) Gamma(n) / ((p-2) Gamma(n + 1/2)), n = p/(p-2); lgamma keeps p -> 2+ finite
    n = p / (p - 2.0)
    ratio = math.exp(math.lgamma(n) - math.lgamma(n + 0.5))
    return 2.0 * math.sqrt(math.pi) * ratio / (p - 2.0)


def k_star(A: float, p: float) -> float:
    """Optimal constant of the 1-D inequality ``int w'^2 + A^2 int w^2 >= K (int |w|^p)^(2/p)``."""
    p = _check_p(p)
    A = float(A)
    if A == 0.0 or not math.isfinite(A):
        raise DomainError(f"k_star needs a finite nonzero A, got A={A!r}")
    return 0.5 * p * abs(A) ** (1.0 + 2.0 / p) * _gamma_factor(p) ** (1.0 - 2.0 / p)


def c_star(A: float, p: float) -> float:
    """Optimal constant on the plane, ``(2 pi)^(1-2/p) * k_star(A, p)``."""
    return TWO_PI ** (1.0 - 2.0 / _check_p(p)) * k_star(A, p)


def h_mu(lam: float, a: float, p: float) -> float:
    """Symmetric optimal constant ``mu(lambda)`` of the magnetic Hardy-Sobolev inequality."""
    p = _check_p(p)
    kappa = float(lam) + float(a) ** 2
    if not kappa > 0.0:
        raise DomainError(f"h_mu needs lambda > -a^2, got lambda={lam!r}, a={a!r}")
    return (0.5 * p * TWO_PI ** (1.0 - 2.0 / p) * kappa ** (0.5 + 1.0 / p)
            * _gamma_factor(p) ** (1.0 - 2.0 / p))


def invert_h(mu: float, a: float, p: float, rtol: float = 1e-12, max_iter: int = 200) -> float:
    """Return the unique ``lambda > -a^2`` with ``h_mu(lambda, a, p) == mu``.

    The root is bracketed in ``kappa = lambda + a^2`` by geometric growth
    and refined with Brent's method.
    """
    p = _check_p(p)
    mu = float(mu)
    if not (math.isfinite(mu) and mu > 0.0):
        raise DomainError(f"invert_h needs mu > 0, got mu={mu!r}")
    a2 = float(a) ** 2

    def f(kappa):
        return h_mu(kappa - a2, a, p) - mu

    lo, hi = 1.0, 1.0
    for _ in range(max_iter):
        if f(lo) < 0.0:
            break
        lo *= 0.125
    else:
        raise NumericError("invert_h: could not bracket the root from below")
    for _ in range(max_iter):
        if f(hi) > 0.0:
            break
        hi *= 8.0
    else:
        raise NumericError("invert_h: could not bracket the root from above")
    if f(lo) == 0.0:
        return lo - a2
    try:
        kappa = brentq(f, lo, hi, xtol=1e-300, rtol=max(rtol, 4.5e-16), maxiter=max_iter)
    except RuntimeError as exc:
        raise NumericError(f"invert_h did not converge: {exc}") from exc
    return kappa - a2


def lambda_star(a: float, p: float) -> float:
    """Symmetry threshold: ``(lambda + a^2)(p^2 - 4) = 4 (1 - 4 a^2)``."""
    a, p = _check_ap(a, p)
    return 4.0 * (1.0 - 4.0 * a * a) / (p * p - 4.0) - a * a


def lambda_star_appendix(a: float, p: float) -> float:
    """Equivalent rational form ``(4(1 - 3a^2) - a^2 p^2) / (p^2 - 4)``."""
    a, p = _check_ap(a, p)
    return (4.0 * (1.0 - 3.0 * a * a) - a * a * p * p) / (p * p - 4.0)


def _discriminant(a: float, p: float) -> float:
    return p ** 4 - a * a * (p - 2.0) ** 2 * (p + 2.0) * (3.0 * p - 2.0)


def lambda_bullet(a: float, p: float) -> float:
    """Symmetry-breaking threshold from the coupled modulus/phase test function."""
    a, p = _check_ap(a, p)
    disc = _discriminant(a, p)
    if disc < 0.0:
        raise NumericError(f"negative discriminant {disc!r} at a={a!r}, p={p!r}")
    # rationalized: 8(sqrt(disc) + 2) - 4p(p+4) cancels badly as p -> 2+
    kappa = (4.0 * (3.0 * p - 2.0) * (1.0 - 4.0 * a * a)
             / ((p - 2.0) * (2.0 * math.sqrt(disc) + p * p + 4.0 * p - 4.0)))
    return kappa - a * a


def lambda_fs(a: float, p: float) -> float:
    """Modulus-only instability threshold ``(4(1 + a^2) - a^2 p^2) / (p^2 - 4)``."""
    a, p = _check_ap(a, p)
    return (4.0 * (1.0 + a * a) - a * a * p * p) / (p * p - 4.0)


def mu_star(a: float, p: float) -> float:
    """``mu(lambda_star)`` via its own closed form (independent of :func:`h_mu`)."""
    a, p = _check_ap(a, p)
    if a == 0.5:
        raise DomainError("mu_star is undefined at a = 1/2 (lambda_star + a^2 = 0)")
    n = p / (p - 2.0)
    ratio = math.exp(math.lgamma(n) - math.lgamma(n + 0.5))
    return (2.0 * p * ((1.0 - 4.0 * a * a) / (p * p - 4.0)) ** (0.5 + 1.0 / p)
            * math.pi ** (1.5 - 3.0 / p)
            * (2.0 * ratio / (p - 2.0)) ** (1.0 - 2.0 / p))


def mu_bullet(a: float, p: float) -> float:
    """``h_mu(lambda_bullet)``."""
    a, p = _check_ap(a, p)
    if a == 0.5:
        raise DomainError("mu_bullet is undefined at a = 1/2 (lambda_bullet + a^2 = 0)")
    return h_mu(lambda_bullet(a, p), a, p)


def q_poly(lam: float, a: float, p: float) -> float:
    """Quadratic whose sign decides instability along the coupled test direction.

    Proportional (with a positive factor) to the minimum over the phase
    amplitude of the second variation along the coupled test function.
    Its larger root is ``lambda_bullet``. The constant term carries the
    factor ``1/((p-2)^4 (p+2))``: with ``(p-2)^3`` there instead, neither
    ``q(lambda_bullet) = 0`` nor ``q(lambda_star) = (8a/(p^2-4))^2 (1-4a^2)``
    holds.
    """
    p = _check_p(p)
    a, lam = float(a), float(lam)
    d = (p - 2.0) ** 3 * (p + 2.0)
    return (-lam * lam
            - 2.0 * (4.0 * (p * p + 4.0 * p - 4.0) / d + a * a) * lam
            + 8.0 * (2.0 * (3.0 * p - 2.0) - a * a * (p ** 3 + 2.0 * p * p + 12.0 * p - 8.0))
            / ((p - 2.0) * d)
            - a ** 4)


def gap(a: float, p: float) -> float:
    """``lambda_bullet - lambda_star`` from its own closed form."""
    a, p = _check_ap(a, p)
    root = math.sqrt(p ** 4 - a * a * (p - 2.0) ** 2 * (3.0 * p * p + 4.0 * p - 4.0))
    return 8.0 / ((p - 2.0) ** 3 * (p + 2.0)) * (root + 2.0 * a * a * (p - 2.0) ** 2 - p * p)


def zeta_opt(a: float, p: float) -> float:
    """Optimal phase amplitude of the coupled test function at ``lambda_bullet``."""
    a, p = _check_ap(a, p)
    return a * (p + 2.0) * (3.0 * p - 2.0) / (p * p + math.sqrt(_discriminant(a, p)))


@dataclass(frozen=True)
class Thresholds:
    a: float
    p: float
    lambda_star: float
    lambda_bullet: float
    lambda_fs: float
    mu_star: float
    mu_bullet: float
    gap: float
    zeta_opt: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _mu_or_zero(lam, a, p):
    # h vanishes continuously as lambda -> -a^2
    if lam + a * a <= 1e-14:
        return 0.0
    return h_mu(lam, a, p)


def thresholds(a: float, p: float) -> Thresholds:
    """Collect every threshold for ``(a, p)``.

    At the boundary flux ``a = 1/2`` both thresholds equal ``-a^2`` and the
    corresponding constants are reported as their limit value ``0``.
    """
    a, p = _check_ap(a, p)
    ls, lb = lambda_star(a, p), lambda_bullet(a, p)
    return Thresholds(
        a=a, p=p,
        lambda_star=ls, lambda_bullet=lb, lambda_fs=lambda_fs(a, p),
        mu_star=_mu_or_zero(ls, a, p), mu_bullet=_mu_or_zero(lb, a, p),
        gap=gap(a, p), zeta_opt=zeta_opt(a, p),
    )


PROFILE_KINDS = ("w_star_cylinder", "psi_disk", "phi_potential")


@dataclass(frozen=True)
class ProfileSpec:
    """A radial profile: ``kind``, its scale exponent and its amplitude.

    Calling a ProfileSpec evaluates the profile: at ``s`` on the cylinder for
    ``w_star_cylinder``, at radius ``r`` otherwise.
    """

    kind: str
    alpha_or_omega: float
    amplitude: float
    p: float

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise DomainError(f"unknown profile kind {self.kind!r}")
        if not (self.alpha_or_omega > 0.0 and self.amplitude > 0.0):
            raise DomainError("profile scale and amplitude must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c = self.alpha_or_omega
        if self.kind == "w_star_cylinder":
            return self.amplitude * np.cosh(c * x) ** (-2.0 / (self.p - 2.0))
        # r^c + r^-c = 2 cosh(c log r), avoids overflow for large or tiny r
        base = 2.0 * np.cosh(c * np.log(x))
        power = -2.0 / (self.p - 2.0) if self.kind == "psi_disk" else -2.0
        return self.amplitude * base ** power


def profile(kind: str, params: Params) -> ProfileSpec:
    """Symmetric optimizer / optimal potential associated with ``params``."""
    p, kappa = params.p, params.kappa
    omega = 0.5 * (p - 2.0) * math.sqrt(kappa)
    if kind == "w_star_cylinder":
        zeta = (0.5 * p * kappa) ** (1.0 / (p - 2.0))
        return ProfileSpec(kind, omega, zeta, p)
    return ProfileSpec(kind, omega, 1.0, p)


def w_star(s, params: Params) -> np.ndarray:
    """Shortcut: the symmetric optimizer solving ``-w'' + kappa w = w^(p-1)``."""
    return profile("w_star_cylinder", params)(s)


def _gauss_panels(func: Callable, S: float, panels: int, order: int = 20) -> float:
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, S, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * func(nodes)))


def _sech_integral(func, alpha: float, omega: float, rtol: float) -> float:
    # cosh(omega S)^-alpha < 1e-16 beyond S (acosh(y) < log(2y))
    S = (math.log(2.0) + 16.0 * math.log(10.0) / alpha) / omega
    panels = 8
    prev = 2.0 * _gauss_panels(func, S, panels)
    for _ in range(12):
        panels *= 2
        cur = 2.0 * _gauss_panels(func, S, panels)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise NumericError(f"quadrature did not converge (alpha={alpha!r}, omega={omega!r})")


def integral_I(alpha: float, omega: float, rtol: float = 1e-10) -> float:
    """``int_R cosh(omega s)^-alpha ds`` by truncated composite Gauss-Legendre."""
    alpha, omega = float(alpha), float(omega)
    if not (alpha > 0.0 and omega > 0.0):
        raise DomainError(f"integral_I needs alpha > 0 and omega > 0, got {alpha!r}, {omega!r}")
    return _sech_integral(lambda s: np.cosh(omega * s) ** (-alpha), alpha, omega, rtol)


def integral_J(beta: float, omega: float, rtol: float = 1e-10) -> float:
    """``int_R sinh(omega s)^2 cosh(omega s)^-beta ds`` for ``beta > 2``."""
    beta, omega = float(beta), float(omega)
    if not (beta > 2.0 and omega > 0.0):
        raise DomainError(f"integral_J needs beta > 2 and omega > 0, got {beta!r}, {omega!r}")

    def f(s):
        c = np.cosh(omega * s)
        return np.tanh(omega * s) ** 2 * c ** (2.0 - beta)

    return _sech_integral(f, beta - 2.0, omega, rtol)
