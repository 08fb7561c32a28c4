"""Cross-formula identity suite for the closed forms and the integral recurrences."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closed_form as cf


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: residual {self.residual:.3e} (tol {self.tolerance:.0e})"


def sweep_grid(n: int = 50):
    """``n x n`` grid over ``a in [0.01, 0.49]``, ``p in [2.2, 10]``."""
    return np.linspace(0.01, 0.49, n), np.linspace(2.2, 10.0, n)


def _sweep(fn, n):
    A, P = sweep_grid(n)
    return max(fn(float(a), float(p)) for a in A for p in P)


def gap_consistency(a, p):
    return abs(cf.gap(a, p) - (cf.lambda_bullet(a, p) - cf.lambda_star(a, p)))


def q_root(a, p):
    return abs(cf.q_poly(cf.lambda_bullet(a, p), a, p))


def q_star_identity(a, p):
    expected = (8.0 * a / (p * p - 4.0)) ** 2 * (1.0 - 4.0 * a * a)
    return abs(cf.q_poly(cf.lambda_star(a, p), a, p) - expected)


def mu_two_path(a, p):
    m = cf.mu_star(a, p)
    return abs(m - cf.h_mu(cf.lambda_star(a, p), a, p)) / m


def _recurrences():
    worst = 0.0
    for alpha in (1.5, 4.0, 6.0, 9.5):
        for omega in (0.3, 1.0, 2.5):
            I = cf.integral_I(alpha, omega)
            worst = max(worst,
                        abs(cf.integral_J(alpha + 2.0, omega) - I / (alpha + 1.0)) / I,
                        abs(cf.integral_I(alpha + 2.0, omega) - alpha / (alpha + 1.0) * I) / I)
    return worst


def _h_round_trip():
    worst = 0.0
    for a in (0.0, 0.2, 0.45):
        for p in (2.5, 4.0, 8.0):
            for lam in (-0.5 * a * a or 0.01, 0.1, 1.0, 5.0):
                worst = max(worst, abs(cf.invert_h(cf.h_mu(lam, a, p), a, p) - lam) / max(1.0, abs(lam)))
    return worst


def run_identity_suite(n: int = 50, perturb: float = 0.0) -> list[CheckResult]:
    """Run every identity; ``perturb`` is added to each residual (negative control hook)."""
    checks = [
        ("gap consistency", _sweep(gap_consistency, n), 1e-10),
        ("q(lambda_bullet) = 0", _sweep(q_root, n), 1e-10),
        ("q(lambda_star) identity", _sweep(q_star_identity, n), 1e-10),
        ("I/J recurrences", _recurrences(), 1e-9),
        ("h round-trip", _h_round_trip(), 1e-10),
        ("mu_star two-path", _sweep(mu_two_path, n), 1e-10),
    ]
    return [CheckResult(name, float(res) + perturb, tol) for name, res, tol in checks]


def all_passed(results) -> bool:
    return all(r.passed and math.isfinite(r.residual) for r in results)
