"""Closed forms against independent oracles (quadrature, exact rationals, direct minimization)."""
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, optimize

from abhardy import DomainError, Params
from abhardy import closed_form as cf

# frozen oracle values (computed by the independent routes below)
LAMBDA_BULLET_02_4 = 0.24285558271314447
GAP_02_4 = 0.0028555827131443814
K_STAR_1_4 = 4 / math.sqrt(3)
MU_STAR_02_4 = 2.2282187358712053
MU_BULLET_02_4 = 2.2452404833104227


def gamma_oracle(x):
    if x < 1:
        return gamma_oracle(x + 1) / x
    return integrate.quad(lambda t: t ** (x - 1) * math.exp(-t), 0, math.inf, epsabs=0, epsrel=1e-13, limit=200)[0]


def sech(x):
    x = abs(x)
    e = math.exp(-x)
    return 2 * e / (1 + e * e)


def ground_profile_integral(kappa, p):
    # int w^p ds for the explicit sech profile solving -w'' + kappa w = w^(p-1)
    om = 0.5 * (p - 2) * math.sqrt(kappa)
    amp = (0.5 * p * kappa) ** (1 / (p - 2))
    f = lambda s: (amp * sech(om * s) ** (2 / (p - 2))) ** p
    return 2 * integrate.quad(f, 0, math.inf, epsabs=0, epsrel=1e-13, limit=200)[0]


def rayleigh_oracle(kappa, p, n=1201, L=15.0):
    """Minimize the discrete 1-D quotient over grid values (independent of formulas)."""
    h = 2 * L / (n + 1)

    def quot(u):
        du = np.diff(np.concatenate([[0.0], u, [0.0]]))
        num = np.sum(du ** 2) / h + kappa * h * np.sum(u ** 2)
        den = h * np.sum(np.abs(u) ** p)
        lap = (2 * u - np.concatenate([[0.0], u[:-1]]) - np.concatenate([u[1:], [0.0]])) / h
        g_num = 2 * lap + 2 * kappa * h * u
        g_den = p * h * np.abs(u) ** (p - 2) * u
        val = num / den ** (2 / p)
        grad = g_num / den ** (2 / p) - (2 / p) * num * den ** (-2 / p - 1) * g_den
        return val, grad

    s = -L + h * np.arange(1, n + 1)
    best = optimize.minimize(quot, np.exp(-s * s / 4), jac=True, method="L-BFGS-B",
                             options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 20000})
    return best.fun


def q_min_oracle(a, p, lam):
    # minimum over zeta of the ansatz reduction, with all integrals by scipy quad
    kappa = lam + a * a
    om = 0.5 * (p - 2) * math.sqrt(kappa)
    al = 2 * p / (p - 2)
    quad = lambda f: 2 * integrate.quad(f, 0, math.inf, epsabs=0, epsrel=1e-13, limit=400)[0]
    I = quad(lambda s: sech(om * s) ** al)
    I2 = quad(lambda s: sech(om * s) ** (al + 2))
    J = quad(lambda s: math.tanh(om * s) ** 2 * sech(om * s) ** al)
    A = om * om * J + I
    C = (p * om / (p - 2)) ** 2 * J + (1 + kappa) * I - (p - 1) * 0.5 * p * kappa * I2
    return (C - (2 * a * I) ** 2 / A) / I


def lambda_bullet_oracle(a, p):
    return optimize.brentq(lambda lam: q_min_oracle(a, p, lam), cf.lambda_star(a, p), cf.lambda_fs(a, p), xtol=1e-15)


# gamma ----------------------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(2.0, 1.0), (0.5, math.sqrt(math.pi)), (2.5, 3 * math.sqrt(math.pi) / 4)])
def test_gamma_examples(x, expected):
    assert cf.gamma_fn(x) == pytest.approx(expected, rel=1e-13)
    assert cf.gamma_fn(x) == pytest.approx(gamma_oracle(x), rel=1e-11)


def test_gamma_against_quadrature():
    for x in np.linspace(1.0, 30.0, 25):
        assert cf.gamma_fn(x) == pytest.approx(gamma_oracle(x), rel=1e-11)


@pytest.mark.parametrize("x", [0.0, -1.5])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        cf.gamma_fn(x)


# constants ------------------------------------------------------------------

def test_k_star_examples():
    assert cf.k_star(1, 4) == pytest.approx(K_STAR_1_4, rel=1e-13)
    assert cf.k_star(2, 4) == pytest.approx(2 ** 1.5 * K_STAR_1_4, rel=1e-13)
    assert cf.k_star(-1, 4) == cf.k_star(1, 4)
    with pytest.raises(DomainError):
        cf.k_star(0, 4)


def test_k_star_against_profile_integral():
    for kappa in (0.3, 1.0, 2.2):
        for p in (2.5, 3.0, 4.0, 7.0):
            oracle = ground_profile_integral(kappa, p) ** (1 - 2 / p)
            assert cf.k_star(math.sqrt(kappa), p) == pytest.approx(oracle, rel=1e-11)


def test_k_star_is_optimal_for_the_1d_quotient():
    assert rayleigh_oracle(1.0, 4.0) == pytest.approx(K_STAR_1_4, rel=1e-3)


def test_k_star_homogeneity():
    for t in (0.1, 0.7, 3.0):
        for p in (3.0, 5.0):
            assert cf.k_star(t * 1.3, p) == pytest.approx(t ** (1 + 2 / p) * cf.k_star(1.3, p), rel=1e-12)


def test_c_star():
    # sqrt(2 pi) * 4/sqrt(3) = 5.78881..., not 5.78905
    assert cf.c_star(1, 4) == pytest.approx(math.sqrt(2 * math.pi) * K_STAR_1_4, rel=1e-13)
    assert cf.c_star(1, 4) == pytest.approx(5.788810036466139, rel=1e-13)
    for A, p in ((0.4, 3.0), (2.0, 6.0)):
        assert cf.c_star(A, p) / cf.k_star(A, p) == pytest.approx((2 * math.pi) ** (1 - 2 / p), rel=1e-14)
    assert cf.c_star(1, 4) > cf.c_star(0.5, 4)


def test_h_mu_examples():
    assert cf.h_mu(1 - 0.04, 0.2, 4) == pytest.approx(cf.c_star(1, 4), rel=1e-13)
    assert cf.h_mu(-0.04 + 1e-12, 0.2, 4) < 1e-7
    assert cf.h_mu(cf.lambda_star(0.2, 4), 0.2, 4) == pytest.approx(MU_STAR_02_4, rel=1e-12)
    with pytest.raises(DomainError):
        cf.h_mu(-0.05, 0.2, 4)


def test_h_mu_increasing_concave():
    for a, p in ((0.0, 3.0), (0.2, 4.0), (0.45, 8.0)):
        lam = np.linspace(-a * a + 1e-3, 5, 400)
        h = np.array([cf.h_mu(x, a, p) for x in lam])
        assert np.all(np.diff(h) > 0)
        assert np.all(np.diff(h, 2) <= 1e-12)


def test_invert_h():
    for a, p in ((0.0, 3.0), (0.2, 4.0), (0.45, 8.0)):
        assert cf.invert_h(cf.h_mu(0.5, a, p), a, p) == pytest.approx(0.5, rel=1e-12)
        for mu in (0.01, 0.3, 2.0, 50.0):
            lam = cf.invert_h(mu, a, p)
            assert lam > -a * a
            assert cf.h_mu(lam, a, p) == pytest.approx(mu, rel=1e-10)
        # tiny mu: lambda = kappa - a^2 can only carry eps * a^2 absolute accuracy
        lam = cf.invert_h(1e-6, a, p)
        kappa = lam + a * a
        cond = (0.5 + 1 / p) * 4 * np.finfo(float).eps * max(a * a, kappa) / kappa
        assert cf.h_mu(lam, a, p) == pytest.approx(1e-6, rel=max(1e-10, cond))
    assert cf.invert_h(1e-12, 0.2, 4) == pytest.approx(-0.04, abs=1e-9)
    assert cf.invert_h(MU_STAR_02_4, 0.2, 4) == pytest.approx(0.24, rel=1e-12)
    with pytest.raises(DomainError):
        cf.invert_h(-1.0, 0.2, 4)


# thresholds -----------------------------------------------------------------

def test_lambda_star_exact_rational():
    a, p = Fraction(1, 5), Fraction(4)
    exact = 4 * (1 - 4 * a * a) / (p * p - 4) - a * a
    assert exact == Fraction(6, 25)
    assert cf.lambda_star(0.2, 4) == pytest.approx(float(exact), abs=1e-16)
    assert cf.lambda_star(0, 4) == pytest.approx(1 / 3, abs=1e-15)
    assert cf.lambda_star(0.5, 4) == pytest.approx(-0.25, abs=1e-15)


def test_lambda_bullet_against_oracle():
    assert LAMBDA_BULLET_02_4 == pytest.approx(lambda_bullet_oracle(0.2, 4), abs=1e-11)
    assert cf.lambda_bullet(0.2, 4) == pytest.approx(LAMBDA_BULLET_02_4, abs=1e-14)
    assert cf.lambda_bullet(0.2, 4) == pytest.approx(0.242855, abs=1e-5)
    for a, p in ((0.1, 3.0), (0.35, 6.0), (0.45, 2.5)):
        assert cf.lambda_bullet(a, p) == pytest.approx(lambda_bullet_oracle(a, p), abs=1e-10)


def test_lambda_bullet_limits():
    assert cf.lambda_bullet(0.5, 4) == pytest.approx(-0.25, abs=1e-12)
    assert cf.lambda_bullet(1e-9, 4) == pytest.approx(1 / 3, abs=1e-12)


def test_lambda_fs():
    assert cf.lambda_fs(0, 4) == pytest.approx(1 / 3, abs=1e-15)
    assert cf.lambda_fs(0.2, 4) == pytest.approx(3.52 / 12, abs=1e-14)


def test_ordering_grid():
    for a in np.linspace(0.01, 0.49, 50):
        for p in np.linspace(2.2, 10, 50):
            ls, lb, lf = cf.lambda_star(a, p), cf.lambda_bullet(a, p), cf.lambda_fs(a, p)
            assert ls < lb < lf


def test_mu_star_and_bullet():
    assert cf.mu_star(0.2, 4) == pytest.approx(MU_STAR_02_4, rel=1e-12)
    assert cf.mu_bullet(0.2, 4) == pytest.approx(MU_BULLET_02_4, rel=1e-12)
    assert cf.mu_bullet(0.2, 4) == pytest.approx(cf.h_mu(LAMBDA_BULLET_02_4, 0.2, 4), rel=1e-13)
    assert cf.mu_star(0.5 - 1e-9, 4) < 1e-5
    mus = [cf.mu_star(a, 4) for a in np.linspace(0.005, 0.495, 100)]
    assert np.all(np.diff(mus) < 0)
    for a in np.linspace(0.01, 0.49, 20):
        assert cf.mu_bullet(a, 4) >= cf.mu_star(a, 4)
    assert cf.mu_bullet(1e-6, 4) - cf.mu_star(1e-6, 4) < 1e-9


def test_q_poly():
    expected = (1.6 / 12) ** 2 * 0.84
    assert cf.q_poly(0.24, 0.2, 4) == pytest.approx(expected, rel=1e-12)
    assert abs(cf.q_poly(LAMBDA_BULLET_02_4, 0.2, 4)) < 1e-12
    for a, p in ((0.1, 3.0), (0.3, 5.0), (0.45, 9.0)):
        assert cf.q_poly(cf.lambda_bullet(a, p) + 1, a, p) < 0


def test_q_poly_sign_matches_oracle_minimum():
    rng = np.random.default_rng(3)
    for _ in range(15):
        a, p = rng.uniform(0.02, 0.48), rng.uniform(2.5, 8)
        lam = cf.lambda_bullet(a, p) + rng.uniform(-0.2, 0.2)
        if lam <= -a * a:
            continue
        assert np.sign(cf.q_poly(lam, a, p)) == np.sign(q_min_oracle(a, p, lam))


def test_gap():
    assert cf.gap(0, 4) == 0.0
    assert cf.gap(0.5, 4) == pytest.approx(0.0, abs=1e-15)
    assert GAP_02_4 == pytest.approx(LAMBDA_BULLET_02_4 - 0.24, abs=1e-14)
    assert cf.gap(0.2, 4) == pytest.approx(GAP_02_4, abs=1e-15)
    assert cf.gap(0.2, 4) == pytest.approx(0.0028553, abs=1e-6)


def test_zeta_opt():
    assert cf.zeta_opt(0.5, 4) == pytest.approx(1.0, abs=1e-12)
    assert cf.zeta_opt(0.2, 4) == pytest.approx(12 / (16 + math.sqrt(246.4)), rel=1e-14)
    assert cf.zeta_opt(1e-9, 4) < 1e-8


def test_zeta_opt_is_the_minimizer_at_lambda_bullet():
    from abhardy.cylinder import ansatz_zeta
    for a, p in ((0.2, 4.0), (0.1, 3.0), (0.4, 6.0)):
        P = Params(a, p, cf.lambda_bullet(a, p))
        assert ansatz_zeta(P) == pytest.approx(cf.zeta_opt(a, p), rel=1e-9)


def test_thresholds_record():
    t = cf.thresholds(0.2, 4)
    assert t.lambda_star <= t.lambda_bullet <= t.lambda_fs
    assert t.mu_star == pytest.approx(cf.h_mu(t.lambda_star, 0.2, 4))
    t5 = cf.thresholds(0.5, 4)
    assert t5.lambda_star == pytest.approx(t5.lambda_bullet, abs=1e-12)


def test_pure():
    assert cf.lambda_bullet(0.3, 5) == cf.lambda_bullet(0.3, 5)
    assert cf.integral_I(3.0, 0.7) == cf.integral_I(3.0, 0.7)


# profiles and integrals -----------------------------------------------------

def test_profiles():
    P = Params(0.0, 4, 1.0)
    w = cf.profile("w_star_cylinder", P)
    assert w(0.0) == pytest.approx(w.amplitude)
    s = np.linspace(-5, 5, 11)
    assert np.allclose(cf.w_star(s, P), math.sqrt(2) / np.cosh(s), rtol=1e-14)
    P3 = Params(0.2, 3.3, 0.4)
    r = np.logspace(-3, 3, 50)
    psi, phi = cf.profile("psi_disk", P3), cf.profile("phi_potential", P3)
    assert np.allclose(phi(r), psi(r) ** (P3.p - 2), rtol=1e-13)
    # pullback: psi(r) is w_star(-log r) up to the constant amplitude
    ratio = psi(r) / cf.w_star(-np.log(r), P3)
    assert np.allclose(ratio, ratio[0], rtol=1e-12)
    with pytest.raises(DomainError):
        cf.profile("nope", P)


def test_integrals():
    assert cf.integral_I(2, 1) == pytest.approx(2.0, rel=1e-12)
    assert cf.integral_I(4, 1) == pytest.approx(4 / 3, rel=1e-12)
    for al in (2.0, 3.0, 4.0):
        assert cf.integral_J(al + 2, 1) * (al + 1) / cf.integral_I(al, 1) == pytest.approx(1, rel=1e-11)
    for al, om in ((0.7, 0.2), (5.3, 2.0)):
        # closed form: Beta(1/2, alpha/2) / omega
        exact = math.exp(math.lgamma(0.5) + math.lgamma(al / 2) - math.lgamma(al / 2 + 0.5)) / om
        assert cf.integral_I(al, om) == pytest.approx(exact, rel=1e-10)
    with pytest.raises(DomainError):
        cf.integral_I(-1, 1)
    with pytest.raises(DomainError):
        cf.integral_J(2.0, 1)
