import math

import numpy as np
import pytest

from abhardy import DomainError, Params
from abhardy import closed_form as cf
from abhardy import cylinder as cy
from abhardy import spectral as sp


def pt_exact(kappa, p):
    return -kappa / 4 * (p * p - 4)


def test_poschl_teller_example_and_profile():
    r = sp.solve_poschl_teller(sp.PoschlTellerProblem(1.0, 4.0, 2048, 20.0))
    assert r.value == pytest.approx(-3.0, rel=1e-6)
    s, v = r.profiles
    h = s[1] - s[0]
    exact = np.cosh(s) ** -2
    exact /= math.sqrt(np.sum(exact ** 2) * h)
    assert np.all(v > 0)
    assert math.sqrt(np.sum((v - exact) ** 2) * h) <= 1e-5
    assert r.residual < 1e-8


def test_poschl_teller_scaling():
    v1 = sp.solve_poschl_teller(sp.PoschlTellerProblem(1.0, 3.0)).value
    v2 = sp.solve_poschl_teller(sp.PoschlTellerProblem(2.0, 3.0)).value
    assert v2 == pytest.approx(2 * v1, rel=1e-6)


def test_poschl_teller_validation():
    for bad in ((0.0, 4.0), (1.0, 2.0)):
        with pytest.raises(DomainError):
            sp.PoschlTellerProblem(*bad)
    with pytest.raises(DomainError):
        sp.PoschlTellerProblem(1.0, 4.0, 32)


def test_mode_eigenvalue():
    k, p = 0.7, 5.0
    assert sp.mode_eigenvalue(k, 0.3, p, 0) == pytest.approx(sp.solve_poschl_teller(sp.PoschlTellerProblem(k, p)).value)
    assert sp.mode_eigenvalue(k, 0.3, p, 1) == pytest.approx(0.3 + pt_exact(k, p), rel=1e-6)
    with pytest.raises(DomainError):
        sp.mode_eigenvalue(k, 0.3, p, -1)
    with pytest.raises(DomainError):
        sp.mode_eigenvalue(k, 0.0, p, 1)


def test_assembled_forms_symmetric_and_positive():
    m = sp.assemble_coupled(sp.CoupledSystem(0.3, 5.0, 0.2))
    assert np.max(np.abs(m.A - m.A.T)) <= 1e-12 * np.max(np.abs(m.A))
    assert np.max(np.abs(m.B - m.B.T)) <= 1e-12 * np.max(np.abs(m.B))
    assert np.min(np.linalg.eigvalsh(m.B)) > 0


def test_coupled_validation():
    with pytest.raises(DomainError):
        sp.CoupledSystem(0.2, 4.0, -0.05)
    with pytest.raises(DomainError):
        sp.CoupledSystem(0.2, 4.0, 0.1, N=32)


def test_decoupled_limit_matches_mode_eigenvalue():
    kappa, p = 0.25, 4.0
    g = sp.ground_state_coupled(sp.CoupledSystem(0.0, p, kappa))
    assert g.value == pytest.approx(sp.mode_eigenvalue(kappa, 1.0, p, 1), abs=1e-5)


def test_ground_state_signs_and_residual():
    a, p = 0.2, 4.0
    above = sp.ground_state_coupled(sp.CoupledSystem(a, p, cf.lambda_bullet(a, p) + 0.05))
    below = sp.ground_state_coupled(sp.CoupledSystem(a, p, cf.lambda_star(a, p) - 0.02))
    assert above.value < 0
    assert below.value >= -1e-6
    assert above.residual < 1e-8 and below.residual < 1e-8


def test_mesh_monotone_convergence():
    vals = [sp.ground_state_coupled(sp.CoupledSystem(0.3, 6.0, 0.1, N)).value for N in (64, 96, 128, 192)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    assert abs(vals[-1] - vals[-2]) < 1e-6


def test_restricted_quotient_sign_flip_at_lambda_bullet():
    a, p = 0.2, 4.0
    lb = cf.lambda_bullet(a, p)
    assert sp.restricted_rayleigh(sp.CoupledSystem(a, p, lb - 1e-4)) > 0
    assert sp.restricted_rayleigh(sp.CoupledSystem(a, p, lb + 1e-4)) < 0


def test_variational_upper_bound():
    rng = np.random.default_rng(5)
    for _ in range(15):
        a, p = rng.uniform(0.01, 0.5), rng.uniform(2.5, 9)
        lam = rng.uniform(-a * a + 0.02, 1.0)
        sys_ = sp.CoupledSystem(a, p, lam)
        ground = sp.ground_state_coupled(sys_).value
        assert ground <= sp.restricted_rayleigh(sys_, cf.zeta_opt(a, p)) + 1e-10
        assert ground <= sp.restricted_rayleigh(sys_) + 1e-10


def test_restricted_sign_matches_ansatz():
    rng = np.random.default_rng(6)
    done = 0
    while done < 30:
        a, p = rng.uniform(0.01, 0.49), rng.uniform(2.5, 9)
        lam = cf.lambda_bullet(a, p) + rng.uniform(-0.3, 0.3)
        if lam <= -a * a + 1e-3:
            continue
        P = Params(a, p, lam)
        r = sp.restricted_rayleigh(sp.CoupledSystem(a, p, lam))
        q = cy.ansatz_Q(cy.ansatz_zeta(P), P)
        if abs(q) < 1e-9:
            continue
        assert np.sign(r) == np.sign(q)
        done += 1


def test_scan_a_half_all_negative():
    rep = sp.instability_scan(0.5, 4.0, (-0.2, 0.5), 21)
    assert all(v < 0 for v in rep.values)
    assert rep.inclusion_ok


def test_scan_small_flux_boundary_near_one_third():
    rep = sp.instability_scan(1e-3, 4.0, (0.3, 0.36), 13)
    assert len(rep.boundary) == 1
    assert rep.boundary[0] == pytest.approx(1 / 3, abs=1e-4)


def test_scan_report_json_and_workers(monkeypatch):
    monkeypatch.setenv("ABHARDY_MAX_WORKERS", "2")
    assert sp.max_workers(8) == 2
    r1 = sp.instability_scan(0.2, 4.0, (0.2, 0.3), 6, workers=4)
    r2 = sp.instability_scan(0.2, 4.0, (0.2, 0.3), 6, workers=1)
    assert r1.to_json(sort_keys=True) == r2.to_json(sort_keys=True)
    assert r1.interval


def test_scan_validation():
    with pytest.raises(DomainError):
        sp.instability_scan(0.2, 4.0, (-0.05, 0.3), 5)
    with pytest.raises(DomainError):
        sp.instability_scan(0.2, 4.0, (0.3, 0.2), 5)


def test_scan_flags_inclusion_violations():
    rep = sp.instability_scan(0.2, 4.0, (0.2, 0.4), 5)
    assert rep.inclusion_ok
    # a deliberately wrong tolerance makes the negative samples look like violations
    bad = sp.instability_scan(0.2, 4.0, (0.2, 0.24), 3, neg_tol=-1.0)
    assert not bad.inclusion_ok
