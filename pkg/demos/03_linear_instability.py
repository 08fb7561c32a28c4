"""
The coupled modulus/phase eigenproblem
======================================

Perturbing modulus and phase together, the lowest eigenvalue of the
coupled system changes sign somewhere in [lambda_star, lambda_bullet].
The scan below locates that crossing.
"""
from abhardy import closed_form as cf, spectral as sp

a, p = 0.2, 4.0
rep = sp.instability_scan(a, p, (0.2, 0.4), 41)
print("lambda_star   %.8f" % cf.lambda_star(a, p))
print("crossing      %.8f" % rep.boundary[0])
print("lambda_bullet %.8f" % cf.lambda_bullet(a, p))
print("negative set is an interval on the grid:", rep.interval)

# the one-parameter trial direction changes sign exactly at lambda_bullet
lb = cf.lambda_bullet(a, p)
for d in (-1e-3, 1e-3):
    print("restricted quotient at lambda_bullet%+g: %+.3e" % (d, sp.restricted_rayleigh(sp.CoupledSystem(a, p, lb + d))))

# a = 1/2: unstable for every admissible lambda
rep = sp.instability_scan(0.5, 4.0, (-0.2, 0.5), 8)
print("a=1/2 values:", ["%.3f" % v for v in rep.values])

# the single-mode problem: Poschl-Teller ground state
r = sp.solve_poschl_teller(sp.PoschlTellerProblem(1.0, 4.0))
print("Poschl-Teller ground state %.9f (closed form -3)" % r.value)
