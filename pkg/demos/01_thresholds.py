"""
Where symmetry holds and where it breaks
========================================

For a fixed exponent p the closed forms give three curves in the
(a, lambda) plane. Below lambda_star the symmetric profile is optimal;
above lambda_bullet it is not. The strip between them is small.
"""
import numpy as np

from abhardy import closed_form as cf

p = 4.0
for a in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5):
    t = cf.thresholds(a, p)
    print(f"a={a:.1f}  lambda_star={t.lambda_star:+.6f}  lambda_bullet={t.lambda_bullet:+.6f}"
          f"  lambda_fs={t.lambda_fs:+.6f}  gap={t.gap:.2e}")

# the gap vanishes at both ends of the flux range
a = np.linspace(0.0, 0.5, 201)
g = np.array([cf.gap(x, p) for x in a])
print("largest gap %.6g at a=%.4f" % (g.max(), a[g.argmax()]))

# optimal constants along the symmetric branch
lam = np.linspace(-0.03, 0.24, 4)
print("h(lambda) at a=0.2:", [round(cf.h_mu(x, 0.2, p), 6) for x in lam])
print("invert_h(h(0.1)) =", cf.invert_h(cf.h_mu(0.1, 0.2, p), 0.2, p))
