"""Random smooth test fields shared by the property suites."""
import numpy as np

from abhardy.cylinder import CylinderField, build_grid


def small_grid(L=13.0, Ns=96, Ntheta=32):
    return build_grid(L, Ns, Ntheta)


def band_limited(rng, grid, max_mode=4, complex_=True):
    """Sum of angular modes ``|m| <= max_mode`` with random sech-decaying radial parts."""
    s = grid.s_nodes[:, None]
    th = grid.theta_nodes[None, :]
    out = np.zeros(grid.shape, dtype=complex)
    for m in range(-max_mode, max_mode + 1):
        c = rng.normal(size=4)
        width = rng.uniform(0.6, 1.6)
        radial = (c[0] + 1j * c[1] * complex_) / np.cosh(width * (s - 0.5 * c[2])) ** 2
        radial = radial * (1 + 0.3 * c[3] * s / (1 + s * s))
        out += radial * np.exp(1j * m * th)
    return CylinderField(out, grid)


def positive_modulus_phase(rng, grid, degree=3):
    """``u > 0`` and ``S`` smooth and periodic, small enough to be resolved spectrally."""
    s = grid.s_nodes[:, None]
    th = grid.theta_nodes[None, :]
    logu = np.zeros(grid.shape)
    S = np.zeros(grid.shape)
    for m in range(1, degree + 1):
        c = rng.normal(size=5) * 0.5
        env = np.exp(-(s - c[4]) ** 2 / 4)
        logu += env * (c[0] * np.cos(m * th) + c[1] * np.sin(m * th))
        S += env * (c[2] * np.cos(m * th) + c[3] * np.sin(m * th))
    u = np.exp(logu) / np.cosh(s) ** 2
    return u, S
