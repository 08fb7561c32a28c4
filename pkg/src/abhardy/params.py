"""Problem parameters and the flux reductions.

The physics is 1-periodic in the flux and invariant under ``a -> -a``
(complex conjugation combined with a unit gauge shift), so every flux is
mapped to the fundamental range ``[0, 1/2]`` before use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError


def reduce_flux(a_raw: float) -> float:
    """Return the representative of ``a_raw`` in ``[0, 1/2]``.

    The result satisfies ``r**2 == min_k (a_raw - k)**2``. Ties at half
    integers resolve to ``1/2``.
    """
    a_raw = float(a_raw)
    if not math.isfinite(a_raw):
        raise DomainError(f"flux must be finite, got a={a_raw!r}")
    frac = a_raw - math.floor(a_raw)
    return min(frac, 1.0 - frac)


def dual_exponent(p: float) -> float:
    """Hölder-dual exponent ``q = p/(p-2)``; inverse map is ``p = 2q/(q-1)``."""
    p = float(p)
    if not (math.isfinite(p) and p > 2.0):
        raise DomainError(f"exponent must satisfy p > 2, got p={p!r}")
    return p / (p - 2.0)


@dataclass(frozen=True)
class FluxProfile:
    """Angular flux samples ``a(theta_j)`` on a uniform grid of ``[0, 2*pi)``."""

    samples: tuple[float, ...]

    def __post_init__(self):
        samples = tuple(float(x) for x in self.samples)
        if len(samples) < 1:
            raise DomainError("flux profile needs at least one sample")
        if not all(math.isfinite(x) for x in samples):
            raise DomainError("flux profile samples must be finite")
        object.__setattr__(self, "samples", samples)

    @classmethod
    def from_function(cls, func, n: int) -> "FluxProfile":
        theta = 2.0 * np.pi * np.arange(n) / n
        return cls(tuple(np.asarray(func(theta), dtype=float).ravel()))

    @property
    def theta(self) -> np.ndarray:
        n = len(self.samples)
        return 2.0 * np.pi * np.arange(n) / n


def average_flux(profile: FluxProfile | Sequence[float]) -> float:
    """Magnetic flux ``(2*pi)^-1 * \\oint a(theta) d theta`` by the periodic mean rule."""
    if not isinstance(profile, FluxProfile):
        profile = FluxProfile(tuple(profile))
    samples = profile.samples
    first = samples[0]
    if all(x == first for x in samples):
        return first
    return math.fsum(samples) / len(samples)


@dataclass(frozen=True)
class Params:
    """The triple ``(a, p, lambda)``; ``a`` is stored gauge-reduced.

    Construction fails with :class:`DomainError` unless ``p > 2`` and
    ``lam > -a**2`` (with the reduced flux).
    """

    a: float
    p: float
    lam: float

    def __post_init__(self):
        a = reduce_flux(self.a)
        p, lam = float(self.p), float(self.lam)
        if not (math.isfinite(p) and p > 2.0):
            raise DomainError(f"exponent must satisfy p > 2, got p={p!r}")
        if not (math.isfinite(lam) and lam > -a * a):
            raise DomainError(f"lambda must satisfy lambda > -a^2 = {-a * a!r}, got lambda={lam!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "lam", lam)

    @property
    def kappa(self) -> float:
        """Shifted spectral parameter ``lambda + a^2`` (always positive)."""
        return self.lam + self.a * self.a

    @property
    def omega(self) -> float:
        """Decay rate ``(p-2)/2 * sqrt(lambda + a^2)`` of the symmetric optimizer."""
        return 0.5 * (self.p - 2.0) * math.sqrt(self.kappa)

    @property
    def q(self) -> float:
        return dual_exponent(self.p)
