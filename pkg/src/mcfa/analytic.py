"""Closed-form absorption laws for spherical fully-absorbing receivers.

Single-receiver quantities: the first-passage hitting rate of molecules
released at distance d from a sphere of radius R, its time integral, its
Laplace transform, and the t -> infinity limit. For one transmitter and two
coupled receivers, the exact series solution of the interference system and
its geometric-series limit.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

TRUNCATION_CAP = 200


@dataclass(frozen=True)
class HittingKernel:
    """Parameters of the hitting rate f(d, t): release distance, sphere
    radius, diffusion coefficient."""

    distance: float
    radius: float
    diffusion: float

    def __post_init__(self):
        if not (self.distance > self.radius > 0):
            raise ValueError(
                f"require distance > radius > 0, got d={self.distance}, R={self.radius}")
        if not (self.diffusion > 0):
            raise ValueError(f"require diffusion > 0, got {self.diffusion}")


@dataclass(frozen=True)
class SitoGeometry:
    """Distances for one transmitter and two equal-radius receivers.

    d1, d2: transmitter to receiver centers; d12, d21: center-to-center
    distances (equal under the center approximation, kept separate to allow
    asymmetric bookkeeping). The series converges iff R^2/(d12*d21) < 1.
    """

    d1: float
    d2: float
    d12: float
    d21: float
    radius: float

    def __post_init__(self):
        for name in ("d1", "d2", "d12", "d21", "radius"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not (self.ratio < 1.0):
            raise ValueError(
                f"series divergence: R^2/(d12*d21) = {self.ratio:.6g} >= 1")

    @property
    def ratio(self) -> float:
        return self.radius ** 2 / (self.d12 * self.d21)

    def swapped(self) -> "SitoGeometry":
        """The same geometry viewed from receiver 2."""
        return SitoGeometry(self.d2, self.d1, self.d21, self.d12, self.radius)


def hitting_rate(kernel: HittingKernel, t):
    """First-passage rate f(d, t) = R(d-R)/(d*sqrt(4 pi D t^3)) * exp(-(d-R)^2/(4 D t)).

    Probability density per unit time that a molecule released at distance d
    hits the sphere at time t. Vectorized over t; f(d, 0) = 0 by continuous
    extension.
    """
    t = np.asarray(t, dtype=float)
    d, R, D = kernel.distance, kernel.radius, kernel.diffusion
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = (R * (d - R) / (d * np.sqrt(4.0 * np.pi * D * tp ** 3))
                * np.exp(-((d - R) ** 2) / (4.0 * D * tp)))
    return out if out.ndim else float(out)


def cumulative_siso(kernel: HittingKernel, n_molecules: float, t):
    """Expected absorbed count N(t) = N_T * (R/d) * erfc((d-R)/(2 sqrt(D t))).

    Time integral of n_molecules * hitting_rate; nondecreasing, 0 at t = 0,
    and -> n_molecules * R/d as t -> infinity.
    """
    t = np.asarray(t, dtype=float)
    d, R, D = kernel.distance, kernel.radius, kernel.diffusion
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = n_molecules * (R / d) * erfc((d - R) / (2.0 * np.sqrt(D * t[pos])))
    return out if out.ndim else float(out)


def kernel_laplace(kernel: HittingKernel, s):
    """Laplace transform of the hitting rate: (R/d) * exp(-((d-R)/sqrt(D)) * sqrt(s)).

    Real nonnegative s only; equals R/d exactly at s = 0.
    """
    s = np.asarray(s, dtype=float)
    d, R, D = kernel.distance, kernel.radius, kernel.diffusion
    out = (R / d) * np.exp(-((d - R) / np.sqrt(D)) * np.sqrt(s))
    return out if out.ndim else float(out)


def siso_asymptote(kernel: HittingKernel, n_molecules: float) -> float:
    """Eventual absorbed count for an isolated receiver: N_T * R/d."""
    return n_molecules * kernel.radius / kernel.distance


def sito_series(geometry: SitoGeometry, n_molecules: float, diffusion: float,
                t, tolerance: float = 1e-10, n_terms: int | None = None,
                return_bound: bool = False):
    """Exact transient solution N_1(t) of the two-receiver interference system.

    Sums the geometric image series

        N_1(t) = N_T R/d1 * sum_n rho^n erfc(((d1-R) + n*g) / (2 sqrt(D t)))
               - N_T R^2/(d12 d2) * sum_n rho^n erfc(((d12+d2-2R) + n*g) / (2 sqrt(D t)))

    with rho = R^2/(d12*d21) and g = d12 + d21 - 2R; both branches are
    truncated at the same n. Truncation stops when a geometric tail bound
    falls below tolerance relative to the leading-term scale, or after
    n_terms terms when given explicitly; a diagnostic warning is emitted if
    the 200-term cap binds. With return_bound=True, returns (value, bound)
    where bound is the tail estimate actually used.
    """
    if not (diffusion > 0):
        raise ValueError(f"require diffusion > 0, got {diffusion}")
    g_ = geometry
    t = np.asarray(t, dtype=float)
    rho = g_.ratio
    coef_a = n_molecules * g_.radius / g_.d1
    coef_b = n_molecules * g_.radius ** 2 / (g_.d12 * g_.d2)
    scale = abs(coef_a) + abs(coef_b)
    gap = g_.d12 + g_.d21 - 2.0 * g_.radius
    if n_terms is None:
        # erfc <= 2, so the tail after term n is <= 2*scale*rho^(n+1)/(1-rho)
        n_terms = 1
        while (2.0 * scale * rho ** n_terms / (1.0 - rho)
               > tolerance * scale and n_terms < TRUNCATION_CAP):
            n_terms += 1
        if n_terms >= TRUNCATION_CAP:
            warnings.warn(
                f"series truncation cap of {TRUNCATION_CAP} terms reached "
                f"(term ratio {rho:.6g}); tail bound not met", stacklevel=2)
    bound = 2.0 * scale * rho ** n_terms / (1.0 - rho)

    out = np.zeros_like(t)
    pos = t > 0
    half_width = 2.0 * np.sqrt(diffusion * t[pos])
    acc = np.zeros_like(half_width)
    for n in range(n_terms):
        w = rho ** n
        acc += w * (coef_a * erfc(((g_.d1 - g_.radius) + n * gap) / half_width)
                    - coef_b * erfc(((g_.d12 + g_.d2 - 2.0 * g_.radius) + n * gap)
                                    / half_width))
    out[pos] = acc
    value = out if out.ndim else float(out)
    if return_bound:
        return value, bound
    return value


def sito_asymptote(geometry: SitoGeometry, n_molecules: float) -> float:
    """Limit of sito_series as t -> infinity:

        N_T R (d12 d2 - R d1) / (d1 d2 d12) * (d12 d21) / (d12 d21 - R^2).
    """
    g_ = geometry
    R = g_.radius
    return (n_molecules * R * (g_.d12 * g_.d2 - R * g_.d1)
            / (g_.d1 * g_.d2 * g_.d12)
            * (g_.d12 * g_.d21) / (g_.d12 * g_.d21 - R ** 2))
