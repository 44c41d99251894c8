"""Brownian-dynamics particle simulation with fully-absorbing spheres.

Ground-truth oracle for the analytic and numerical channel models: each
particle performs an isotropic Gaussian random walk (per-axis step standard
deviation sqrt(2 D dt_sim)) from its transmitter; a particle ending a step
inside a receiver is absorbed there, and with the boundary correction
enabled a particle passing near a receiver is additionally absorbed with
the flat-wall bridge crossing probability exp(-a b / (D dt_sim)), where a
and b are the start/end distances to that receiver's surface.

Randomness is counter-based: every normal and uniform draw is a pure
function of (seed, transmitter index, particle index, step index), so
results are bit-reproducible for a fixed seed regardless of how particles
are scheduled, and independent of chunking or worker count. When a particle
is far from every receiver surface, the walk takes one aggregated Gaussian
step covering many dt_sim substeps (exactly distributed, since sums of
Gaussian increments are Gaussian); the stride length is capped so the
probability of skipping a surface contact is below ~1e-13 per stride.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numba as nb
import numpy as np

from . import geometry as geo
from .volterra import TimeGrid

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_U64_GOLDEN = np.uint64(GOLDEN)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53
# skip bridge draws when a*b/(D dt) > 36: crossing probability < 3e-16
BRIDGE_EXPONENT_CUTOFF = 36.0
# stride m satisfies l^2 > 363 D dt m, i.e. 12 * 5.5^2; union bound over
# axes and reflection gives contact probability < 6 erfc(5.5) ~ 4e-14
STRIDE_DENOMINATOR = 363.0
DEFAULT_RECORD_POINTS = 500


@dataclass(frozen=True)
class McConfig:
    dt_sim: float
    t_max: float
    particles_per_transmitter: int
    seed: int
    boundary_correction: bool = True
    record_dt: float | None = None

    def __post_init__(self):
        if not (self.dt_sim > 0):
            raise ValueError(f"dt_sim must be positive, got {self.dt_sim}")
        if not (self.t_max >= self.dt_sim):
            raise ValueError(
                f"t_max must be >= dt_sim, got t_max={self.t_max}, dt_sim={self.dt_sim}")
        if self.particles_per_transmitter < 1:
            raise ValueError(
                f"particles_per_transmitter must be >= 1, got {self.particles_per_transmitter}")
        if self.record_dt is not None and not (self.record_dt > 0):
            raise ValueError(f"record_dt must be positive, got {self.record_dt}")


@dataclass(frozen=True)
class McEstimate:
    """Cumulative absorbed-particle counts on the recording grid."""

    grid: TimeGrid
    absorbed: np.ndarray  # shape (p, n_steps+1), int64 counts
    config: McConfig


def _mix64_py(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _transmitter_key(seed: int, tx_index: int) -> int:
    return _mix64_py(_mix64_py(seed & MASK64) + (tx_index + 1) * GOLDEN)


@nb.njit(nb.uint64(nb.uint64), inline="always", cache=True)
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@nb.njit(nb.float64(nb.uint64, nb.uint64), inline="always", cache=True)
def _uniform(key, index):
    # uniform on (0, 1]: top 53 bits, shifted to stay a valid log() argument
    z = _mix64(key + index * _U64_GOLDEN)
    return float((z >> np.uint64(11)) + np.uint64(1)) * _INV53


@nb.njit(cache=True)
def _walk(tx, rx_centers, rx_radii, D, dt, n_steps, n_particles, tx_key,
          correction):
    """Walk all particles of one transmitter; returns per-particle
    (absorbing step index or -1, receiver index or -1)."""
    p = rx_centers.shape[0]
    draws_per_step = np.uint64(4 + p)
    absorb_step = np.full(n_particles, -1, dtype=np.int64)
    absorb_rx = np.full(n_particles, -1, dtype=np.int64)
    sigma1 = math.sqrt(2.0 * D * dt)
    stride_denom = STRIDE_DENOMINATOR * D * dt
    for i in range(n_particles):
        key = _mix64(tx_key + np.uint64(i) * _U64_GOLDEN)
        x, y, z = tx[0], tx[1], tx[2]
        k = 0
        while k < n_steps:
            surface_gap = 1.0e300
            for j in range(p):
                dxj = x - rx_centers[j, 0]
                dyj = y - rx_centers[j, 1]
                dzj = z - rx_centers[j, 2]
                gap = math.sqrt(dxj * dxj + dyj * dyj + dzj * dzj) - rx_radii[j]
                if gap < surface_gap:
                    surface_gap = gap
            stride = int(surface_gap * surface_gap / stride_denom)
            base = np.uint64(k) * draws_per_step
            u1 = _uniform(key, base)
            u2 = _uniform(key, base + np.uint64(1))
            u3 = _uniform(key, base + np.uint64(2))
            u4 = _uniform(key, base + np.uint64(3))
            r1 = math.sqrt(-2.0 * math.log(u1))
            g0 = r1 * math.cos(2.0 * math.pi * u2)
            g1 = r1 * math.sin(2.0 * math.pi * u2)
            g2 = math.sqrt(-2.0 * math.log(u3)) * math.cos(2.0 * math.pi * u4)
            if stride > 1:
                if k + stride > n_steps:
                    stride = n_steps - k
                sigma = math.sqrt(2.0 * D * dt * stride)
                x += sigma * g0
                y += sigma * g1
                z += sigma * g2
                k += stride
                # contact during an aggregated stride has probability < 4e-14
                for j in range(p):
                    dxj = x - rx_centers[j, 0]
                    dyj = y - rx_centers[j, 1]
                    dzj = z - rx_centers[j, 2]
                    if (dxj * dxj + dyj * dyj + dzj * dzj
                            < rx_radii[j] * rx_radii[j]):
                        absorb_step[i] = k
                        absorb_rx[i] = j
                        break
                if absorb_rx[i] >= 0:
                    break
                continue
            nx = x + sigma1 * g0
            ny = y + sigma1 * g1
            nz = z + sigma1 * g2
            best = -1
            best_start_gap = 1.0e300
            for j in range(p):
                dxj = x - rx_centers[j, 0]
                dyj = y - rx_centers[j, 1]
                dzj = z - rx_centers[j, 2]
                a = math.sqrt(dxj * dxj + dyj * dyj + dzj * dzj) - rx_radii[j]
                exj = nx - rx_centers[j, 0]
                eyj = ny - rx_centers[j, 1]
                ezj = nz - rx_centers[j, 2]
                b = math.sqrt(exj * exj + eyj * eyj + ezj * ezj) - rx_radii[j]
                hit = False
                if b <= 0.0:
                    hit = True
                elif correction and a * b < BRIDGE_EXPONENT_CUTOFF * D * dt:
                    u = _uniform(key, base + np.uint64(4) + np.uint64(j))
                    if u < math.exp(-a * b / (D * dt)):
                        hit = True
                if hit and a < best_start_gap:
                    best = j
                    best_start_gap = a
            k += 1
            if best >= 0:
                absorb_step[i] = k
                absorb_rx[i] = best
                break
            x, y, z = nx, ny, nz
    return absorb_step, absorb_rx


def assign_absorption(start, end, topology: geo.Topology, dt_sim: float,
                      draws, boundary_correction: bool = True) -> int | None:
    """Absorption decision for one particle step from start to end.

    Mirrors the rule applied inside the simulation kernel: a receiver
    containing the end point is a candidate; with the correction enabled, a
    receiver whose surface distances a (from start) and b (from end) satisfy
    the bridge test draws[j] < exp(-a b / (D dt_sim)) is also a candidate.
    Among multiple candidates the one whose surface is closest to the start
    point wins. draws supplies one uniform in [0, 1) per receiver; the
    result is a deterministic function of the endpoints and the draws.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    draws = np.asarray(draws, dtype=float)
    if draws.shape != (topology.p,):
        raise ValueError(f"need one draw per receiver, got shape {draws.shape}")
    D = topology.diffusion_coefficient
    centers = topology.receiver_centers()
    radii = topology.receiver_radii()
    best, best_start_gap = None, np.inf
    for j in range(topology.p):
        a = float(np.linalg.norm(start - centers[j])) - radii[j]
        if a < 0:
            raise ValueError(f"start point lies inside receiver {j}")
        b = float(np.linalg.norm(end - centers[j])) - radii[j]
        hit = False
        if b <= 0.0:
            hit = True
        elif (boundary_correction
              and a * b < BRIDGE_EXPONENT_CUTOFF * D * dt_sim
              and draws[j] < math.exp(-a * b / (D * dt_sim))):
            hit = True
        if hit and a < best_start_gap:
            best, best_start_gap = j, a
    return best


def simulate(topology: geo.Topology, config: McConfig) -> McEstimate:
    """Simulate all particles and bin absorptions onto the recording grid.

    The simulation horizon is t_max rounded up to a whole number of
    recording intervals; a particle absorbed during step k is credited at
    the end of that step, and counts snap forward to the next recording
    point. D = 0 is accepted as a degenerate no-motion medium (nothing is
    ever absorbed for transmitters outside the receivers).
    """
    violations = geo.validate(topology)
    if topology.diffusion_coefficient == 0.0:
        violations = [v for v in violations if not v.startswith("diffusion coefficient")]
    if violations:
        raise geo.TopologyError("; ".join(violations))

    D = topology.diffusion_coefficient
    dt = config.dt_sim
    min_gap = _minimum_surface_gap(topology)
    if math.sqrt(2.0 * D * dt) >= min_gap / 4.0:
        warnings.warn(
            f"dt_sim = {dt:.6g} s gives step size {math.sqrt(2 * D * dt):.4g} um "
            f"against a minimum surface gap of {min_gap:.4g} um; "
            "absorbed counts will carry noticeable discretization bias",
            UserWarning, stacklevel=2)

    n_sim = max(1, math.ceil(config.t_max / dt - 1e-12))
    if config.record_dt is None:
        stride = max(1, n_sim // DEFAULT_RECORD_POINTS)
    else:
        stride = min(max(1, round(config.record_dt / dt)), n_sim)
    n_rec = math.ceil(n_sim / stride)
    n_sim = n_rec * stride

    p = topology.p
    counts = np.zeros((p, n_rec + 1), dtype=np.int64)
    if D > 0.0:
        centers = topology.receiver_centers()
        radii = topology.receiver_radii()
        txs = topology.transmitter_array()
        for m in range(topology.q):
            tx_key = np.uint64(_transmitter_key(config.seed, m))
            steps, rxs = _walk(txs[m], centers, radii, float(D), float(dt),
                               n_sim, config.particles_per_transmitter,
                               tx_key, config.boundary_correction)
            for j in range(p):
                hit_steps = steps[rxs == j]
                # snap forward: absorption at step s appears at ceil(s/stride)
                bins = (hit_steps + stride - 1) // stride
                counts[j] += np.cumsum(
                    np.bincount(bins, minlength=n_rec + 1))[:n_rec + 1]
    grid = TimeGrid(dt=stride * dt, n_steps=n_rec)
    return McEstimate(grid=grid, absorbed=counts, config=config)


def _minimum_surface_gap(topology: geo.Topology) -> float:
    rx_rx, tx_rx = geo.pair_distances(topology)
    radii = topology.receiver_radii()
    gaps = [tx_rx[m, j] - radii[j]
            for m in range(topology.q) for j in range(topology.p)]
    for i in range(topology.p):
        for j in range(i + 1, topology.p):
            gaps.append(rx_rx[i, j] - radii[i] - radii[j])
    return float(min(gaps))
