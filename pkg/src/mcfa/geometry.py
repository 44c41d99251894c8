"""Topology definitions, feasibility checks, and benchmark scenario builders.

All lengths are in micrometers, times in seconds, and the diffusion
coefficient in um^2/s. Receivers are fully-absorbing spheres; transmitters
are points that release molecules instantaneously at t = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TopologyError

DEFAULT_RADIUS = 1.0
DEFAULT_DIFFUSION = 79.4
DEFAULT_MOLECULES = 1e4


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class Receiver:
    center: Point3
    radius: float


@dataclass(frozen=True)
class Topology:
    """q point transmitters, p absorbing spherical receivers, medium constants."""

    transmitters: tuple[Point3, ...]
    receivers: tuple[Receiver, ...]
    diffusion_coefficient: float
    molecules_per_release: float

    @property
    def q(self) -> int:
        return len(self.transmitters)

    @property
    def p(self) -> int:
        return len(self.receivers)

    def transmitter_array(self) -> np.ndarray:
        return np.array([t.as_array() for t in self.transmitters], dtype=float)

    def receiver_centers(self) -> np.ndarray:
        return np.array([r.center.as_array() for r in self.receivers], dtype=float)

    def receiver_radii(self) -> np.ndarray:
        return np.array([r.radius for r in self.receivers], dtype=float)


def validate(topology: Topology) -> list[str]:
    """Check all feasibility invariants; return a list of violations.

    An empty list means the topology is valid. Each entry names the offending
    quantity or pair and the measured distance, so callers can report exactly
    what failed.
    """
    out: list[str] = []
    if topology.q < 1:
        out.append("no transmitters (q >= 1 required)")
    if topology.p < 1:
        out.append("no receivers (p >= 1 required)")
    if not (topology.diffusion_coefficient > 0):
        out.append(f"diffusion coefficient must be > 0, got {topology.diffusion_coefficient}")
    if not (topology.molecules_per_release > 0):
        out.append(f"molecules per release must be > 0, got {topology.molecules_per_release}")
    for label, pt in _all_points(topology):
        if not all(math.isfinite(c) for c in (pt.x, pt.y, pt.z)):
            out.append(f"{label} has non-finite coordinates {pt}")
    for j, rx in enumerate(topology.receivers):
        if not (rx.radius > 0) or not math.isfinite(rx.radius):
            out.append(f"receiver {j} radius must be positive and finite, got {rx.radius}")
    if out:
        return out
    txs = topology.transmitter_array()
    centers = topology.receiver_centers()
    radii = topology.receiver_radii()
    for i in range(topology.q):
        for j in range(topology.p):
            d = float(np.linalg.norm(txs[i] - centers[j]))
            if d <= radii[j]:
                out.append(
                    f"transmitter {i} inside or on receiver {j}: "
                    f"distance {d:.6g} <= radius {radii[j]:.6g}")
    for i in range(topology.p):
        for j in range(i + 1, topology.p):
            d = float(np.linalg.norm(centers[i] - centers[j]))
            if d <= radii[i] + radii[j]:
                out.append(
                    f"receivers {i} and {j} overlap or touch: "
                    f"distance {d:.6g} <= {radii[i] + radii[j]:.6g}")
    return out


def require_valid(topology: Topology) -> None:
    """Raise TopologyError listing every violated invariant."""
    violations = validate(topology)
    if violations:
        raise TopologyError("; ".join(violations))


def pair_distances(topology: Topology) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean distance matrices.

    Returns (rx_rx, tx_rx): rx_rx[i, j] is the center distance between
    receivers i and j (symmetric, zero diagonal); tx_rx[m, j] is the distance
    from transmitter m to the center of receiver j.
    """
    centers = topology.receiver_centers()
    txs = topology.transmitter_array()
    rx_rx = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=-1)
    tx_rx = np.linalg.norm(txs[:, None, :] - centers[None, :, :], axis=-1)
    return rx_rx, tx_rx


def build_sito_scenario(d1: float, d_c1c2: float, omega: float,
                        radius: float = DEFAULT_RADIUS,
                        diffusion: float = DEFAULT_DIFFUSION,
                        molecules: float = DEFAULT_MOLECULES) -> Topology:
    """Single transmitter at the origin with two receivers in the xy-plane.

    Receiver 1 sits at (d1, 0, 0). Receiver 2 is placed at angle omega
    (radians), measured at the center of receiver 1 from the direction
    pointing back at the transmitter, at center distance d_c1c2:
    C2 = (d1 - d_c1c2*cos(omega), d_c1c2*sin(omega), 0). omega = 0 puts
    receiver 2 on the segment between the transmitter and receiver 1.
    """
    if not (0.0 <= omega <= math.pi):
        raise ValueError(f"omega must lie in [0, pi], got {omega}")
    c2 = Point3(d1 - d_c1c2 * math.cos(omega), d_c1c2 * math.sin(omega), 0.0)
    topology = Topology(
        transmitters=(Point3(0.0, 0.0, 0.0),),
        receivers=(
            Receiver(Point3(d1, 0.0, 0.0), radius),
            Receiver(c2, radius),
        ),
        diffusion_coefficient=diffusion,
        molecules_per_release=molecules,
    )
    require_valid(topology)
    return topology


def build_mimo_scenario(d1: float, d_c1c2: float, omega: float, t2: Point3,
                        radius: float = DEFAULT_RADIUS,
                        diffusion: float = DEFAULT_DIFFUSION,
                        molecules: float = DEFAULT_MOLECULES) -> Topology:
    """Two-transmitter variant of build_sito_scenario.

    The second transmitter is placed at t2; coincident transmitters are
    allowed (their releases superpose).
    """
    base = build_sito_scenario(d1, d_c1c2, omega, radius, diffusion, molecules)
    topology = Topology(
        transmitters=(base.transmitters[0], t2),
        receivers=base.receivers,
        diffusion_coefficient=diffusion,
        molecules_per_release=molecules,
    )
    require_valid(topology)
    return topology


def _all_points(topology: Topology):
    for i, t in enumerate(topology.transmitters):
        yield f"transmitter {i}", t
    for j, r in enumerate(topology.receivers):
        yield f"receiver {j} center", r.center
