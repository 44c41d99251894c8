"""Eventual absorbed counts N_i(infinity) via the interference linear system.

As t -> infinity the coupled absorption system reduces (by the final value
theorem) to

    A n = b,   A[i,j] = 1 if i == j else R_i / d_ij,
               b[i]   = N_T sum_m R_i / i_d_m,

with d_ij the center distance between receivers i and j and i_d_m the
distance from transmitter m to receiver i. Off-diagonal entries encode how
much of receiver i's uncoupled gain is stolen by receiver j.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import ModelBreakdownWarning, NumericalError

CONDITION_LIMIT = 1e12
RESIDUAL_LIMIT = 1e-10


@dataclass(frozen=True)
class AsymptoticSolution:
    n_infinity: np.ndarray          # shape (p,)
    interference_matrix: np.ndarray  # shape (p, p), unit diagonal
    source_vector: np.ndarray       # shape (p,), uncoupled gains
    condition_estimate: float


def build_system(topology: geo.Topology) -> tuple[np.ndarray, np.ndarray]:
    """Assemble (interference_matrix, source_vector) for the topology."""
    geo.require_valid(topology)
    rx_rx, tx_rx = geo.pair_distances(topology)
    radii = topology.receiver_radii()
    p = topology.p
    matrix = np.eye(p)
    for i in range(p):
        for j in range(p):
            if i != j:
                matrix[i, j] = radii[i] / rx_rx[i, j]
    source = topology.molecules_per_release * (radii[None, :] / tx_rx).sum(axis=0)
    return matrix, source


def solve(topology: geo.Topology) -> AsymptoticSolution:
    """Solve the interference system by a dense direct method.

    Raises NumericalError when the system is numerically singular
    (1-norm condition estimate above 1e12) or the residual check fails.
    Negative entries or entries above the uncoupled gain indicate the
    center-point model breaking down (receivers packed too closely); they
    are reported via ModelBreakdownWarning, not clamped.
    """
    matrix, source = build_system(topology)
    try:
        condition = float(np.linalg.cond(matrix, 1))
    except np.linalg.LinAlgError:
        condition = np.inf
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise NumericalError(
            f"interference matrix numerically singular: "
            f"condition estimate {condition:.3e}")
    n_inf = np.linalg.solve(matrix, source)
    residual = np.abs(matrix @ n_inf - source).max()
    if residual > RESIDUAL_LIMIT * max(np.abs(source).max(), 1.0):
        raise NumericalError(
            f"linear solve residual {residual:.3e} exceeds tolerance")
    if np.any(n_inf < 0) or np.any(n_inf > source * (1 + 1e-12) + 1e-12):
        warnings.warn(
            "asymptotic counts outside [0, uncoupled gain]; the center-point "
            f"interference model is unreliable for this topology: {n_inf}",
            ModelBreakdownWarning, stacklevel=2)
    return AsymptoticSolution(
        n_infinity=n_inf,
        interference_matrix=matrix,
        source_vector=source,
        condition_estimate=condition,
    )


def far_field_check(topology: geo.Topology, receiver_index: int,
                    distance: float) -> float:
    """Relative deviation of N_i(infinity) from the uncoupled gain when all
    other receivers are pushed out to the given center distance from
    receiver i.

    Each other receiver is moved along the ray from receiver i's center
    through its own center; transmitters stay fixed. The deviation decays
    like 1/distance^2 (the leading interference terms are products of two
    reciprocal distances), comfortably within an O(1/distance) bound.
    """
    i = receiver_index
    centers = topology.receiver_centers()
    moved = []
    for j, rx in enumerate(topology.receivers):
        if j == i:
            moved.append(rx)
            continue
        ray = centers[j] - centers[i]
        norm = float(np.linalg.norm(ray))
        new_center = centers[i] + ray * (distance / norm)
        moved.append(geo.Receiver(geo.Point3(*new_center), rx.radius))
    displaced = geo.Topology(
        transmitters=topology.transmitters,
        receivers=tuple(moved),
        diffusion_coefficient=topology.diffusion_coefficient,
        molecules_per_release=topology.molecules_per_release,
    )
    solution = solve(displaced)
    uncoupled = solution.source_vector[i]
    return float(abs(solution.n_infinity[i] - uncoupled) / uncoupled)
