"""Check the particle simulation against the closed form and the coupled
solver.

Part 1: single receiver, absorbed fraction vs the erfc formula, with the
binomial z-score per time point. Part 2: two receivers at a right angle
(weak coupling), final counts vs the transient solver."""

import argparse
import sys

import numpy as np

import mcfa


def siso_part(particles: int, seed: int) -> None:
    topology = mcfa.Topology(
        transmitters=(mcfa.Point3(0.0, 0.0, 0.0),),
        receivers=(mcfa.Receiver(mcfa.Point3(6.0, 0.0, 0.0), 1.0),),
        diffusion_coefficient=79.4,
        molecules_per_release=float(particles),
    )
    config = mcfa.McConfig(dt_sim=1e-4, t_max=100.0,
                           particles_per_transmitter=particles, seed=seed)
    estimate = mcfa.simulate(topology, config)
    kernel = mcfa.HittingKernel(6.0, 1.0, 79.4)
    times = estimate.grid.times()
    print("single receiver, d = 6 um (absorbed counts vs erfc formula)")
    print(f"{'t [s]':>8s} {'simulated':>10s} {'expected':>10s} {'z':>7s}")
    for t_probe in (1.0, 10.0, 50.0, 100.0):
        k = int(round(t_probe / estimate.grid.dt))
        n_sim = estimate.absorbed[0, k]
        frac = mcfa.cumulative_siso(kernel, 1.0, times[k])
        mean = particles * frac
        sigma = np.sqrt(particles * frac * (1.0 - frac))
        print(f"{times[k]:8.1f} {n_sim:10d} {mean:10.1f} {(n_sim - mean) / sigma:7.2f}")


def sito_part(particles: int, seed: int) -> None:
    topology = mcfa.build_sito_scenario(6.0, 8.0, np.pi / 2,
                                        molecules=float(particles))
    config = mcfa.McConfig(dt_sim=1e-4, t_max=100.0,
                           particles_per_transmitter=particles, seed=seed)
    estimate = mcfa.simulate(topology, config)
    grid = mcfa.TimeGrid(0.005, 20000)
    series = mcfa.solve_transient(topology, grid)
    print("\ntwo receivers, d1 = 6 um, d_c1c2 = 8 um, omega = 90 deg")
    print(f"{'receiver':>8s} {'simulated':>10s} {'solver':>10s} {'rel diff':>9s}")
    for i in range(2):
        n_sim = estimate.absorbed[i, -1]
        ref = series.cumulative[i, -1]
        print(f"{i + 1:8d} {n_sim:10d} {ref:10.1f} {n_sim / ref - 1.0:+9.2%}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--particles", type=int, default=20000)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()
    siso_part(args.particles, args.seed)
    sito_part(args.particles, args.seed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
