"""Measure the transient solver's convergence order on the single-receiver
case, where the exact answer is the erfc closed form.

Halving dt should cut the max relative error (over t in [0.1, t_max]) by
about 4x; the printed order should sit near 2."""

import argparse
import math
import sys
import time

import numpy as np

import mcfa


def max_relative_error(dt: float, t_max: float) -> float:
    topology = mcfa.Topology(
        transmitters=(mcfa.Point3(0.0, 0.0, 0.0),),
        receivers=(mcfa.Receiver(mcfa.Point3(6.0, 0.0, 0.0), 1.0),),
        diffusion_coefficient=79.4,
        molecules_per_release=1e4,
    )
    grid = mcfa.TimeGrid(dt, round(t_max / dt))
    series = mcfa.solve_transient(topology, grid)
    t = grid.times()
    mask = t >= 0.1
    kernel = mcfa.HittingKernel(6.0, 1.0, 79.4)
    exact = mcfa.cumulative_siso(kernel, 1e4, t[mask])
    return float(np.max(np.abs(series.cumulative[0, mask] - exact) / exact))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t-max", type=float, default=100.0)
    args = parser.parse_args()
    print(f"{'dt [ms]':>8s} {'max rel err':>12s} {'order':>6s} {'time [s]':>9s}")
    previous = None
    for dt in (0.005, 0.0025, 0.00125):
        t0 = time.perf_counter()
        err = max_relative_error(dt, args.t_max)
        elapsed = time.perf_counter() - t0
        order = "" if previous is None else f"{math.log2(previous / err):6.2f}"
        print(f"{dt * 1e3:8.2f} {err:12.3e} {order:>6s} {elapsed:9.2f}")
        previous = err
    return 0


if __name__ == "__main__":
    sys.exit(main())
