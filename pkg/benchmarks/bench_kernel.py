"""Benchmark: compiled stepping kernel vs the pure-Python fallback.

Runs the two bundled case studies on each available backend, checks that the
trajectories agree bitwise, and reports steps/second and speedup.

    python benchmarks/bench_kernel.py [--t-end 20]
"""

import argparse
import time

import numpy as np

from windffs._kernel import available_backends
from windffs.experiments import multi_wf_config, single_wf_config
from windffs.simulate import run_scenario


def bench(cfg, label, repeats=3):
    n_steps = int(round(cfg.sim.t_end_s / cfg.sim.dt_s))
    rows = {}
    results = {}
    for backend in available_backends():
        best = float("inf")
        for _ in range(repeats if backend == "compiled" else 1):
            t0 = time.perf_counter()
            res = run_scenario(cfg, backend=backend)
            best = min(best, time.perf_counter() - t0)
        rows[backend] = best
        results[backend] = res
    print(f"\n{label}  ({n_steps} steps, {len(cfg.windfarms)} farm(s), "
          f"{len(cfg.governors)} governor(s))")
    for backend, secs in rows.items():
        print(f"  {backend:9s} {secs:8.3f} s   {n_steps / secs / 1e3:10.1f} ksteps/s")
    if len(rows) == 2:
        print(f"  speedup   {rows['python'] / rows['compiled']:8.1f}x")
        a, b = results["python"], results["compiled"]
        same = (np.array_equal(a.df_pu, b.df_pu) and np.array_equal(a.omega, b.omega)
                and np.array_equal(a.p, b.p))
        print(f"  trajectories bitwise identical: {same}")
        if not same:
            raise SystemExit("backend mismatch")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-end", type=float, default=20.0,
                    help="simulated seconds per case (default 20)")
    args = ap.parse_args()

    print("available backends:", ", ".join(available_backends()))

    cfg = single_wf_config()
    cfg.sim.t_end_s = args.t_end
    bench(cfg, "single-farm case")

    cfg = multi_wf_config()
    cfg.sim.t_end_s = args.t_end
    bench(cfg, "multi-farm case")


if __name__ == "__main__":
    main()
