"""Compare the compiled and pure-Python Metropolis kernels.

Reports the kernel-only cost per step (random numbers drawn up front) and the
end-to-end cost of ``run_chain``, which also includes drawing the normals.

    python benchmarks/bench_kernel.py [--n 200] [--steps 20000]
"""
import argparse
import time

import numpy as np

from weakmeas import DEFAULT_SHAPE, EnsembleSuperposition, MHConfig, available_backends, run_chain
from weakmeas.sampler import _kernel_params, default_sigma, get_kernel
from weakmeas.pointer import log_density


def kernel_only(backend, target, steps, repeat=3):
    kern = get_kernel(backend)
    n = target.n_pointers
    rng = np.random.default_rng(0)
    z = rng.standard_normal((steps, n))
    u = rng.random(steps)
    log_c, sgn, eps, inv = _kernel_params(target)
    sigma = default_sigma(n, target.shape)
    best = float("inf")
    for _ in range(repeat):
        x = np.full(n, eps[0])
        lp = log_density(x, target).log_abs
        xi = np.empty(steps)
        t = time.perf_counter()
        kern.advance(x, lp, z, u, sigma, log_c, sgn, eps, inv, xi, np.empty(n), np.empty(len(eps)))
        best = min(best, time.perf_counter() - t)
    return best / steps


def end_to_end(backend, target, steps, repeat=3):
    cfg = MHConfig(steps, burn_in=0, thinning=1, seed=1)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        run_chain(target, cfg, backend)
        best = min(best, time.perf_counter() - t)
    return best / steps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--steps", type=int, default=20_000)
    args = ap.parse_args()
    target = EnsembleSuperposition(((0.156, 0.1), (-0.349, -0.1)), args.n, DEFAULT_SHAPE)
    print(f"N={args.n}, {args.steps} steps, best of 3")
    print(f"{'backend':<8} {'kernel us/step':>15} {'run_chain us/step':>18}")
    rows = {}
    for b in available_backends():
        rows[b] = (kernel_only(b, target, args.steps), end_to_end(b, target, args.steps))
        print(f"{b:<8} {rows[b][0] * 1e6:>15.3f} {rows[b][1] * 1e6:>18.3f}")
    if "cython" in rows:
        k = rows["python"][0] / rows["cython"][0]
        e = rows["python"][1] / rows["cython"][1]
        print(f"speedup: kernel x{k:.1f}, end-to-end x{e:.1f}")


if __name__ == "__main__":
    main()
