"""Timing of the numba kernels against their numpy counterparts.

    python benchmarks/bench_kernels.py [--paths 10000] [--steps 200] [--repeat 5]

Both variants are timed in-process on identical inputs (after one warm-up
call that triggers compilation), and their outputs are checked for agreement.
An end-to-end comparison of the TVA solve runs in two subprocesses with
``TVA_NUMBA=0`` and ``TVA_NUMBA=1``.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from tva import kernels

E2E = (
    "import time; from tva import *; from tva.experiment import study_csa_specs;"
    "m=VasicekModel(VasicekParams(.25,.05,.004,.02));"
    "s=SwapSpec.yearly(10,0.0,310.136066); s=s.with_rate(swap_rate(s,m.curve));"
    "p=record_fixings(simulate(m,GridSpec(10,{steps}),{paths},1),s); P=clean_prices_on_paths(p,s);"
    "solve_tva_bsde(p,study_csa_specs()[1],s,prices=P);"
    "t=time.perf_counter(); solve_tva_bsde(p,study_csa_specs()[1],s,prices=P); print(time.perf_counter()-t)"
)


def _time(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=10_000)
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-e2e", action="store_true", help="skip the end-to-end subprocess comparison")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    m, n = args.paths, args.steps
    z = rng.standard_normal((m, n))
    u = rng.random((m, n))
    kappa = 0.05 + 0.01 * rng.random(n)
    jumps = kernels.ig_transform_np(0.05 / 17.57, 0.0025, z, u)
    xs = np.sort(rng.normal(size=m))
    ys = rng.normal(size=m)
    lo = kernels.knn_windows_np(xs, 5)

    cases = [
        ("ig_transform", lambda k: k(0.05 / 17.57, 0.0025, z, u)),
        ("euler_vasicek", lambda k: k(0.02, 0.25, 0.05, 0.004, 0.05, z)),
        ("euler_lhw", lambda k: k(0.02, 0.25, kappa, 0.05, jumps)),
        ("knn_windows", lambda k: k(xs, 5)),
        ("window_means", lambda k: k(ys, lo, 5)),
    ]
    print(f"{'kernel':16s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speed-up':>9s}  max |diff|")
    for name, call in cases:
        f_np = getattr(kernels, f"{name}_np")
        f_nb = getattr(kernels, f"{name}_nb")
        t_np = _time(lambda: call(f_np), args.repeat)
        t_nb = _time(lambda: call(f_nb), args.repeat)
        diff = float(np.max(np.abs(np.asarray(call(f_np), float) - np.asarray(call(f_nb), float))))
        print(f"{name:16s} {1e3 * t_np:11.2f} {1e3 * t_nb:11.2f} {t_np / t_nb:9.1f}  {diff:.2e}")

    if not args.no_e2e:
        code = E2E.format(paths=m, steps=n)
        out = {}
        for flag in ("0", "1"):
            env = dict(os.environ, TVA_NUMBA=flag)
            res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
            out[flag] = float(res.stdout.strip())
        print(f"\nTVA backward solve, m={m}, n={n}: numpy {out['0']:.3f} s, numba {out['1']:.3f} s, speed-up {out['0'] / out['1']:.1f}x")


if __name__ == "__main__":
    main()
