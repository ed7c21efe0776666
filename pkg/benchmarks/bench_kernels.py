"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--size N] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from fomcert._kernels import _pykernels

try:
    from fomcert import _ckernels
except ImportError:
    _ckernels = None


def make_cases(n, rng):
    v = rng.standard_normal(n)
    s = rng.uniform(0.05, 2.0, n)
    z = rng.uniform(0.05, 2.0, n)
    logp = np.log(rng.dirichlet(np.ones(n)))
    tc = rng.standard_normal(n)
    return [
        ("soft_threshold", lambda impl: impl.soft_threshold(v, 0.3)),
        ("project_simplex", lambda impl: impl.project_simplex(v)),
        ("entropy_prox_simplex",
         lambda impl: impl.entropy_prox_simplex(logp, tc)),
        ("sq_euclid_bregman", lambda impl: impl.sq_euclid_bregman(s, z)),
        ("entropy_bregman", lambda impl: impl.entropy_bregman(s, z)),
        ("burg_bregman", lambda impl: impl.burg_bregman(s, z)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=20000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = make_cases(args.size, rng)
    impls = [("python", _pykernels)]
    if _ckernels is not None:
        impls.append(("cython", _ckernels))
    else:
        print("compiled kernels unavailable; timing the fallback only")

    print("vector size %d, %d calls per timing" % (args.size, args.repeat))
    print("%-22s %12s %12s %8s" % ("kernel", "python (us)", "cython (us)",
                                   "speedup"))
    for name, call in cases:
        times = {}
        for impl_name, impl in impls:
            total = timeit.timeit(lambda: call(impl), number=args.repeat)
            times[impl_name] = 1e6 * total / args.repeat
        if "cython" in times:
            print("%-22s %12.2f %12.2f %7.1fx"
                  % (name, times["python"], times["cython"],
                     times["python"] / times["cython"]))
        else:
            print("%-22s %12.2f %12s %8s" % (name, times["python"], "-", "-"))


if __name__ == "__main__":
    main()
