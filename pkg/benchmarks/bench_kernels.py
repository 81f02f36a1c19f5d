"""Compare the compiled and pure-Python kernel backends.

Times each scalar kernel on a fixed batch of random inputs, checks both
backends agree, then times a full suite run per backend.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 6]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from arcbip.kernels import available_backends


def _secular_cases(rng, count, size):
    cases = []
    for _ in range(count):
        lam = np.sort(rng.normal(size=size))
        gam = rng.normal(size=size)
        sigma = float(rng.uniform(0.1, 10.0))
        lo = max(0.0, -lam[0])
        hi = lo + 1.0
        # widen until the root is bracketed
        while sigma * np.linalg.norm(gam / (lam + hi)) > hi:
            hi *= 2.0
        cases.append((lam, gam, sigma, lo, hi))
    return cases


def _cubic_cases(rng, count):
    return [(float(rng.normal()), float(rng.normal()), float(rng.uniform(0.0, 2.0)),
             float(rng.uniform(0.1, 5.0))) for _ in range(count)]


def _backtrack_cases(rng, count, size):
    return [(rng.normal(size=size), -rng.uniform(0.1, 1.0, size=size), 0.5)
            for _ in range(count)]


def bench(repeat, size, count=2000, seed=0):
    rng = np.random.default_rng(seed)
    secular = _secular_cases(rng, count, size)
    cubic = _cubic_cases(rng, count)
    backtrack = _backtrack_cases(rng, count, size)
    backends = available_backends()

    jobs = {
        "secular_root": lambda k: [k.secular_root(*c, 1e-10, 1e-12, 200) for c in secular],
        "cubic_1d_min": lambda k: [k.cubic_1d_min(*c) for c in cubic],
        "backtrack_factor": lambda k: [k.backtrack_factor(*c) for c in backtrack],
    }
    print(f"{'kernel':<18}" + "".join(f"{name + ' [ms]':>16}" for name in backends)
          + f"{'speedup':>10}{'agree':>8}")
    for label, job in jobs.items():
        times, outputs = {}, {}
        for name, mod in backends.items():
            outputs[name] = job(mod)
            times[name] = min(timeit.repeat(lambda: job(mod), number=1, repeat=repeat)) * 1e3
        ref = np.array([np.ravel(o)[0] for o in outputs["python"]], dtype=float)
        agree = all(np.allclose([np.ravel(o)[0] for o in out], ref, rtol=1e-12, atol=0.0)
                    for out in outputs.values())
        speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<18}" + "".join(f"{times[name]:>16.2f}" for name in backends)
              + f"{speedup:>10.2f}{str(agree):>8}")


def bench_suite(backends):
    """Wall time of the full benchmark suite under each backend, in a fresh process."""
    code = ("import time; from arcbip.cli import run_suite; from arcbip import SolverConfig, "
            "list_problems, BACKEND; t=time.perf_counter(); "
            "run_suite([n for n,_,_ in list_problems()], SolverConfig()); "
            "print(BACKEND, round((time.perf_counter()-t)*1e3, 1))")
    for name in backends:
        env = dict(os.environ)
        env.pop("ARCBIP_PURE_PYTHON", None)
        if name == "python":
            env["ARCBIP_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"suite run ({out[0]} backend): {out[1]} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--size", type=int, default=6)
    args = parser.parse_args()
    bench(args.repeat, args.size)
    bench_suite(available_backends())


if __name__ == "__main__":
    main()
