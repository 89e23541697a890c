"""Compare the numba kernels with their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

Kernels are timed in-process on the barrier layout of the largest sweep
point (condition a, tau=15, L=10).  The end-to-end rows run one condition-b
sweep row in a subprocess per backend, selected with DWELLCERT_PURE_NUMPY.
"""

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from dwellcert import _kernels as K
from dwellcert.cycles import enumerate_cycles
from dwellcert.lmi import build_condition_a
from dwellcert.solver import _initial_point, _Layout
from dwellcert.system import load_system

DATA = Path(__file__).resolve().parents[1] / "data" / "example_system.json"

SWEEP_SNIPPET = """
import sys, time
from dwellcert import load_system, run_sweep
s = load_system(open(sys.argv[1]).read())
run_sweep(s, [10], [1])  # compile / warm up
t = time.perf_counter()
run_sweep(s, range(1, 16), range(1, 11))
print(time.perf_counter() - t)
"""


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def kernel_cases():
    sys_ = load_system(DATA.read_text()).with_dwell(15)
    fam = enumerate_cycles(sys_, 10)
    layout = _Layout(build_condition_a(sys_, fam), 1e8)
    x = _initial_point(layout, 1e8)
    n = layout.nvar

    def derivs(impl):
        def run():
            g, H = np.zeros(n), np.zeros((n, n))
            for C, idx, D in layout.groups:
                impl(x, C, idx, D, g, H)
        return run

    def value(impl):
        def run():
            for C, idx, D in layout.groups:
                impl(x, C, idx, D)
        return run

    rng = np.random.default_rng(0)
    R = rng.normal(size=(8, 8))
    S = R + R.T
    mats = rng.normal(scale=0.6, size=(2, 2, 2))
    modes = rng.integers(0, 2, size=100_000)
    x0 = np.ones(2)
    label = f"barrier, {n} vars"
    return [
        (f"{label} derivs", derivs(K.barrier_derivs_np), derivs(getattr(K, "barrier_derivs_nb", None))),
        (f"{label} value", value(K.barrier_value_np), value(getattr(K, "barrier_value_nb", None))),
        ("jacobi 8x8", lambda: K.jacobi_eigvalsh_np(S, 1e-10, 100),
         lambda: K.jacobi_eigvalsh_nb(S, 1e-10, 100)),
        ("propagate 1e5 steps", lambda: K.propagate_np(mats, modes, x0),
         lambda: K.propagate_nb(mats, modes, x0)),
    ]


def sweep_seconds(pure):
    env = dict(os.environ, DWELLCERT_PURE_NUMPY="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", SWEEP_SNIPPET, str(DATA)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--no-sweep", action="store_true", help="skip the end-to-end rows")
    args = ap.parse_args()
    if K.numba is None:
        sys.exit("numba is not installed; nothing to compare")

    print(f"{'case':34s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for name, np_fn, nb_fn in kernel_cases():
        nb_fn()  # compile
        t_np = best_of(np_fn, args.repeat)
        t_nb = best_of(nb_fn, args.repeat)
        print(f"{name:34s} {1e3 * t_np:11.3f} {1e3 * t_nb:11.3f} {t_np / t_nb:8.1f}")
    if not args.no_sweep:
        t_np, t_nb = sweep_seconds(True), sweep_seconds(False)
        print(f"{'condition-b sweep 15x10 [s]':34s} {t_np:11.2f} {t_nb:11.2f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
