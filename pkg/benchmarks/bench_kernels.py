"""Compiled vs NumPy kernels: per-kernel timings and full split-step runs.

    python benchmarks/bench_kernels.py --n 4096 --steps 1000 --repeat 5
"""

import argparse
import timeit

import numpy as np

from pdl_optics import _kernels_py, numeric
from pdl_optics.core import GaussianSpec, gaussian_state, make_grid
from pdl_optics.numeric import PotentialModel, split_step

try:
    from pdl_optics import _kernels as compiled
except ImportError:
    compiled = None


def kernel_cases(n):
    rng = np.random.default_rng(0)
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    fac = np.exp(1j * rng.uniform(0, 1, n))
    v = rng.normal(size=n)
    x = np.linspace(-40, 40, n, endpoint=False)
    out = np.empty(n)
    return {
        "cmul": lambda k: k.cmul(psi, fac),
        "phase_rotate": lambda k: k.phase_rotate(psi, v, 1e-3),
        "intensity": lambda k: k.intensity(psi, out),
        "moments": lambda k: k.moments(psi, x, x[1] - x[0]),
        "edge_mass": lambda k: k.edge_mass(psi, n // 20, x[1] - x[0]),
    }


def propagation_cases(n, steps):
    grid = make_grid(n, 40.0)
    launch = gaussian_state(GaussianSpec(1.0, 0.5, 0.2), grid)
    models = {
        "split_step linear": PotentialModel.inverted_parabola(1.0),
        "split_step nonlocal": PotentialModel.nonlocal_defocusing(40.0, 10.0),
    }
    return {name: (lambda m: lambda k: _propagate(k, launch, m, steps))(m) for name, m in models.items()}


def _propagate(backend, launch, model, steps):
    saved = numeric.kernels
    numeric.kernels = backend
    try:
        split_step(launch, model, 1e-3, steps, stride=max(1, steps // 10))
    finally:
        numeric.kernels = saved


def best_of(fn, backend, repeat, number):
    return min(timeit.repeat(lambda: fn(backend), repeat=repeat, number=number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = [_kernels_py] + ([compiled] if compiled is not None else [])
    if compiled is None:
        print("compiled kernels not built; timing the NumPy fallback only")
    head = f"{'case':<22}" + "".join(f"{b.BACKEND + ' (s)':>16}" for b in backends)
    if len(backends) == 2:
        head += f"{'speedup':>10}"
    print(f"n = {args.n}, steps = {args.steps}")
    print(head)
    rows = [(name, fn, 2000) for name, fn in kernel_cases(args.n).items()]
    rows += [(name, fn, 1) for name, fn in propagation_cases(args.n, args.steps).items()]
    for name, fn, number in rows:
        times = [best_of(fn, b, args.repeat, number) for b in backends]
        line = f"{name:<22}" + "".join(f"{t:>16.3e}" for t in times)
        if len(times) == 2:
            line += f"{times[0] / times[1]:>9.2f}x"
        print(line)


if __name__ == "__main__":
    main()
