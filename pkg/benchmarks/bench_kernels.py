"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--grid 64] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from landau_nls import _kernels_py

try:
    from landau_nls import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _cases(grid, z):
    rng = np.random.default_rng(1)
    u = rng.normal(size=grid * grid * z) + 1j * rng.normal(size=grid * grid * z)
    ax = np.linspace(-10, 10, grid, endpoint=False)
    x1, x2 = (a.ravel() for a in np.meshgrid(ax, ax, indexing="ij"))
    w = (ax[1] - ax[0]) ** 2
    g = rng.normal(size=grid * grid) + 1j * rng.normal(size=grid * grid)
    return {
        "pointwise_power s=1": lambda m: m.pointwise_power(u, 1),
        "pointwise_power s=2": lambda m: m.pointwise_power(u, 2),
        "nonlinear_phase": lambda m: m.nonlinear_phase(u, 0.01, 1),
        "lll_kernel_apply": lambda m: m.lll_kernel_apply(x1, x2, g, w, 1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--z", type=int, default=64, help="z points for the pointwise kernels")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.append(("cython", _kernels_c))
    else:
        print("compiled extension not available; timing the fallback only")

    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b, _ in backends) + "     speedup  max|diff|")
    for name, fn in _cases(args.grid, args.z).items():
        times, outs = [], []
        for _, mod in backends:
            outs.append(np.asarray(fn(mod)))
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
        row = f"{name:<22}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            diff = float(np.max(np.abs(outs[0] - outs[1])))
            row += f"  {times[0] / times[1]:9.1f}x  {diff:.1e}"
        print(row)


if __name__ == "__main__":
    main()
