"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--sizes 250 1000 4000] [--repeat 5]

Times each kernel on seeded uniform point clouds and one end-to-end
layout, and reports the largest force difference between the backends.
"""
from __future__ import annotations

import argparse
import contextlib
import time

import numpy as np

from modlayout import _pykernels, kernels
from modlayout.energy import EnergyParams
from modlayout.layout import LayoutOptions, minimize_energy
from modlayout.netgen import PlantedPartitionSpec, planted_partition
from modlayout.tree import build_tree

try:
    from modlayout import _ckernels
except ImportError:
    _ckernels = None


def best_time(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(n: int, rng: np.random.Generator):
    pos = rng.uniform(size=(n, 2))
    w = rng.uniform(0.5, 2.0, n)
    m = 5 * n
    eu, ev = rng.integers(0, n, m), rng.integers(0, n, m)
    keep = eu != ev
    eu, ev = eu[keep].astype(np.int64), ev[keep].astype(np.int64)
    ew = rng.uniform(0.5, 2.0, eu.size)
    tree = build_tree(pos, w)
    return {
        "attraction": lambda k: k.attraction(pos, eu, ev, ew, 0.0, 1.0),
        "repulsion_exact": lambda k: k.repulsion_exact(pos, w, -1.0, 1.0),
        "bh_repulsion": lambda k: k.bh_repulsion(tree, pos, w, -1.0, 1.0, 0.5),
    }


@contextlib.contextmanager
def backend(module):
    saved = {name: getattr(kernels, name) for name in ("attraction", "repulsion_exact",
                                                       "bh_repulsion")}
    for name in saved:
        setattr(kernels, name, getattr(module, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[250, 1000, 4000])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    print(f"{'kernel':<16}{'n':>7}{'python s':>12}{'compiled s':>12}{'speedup':>9}{'max |df|':>11}")
    for n in args.sizes:
        cases = kernel_cases(n, np.random.default_rng(n))
        for name, run in cases.items():
            if name == "repulsion_exact" and n > 4000:
                continue
            t_py = best_time(lambda: run(_pykernels), args.repeat)
            t_c = best_time(lambda: run(_ckernels), args.repeat)
            diff = np.abs(run(_pykernels)[0] - run(_ckernels)[0]).max()
            print(f"{name:<16}{n:>7}{t_py:>12.5f}{t_c:>12.5f}{t_py / t_c:>9.1f}{diff:>11.1e}")

    net, _ = planted_partition(PlantedPartitionSpec(16, 32, 0.5, 0.02, seed=0))
    opts = LayoutOptions(max_iterations=100, use_barnes_hut=True)
    timings = {}
    for label, module in (("python", _pykernels), ("compiled", _ckernels)):
        with backend(module):
            timings[label] = best_time(lambda: minimize_energy(net, EnergyParams(0, -1), opts), 1)
    print(f"\nlayout n={net.n} m={net.m}, 100 Barnes-Hut iterations: "
          f"python {timings['python']:.2f}s, compiled {timings['compiled']:.2f}s, "
          f"speedup {timings['python'] / timings['compiled']:.1f}x")


if __name__ == "__main__":
    main()
