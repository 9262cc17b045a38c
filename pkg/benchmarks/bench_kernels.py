"""Compare the compiled and numpy walk kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times raw batched propagation and two end-to-end workloads (the reference
K grid and a 20-sample Monte-Carlo run) with each kernel swapped in.
"""
import argparse
import timeit

import numpy as np

from kcwalk import _backend, _walk_py
from kcwalk.montecarlo import PerturbationSpec, sample_quantifiers
from kcwalk.quantifiers import table1_rows
from kcwalk.walk import WalkConfig

try:
    from kcwalk import _walk_core
except ImportError:
    _walk_core = None


def raw_workload(batch, sites, steps):
    rng = np.random.default_rng(0)
    psi = np.zeros((batch, sites, 2), dtype=complex)
    mid = sites // 2
    psi[:, mid, :] = rng.normal(size=(batch, 2)) + 1j * rng.normal(size=(batch, 2))
    return psi, steps


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    kernels = {"python": _walk_py.propagate}
    if _walk_core is not None:
        kernels["cython"] = _walk_core.propagate
    else:
        print("compiled extension not built; timing the numpy kernel only")

    c, s = np.cos(0.4), np.sin(0.4)
    raw_cases = [(1, 41, 20), (82, 41, 20), (1000, 101, 50)]
    cfg = WalkConfig.pure(11, "V", 20, 10)
    spec = PerturbationSpec(samples=20, seed=0)
    saved = _backend.propagate
    results = {}
    try:
        for name, fn in kernels.items():
            row = {}
            for batch, sites, steps in raw_cases:
                psi, n = raw_workload(batch, sites, steps)
                t = min(timeit.repeat(lambda: fn(psi, n, c, s, 1.0, 1.0), number=10, repeat=args.repeat)) / 10
                row[f"raw B={batch} L={sites} n={steps}"] = t
            _backend.propagate = fn
            row["reference K grid"] = min(timeit.repeat(table1_rows, number=1, repeat=args.repeat))
            row["montecarlo 20 samples"] = min(
                timeit.repeat(lambda: sample_quantifiers(cfg, spec), number=1, repeat=max(1, args.repeat // 2))
            )
            results[name] = row
    finally:
        _backend.propagate = saved

    names = list(results)
    print(f"{'workload':32s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for key in results[names[0]]:
        times = [results[n][key] for n in names]
        line = f"{key:32s}" + "".join(f"{t * 1e3:11.3f} ms" for t in times)
        if len(times) == 2:
            line += f"{times[0] / times[1]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
