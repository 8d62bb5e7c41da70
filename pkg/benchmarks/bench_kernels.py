"""Time the compiled kernels against the numpy fallback and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from airan.kernels import available_backends


def _energy_inputs(rng, stations=64, slots=96 * 7):
    m = rng.integers(0, 9, size=(stations, slots))
    c = rng.integers(0, 4, size=(stations, slots))
    p = rng.uniform(0.0, 20.0, size=(stations, slots))
    return m, c, p, 30.0, 2.5, 10.0, 5.0, 40.0, 100.0


def _split_inputs(rng, n=5000, d=10, k=5):
    X = rng.normal(size=(n, d))
    y = rng.integers(0, k, size=n)
    return X, y, np.arange(n, dtype=np.int64), np.arange(d, dtype=np.int64), k, 3


def _time(fn, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    cases = {"energy_breakdown": _energy_inputs(rng), "best_split": _split_inputs(rng)}
    backends = available_backends()
    print(f"backends: {', '.join(sorted(backends))}")
    for name, inputs in cases.items():
        results = {}
        for bname, mod in sorted(backends.items()):
            secs, out = _time(getattr(mod, name), inputs, args.repeat)
            results[bname] = out
            print(f"{name:18s} {bname:7s} {secs * 1e3:9.3f} ms")
        outs = list(results.values())
        if name == "energy_breakdown":
            same = all(np.array_equal(o, outs[0]) for o in outs[1:])
        else:
            same = all(o == outs[0] for o in outs[1:])
        print(f"{name:18s} identical across backends: {same}")


if __name__ == "__main__":
    main()
