"""Time the compiled kernels against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from regimekit import _backend


def cases():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((900, 2))
    init = X[:4].copy()
    e = rng.standard_normal(5000)
    codes = rng.integers(0, 4, 5000)
    labels = rng.integers(0, 4, 900)
    D = _backend.pairwise_dct(X, 0.0, "python")
    return {
        "pairwise_dct (T=900)": lambda b: _backend.pairwise_dct(X, 0.1, b),
        "lloyd (T=900, k=4)": lambda b: _backend.lloyd(X, init, 300, b),
        "garch11_loglik (T=5000)": lambda b: _backend.garch11_loglik(e, 0.1, 0.1, 0.8, 1.0, b),
        "majority_vote (T=5000, h=4)": lambda b: _backend.majority_vote(codes, 4, 4, b),
        "silhouette_values (T=900)": lambda b: _backend.silhouette_values(D, labels, 4, b),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = _backend.available()
    print(f"{'kernel':<30}" + "".join(f"{b + ' (ms)':>16}" for b in backends) + ("   speedup" if len(backends) == 2 else ""))
    for name, fn in cases().items():
        times = [min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) * 1e3 for b in backends]
        line = f"{name:<30}" + "".join(f"{t:>16.3f}" for t in times)
        if len(times) == 2:
            line += f"{times[1] / times[0]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
