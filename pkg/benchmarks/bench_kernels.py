"""Compare the Cython and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case is timed with ``timeit`` (best of ``--repeat``) and the two
backends' outputs are compared entrywise.
"""
import argparse
import timeit

import numpy as np

from hypercon_lab import kernels
from hypercon_lab.operator_core import binomial_coeffs


def cases(rng):
    for n, terms in [(4, 2000), (8, 2000), (16, 500), (32, 200)]:
        T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        T *= 0.99 / np.linalg.norm(T, 2)
        c = binomial_coeffs(1.0, terms)
        yield f"power_series n={n} terms={terms}", "power_series", (T, c)
        yield (f"congruence_series n={n} terms={terms}", "congruence_series",
               (T, np.eye(n, dtype=complex), (1.0 + np.arange(terms))))
    for n, pts in [(4, 2049), (8, 2049)]:
        T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        T *= 0.9 / np.linalg.norm(T, 2)
        z = 0.9 * np.sqrt(rng.random(pts)) * np.exp(2j * np.pi * rng.random(pts))
        c = binomial_coeffs(1.0, 400)
        nterms = np.full(pts, 400, dtype=np.intp)
        yield f"power_series_grid n={n} points={pts}", "power_series_grid", (T, np.conj(z), c, nterms)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"backends available: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled extension not built; only the python backend can be timed")
    rng = np.random.default_rng(0)
    print(f"{'case':44s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s} {'max diff':>9s}")
    for label, name, a in cases(rng):
        fn = getattr(kernels, name)
        res, t = {}, {}
        for b in backends:
            res[b] = fn(*a, backend=b)
            t[b] = min(timeit.repeat(lambda: fn(*a, backend=b), number=1, repeat=args.repeat))
        if len(backends) == 2:
            diff = float(np.max(np.abs(res["python"] - res["cython"])))
            print(f"{label:44s} {1e3 * t['python']:10.2f} {1e3 * t['cython']:10.2f} "
                  f"{t['python'] / t['cython']:8.2f} {diff:9.1e}")
        else:
            print(f"{label:44s} {1e3 * t['python']:10.2f}")


if __name__ == "__main__":
    main()
