"""Compare the compiled and numpy jet products, and a full kernel jet.

Run with ``python3 benchmarks/bench_jet.py``.  The compiled rows are skipped
when the extension was not built.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from g2bergman import jet
from g2bergman.kernel import PolarizedKernelArgs, kernel_jet


def _random_jet(rng):
    return jet.Jet4(rng.normal(size=jet.NCOEFFS) + 1j * rng.normal(size=jet.NCOEFFS))


def bench(backend: str, number: int, rng) -> dict[str, float]:
    jet.use_backend(backend)
    a, b = _random_jet(rng), _random_jet(rng)
    args = PolarizedKernelArgs.diagonal(0.6, 0.1 + 0.2j)
    out = {
        "raw": min(timeit.repeat(lambda: jet._mul(a.coeffs, b.coeffs), number=number, repeat=5)) / number,
        "product": min(timeit.repeat(lambda: a * b, number=number, repeat=5)) / number,
        "kernel_jet": min(timeit.repeat(lambda: kernel_jet(args), number=number // 10, repeat=5)) / (number // 10),
    }
    return out


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--number", type=int, default=2000)
    args = p.parse_args()
    rng = np.random.default_rng(0)
    default = jet.BACKEND
    backends = ["numpy"]
    try:
        from g2bergman import _jetcore  # noqa: F401

        backends.append("cython")
    except ImportError:
        print("compiled extension not available; numpy only")
    results = {name: bench(name, args.number, rng) for name in backends}
    jet.use_backend(default)

    a, b = _random_jet(rng), _random_jet(rng)
    if "cython" in results:
        jet.use_backend("cython")
        diff = np.max(np.abs(jet._mul_numpy(a.coeffs, b.coeffs) - (a * b).coeffs))
        jet.use_backend(default)
        print(f"max |cython - numpy| on a random product: {diff:.2e}")
    print(f"{'backend':8s} {'raw product [us]':>17s} {'Jet4 product [us]':>18s} {'kernel_jet [us]':>16s}")
    for name, r in results.items():
        print(f"{name:8s} {r['raw'] * 1e6:17.2f} {r['product'] * 1e6:18.2f} {r['kernel_jet'] * 1e6:16.2f}")
    if len(results) == 2:
        for key in ("raw", "kernel_jet"):
            print(f"speedup {key}: {results['numpy'][key] / results['cython'][key]:.2f}x")


if __name__ == "__main__":
    main()
