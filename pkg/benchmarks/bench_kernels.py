"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fractonlab import kernels
from fractonlab.codes import build_checkerboard
from fractonlab.exact import energy_spectrum
from fractonlab.gf2 import rank_dense
from fractonlab.mapping import map_error_model, random_hypergraph, sample_disorder
from fractonlab.mc import DisorderedModel, ReplicaState, metropolis_sweep, microcanonical_sweep
from fractonlab.rng import Stream


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    h = map_error_model(build_checkerboard(8), "X")
    m = DisorderedModel(h, sample_disorder(h, 0.1, 1))

    def sweeps(backend, n):
        def run():
            s = ReplicaState.random_start(m, 0.4, Stream(1), Stream(2))
            metropolis_sweep(s, m, n, backend=backend)
        return run

    def micro(backend, n):
        def run():
            s = ReplicaState.random_start(m, 0.4, Stream(1), Stream(2))
            microcanonical_sweep(s, m, n, backend=backend)
        return run

    g = random_hypergraph(16, 32, 4, 0)
    dg = sample_disorder(g, 0.2, 0)
    mat = build_checkerboard(8).parity_matrix("X")
    return [
        ("metropolis sweeps, L=8 checkerboard", "sweep", lambda b: sweeps(b, 20 if b == "python" else 2000),
         lambda b: 20 if b == "python" else 2000),
        ("microcanonical sweeps, L=8 checkerboard", "sweep", lambda b: micro(b, 20 if b == "python" else 2000),
         lambda b: 20 if b == "python" else 2000),
        ("exact spectrum, 16 spins / 32 couplings", "call", lambda b: (lambda: energy_spectrum(g, dg, b)), lambda b: 1),
        ("GF(2) rank, 256 x 512 parity matrix", "call", lambda b: (lambda: rank_dense(mat, b)), lambda b: 1),
    ]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["python"] + (["compiled"] if kernels.has_compiled() else [])
    print(f"{'case':<42} {'backend':<9} {'time per unit':>14}  speedup")
    for name, unit, make, count in cases():
        per = {}
        for b in backends:
            per[b] = best_of(make(b), args.repeat) / count(b)
        for b in backends:
            speed = per["python"] / per[b]
            print(f"{name:<42} {b:<9} {per[b] * 1e3:>10.4f} ms/{unit}  {speed:>6.1f}x")


if __name__ == "__main__":
    main()
