"""Compare the compiled walker against the pure-Python fallback.

Runs the same attempts with the same seed on both backends, checks that the
success counts and query ledgers agree, and prints attempts per second.

    python3 benchmarks/bench_backends.py [--attempts N]
"""
from __future__ import annotations

import argparse
import time

from submotif.backend import available_backends
from submotif.cliquestar import CliqueSampler, StarSampler, star_dmax
from submotif.generators import GeneratorSpec, generate_graph
from submotif.graph import QueryOracle
from submotif.motifs import cycle, diamond
from submotif.samplers import HamiltonianSampler, square_ceil
from submotif.typical import exact_structure


def cases(graph):
    m_bar = square_ceil(graph.m_ordered)
    yield "ham C4", lambda o, b: HamiltonianSampler(o, cycle(4), 3, m_bar, exact_structure(o, 3, m_bar), 1,
                                                     walker_backend=b)
    yield "ham diamond", lambda o, b: HamiltonianSampler(o, diamond(), 3, m_bar, exact_structure(o, 3, m_bar), 1,
                                                          walker_backend=b)
    yield "clique K3", lambda o, b: CliqueSampler(o, 3, 3, m_bar, exact_structure(o, 3, m_bar), 1, walker_backend=b)
    params = star_dmax(10_000, 3, graph.n, 3, m_bar)
    yield "star S3", lambda o, b: StarSampler(o, 3, 3, m_bar, exact_structure(o, 3, m_bar), params, 1,
                                               walker_backend=b)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--attempts", type=int, default=200_000)
    args = ap.parse_args()
    graph = generate_graph(GeneratorSpec("powerlaw", n=2000, exponent=2.3, avg_degree=8, seed=11))
    backends = available_backends()
    print(f"graph n={graph.n} m_ordered={graph.m_ordered}; backends: {', '.join(backends)}")
    print(f"{'case':14s} {'backend':8s} {'attempts/s':>12s} {'successes':>10s} identical")
    for name, make in cases(graph):
        results = {}
        for b in backends:
            oracle = QueryOracle(graph)
            sampler = make(oracle, b)
            t0 = time.perf_counter()
            run = sampler.run(args.attempts)
            dt = time.perf_counter() - t0
            results[b] = (run.successes, oracle.ledger.as_tuple())
            print(f"{name:14s} {b:8s} {args.attempts / dt:12.0f} {run.successes:10d}", end="")
            print(f" {results[b] == results[backends[0]]}")


if __name__ == "__main__":
    main()
