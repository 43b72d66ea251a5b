"""Seeded random graph generators: Erdős–Rényi, Chung–Lu power law, planted motifs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .motifs import Motif, parse_motif


def _pairs_from_mask(n: int, mask: np.ndarray) -> np.ndarray:
    iu, ju = np.triu_indices(n, k=1)
    return np.stack([iu[mask], ju[mask]], axis=1)


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be positive")
    mask = rng.random(n * (n - 1) // 2) < p
    return Graph(n, _pairs_from_mask(n, mask))


def power_law(n: int, exponent: float, rng: np.random.Generator, *, avg_degree: float = 6.0) -> Graph:
    """Chung–Lu graph with expected degrees w_i proportional to i^(-1/(exponent-1))."""
    if exponent <= 1:
        raise ValueError("exponent must exceed 1")
    if n < 1:
        raise ValueError("n must be positive")
    w = np.arange(1, n + 1, dtype=float) ** (-1.0 / (exponent - 1.0))
    w *= avg_degree * n / w.sum()
    total = w.sum()
    iu, ju = np.triu_indices(n, k=1)
    prob = np.minimum(1.0, w[iu] * w[ju] / total)
    mask = rng.random(iu.size) < prob
    perm = rng.permutation(n)
    pairs = perm[_pairs_from_mask(n, mask)]
    return Graph(n, pairs)


def planted_motif(base: Graph, motif: Motif, copies: int, rng: np.random.Generator) -> Graph:
    """Add ``copies`` vertex-disjoint copies of the motif on random vertices of ``base``.

    The placements are recorded in ``Graph.planted`` as tuples of host vertices
    (position i carries motif vertex i).
    """
    if copies < 0:
        raise ValueError("copies must be non-negative")
    if copies * motif.k > base.n:
        raise ValueError(f"cannot plant {copies} disjoint copies of a {motif.k}-vertex motif in {base.n} vertices")
    chosen = rng.permutation(base.n)[:copies * motif.k].reshape(copies, motif.k)
    edges = set(base.edges())
    planted = []
    for row in chosen:
        row = [int(v) for v in row]
        for a, b in motif.edges:
            u, v = row[a], row[b]
            edges.add((min(u, v), max(u, v)))
        planted.append(tuple(row))
    return Graph(base.n, sorted(edges), planted=tuple(planted))


@dataclass(frozen=True)
class GeneratorSpec:
    """``model`` is "er", "powerlaw" or "planted"; planted wraps a base spec."""

    model: str
    n: int = 100
    p: float = 0.1
    exponent: float = 2.5
    avg_degree: float = 6.0
    motif: str = "cycle:4"
    copies: int = 0
    base: "GeneratorSpec | None" = None
    seed: int = 0


def generate_graph(spec: GeneratorSpec) -> Graph:
    """Deterministic in ``spec``: the same seed always yields the same graph."""
    rng = np.random.default_rng(spec.seed)
    if spec.model == "er":
        return erdos_renyi(spec.n, spec.p, rng)
    if spec.model == "powerlaw":
        return power_law(spec.n, spec.exponent, rng, avg_degree=spec.avg_degree)
    if spec.model == "planted":
        base_spec = spec.base or GeneratorSpec("er", n=spec.n, p=spec.p, seed=spec.seed)
        base = generate_graph(base_spec)
        return planted_motif(base, parse_motif(spec.motif), spec.copies, rng)
    raise ValueError(f"unknown model {spec.model!r}")
