"""Degrees-typical vertex sample and degree-proportional medium/high vertex sampling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .alias import AliasTable, build_alias
from .graph import Graph, QueryOracle
from .rng import RandomStream


@dataclass(frozen=True)
class DegreesTypicalStructure:
    """Sampled multiset S with cached degrees and an alias table weighted by degree.

    ``support``/``multiplicity``/``support_degrees`` describe S as distinct
    vertices with repeat counts. A draw first passes a coin of probability
    ``p_hit = m(S) / (2 s d_avg)`` and then picks u in S with probability
    d(u)/m(S), so u is returned with probability d(u)/(2 s d_avg) overall.
    """

    n: int
    s: int
    t: int
    support: np.ndarray
    multiplicity: np.ndarray
    support_degrees: np.ndarray
    m_of_S: int
    eps_bar: float
    gamma_bar: int
    m_bar: int
    alias: AliasTable | None
    ok: bool = True

    @property
    def d_bar_avg(self) -> float:
        return self.m_bar / self.n

    @property
    def p_hit(self) -> float:
        if self.m_of_S == 0:
            return 0.0
        return min(1.0, self.m_of_S * self.n / (2 * self.s * self.m_bar))

    @property
    def S(self) -> np.ndarray:
        """The multiset itself (vertices repeated by multiplicity)."""
        return np.repeat(self.support, self.multiplicity)

    def weights(self) -> np.ndarray:
        return self.multiplicity * self.support_degrees

    def d_S(self, graph: Graph, v: int) -> int:
        """|Gamma(v) ∩ S| with multiplicity; needs full graph knowledge (tests only)."""
        mult = np.zeros(graph.n, dtype=np.int64)
        mult[self.support] = self.multiplicity
        return int(mult[graph.indices[graph.indptr[v]:graph.indptr[v + 1]]].sum())

    def return_probability(self, graph: Graph, v: int) -> float:
        """Exact probability that sample_medium_high_vertex returns v."""
        if graph.degrees[v] <= self.gamma_bar:
            return 0.0
        return self.d_S(graph, v) * self.n / (2 * self.s * self.m_bar)


def _check_params(n: int, gamma_bar: int, m_bar: int) -> None:
    if n < 1:
        raise ValueError("graph must have at least one vertex")
    if gamma_bar < 1 or m_bar < 1:
        raise ValueError("gamma_bar and m_bar must be positive")
    if gamma_bar * gamma_bar > m_bar:
        raise ValueError("gamma_bar must not exceed sqrt(m_bar)")


def sample_sizes(n: int, eps_bar: float, delta: float, gamma_bar: int) -> tuple[int, int]:
    """(t, s): number of candidate multisets and size of each."""
    t = math.ceil(math.log2(2.0 / delta))
    s = math.ceil((n / gamma_bar) * 3.0 * math.log(4.0 * n * t / delta) / eps_bar ** 2)
    return t, s


def _finish(n, s, t, counts, deg, eps_bar, gamma_bar, m_bar, ok) -> DegreesTypicalStructure:
    support = np.flatnonzero(counts).astype(np.int64)
    mult = counts[support].astype(np.int64)
    sdeg = deg[support].astype(np.int64)
    m_S = int(np.dot(mult, sdeg))
    keep = sdeg > 0
    support, mult, sdeg = support[keep], mult[keep], sdeg[keep]
    table = build_alias(mult * sdeg) if m_S > 0 else None
    return DegreesTypicalStructure(n, s, t, support, mult, sdeg, m_S, eps_bar, gamma_bar, m_bar, table, ok)


def construct_data_structure(oracle: QueryOracle, n: int, eps_bar: float, delta: float,
                             gamma_bar: int, m_bar: int, rng: RandomStream) -> DegreesTypicalStructure:
    """Draw t uniform multisets of size s, keep the one of least degree sum.

    The returned structure has ``ok=False`` when even the best multiset has
    m(S) > 2 s d_avg; such a structure is still usable (its hit probability
    is capped at 1) so callers can proceed with a degraded-confidence flag.
    Cost: exactly t*s degree queries and t*s uniform vertex draws.
    """
    _check_params(n, gamma_bar, m_bar)
    if not 0 < eps_bar < 0.5 or not 0 < delta < 1:
        raise ValueError("need 0 < eps_bar < 1/2 and 0 < delta < 1")
    t, s = sample_sizes(n, eps_bar, delta, gamma_bar)
    best = None
    best_mass = None
    deg = None
    for _ in range(t):
        counts = oracle.uniform_multiset(rng, s)
        deg = oracle.multiset_degrees(counts)
        mass = int(np.dot(counts, deg))
        if best is None or mass < best_mass:
            best, best_mass = counts, mass
    ok = best_mass * n <= 2 * s * m_bar
    return _finish(n, s, t, best, deg, eps_bar, gamma_bar, m_bar, ok)


def exact_structure(oracle: QueryOracle, gamma_bar: int, m_bar: int) -> DegreesTypicalStructure:
    """S = V (every vertex once): exact degree-proportional sampling, eps_bar = 0.

    Costs n degree queries. Used as the zero-error reference mode.
    """
    n = oracle.n
    _check_params(n, gamma_bar, m_bar)
    counts = np.ones(n, dtype=np.int64)
    deg = oracle.multiset_degrees(counts)
    ok = int(deg.sum()) <= 2 * m_bar
    return _finish(n, n, 1, counts, deg, 0.0, gamma_bar, m_bar, ok)


def structure_from_multiset(graph: Graph, S, gamma_bar: int, m_bar: int, eps_bar: float = 0.0) -> DegreesTypicalStructure:
    """Build a structure over a given multiset (no queries charged; test helper)."""
    S = np.asarray(S, dtype=np.int64)
    counts = np.bincount(S, minlength=graph.n).astype(np.int64)
    _check_params(graph.n, gamma_bar, m_bar)
    m_S = int(np.dot(counts, graph.degrees))
    return _finish(graph.n, int(S.size), 1, counts, graph.degrees, eps_bar, gamma_bar, m_bar,
                   m_S * graph.n <= 2 * S.size * m_bar)


def sample_medium_high_vertex(oracle: QueryOracle, D: DegreesTypicalStructure, gamma_bar: int,
                              rng: RandomStream) -> int | None:
    """Draw u from D, step to a uniform neighbor v, return v if d(v) > gamma_bar, else None."""
    from .samplers import VertexSampler

    if gamma_bar != D.gamma_bar:
        raise ValueError("structure was built for a different gamma_bar")
    out = VertexSampler(oracle, D, rng).attempt()
    return out.vertex
