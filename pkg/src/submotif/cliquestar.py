"""Exact-uniform attempted samplers for cliques and stars.

Cliques are sampled as the increasing (by degree, then id) ordering of their
vertices, split by the class of the first vertex; stars by the class of their
center, with leaves in increasing order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ._walkdefs import (BRANCH, CLIQUE, CLIQUE_HIGH, CLIQUE_LOW, CLIQUE_MEDIUM, STAR, STAR_LOW,
                        STAR_NONLOW)
from .graph import QueryOracle
from .motifs import CopyRecord, _norm
from .samplers import AttemptEngine, AttemptOutcome, _root_power
from .typical import DegreesTypicalStructure

CLIQUE_BRANCHES = {"combined": CLIQUE, "low": CLIQUE_LOW, "medium": CLIQUE_MEDIUM, "high": CLIQUE_HIGH}
STAR_BRANCHES = {"combined": STAR, "low": STAR_LOW, "nonlow": STAR_NONLOW}


@dataclass(frozen=True)
class CliqueConstants:
    B_low: int
    B_medium: int
    B_high: float
    B: float


def clique_constants(n: int, k: int, gamma_bar: int, m_bar: int) -> CliqueConstants:
    """Inverse per-copy probabilities of the three clique branches."""
    b_low = n * gamma_bar ** (k - 1)
    b_med = 2 * m_bar * math.isqrt(m_bar) ** (k - 2)
    b_high = 2 ** k * _root_power(m_bar, k)
    return CliqueConstants(b_low, b_med, b_high, b_low + b_med + b_high)


@dataclass(frozen=True)
class StarParameters:
    """Star-count estimate, the degree cap for star centers, and the two branch constants.

    The constants are None when built without (gamma_bar, m_bar).
    """

    n_bar_S: float
    d_bar_max: int
    B_low_star: int | None = None
    B_nonlow_star: int | None = None

    @property
    def B(self) -> int:
        return self.B_low_star + self.B_nonlow_star


def max_center_degree(n_bar_S: float, k: int, n: int, *, factor: float = 4.0) -> int:
    """min(q, n) for the largest q with C(q, k-1) <= factor * n_bar_S.

    A vertex of degree d centers C(d, k-1) stars, so while n_bar_S is within
    the factor of the true star count no center degree exceeds q.
    """
    cap = factor * n_bar_S
    q = k - 2
    # gallop upward: C(q, k-1) is non-decreasing in q
    while q < n and math.comb(q + 1, k - 1) <= cap:
        step = 1
        while q + 2 * step <= n and math.comb(q + 2 * step, k - 1) <= cap:
            step *= 2
        q += step
    return min(q, n)


def star_dmax(n_bar_S: float, k: int, n: int, gamma_bar: int | None = None, m_bar: int | None = None,
              *, factor: float = 4.0) -> StarParameters:
    if n_bar_S < 1 or k < 3:
        raise ValueError("need n_bar_S >= 1 and k >= 3")
    dmax = max_center_degree(n_bar_S, k, n, factor=factor)
    if gamma_bar is None or m_bar is None:
        return StarParameters(n_bar_S, dmax)
    return StarParameters(n_bar_S, dmax, n * gamma_bar ** (k - 1), 2 * m_bar * dmax ** (k - 2))


class CliqueSampler(AttemptEngine):
    """Returns each k-clique with probability exactly 1/B per attempt (per-branch 1/B_branch)."""

    def __init__(self, oracle: QueryOracle, k: int, gamma_bar: int, m_bar: int,
                 D: DegreesTypicalStructure | None, rng, *, branch: str = "combined",
                 n: int | None = None, walker_backend: str | None = None):
        if k < 3:
            raise ValueError("k must be at least 3")
        if branch not in CLIQUE_BRANCHES:
            raise ValueError(f"unknown branch {branch!r}")
        n = oracle.n if n is None else n
        if branch != "low":
            if D is None or gamma_bar * gamma_bar > m_bar:
                raise ValueError("medium/high branches need a structure and gamma_bar <= sqrt(m_bar)")
        self.constants = clique_constants(n, k, gamma_bar, m_bar)
        c = self.constants
        c1 = c.B_low / c.B
        c2 = (c.B_low + c.B_medium) / c.B
        qmax = 3 * k + k * (k - 1) // 2 + 2
        super().__init__(oracle, rng, k, CLIQUE_BRANCHES[branch], gamma_bar, m_bar, D,
                         c1=c1, c2=c2, qmax=qmax, walker_backend=walker_backend)
        self.branch = branch

    @property
    def B(self) -> float:
        c = self.constants
        return {"combined": c.B, "low": c.B_low, "medium": c.B_medium, "high": c.B_high}[self.branch]

    def _finish(self):
        seq = tuple(self.seq.tolist())
        k = self.k
        edges = frozenset(_norm(seq[a], seq[b]) for a in range(k) for b in range(a + 1, k))
        name = ("low", "medium", "high")[int(self.counters[BRANCH])]
        return CopyRecord(seq, edges), None, name


class StarSampler(AttemptEngine):
    """Returns each k-star with probability exactly 1/B per attempt."""

    def __init__(self, oracle: QueryOracle, k: int, gamma_bar: int, m_bar: int,
                 D: DegreesTypicalStructure | None, params: StarParameters, rng, *,
                 branch: str = "combined", walker_backend: str | None = None):
        if k < 3:
            raise ValueError("k must be at least 3")
        if branch not in STAR_BRANCHES:
            raise ValueError(f"unknown branch {branch!r}")
        if params.B_low_star is None:
            raise ValueError("star parameters need gamma_bar and m_bar")
        if branch != "low" and D is None:
            raise ValueError("the non-low branch needs a degrees-typical structure")
        self.params = params
        super().__init__(oracle, rng, k, STAR_BRANCHES[branch], gamma_bar, m_bar, D,
                         dmax=max(1, params.d_bar_max), c1=params.B_low_star / params.B, qmax=2 * k + 2,
                         walker_backend=walker_backend)
        self.branch = branch

    @property
    def B(self) -> int:
        p = self.params
        return {"combined": p.B, "low": p.B_low_star, "nonlow": p.B_nonlow_star}[self.branch]

    def _finish(self):
        seq = tuple(self.seq.tolist())
        center = seq[0]
        edges = frozenset(_norm(center, v) for v in seq[1:])
        name = ("low", "nonlow")[int(self.counters[BRANCH])]
        return CopyRecord(seq, edges), None, name


def sample_low_clique(oracle, k, gamma_bar, rng) -> AttemptOutcome:
    return CliqueSampler(oracle, k, gamma_bar, gamma_bar * gamma_bar, None, rng, branch="low").attempt()


def sample_medium_clique(oracle, k, gamma_bar, m_bar, D, rng) -> AttemptOutcome:
    return CliqueSampler(oracle, k, gamma_bar, m_bar, D, rng, branch="medium").attempt()


def sample_high_clique(oracle, k, gamma_bar, m_bar, D, rng) -> AttemptOutcome:
    return CliqueSampler(oracle, k, gamma_bar, m_bar, D, rng, branch="high").attempt()


def sample_clique_with_estimate(oracle, n, k, gamma_bar, m_bar, D, rng) -> AttemptOutcome:
    return CliqueSampler(oracle, k, gamma_bar, m_bar, D, rng, n=n).attempt()


def sample_low_star(oracle, k, gamma_bar, params: StarParameters, rng) -> AttemptOutcome:
    return StarSampler(oracle, k, gamma_bar, gamma_bar * gamma_bar, None, params, rng, branch="low").attempt()


def sample_nonlow_star(oracle, k, gamma_bar, m_bar, D, params: StarParameters, rng) -> AttemptOutcome:
    return StarSampler(oracle, k, gamma_bar, m_bar, D, params, rng, branch="nonlow").attempt()


def sample_star_with_estimate(oracle, n, k, gamma_bar, m_bar, D, params: StarParameters, rng) -> AttemptOutcome:
    return StarSampler(oracle, k, gamma_bar, m_bar, D, params, rng).attempt()
