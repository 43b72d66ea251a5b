"""Counting pipeline: edge estimation, counting with advice, geometric search, full
approximate counting with an exact fallback, and the pointwise-uniform sampler."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cliquestar import CliqueSampler, StarSampler, star_dmax
from .graph import QueryBudgetExceeded, QueryLedger, QueryOracle
from .motifs import CopyRecord, Motif, exact_motif_count, hamiltonian_profile
from .rng import RandomStream, as_stream
from .samplers import HamiltonianSampler, square_ceil
from .typical import DegreesTypicalStructure, construct_data_structure

AMPLIFICATION = 18.0


def ceil_root(x: float, k: int) -> int:
    """Smallest integer g >= 1 with g**k >= x."""
    g = max(1, math.ceil(x ** (1.0 / k)))
    while g > 1 and (g - 1) ** k >= x:
        g -= 1
    while g ** k < x:
        g += 1
    return g


def clamp_gamma(n_bar_F: float, k: int, m_bar: int) -> int:
    """ceil(n_bar_F^(1/k)) capped at floor(sqrt(m_bar)) so that gamma_bar^2 <= m_bar."""
    return max(1, min(ceil_root(n_bar_F, k), math.isqrt(m_bar)))


def repetitions(delta: float, constant: float = AMPLIFICATION) -> int:
    """Runs whose median boosts a 2/3-correct estimator to failure probability delta/2."""
    return math.ceil(constant * math.log(2.0 / delta))


# edge estimation

def edge_sample_values(n: int, u, du, v, dv):
    """X = 2 n d(u) 1[u precedes v] for sampled pairs (u, v); elementwise on arrays."""
    prec = (du < dv) | ((du == dv) & (u < v))
    return 2.0 * n * du * prec


def raw_edge_samples(oracle: QueryOracle, rng: RandomStream, size: int) -> np.ndarray:
    """Independent copies of X = 2 n d(u) 1[u precedes v], u uniform, v a uniform neighbor.

    E[X] equals the ordered edge count. An isolated u contributes 0 without a
    neighbor query.
    """
    n = oracle.n
    us = oracle.uniform_vertices(rng, size)
    du = oracle.degrees_of(us)
    out = np.zeros(size, dtype=np.float64)
    nz = np.flatnonzero(du > 0)
    if nz.size:
        u = us[nz]
        d = du[nz]
        v = oracle.random_neighbors(u, d, rng)
        out[nz] = edge_sample_values(n, u, d, v, oracle.degrees_of(v))
    return out


def median_of_means(x: np.ndarray, blocks: int) -> float:
    blocks = max(1, min(blocks, x.size))
    usable = x.size - x.size % blocks
    return float(np.median(x[:usable].reshape(blocks, -1).mean(axis=1)))


@dataclass(frozen=True)
class EdgeEstimatorConfig:
    constant: float = 48.0
    blocks: int = 9
    scale: float = 1.5


def estimate_edges(oracle: QueryOracle, n: int, rng, *, config: EdgeEstimatorConfig | None = None) -> float:
    """m_bar, in [m, 2m] with probability >= 2/3 (m = ordered edges); 0 for an edgeless graph.

    Samples are doubled until there are at least C n / sqrt(estimate) of them,
    capped at C n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    cfg = config or EdgeEstimatorConfig()
    rng = as_stream(rng)
    cap = max(cfg.blocks, math.ceil(cfg.constant * n))
    size = min(cap, 4 * cfg.blocks)
    samples = raw_edge_samples(oracle, rng, size)
    while True:
        est = median_of_means(samples, cfg.blocks)
        need = cfg.constant * n / math.sqrt(max(est, 1.0))
        if samples.size >= need or samples.size >= cap:
            break
        more = min(samples.size, cap - samples.size)
        samples = np.concatenate([samples, raw_edge_samples(oracle, rng, more)])
    return cfg.scale * est


# counting with advice

@dataclass
class CountEstimate:
    """value == B * successes / trials (an exact fallback is stored as B = trials = 1)."""

    value: float
    B: float
    trials: int
    successes: int
    epsilon: float
    delta: float
    ledger: QueryLedger
    wall_time: float
    flags: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)


def build_sampler(oracle: QueryOracle, n: int, motif: Motif, gamma_bar: int, m_bar: int,
                  D: DegreesTypicalStructure, rng, *, n_bar_F: float = 1.0, nominal_constant: bool = False,
                  walker_backend: str | None = None):
    """Combined attempted sampler for the motif (clique, star or Hamiltonian)."""
    if motif.is_clique:
        return CliqueSampler(oracle, motif.k, gamma_bar, m_bar, D, rng, n=n, walker_backend=walker_backend)
    if motif.is_star:
        params = star_dmax(max(1.0, n_bar_F), motif.k, n, gamma_bar, m_bar)
        return StarSampler(oracle, motif.k, gamma_bar, m_bar, D, params, rng, walker_backend=walker_backend)
    if not hamiltonian_profile(motif).is_hamiltonian:
        raise ValueError(f"motif {motif.name} is neither Hamiltonian, a clique, nor a star")
    return HamiltonianSampler(oracle, motif, gamma_bar, m_bar, D, rng, n=n, nominal_constant=nominal_constant,
                              walker_backend=walker_backend)


def trial_count(B: float, n_bar_F: float, k: int, epsilon: float, delta: float) -> int:
    eps_bar = epsilon / (6 * k)
    return math.ceil((B / n_bar_F) * 3.0 * math.log(4.0 / delta) / ((1 - eps_bar) ** k * eps_bar ** 2))


def approx_with_estimate(oracle: QueryOracle, n: int, motif: Motif, epsilon: float, delta: float,
                         n_bar_F: float, m_bar: int, rng=None, *, trials: int | None = None,
                         structure: DegreesTypicalStructure | None = None,
                         nominal_constant: bool = False) -> CountEstimate:
    """Count copies given advice n_bar_F (copy count guess) and m_bar >= m.

    ``trials`` overrides the attempt count; ``structure`` skips building the
    degrees-typical structure (for instance to supply an exact one).
    """
    if not (0 < epsilon < 0.5 and 0 < delta < 0.5):
        raise ValueError("need epsilon, delta in (0, 1/2)")
    if n_bar_F < 1 or m_bar < 1:
        raise ValueError("need n_bar_F >= 1 and m_bar >= 1")
    rng = as_stream(rng)
    start = oracle.ledger.snapshot()
    t0 = time.perf_counter()
    k = motif.k
    m_bar = int(m_bar)
    gamma_bar = clamp_gamma(n_bar_F, k, m_bar)
    D = structure
    if D is None:
        D = construct_data_structure(oracle, n, epsilon / (6 * k), min(delta / 2, epsilon / 12),
                                     gamma_bar, m_bar, rng)
    sampler = build_sampler(oracle, n, motif, gamma_bar, m_bar, D, rng, n_bar_F=n_bar_F,
                            nominal_constant=nominal_constant)
    B = sampler.B
    t = trials if trials is not None else trial_count(B, n_bar_F, k, epsilon, delta)
    chi = sampler.run(t).successes
    return CountEstimate(B * chi / t, B, t, chi, epsilon, delta, oracle.ledger.snapshot() - start,
                         time.perf_counter() - t0, {"degraded_confidence": not D.ok},
                         {"gamma_bar": gamma_bar, "m_bar": m_bar, "n_bar_F": n_bar_F})


# geometric search

@dataclass(frozen=True)
class SearchConfig:
    U: float
    epsilon: float
    ell: int = 1
    c: float = 1.0
    halving: float = 2.0
    slack: int = 4

    @property
    def delta_guess(self) -> float:
        return self.c * self.epsilon / (2 ** self.ell * (self.ell + math.log2(math.log2(max(self.U, 4.0)))))

    @property
    def max_rounds(self) -> int:
        return math.ceil(math.log2(max(self.U, 2.0))) + self.slack


@dataclass
class SearchResult:
    value: float
    rounds: int
    guess: float
    accepted: bool
    guesses: list = field(default_factory=list)


def geometric_search(estimator: Callable, U: float, epsilon: float, aux=None, *,
                     config: SearchConfig | None = None) -> SearchResult:
    """Halve the guess from U until the estimator's answer reaches the guess.

    ``estimator(guess, epsilon, delta_guess, aux)`` returns an estimate. The
    search stops at the round cap or once the guess drops below 1, returning
    the last estimate.
    """
    if U <= 0:
        raise ValueError("U must be positive")
    cfg = config or SearchConfig(U, epsilon)
    guess = float(U)
    value = 0.0
    guesses = []
    for rounds in range(1, cfg.max_rounds + 1):
        guesses.append(guess)
        value = estimator(guess, epsilon, cfg.delta_guess, aux)
        if value >= guess:
            return SearchResult(value, rounds, guess, True, guesses)
        guess /= cfg.halving
        if guess < 1:
            break
    return SearchResult(value, len(guesses), guesses[-1], False, guesses)


# full pipeline

@dataclass(frozen=True)
class CountConfig:
    c_full: float = 2.0
    delta: float = 1 / 3
    trials: int | None = None
    search_c: float = 1.0
    edge: EdgeEstimatorConfig = field(default_factory=EdgeEstimatorConfig)
    nominal_constant: bool = False


def upper_bound(motif: Motif, m_bar: int) -> float:
    if motif.is_star:
        return float(m_bar) ** (motif.k - 1)
    return hamiltonian_profile(motif).kappa_F * float(m_bar) ** (motif.k / 2)


def _exact_fallback(oracle, motif, epsilon, delta, start, t0, flags) -> CountEstimate:
    graph = oracle.read_graph()
    count = exact_motif_count(graph, motif)
    flags = dict(flags, exact_fallback=True)
    if graph.m_ordered == 0:
        flags["degenerate"] = True
    return CountEstimate(float(count), 1, 1, count, epsilon, delta, oracle.ledger.snapshot() - start,
                         time.perf_counter() - t0, flags)


def approx_count(oracle: QueryOracle, n: int, epsilon: float, motif: Motif, rng=None, *,
                 config: CountConfig | None = None) -> CountEstimate:
    """(1 +- epsilon)-approximate copy count with probability >= 2/3.

    The sublinear phase may spend at most (c_full - 1) n graph queries; if it
    runs out, the graph is read in full (n + m queries) and counted exactly,
    so a run never exceeds c_full (n + m) queries.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    cfg = config or CountConfig()
    rng = as_stream(rng)
    start = oracle.ledger.snapshot()
    t0 = time.perf_counter()
    k = motif.k
    flags = {"exact_fallback": False, "degraded_confidence": False}
    eps = min(epsilon, 0.49)
    try:
        with oracle.budget(int((cfg.c_full - 1) * n)):
            runs = math.ceil(2 * math.log(max(n, 2) ** (2 * k)))
            m_est = float(np.median([estimate_edges(oracle, n, rng, config=cfg.edge) for _ in range(runs)]))
            m_est = min(m_est, float(n) * n)
            if m_est <= 0:
                flags["degenerate"] = True
                raise QueryBudgetExceeded("no edges detected")
            m_bar = min(square_ceil(m_est), n * n)
            U = upper_bound(motif, m_bar)
            last = {}

            def estimator(guess, e, d, _aux):
                est = approx_with_estimate(oracle, n, motif, e, min(d, 0.49), max(guess, 1.0), m_bar, rng,
                                           trials=cfg.trials, nominal_constant=cfg.nominal_constant)
                last["est"] = est
                return est.value

            search = geometric_search(estimator, U, eps,
                                      config=SearchConfig(U, eps, c=cfg.search_c))
    except QueryBudgetExceeded:
        return _exact_fallback(oracle, motif, epsilon, cfg.delta, start, t0, flags)
    est = last["est"]
    flags["degraded_confidence"] = bool(est.flags.get("degraded_confidence"))
    return CountEstimate(est.value, est.B, est.trials, est.successes, epsilon, cfg.delta,
                         oracle.ledger.snapshot() - start, time.perf_counter() - t0, flags,
                         {"m_bar": m_bar, "U": U, "rounds": search.rounds})


# pointwise sampling

@dataclass
class PointwiseSamplerState:
    n: int
    motif: Motif
    epsilon: float
    delta: float
    m_hat: int
    n_hat_F: float
    gamma_hat: int
    D: DegreesTypicalStructure | None
    eps_bar: float
    ledger: QueryLedger = field(default_factory=QueryLedger)

    @property
    def empty(self) -> bool:
        return self.n_hat_F <= 0 or self.D is None

    def sampler(self, oracle: QueryOracle, rng, *, walker_backend: str | None = None):
        if self.empty:
            raise ValueError("no copies to sample")
        return build_sampler(oracle, self.n, self.motif, self.gamma_hat, self.m_hat, self.D, rng,
                             n_bar_F=self.n_hat_F, walker_backend=walker_backend)


def pointwise_preprocess(oracle: QueryOracle, n: int, motif: Motif, epsilon: float, delta: float, rng=None, *,
                         runs: int | None = None, count_config: CountConfig | None = None) -> PointwiseSamplerState:
    """Estimate m and n_F, then build the degrees-typical structure for sampling."""
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ValueError("need epsilon, delta in (0, 1)")
    rng = as_stream(rng)
    start = oracle.ledger.snapshot()
    r = runs if runs is not None else repetitions(delta)
    k = motif.k
    m_est = float(np.median([estimate_edges(oracle, n, rng) for _ in range(r)]))
    eps_bar = epsilon / (6 * k)
    if m_est <= 0:
        return PointwiseSamplerState(n, motif, epsilon, delta, 0, 0.0, 0, None, eps_bar,
                                     oracle.ledger.snapshot() - start)
    m_hat = min(square_ceil(m_est), n * n)
    n_hat = float(np.median([approx_count(oracle, n, 0.5, motif, rng, config=count_config).value
                             for _ in range(r)]))
    if n_hat <= 0:
        return PointwiseSamplerState(n, motif, epsilon, delta, m_hat, 0.0, 0, None, eps_bar,
                                     oracle.ledger.snapshot() - start)
    gamma_hat = clamp_gamma(n_hat, k, m_hat)
    D = construct_data_structure(oracle, n, eps_bar, delta / 2, gamma_hat, m_hat, rng)
    return PointwiseSamplerState(n, motif, epsilon, delta, m_hat, n_hat, gamma_hat, D, eps_bar,
                                 oracle.ledger.snapshot() - start)


def pointwise_sample(state: PointwiseSamplerState, oracle: QueryOracle, rng=None, *,
                     max_attempts: int | None = None) -> CopyRecord:
    """One copy, each copy with probability in (1 +- epsilon) / n_F given a good state."""
    return pointwise_samples(state, oracle, rng, 1, max_attempts=max_attempts)[0]


def pointwise_samples(state: PointwiseSamplerState, oracle: QueryOracle, rng, num: int, *,
                      max_attempts: int | None = None) -> list[CopyRecord]:
    """``num`` independent pointwise samples sharing one sampler."""
    sampler = state.sampler(oracle, as_stream(rng))
    cap = max_attempts if max_attempts is not None else max(10 ** 6, 1000 * math.ceil(sampler.B / state.n_hat_F))
    out = []
    for _ in range(num):
        copy, _used = sampler.sample(cap)
        if copy is None:
            raise RuntimeError(f"no copy after {cap} attempts; the preprocessing state is likely bad")
        out.append(copy)
    return out
