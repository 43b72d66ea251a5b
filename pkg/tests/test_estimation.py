import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import binom, binomtest

from conftest import complete_graph, graphs
from submotif.estimation import (CountConfig, SearchConfig, approx_count, approx_with_estimate, ceil_root,
                                 clamp_gamma, edge_sample_values, estimate_edges, geometric_search,
                                 pointwise_preprocess, pointwise_sample, pointwise_samples, repetitions,
                                 trial_count, upper_bound)
from submotif.generators import GeneratorSpec, generate_graph
from submotif.graph import Graph, QueryOracle
from submotif.motifs import clique, cycle, exact_motif_count, is_copy, star
from submotif.rng import RandomStream
from submotif.samplers import square_ceil
from submotif.typical import exact_structure


# helpers

@given(st.floats(1, 1e12), st.integers(1, 8))
def test_ceil_root(x, k):
    g = ceil_root(x, k)
    assert g ** k >= x and (g == 1 or (g - 1) ** k < x)


@given(st.floats(1, 1e9), st.integers(3, 6), st.integers(1, 10 ** 6))
def test_clamped_gamma_fits_under_root_m(n_bar_F, k, m_bar):
    g = clamp_gamma(n_bar_F, k, m_bar)
    assert 1 <= g and g * g <= max(m_bar, 1)


@pytest.mark.parametrize("delta", [0.5, 0.2, 0.1, 0.01])
def test_repetitions_boost_two_thirds(delta):
    r = repetitions(delta)
    assert r == math.ceil(18 * math.log(2 / delta))
    # the median is wrong only if at most half of the runs are right
    assert binom.cdf(r // 2, r, 2 / 3) <= delta / 2


@given(st.floats(1, 1e6), st.floats(1, 1e6), st.integers(3, 6))
def test_trial_count_is_monotone(a, b, k):
    lo, hi = sorted((a, b))
    assert trial_count(1e9, hi, k, 0.2, 0.1) <= trial_count(1e9, lo, k, 0.2, 0.1)


def test_upper_bound():
    assert upper_bound(cycle(4), 100) == 100 ** 2
    assert upper_bound(star(4), 10) == 1000
    assert upper_bound(clique(4), 16) == 16 ** 2


# edge estimation

@given(graphs(max_n=12))
def test_raw_edge_estimator_is_unbiased(g):
    n = g.n
    expectation = Fraction(0)
    for u in range(n):
        d = int(g.degrees[u])
        for v in g.adjacency[u]:
            x = edge_sample_values(n, np.array([u]), np.array([d]), np.array([v]), np.array([g.degrees[v]]))[0]
            expectation += Fraction(int(x)) / (n * d)
    assert expectation == g.m_ordered


def test_edgeless_graph_gives_zero():
    assert estimate_edges(QueryOracle(Graph(30, [])), 30, RandomStream(1)) == 0


def test_k20_contract():
    g = complete_graph(20)
    assert g.m_ordered == 380
    hits = sum(380 <= estimate_edges(QueryOracle(g), 20, RandomStream(s)) <= 760 for s in range(300))
    assert binomtest(hits, 300, 2 / 3, alternative="less").pvalue > 0.05


def test_edge_estimate_is_cheap_on_dense_graphs():
    g = complete_graph(200)
    o = QueryOracle(g)
    estimate_edges(o, 200, RandomStream(3))
    assert o.ledger.total() < g.m_ordered


# counting with advice

def _planted_c4():
    g = generate_graph(GeneratorSpec("planted", n=60, p=0.3, motif="cycle:4", copies=15, seed=3))
    return g, exact_motif_count(g, cycle(4))


def test_value_is_B_chi_over_t():
    g, n_F = _planted_c4()
    est = approx_with_estimate(QueryOracle(g), g.n, cycle(4), 0.2, 0.1, n_F, square_ceil(g.m_ordered),
                               RandomStream(1), trials=200_000)
    assert est.value == est.B * est.successes / est.trials
    assert est.trials == 200_000


def test_no_successes_give_zero():
    g = Graph(10, [(i, i + 1) for i in range(9)])
    est = approx_with_estimate(QueryOracle(g), 10, cycle(4), 0.2, 0.1, 1, 25, RandomStream(1), trials=10_000)
    assert est.successes == 0 and est.value == 0


def test_advice_accuracy_on_planted_c4():
    # the formula's t is far beyond desk scale here, so t is set to 100 B / n_F
    g, n_F = _planted_c4()
    m_bar = square_ceil(g.m_ordered)
    probe = approx_with_estimate(QueryOracle(g), g.n, cycle(4), 0.2, 0.1, n_F, m_bar, RandomStream(0), trials=1)
    t = math.ceil(100 * probe.B / n_F)
    inside = 0
    for seed in range(100):
        est = approx_with_estimate(QueryOracle(g), g.n, cycle(4), 0.2, 0.1, n_F, m_bar, RandomStream(seed), trials=t)
        inside += abs(est.value - n_F) <= 0.2 * n_F
    assert inside >= 90


@pytest.mark.parametrize("motif", [cycle(3), clique(3), cycle(4), star(3)], ids=lambda m: m.name)
def test_unbiased_with_exact_structure(motif):
    g = generate_graph(GeneratorSpec("er", n=16, p=0.5, seed=5))
    n_F = exact_motif_count(g, motif)
    m_bar = square_ceil(g.m_ordered)
    gamma = clamp_gamma(n_F, motif.k, m_bar)
    D = exact_structure(QueryOracle(g), gamma, m_bar)
    probe = approx_with_estimate(QueryOracle(g), g.n, motif, 0.2, 0.1, n_F, m_bar, RandomStream(0), trials=1,
                                 structure=D)
    t = math.ceil(probe.B / n_F)
    rng = RandomStream(11)
    values = [approx_with_estimate(QueryOracle(g), g.n, motif, 0.2, 0.1, n_F, m_bar, rng, trials=t,
                                   structure=D).value for _ in range(10_000)]
    # each value is B/t times a Binomial(t, n_F/B) count
    p = n_F / probe.B
    sd = probe.B / t * math.sqrt(t * p * (1 - p)) / math.sqrt(len(values))
    assert abs(np.mean(values) - n_F) <= 3 * sd


def test_invalid_advice():
    g = complete_graph(5)
    with pytest.raises(ValueError):
        approx_with_estimate(QueryOracle(g), 5, cycle(3), 0.6, 0.1, 1, 25)
    with pytest.raises(ValueError):
        approx_with_estimate(QueryOracle(g), 5, cycle(3), 0.2, 0.1, 0.5, 25)


# geometric search

def test_search_with_exact_estimator():
    calls = []

    def exact(guess, eps, delta, aux):
        calls.append(guess)
        return 1000.0

    res = geometric_search(exact, 2 ** 20, 0.25)
    assert res.accepted and res.value == 1000.0
    assert res.guess <= 1000 < 2 * res.guess
    assert max(calls) <= 2 ** 20


def test_search_never_exceeds_round_cap():
    cfg = SearchConfig(2 ** 10, 0.25, slack=0)
    res = geometric_search(lambda *a: 0.0, 2 ** 10, 0.25, config=cfg)
    assert not res.accepted and res.rounds <= cfg.max_rounds
    with pytest.raises(ValueError):
        geometric_search(lambda *a: 0.0, 0, 0.25)


def test_delta_guess():
    cfg = SearchConfig(2 ** 16, 0.2, c=1.0)
    assert cfg.delta_guess == pytest.approx(0.2 / (2 * (1 + 4)))
    assert cfg.max_rounds == 16 + 4


def test_search_with_binomial_estimator():
    v, U, eps = 1e4, 1e8, 0.25
    rng = np.random.default_rng(0)

    def estimator(guess, e, d, aux):
        t = math.ceil(3 * (U / guess) * math.log(4 / d) / e ** 2)
        return U * rng.binomial(t, v / U) / t

    good = few_rounds = 0
    for _ in range(200):
        res = geometric_search(estimator, U, eps)
        good += abs(res.value - v) <= eps * v
        few_rounds += res.rounds <= math.log2(U / v) + 3
    assert good >= 160
    assert few_rounds >= 190


# full pipeline

def test_er_c4_counts_within_budget():
    g = generate_graph(GeneratorSpec("er", n=200, p=0.1, seed=1))
    n_F = exact_motif_count(g, cycle(4))
    inside = 0
    for seed in range(60):
        o = QueryOracle(g)
        est = approx_count(o, g.n, 0.25, cycle(4), RandomStream(seed))
        assert o.ledger.total() <= 2.0 * (g.n + g.m_ordered)
        inside += abs(est.value - n_F) <= 0.25 * n_F
    assert binomtest(inside, 60, 2 / 3, alternative="less").pvalue > 0.05


@pytest.mark.parametrize("c_full", [1.5, 2.0, 3.0])
def test_budget_holds_for_every_c_full(c_full):
    g = generate_graph(GeneratorSpec("powerlaw", n=150, exponent=2.2, avg_degree=5, seed=2))
    o = QueryOracle(g)
    est = approx_count(o, g.n, 0.3, cycle(3), RandomStream(4), config=CountConfig(c_full=c_full))
    assert o.ledger.total() <= c_full * (g.n + g.m_ordered)
    assert est.flags["exact_fallback"]
    assert est.value == exact_motif_count(g, cycle(3))


def test_no_copies_or_no_edges():
    o = QueryOracle(Graph(20, []))
    est = approx_count(o, 20, 0.25, cycle(4), RandomStream(1))
    assert est.value == 0 and est.flags.get("degenerate")
    tree = Graph(20, [(i, (i - 1) // 2) for i in range(1, 20)])
    assert approx_count(QueryOracle(tree), 20, 0.25, cycle(3), RandomStream(1)).value == 0


def test_complete_graph_m_bar_cap():
    g = complete_graph(12)
    est = approx_count(QueryOracle(g), 12, 0.25, cycle(3), RandomStream(2), config=CountConfig(c_full=200))
    if not est.flags["exact_fallback"]:
        assert est.details["m_bar"] <= 12 ** 2


def test_approx_count_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        approx_count(QueryOracle(complete_graph(4)), 4, 1.5, cycle(3))


# pointwise sampling

def test_single_copy_graph():
    g = Graph(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6)])
    o = QueryOracle(g)
    state = pointwise_preprocess(o, 8, cycle(4), 0.3, 0.2, RandomStream(1))
    assert not state.empty and state.gamma_hat ** 2 <= state.m_hat
    copies = pointwise_samples(state, o, RandomStream(2), 50)
    assert {c.key for c in copies} == {c.key for c in [copies[0]]}
    assert set(copies[0].vertices) == set(range(4))
    assert is_copy(g, pointwise_sample(state, o, RandomStream(3)), cycle(4))


def test_empty_state():
    g = Graph(6, [(0, 1), (1, 2)])
    state = pointwise_preprocess(QueryOracle(g), 6, cycle(3), 0.3, 0.2, RandomStream(1))
    assert state.empty
    with pytest.raises(ValueError):
        pointwise_sample(state, QueryOracle(g), RandomStream(1))


def test_attempt_cap_signals_a_bad_state():
    g = Graph(8, [(0, 1), (1, 2), (2, 3), (3, 0)])
    o = QueryOracle(g)
    state = pointwise_preprocess(o, 8, cycle(4), 0.3, 0.2, RandomStream(1))
    with pytest.raises(RuntimeError):
        pointwise_samples(state, o, RandomStream(2), 1000, max_attempts=1)


def test_preprocessing_success_rate():
    g = generate_graph(GeneratorSpec("planted", n=40, p=0.03, motif="cycle:4", copies=6, seed=3))
    n_F = exact_motif_count(g, cycle(4))
    m = g.m_ordered
    good = 0
    for seed in range(300):
        s = pointwise_preprocess(QueryOracle(g), g.n, cycle(4), 0.3, 0.2, RandomStream(seed))
        good += (m <= s.m_hat <= 2 * m + 2 * math.isqrt(2 * m) + 1 and abs(s.n_hat_F - n_F) <= n_F / 2
                 and s.D.ok)
    assert binomtest(good, 300, 0.8, alternative="less").pvalue > 0.05
