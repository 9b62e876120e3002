import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

import oracles
from digraphon import core
from digraphon.dirm import (BlockWeights, ClusterAssignment, DirmHyperParams, compact_labels,
                            crp_log_prior, sample_block_weights, sample_crp,
                            sample_dirm_digraphon, sample_graph_given_clusters,
                            sample_stick_partition)


def test_hyperparams_validation():
    with pytest.raises(ValueError):
        DirmHyperParams(alpha=0)
    with pytest.raises(ValueError):
        DirmHyperParams(beta=(0, 0, 0, 0))
    with pytest.raises(ValueError):
        DirmHyperParams(beta=(1, -1, 1, 1))
    with pytest.raises(ValueError):
        DirmHyperParams(truncation=0)
    h = DirmHyperParams(beta=(1, 2, 3, 4))
    assert h.beta_star == (1.0, 5.0, 4.0)
    assert DirmHyperParams(beta_diag=(1, 0, 0)).beta_star == (1.0, 0.0, 0.0)
    assert DirmHyperParams.from_dict(h.to_dict()) == h


def test_stick_single_class():
    v = sample_stick_partition(DirmHyperParams(truncation=1), 0)
    assert np.array_equal(v, [1.0])


def test_stick_first_weight_is_first_break():
    h = DirmHyperParams(alpha=2.0)
    v = sample_stick_partition(h, 9)
    x1 = np.random.default_rng(9).beta(1.0, 2.0, size=49)[0]
    assert v[0] == x1
    assert abs(v.sum() - 1) <= 1e-12 and np.all(v >= 0)


def test_stick_first_weight_mean():
    h = DirmHyperParams(alpha=1.0, truncation=50)
    v1 = np.array([sample_stick_partition(h, s)[0] for s in range(10000)])
    assert abs(v1.mean() - 0.5) <= 3 * np.sqrt(1 / 12 / len(v1))


def test_block_weights_tournament_setting():
    h = DirmHyperParams(beta=(0, 1, 1, 0))
    eta = sample_block_weights(5, h, 3).eta
    off = ~np.eye(5, dtype=bool)
    assert np.all(eta[off][:, 0] == 0) and np.all(eta[off][:, 3] == 0)


def test_block_weights_undirected_setting():
    h = DirmHyperParams(beta=(1, 0, 0, 2))
    eta = sample_block_weights(5, h, 3).eta
    assert np.all(eta[:, :, 1] == 0) and np.all(eta[:, :, 2] == 0)


def test_block_weights_diagonal_split():
    h = DirmHyperParams(beta=(1, 1, 1, 1))
    eta = sample_block_weights(1, h, 4).eta[0, 0]
    draw = np.random.default_rng(4).dirichlet([1.0, 2.0, 1.0])
    assert eta[1] == eta[2] == draw[1] / 2
    assert eta[0] == draw[0] and eta[3] == draw[2]


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.sampled_from([0.0, 0.3, 1.0, 2.5])] * 4).filter(lambda b: max(b) > 0),
       st.floats(0.2, 5), st.integers(0, 2**32))
def test_prior_draws_always_valid(beta, alpha, seed):
    h = DirmHyperParams(alpha=alpha, beta=beta, truncation=20)
    d = sample_dirm_digraphon(h, seed)
    assert core.validate(d) == []
    assert not d.selfloop.any()
    upper = d.weights[np.triu_indices(d.k, 1)]
    for t in range(4):
        if beta[t] == 0:
            assert np.all(upper[:, t] == 0)


def test_prior_special_structures():
    cases = [
        (DirmHyperParams(beta=(0, 1, 1, 0), beta_diag=(0, 1, 0)), core.is_tournament),
        (DirmHyperParams(beta=(1, 0, 0, 1)), core.is_undirected),
    ]
    for h, pred in cases:
        for seed in range(30):
            d = sample_dirm_digraphon(h, seed)
            assert pred(core.sample_digraph(d, 25, seed).graph)
    dag = DirmHyperParams(beta=(0.5, 0, 0.5, 0), beta_diag=(1, 0, 0))
    for seed in range(30):
        s = core.sample_digraph(sample_dirm_digraphon(dag, seed), 25, seed)
        assert core.is_dag(s.graph)
        assert not np.tril(core.resort_by_latents(s)).any()


def test_prior_fig_regime_and_single_class():
    d = sample_dirm_digraphon(DirmHyperParams(alpha=3.0), 0)
    assert core.validate(d) == [] and d.k > 1
    one = sample_dirm_digraphon(DirmHyperParams(truncation=1), 5)
    assert one.k == 1 and one.weights[0, 0, 1] == one.weights[0, 0, 2]


def test_prior_deterministic():
    h = DirmHyperParams(alpha=2.0)
    a, b = sample_dirm_digraphon(h, 17), sample_dirm_digraphon(h, 17)
    assert np.array_equal(a.cuts, b.cuts) and np.array_equal(a.weights, b.weights)


def test_crp_small_cases():
    assert list(sample_crp(1, 1.0, 0).z) == [0]
    same = np.mean([sample_crp(2, 1.0, s).z[1] == 0 for s in range(4000)])
    assert abs(same - 0.5) <= 3 * np.sqrt(0.25 / 4000)


def test_crp_cluster_count():
    n, draws = 1000, 200
    counts = np.array([sample_crp(n, 1.0, s).k for s in range(draws)])
    p = 1.0 / np.arange(1, n + 1)
    mean, var = p.sum(), (p * (1 - p)).sum()
    assert mean == pytest.approx(7.485, abs=1e-3)
    assert abs(counts.mean() - mean) <= 3 * np.sqrt(var / draws)


def test_crp_labels_first_appearance():
    z = sample_crp(50, 2.0, 1).z
    assert np.array_equal(z, compact_labels(z))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=8), st.floats(0.1, 10))
def test_crp_log_prior_matches_sequential_seating(z, alpha):
    assert crp_log_prior(z, alpha) == pytest.approx(oracles.crp_log_eppf(z, alpha), abs=1e-10)


def test_crp_prior_normalizes():
    for n in range(1, 7):
        total = sum(math.exp(crp_log_prior(z, 1.7)) for z in oracles.set_partitions(n))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_stick_partition_matches_crp():
    n, draws = 4, 100_000
    h = DirmHyperParams(alpha=1.0, truncation=200)
    exact = oracles.crp_shape_probabilities(n, 1.0)
    F = Fraction
    assert exact == {(4,): F(6, 24), (3, 1): F(8, 24), (2, 2): F(3, 24), (2, 1, 1): F(6, 24),
                     (1, 1, 1, 1): F(1, 24)}
    rng = np.random.default_rng(2024)
    shapes = list(exact)
    seen = dict.fromkeys(shapes, 0)
    for _ in range(draws):
        cuts = np.cumsum(sample_stick_partition(h, rng))[:-1]
        cls = np.searchsorted(cuts, rng.random(n), side="right")
        shape = tuple(sorted(np.unique(cls, return_counts=True)[1], reverse=True))
        seen[shape] += 1
    observed = np.array([seen[s] for s in shapes])
    expected = np.array([float(exact[s]) for s in shapes]) * draws
    assert stats.chisquare(observed, expected).pvalue > 0.01


def test_cluster_assignment_compacts():
    c = ClusterAssignment([5, 5, 2, 9, 2])
    assert list(c.z) == [0, 0, 1, 2, 1] and list(c.sizes) == [2, 2, 1] and c.k == 3
    assert len(c) == 5 and np.array_equal(np.asarray(c), c.z)


def test_graph_given_clusters_examples():
    z = np.repeat([0, 1], 50)
    empty = BlockWeights(np.tile([1.0, 0, 0, 0], (2, 2, 1)))
    full = BlockWeights(np.tile([0, 0, 0, 1.0], (2, 2, 1)))
    assert not sample_graph_given_clusters(z, empty, 0).any()
    g = sample_graph_given_clusters(z, full, 0)
    assert g.sum() == 100 * 99 and not g.diagonal().any()
    half = core.half_digraphon()
    g = sample_graph_given_clusters(z, BlockWeights(half.weights), 3)
    within = np.equal.outer(z, z) & ~np.eye(100, dtype=bool)
    assert np.array_equal(g[within], g.T[within])
    cross = ~np.equal.outer(z, z)
    assert np.all(g[cross] ^ g.T[cross])


def test_graph_given_clusters_rejects_bad_labels():
    with pytest.raises(ValueError):
        sample_graph_given_clusters([0, 2], BlockWeights(np.tile([1.0, 0, 0, 0], (2, 2, 1))), 0)
