import numpy as np
import pytest
from scipy import stats

from kinex.core import (
    ConservationError,
    Economy,
    ModelParams,
    RandomSource,
    SimConfig,
    derive_seed,
    init_economy,
    pick_pair,
)


@pytest.mark.parametrize(
    "n, endowment, total",
    [(100, 1.0, 100.0), (2, 1.0, 2.0), (3, 2.0, 6.0)],
)
def test_init_economy(n, endowment, total):
    eco = init_economy(n, endowment)
    assert eco.n_agents == n
    assert np.all(eco.holdings == endowment)
    assert eco.total == total
    assert eco.mean == endowment


@pytest.mark.parametrize("n, endowment", [(1, 1.0), (0, 1.0), (5, 0.0), (5, -1.0)])
def test_init_economy_rejects(n, endowment):
    with pytest.raises(ValueError):
        init_economy(n, endowment)


def test_economy_invariants():
    with pytest.raises(ValueError):
        Economy(np.array([1.0, -0.5]), 0.5)
    with pytest.raises(ValueError):
        Economy(np.array([1.0]), 1.0)
    eco = init_economy(4)
    eco.holdings[0] += 1e-6
    with pytest.raises(ConservationError):
        eco.check_conservation()


@pytest.mark.parametrize("lam, alpha", [(1.0, 0.5), (-0.1, 0.5), (0.5, 1.1), (0.5, -0.01)])
def test_model_params_domain(lam, alpha):
    with pytest.raises(ValueError):
        ModelParams(lam, alpha)


def test_model_params_accepts_edges():
    ModelParams(0.0, 0.0)
    ModelParams(0.999, 1.0)


def test_pick_pair_two_agents():
    rng = RandomSource(5)
    for _ in range(200):
        assert set(pick_pair(rng, 2)) == {0, 1}


def test_pick_pair_distinct_and_deterministic():
    a, b = RandomSource(11), RandomSource(11)
    seq_a = [pick_pair(a, 7) for _ in range(500)]
    seq_b = [pick_pair(b, 7) for _ in range(500)]
    assert seq_a == seq_b
    assert all(i != j for i, j in seq_a)


def test_pair_index_frequency():
    # each draw involves two of the 100 agents, so every index has frequency 2/N = 0.02
    i, j = RandomSource(2024).pairs(100, 1_000_000)
    counts = np.bincount(np.concatenate((i, j)), minlength=100) / 1_000_000
    assert np.all(np.abs(counts - 0.02) < 0.002)


def test_unordered_pairs_uniform():
    n = 6
    i, j = RandomSource(3).pairs(n, 300_000)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    assert np.all(lo != hi)
    observed = np.bincount(lo * n + hi, minlength=n * n)
    observed = observed[[a * n + b for a in range(n) for b in range(a + 1, n)]]
    assert stats.chisquare(observed).pvalue > 0.01


def test_random_source_reproducible():
    a = RandomSource(123).uniform(1000)
    b = RandomSource(123).uniform(1000)
    c = RandomSource(124).uniform(1000)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert RandomSource(123).child(4).seed == derive_seed(123, 4)


def test_derive_seed_distinct():
    seeds = {derive_seed(7, k) for k in range(1000)}
    assert len(seeds) == 1000
    assert derive_seed(7, 3) == derive_seed(7, 3)
    assert derive_seed(7, 3) != derive_seed(8, 3)


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(n_agents=1)
    with pytest.raises(ValueError):
        SimConfig(sample_interval=0)
    with pytest.raises(ValueError):
        SimConfig(thermalization_steps=-1)
    with pytest.raises(ValueError):
        SimConfig(seed=-1)
