import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bigmeans.core import Centroids, EvalCounter, objective
from bigmeans.exceptions import ConfigurationError
from bigmeans.init import InitConfig
from bigmeans.local_search import SearchConfig, kmeans, lloyd
from bigmeans.oracle import exact_mssc
from conftest import two_blobs

SQUARE = np.array([[0.0, 0.0], [0.0, 2.0], [10.0, 0.0], [10.0, 2.0]])


def test_search_config_validation():
    with pytest.raises(ConfigurationError):
        SearchConfig(max_iterations=0)
    with pytest.raises(ConfigurationError):
        SearchConfig(rel_tolerance=-1.0)


def test_hand_computed_fixed_point():
    out = lloyd(SQUARE, Centroids.from_array([[0.0, 0.0], [10.0, 0.0]]))
    np.testing.assert_array_equal(out.centroids.centers, [[0.0, 1.0], [10.0, 1.0]])
    assert out.objective == 4.0


def test_start_at_fixed_point():
    start = Centroids.from_array([[0.0, 1.0], [10.0, 1.0]])
    out = lloyd(SQUARE, start)
    assert out.iterations <= 2
    assert out.objective == objective(SQUARE, start)


def test_never_beats_exhaustive_optimum():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(8, 2))
    opt = exact_mssc(X, 2).objective
    for _ in range(50):
        start = Centroids.from_array(rng.normal(scale=2.0, size=(2, 2)))
        assert lloyd(X, start).objective >= opt * (1 - 1e-12)


def test_empty_cluster_stays_degenerate():
    X = np.array([[0.0], [1.0], [2.0]])
    start = Centroids.from_array([[1.0], [100.0]])
    out = lloyd(X, start)
    assert out.centroids.degenerate.tolist() == [False, True]
    assert set(out.labels.tolist()) == {0}


def test_iteration_cap():
    X = np.random.default_rng(0).normal(size=(500, 2))
    out = lloyd(X, Centroids.from_array(X[:10]), SearchConfig(max_iterations=3, rel_tolerance=0.0))
    assert out.iterations <= 3


def test_distance_evals_per_iteration():
    X = np.random.default_rng(1).normal(size=(300, 2))
    c = EvalCounter()
    out = lloyd(X, Centroids.from_array(X[:4]), SearchConfig(max_iterations=1, rel_tolerance=0.0), c)
    assert out.iterations == 1
    # start assignment plus one iteration
    assert c.distance_evals == 2 * 300 * 4


def test_idempotent_at_fixed_point():
    X = two_blobs(50, seed=4)
    cfg = SearchConfig()
    first = lloyd(X, Centroids.from_array(X[[0, 60]]), cfg)
    again = lloyd(X, first.centroids, cfg)
    assert (first.objective - again.objective) / first.objective < cfg.rel_tolerance


class TestKmeans:
    def test_k1_mean_one_iteration(self):
        X = np.random.default_rng(3).normal(size=(40, 3))
        out = kmeans(X, 1)
        np.testing.assert_allclose(out.centroids.centers[0], X.mean(axis=0), rtol=0, atol=1e-14)
        assert out.iterations == 1

    def test_k_equals_m(self):
        X = np.random.default_rng(4).normal(size=(6, 2))
        assert kmeans(X, 6).objective == 0.0

    def test_k_greater_than_m(self):
        with pytest.raises(ConfigurationError):
            kmeans(np.zeros((3, 2)), 4)

    def test_reaches_optimum_on_two_blobs(self):
        X = two_blobs(10, seed=5, gap=8.0)
        opt = exact_mssc(X, 2).objective
        hits = sum(kmeans(X, 2, InitConfig(seed=s)).objective <= opt * (1 + 1e-9) for s in range(100))
        assert hits >= 90

    def test_counter_split(self):
        X = np.random.default_rng(6).normal(size=(200, 2))
        c = EvalCounter()
        out = kmeans(X, 3, counter=c)
        assert out.counter is c
        assert c.cpu == c.cpu_init + c.cpu_full
        assert c.cpu_init >= 0 and c.cpu_full >= 0
        assert c.iterations == out.iterations

    @pytest.mark.parametrize("method", ["forgy", "kmeans_pp", "kmeans_parallel"])
    def test_seeded_runs_repeat(self, method):
        X = np.random.default_rng(7).normal(size=(300, 2))
        a = kmeans(X, 5, InitConfig(method, seed=11))
        b = kmeans(X, 5, InitConfig(method, seed=11))
        assert a.objective == b.objective
        np.testing.assert_array_equal(a.labels, b.labels)


@settings(max_examples=50, deadline=None)
@given(st.integers(5, 60), st.integers(1, 6), st.integers(0, 2**31 - 1), st.sampled_from(["forgy", "kmeans_pp"]))
def test_objective_never_increases(m, k, seed, method):
    X = np.random.default_rng(seed).normal(size=(m, 2))
    k = min(k, m)
    out = kmeans(X, k, InitConfig(method, seed=seed), SearchConfig(rel_tolerance=0.0))
    h = out.history
    assert all(b <= a * (1 + 1e-12) for a, b in zip(h, h[1:]))
    assert out.iterations <= 300
    assert out.objective == h[-1]
