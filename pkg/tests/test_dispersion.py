import datetime as dt
import itertools
import math

import numpy as np
import pytest
from scipy.cluster.hierarchy import fcluster, linkage as scipy_linkage
from scipy.spatial.distance import squareform

import cryptodynamics as cd

import reference


def make_vol(sigmas, S=20):
    sigmas = np.asarray(sigmas, dtype=float)
    n, w = sigmas.shape
    dates = tuple(dt.date(2021, 3, 1) + dt.timedelta(days=k) for k in range(w))
    return cd.VolatilityPanel(dates, sigmas, S)


def test_distribution_normalizes_and_dates(small_vol):
    S = small_vol.window_days
    p = cd.volatility_distribution(small_vol, S)
    assert p.date == small_vol.dates[0]
    assert math.isclose(p.p.sum(), 1.0, abs_tol=1e-12)
    assert np.all(p.p >= 0.0)
    last = S + small_vol.n_dates - 1
    assert cd.volatility_distribution(small_vol, last).date == small_vol.dates[-1]
    with pytest.raises(cd.InputError):
        cd.volatility_distribution(small_vol, S - 1)


def test_all_zero_day_is_degenerate():
    vol = make_vol(np.array([[0.0, 1.0], [0.0, 2.0]]))
    with pytest.raises(cd.DegenerateDataError):
        cd.volatility_distribution(vol, 20)


def test_wasserstein_equals_brute_force_transport():
    rng = np.random.default_rng(0)
    for n in (2, 3, 4, 5, 6):
        for _ in range(20):
            p = rng.dirichlet(np.ones(n))
            q = rng.dirichlet(np.ones(n))
            got = cd.wasserstein(p, q)
            want = reference.wasserstein_by_matching(p, q)
            assert math.isclose(got, want, abs_tol=1e-12), (n, p, q)


def test_wasserstein_is_a_metric_on_sorted_vectors():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 9))
        p, q, r = rng.dirichlet(np.ones(n), size=3)
        dpq = cd.wasserstein(p, q)
        assert dpq >= 0.0
        assert math.isclose(dpq, cd.wasserstein(q, p), abs_tol=1e-15)
        assert dpq <= cd.wasserstein(p, r) + cd.wasserstein(r, q) + 1e-12
        shuffled = rng.permutation(q)
        assert math.isclose(dpq, cd.wasserstein(p, shuffled), abs_tol=1e-15)
    assert cd.wasserstein([0.25, 0.75], [0.75, 0.25]) == 0.0


def test_wasserstein_extreme_pair_attains_the_bound():
    for n in (2, 4, 7):
        one_hot = np.zeros(n)
        one_hot[-1] = 1.0
        uniform = np.full(n, 1.0 / n)
        want = (2.0 / n) * (1.0 - 1.0 / n)
        assert math.isclose(cd.wasserstein(one_hot, uniform), want, abs_tol=1e-15)


def test_variance_matches_loop_and_equality_cases():
    rng = np.random.default_rng(2)
    for _ in range(30):
        n = int(rng.integers(2, 10))
        p = rng.dirichlet(np.ones(n))
        assert math.isclose(cd.intra_volatility_variance(p),
                            reference.intra_variance(p), abs_tol=1e-15)
    assert cd.intra_volatility_variance(np.full(5, 0.2)) == 0.0
    one_hot = np.array([0.0, 0.0, 0.0, 1.0])
    assert math.isclose(cd.intra_volatility_variance(one_hot), 1.0 - 1.0 / 4,
                        abs_tol=1e-15)


def test_variance_never_exceeds_either_bound():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        p = rng.dirichlet(np.full(n, rng.uniform(0.05, 3.0)))
        v = cd.intra_volatility_variance(p)
        assert v <= 1.0 - 1.0 / n + 1e-12          # attainable maximum
        assert v <= 1.0 - 1.0 / n**2 + 1e-12       # published envelope


def test_dispersion_matrix_entries_are_pairwise_distances(small_vol):
    dm = cd.dispersion_matrix(small_vol)
    n_dates = len(dm.dates)
    assert dm.matrix.shape == (n_dates, n_dates)
    assert dm.excluded_dates == ()
    idx = [0, 7, n_dates - 1]
    S = small_vol.window_days
    for a in idx:
        for b in idx:
            pa = cd.volatility_distribution(small_vol, S + a)
            pb = cd.volatility_distribution(small_vol, S + b)
            assert math.isclose(dm.matrix[a, b], cd.wasserstein(pa, pb),
                                abs_tol=1e-12)


def test_dispersion_matrix_excludes_all_zero_days():
    sig = np.array([[0.1, 0.0, 0.3, 0.2],
                    [0.2, 0.0, 0.1, 0.2]])
    vol = make_vol(sig)
    dm = cd.dispersion_matrix(vol)
    assert len(dm.dates) == 3
    assert dm.excluded_dates == (vol.dates[1],)
    var = cd.variance_series(vol)
    assert var.excluded_dates == (vol.dates[1],)
    assert len(var.values) == 3


def test_variance_series_matches_pointwise(small_vol):
    series = cd.variance_series(small_vol)
    S = small_vol.window_days
    for k in (0, 13, len(series.values) - 1):
        p = cd.volatility_distribution(small_vol, S + k)
        assert math.isclose(series.values[k], cd.intra_volatility_variance(p),
                            abs_tol=1e-15)


def line_distance_matrix(rng, n):
    x = np.sort(rng.uniform(0.0, 1.0, n))
    D = np.abs(x[:, None] - x[None, :])
    return D


def test_clustering_matches_scipy_linkage():
    for method in ("single", "complete", "average"):
        for seed in range(10):
            r = np.random.default_rng(seed)
            pts = r.uniform(0.0, 1.0, (12, 3))
            D = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
            np.fill_diagonal(D, 0.0)
            dendro = cd.hierarchical_cluster(D, method)
            Z = scipy_linkage(squareform(D, checks=False), method=method)
            for step, merge in enumerate(dendro.merges):
                a, b = sorted(int(v) for v in Z[step, :2])
                assert {merge.cluster_a, merge.cluster_b} == {a, b}, (method, seed, step)
                assert math.isclose(merge.height, float(Z[step, 2]), abs_tol=1e-12)
                assert merge.size == int(Z[step, 3])


def test_clustering_matches_naive_recompute():
    rng = np.random.default_rng(5)
    for method in ("single", "complete", "average"):
        for _ in range(5):
            D = line_distance_matrix(rng, 9)
            dendro = cd.hierarchical_cluster(D, method)
            want = reference.agglomerate(D, method)
            got = [(m.cluster_a, m.cluster_b, m.height, m.size)
                   for m in dendro.merges]
            for (ga, gb, gh, gs), (wa, wb, wh, ws) in zip(got, want):
                assert {ga, gb} == {wa, wb}
                assert math.isclose(gh, wh, abs_tol=1e-12)
                assert gs == ws


def test_clustering_tie_break_is_lowest_pair_first():
    D = np.ones((4, 4)) - np.eye(4)  # all pairwise distances equal
    dendro = cd.hierarchical_cluster(D, "single")
    got = [(m.cluster_a, m.cluster_b, m.height, m.size) for m in dendro.merges]
    assert got == [(0, 1, 1.0, 2), (2, 4, 1.0, 3), (3, 5, 1.0, 4)]


def test_merge_heights_are_monotone():
    rng = np.random.default_rng(6)
    for method in ("single", "complete", "average"):
        D = line_distance_matrix(rng, 15)
        dendro = cd.hierarchical_cluster(D, method)
        heights = [m.height for m in dendro.merges]
        assert all(b >= a - 1e-12 for a, b in zip(heights, heights[1:]))


def test_unknown_linkage_rejected():
    with pytest.raises(cd.InputError):
        cd.hierarchical_cluster(np.zeros((3, 3)), "ward")


def test_cut_clusters_extremes_and_determinism():
    rng = np.random.default_rng(7)
    D = line_distance_matrix(rng, 8)
    dendro = cd.hierarchical_cluster(D, "average")
    np.testing.assert_array_equal(cd.cut_clusters(dendro, 1), np.zeros(8, int))
    np.testing.assert_array_equal(cd.cut_clusters(dendro, 8), np.arange(8))
    labels = cd.cut_clusters(dendro, 3)
    assert labels[0] == 0  # cluster containing leaf 0 is always label 0
    assert set(labels) == {0, 1, 2}
    with pytest.raises(cd.InputError):
        cd.cut_clusters(dendro, 0)
    with pytest.raises(cd.InputError):
        cd.cut_clusters(dendro, 9)


def test_cut_matches_scipy_fcluster_partition():
    for seed in range(6):
        rng = np.random.default_rng(seed + 100)
        pts = rng.uniform(0.0, 1.0, (14, 2))
        D = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
        np.fill_diagonal(D, 0.0)
        dendro = cd.hierarchical_cluster(D, "average")
        Z = scipy_linkage(squareform(D, checks=False), method="average")
        for k in (2, 3, 5):
            ours = cd.cut_clusters(dendro, k)
            theirs = fcluster(Z, t=k, criterion="maxclust")
            pairs_ours = {(i, j) for i, j in itertools.combinations(range(14), 2)
                          if ours[i] == ours[j]}
            pairs_theirs = {(i, j) for i, j in itertools.combinations(range(14), 2)
                            if theirs[i] == theirs[j]}
            assert pairs_ours == pairs_theirs, (seed, k)


def test_two_cluster_cut_separates_planted_regimes():
    rng = np.random.default_rng(8)
    left = rng.uniform(0.0, 0.05, 25)
    right = rng.uniform(0.9, 1.0, 10)
    x = np.concatenate([left, right])
    D = np.abs(x[:, None] - x[None, :])
    dendro = cd.hierarchical_cluster(D, "average")
    labels = cd.two_cluster_cut(dendro)
    np.testing.assert_array_equal(labels, cd.cut_clusters(dendro, 2))
    assert set(labels[:25]) == {0}
    assert set(labels[25:]) == {1}


def test_dendrogram_tree_shape():
    D = np.array([[0.0, 1.0, 4.0],
                  [1.0, 0.0, 3.0],
                  [4.0, 3.0, 0.0]])
    dendro = cd.hierarchical_cluster(D, "single")
    dates = (dt.date(2020, 1, 1), dt.date(2020, 1, 2), dt.date(2020, 1, 3))
    from cryptodynamics.dispersion import dendrogram_to_tree
    tree = dendrogram_to_tree(dendro, dates)
    assert tree["size"] == 3
    leaves = []

    def walk(node):
        if "leaf" in node:
            leaves.append(node["leaf"])
        else:
            for child in node["children"]:
                walk(child)

    walk(tree)
    assert sorted(leaves) == [0, 1, 2]
    assert tree["height"] == 3.0  # single linkage: min(4, 3)


def test_dispersion_matrix_validation():
    dates = (dt.date(2020, 1, 1), dt.date(2020, 1, 2))
    bad_diag = np.array([[0.1, 0.0], [0.0, 0.0]])
    with pytest.raises(cd.InputError):
        cd.DispersionMatrix(dates, bad_diag, 4, ())
    asym = np.array([[0.0, 0.2], [0.1, 0.0]])
    with pytest.raises(cd.InputError):
        cd.DispersionMatrix(dates, asym, 4, ())
