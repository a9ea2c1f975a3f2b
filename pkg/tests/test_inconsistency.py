import datetime as dt
import math

import numpy as np
import pytest

import cryptodynamics as cd

import reference
from test_correlation import make_returns


def test_rolling_volatility_matches_two_pass_loop():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((4, 50)) * 0.02
    vol = cd.rolling_volatility(make_returns(X), 10)
    np.testing.assert_allclose(vol.sigmas, reference.rolling_std(X, 10),
                               rtol=0.0, atol=1e-14)
    assert vol.window_days == 10
    assert vol.n_dates == 41
    assert vol.dates[0] == make_returns(X).dates[9]


def test_rolling_volatility_window_validation():
    X = np.zeros((2, 10))
    with pytest.raises(cd.InputError):
        cd.rolling_volatility(make_returns(X), 1)
    with pytest.raises(cd.InputError):
        cd.rolling_volatility(make_returns(X), 11)


def test_distance_matrices_match_loop_oracle(small_panel, small_returns, small_vol):
    S = 30
    T = small_returns.n_days
    for t in (S, 100, T):
        dm, dr, ds = cd.distance_matrices(small_panel, small_returns,
                                          small_vol, t, S)
        n = small_panel.n_assets
        caps = small_panel.market_caps
        closes = small_panel.closes
        cap_mean = [caps[i, t - S + 1:t + 1].mean() for i in range(n)]
        rets = np.diff(np.log(closes), axis=1)
        ret_sum = [rets[i, t - S:t].sum() for i in range(n)]
        sig = [rets[i, t - S:t].std() for i in range(n)]
        for i in range(n):
            for j in range(n):
                assert math.isclose(dm[i, j], abs(cap_mean[i] - cap_mean[j]),
                                    rel_tol=1e-12, abs_tol=1e-12)
                assert math.isclose(dr[i, j], abs(ret_sum[i] - ret_sum[j]),
                                    rel_tol=1e-12, abs_tol=1e-12)
                assert math.isclose(ds[i, j], abs(sig[i] - sig[j]),
                                    rel_tol=1e-9, abs_tol=1e-14)


def test_distance_matrices_reject_bad_t(small_panel, small_returns, small_vol):
    with pytest.raises(cd.InputError):
        cd.distance_matrices(small_panel, small_returns, small_vol, 29, 30)
    with pytest.raises(cd.InputError):
        cd.distance_matrices(small_panel, small_returns, small_vol,
                             small_returns.n_days + 1, 30)


def test_to_affinity_normalizes_to_unit_diagonal():
    D = np.array([[0.0, 2.0, 4.0],
                  [2.0, 0.0, 1.0],
                  [4.0, 1.0, 0.0]])
    A = cd.to_affinity(D)
    np.testing.assert_allclose(A.matrix, 1.0 - D / 4.0, atol=1e-15)
    assert np.all(np.diag(A.matrix) == 1.0)


def test_to_affinity_all_zero_distances_give_all_ones():
    A = cd.to_affinity(np.zeros((4, 4)))
    np.testing.assert_array_equal(A.matrix, np.ones((4, 4)))


def test_to_affinity_validation():
    with pytest.raises(cd.InputError):
        cd.to_affinity(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(cd.InputError):
        cd.to_affinity(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(cd.InputError):
        cd.to_affinity(np.zeros((2, 3)))


def test_inconsistency_matches_loop_oracle(small_panel, small_returns, small_vol):
    S = 30
    inc = cd.inconsistency_norms(small_panel, small_returns, small_vol, S)
    assert inc.dates == small_vol.dates
    for t in (S, 77, 150, small_returns.n_days):
        want_mr, want_ms = reference.inconsistency_at(
            small_panel.closes, small_panel.market_caps, t, S)
        assert math.isclose(inc.nu_MR[t - S], want_mr, abs_tol=1e-10)
        assert math.isclose(inc.nu_MSigma[t - S], want_ms, abs_tol=1e-10)


def test_inconsistency_values_are_bounded(small_panel, small_returns, small_vol):
    inc = cd.inconsistency_norms(small_panel, small_returns, small_vol, 30)
    for series in (inc.nu_MR, inc.nu_MSigma):
        assert np.all(series >= 0.0)
        assert np.all(series <= 1.0)


def test_identical_assets_give_exactly_zero_norms():
    # five clones of one price path: every pairwise distance is exactly 0,
    # every affinity matrix is all ones, both norms vanish identically
    rng = np.random.default_rng(5)
    n_days = 60
    dates = tuple(dt.date(2021, 1, 1) + dt.timedelta(days=k) for k in range(n_days))
    path = 100.0 * np.exp(np.cumsum(rng.standard_normal(n_days) * 0.01))
    closes = np.tile(path, (5, 1))
    caps = np.tile(path * 7.0, (5, 1))
    assets = tuple(cd.AssetMeta(f"A{i}", f"asset {i}") for i in range(5))
    panel = cd.PricePanel(dates, assets, closes, caps)
    r = cd.log_returns(panel)
    vol = cd.rolling_volatility(r, 20)
    inc = cd.inconsistency_norms(panel, r, vol, 20)
    assert np.all(inc.nu_MR == 0.0)
    assert np.all(inc.nu_MSigma == 0.0)


def test_window_alignment_is_enforced(small_panel, small_returns, small_vol):
    with pytest.raises(cd.InputError):
        cd.inconsistency_norms(small_panel, small_returns, small_vol, 40)
    wrong_vol = cd.rolling_volatility(small_returns, 40)
    with pytest.raises(cd.InputError):
        cd.inconsistency_norms(small_panel, small_returns, wrong_vol, 30)


def test_returns_must_derive_from_panel(small_panel, small_vol):
    rng = np.random.default_rng(8)
    other = make_returns(rng.standard_normal((6, 213)))
    with pytest.raises(cd.InputError):
        cd.inconsistency_norms(small_panel, other, small_vol, 30)


def test_affinity_matrix_validation_catches_out_of_range():
    with pytest.raises(cd.InputError):
        cd.AffinityMatrix(np.array([[1.0, 1.5], [1.5, 1.0]]))
    with pytest.raises(cd.InputError):
        cd.AffinityMatrix(np.array([[0.9, 0.5], [0.5, 1.0]]))
