"""Log returns, windowed correlation matrices, and the rolling L1-norm series.

The central object is the Pearson correlation matrix of N assets over a
trailing window of S return days, standardized with the *population*
standard deviation (divisor S) so that the matrix form (1/S)·Z Zᵀ of the
standardized returns agrees with the entrywise Pearson formula exactly.

Day indices follow the return-series convention used throughout: return
day ``t`` runs 1..T, where return t is ln(close(t)/close(t−1)).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.polynomial import polynomial as npoly
from scipy.stats import gaussian_kde

from .errors import ConfigError, DegenerateDataError, InputError
from .panel import PeriodPartition, PricePanel

DEFAULT_WINDOW_DAYS = 90
DEFAULT_SG_WINDOW = 31
DEFAULT_SG_DEGREE = 3


@dataclass(frozen=True)
class ReturnsPanel:
    """N×T matrix of daily log returns, dated t = 1..T."""

    dates: tuple
    assets: tuple
    returns: np.ndarray

    def __post_init__(self):
        dates = tuple(self.dates)
        assets = tuple(self.assets)
        matrix = np.ascontiguousarray(self.returns, dtype=float)
        if matrix.shape != (len(assets), len(dates)):
            raise InputError(
                f"returns shape {matrix.shape} does not match "
                f"{len(assets)} assets x {len(dates)} dates"
            )
        if not np.all(np.isfinite(matrix)):
            raise InputError("returns must be finite")
        matrix.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "assets", assets)
        object.__setattr__(self, "returns", matrix)

    @property
    def n_assets(self):
        return len(self.assets)

    @property
    def n_days(self):
        return len(self.dates)


@dataclass(frozen=True)
class CorrelationMatrix:
    """Correlation matrix over return days [a, b] (1-based, inclusive)."""

    window: tuple
    matrix: np.ndarray

    def __post_init__(self):
        a, b = self.window
        if b < a:
            raise InputError(f"bad window [{a}:{b}]")
        m = np.ascontiguousarray(self.matrix, dtype=float)
        n = m.shape[0]
        if m.shape != (n, n):
            raise InputError(f"correlation matrix must be square, got {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
            raise InputError("correlation matrix must be symmetric")
        if np.any(np.abs(m) > 1.0 + 1e-12):
            raise InputError("correlation entries must lie in [-1, 1]")
        m.flags.writeable = False
        object.__setattr__(self, "window", (int(a), int(b)))
        object.__setattr__(self, "matrix", m)

    @property
    def n_assets(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class NormSeries:
    """Normalized L1-norm of the rolling correlation matrix, per window end date."""

    dates: tuple
    raw: np.ndarray
    smoothed: np.ndarray | None = None

    def __post_init__(self):
        dates = tuple(self.dates)
        raw = np.ascontiguousarray(self.raw, dtype=float)
        if raw.shape != (len(dates),):
            raise InputError("raw series length must match dates")
        if np.any(raw < -1e-9) or np.any(raw > 1.0 + 1e-9):
            raise InputError("raw norm values must lie in [0, 1]")
        smoothed = self.smoothed
        if smoothed is not None:
            smoothed = np.ascontiguousarray(smoothed, dtype=float)
            if smoothed.shape != raw.shape:
                raise InputError("smoothed series length must match raw")
            smoothed.flags.writeable = False
        raw.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "smoothed", smoothed)

    def with_smoothed(self, sg_window=DEFAULT_SG_WINDOW, sg_degree=DEFAULT_SG_DEGREE):
        return NormSeries(self.dates, self.raw,
                          smooth_series(self.raw, sg_window, sg_degree))


@dataclass(frozen=True)
class PeriodEntryStats:
    """Mean/std of correlation entries over one named period, with a KDE curve.

    ``density_x``/``density_y`` are empty when the entries are all identical
    (zero variance), in which case no kernel-density estimate exists.
    """

    label: str
    start: dt.date
    end: dt.date
    n_days: int
    mean: float
    std: float
    density_x: np.ndarray
    density_y: np.ndarray


def log_returns(panel: PricePanel) -> ReturnsPanel:
    """Daily log returns ln(c(t)/c(t−1)) for every asset; dates shift to t=1..T."""
    if panel.n_days < 2:
        raise InputError("need at least two days of prices to form returns")
    matrix = np.diff(np.log(panel.closes), axis=1)
    return ReturnsPanel(panel.dates[1:], panel.assets, matrix)


def correlation_matrix(returns: ReturnsPanel, a: int, b: int) -> CorrelationMatrix:
    """Pearson correlation of all asset pairs over return days [a, b].

    Standardization uses the population standard deviation (divisor
    S = b−a+1), so the result is identical to (1/S)·Z Zᵀ for the
    standardized return matrix Z.

    Raises DegenerateDataError if any asset is constant on the window.
    """
    T = returns.n_days
    a, b = int(a), int(b)
    if not 1 <= a <= b <= T:
        raise InputError(f"window [{a}:{b}] out of range 1..{T}")
    S = b - a + 1
    if S < 2:
        raise InputError("correlation window must span at least 2 days")
    X = returns.returns[:, a - 1:b]
    centered = X - X.mean(axis=1, keepdims=True)
    var = np.einsum("it,it->i", centered, centered) / S
    dead = np.flatnonzero(var <= 0.0)
    if dead.size:
        ticker = returns.assets[dead[0]].ticker
        raise DegenerateDataError(
            f"asset {ticker!r} has zero variance on return days [{a}:{b}]"
        )
    Z = centered / np.sqrt(var)[:, None]
    m = (Z @ Z.T) / S
    m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 1.0)
    return CorrelationMatrix((a, b), m)


def l1_norm(matrix) -> float:
    """Normalized L1 norm (1/N²)·Σ|entries|, diagonal included."""
    m = matrix.matrix if isinstance(matrix, CorrelationMatrix) else np.asarray(matrix, float)
    n = m.shape[0]
    return float(np.abs(m).sum() / (n * n))


def _standardized_windows(returns, window_days):
    """Per-window standardized returns: (window dates, Z of shape (W, N, S))."""
    S = int(window_days)
    if S < 2:
        raise ConfigError(f"rolling window must be >= 2 days, got {S}")
    T = returns.n_days
    if T < S:
        raise InputError(f"need at least {S} return days, have {T}")
    windows = sliding_window_view(returns.returns, S, axis=1)  # (N, W, S)
    mu = windows.mean(axis=2)
    centered = windows - mu[:, :, None]
    var = np.einsum("nws,nws->nw", centered, centered) / S
    dead = np.argwhere(var <= 0.0)
    if dead.size:
        i, w = dead[0]
        t = int(w) + S
        raise DegenerateDataError(
            f"asset {returns.assets[i].ticker!r} has zero variance on return days "
            f"[{t - S + 1}:{t}] (window ending {returns.dates[t - 1]})"
        )
    Z = centered / np.sqrt(var)[:, :, None]
    dates = returns.dates[S - 1:]
    return dates, np.ascontiguousarray(Z.transpose(1, 0, 2))


def rolling_correlation_matrices(returns: ReturnsPanel,
                                 window_days=DEFAULT_WINDOW_DAYS):
    """All trailing-window correlation matrices as a (W, N, N) stack.

    Window w (0-based) covers return days [w+1, w+S] and is dated by its
    last day; equivalent to correlation_matrix(returns, t−S+1, t) for
    t = S..T.
    """
    dates, Z = _standardized_windows(returns, window_days)
    S = Z.shape[2]
    stack = Z @ Z.transpose(0, 2, 1) / S
    stack = 0.5 * (stack + stack.transpose(0, 2, 1))
    idx = np.arange(stack.shape[1])
    stack[:, idx, idx] = 1.0
    return dates, stack


def rolling_norm_series(returns: ReturnsPanel,
                        window_days=DEFAULT_WINDOW_DAYS) -> NormSeries:
    """ν(t) = normalized L1 norm of the trailing S-day correlation matrix, t = S..T."""
    dates, stack = rolling_correlation_matrices(returns, window_days)
    n = returns.n_assets
    raw = np.abs(stack).sum(axis=(1, 2)) / (n * n)
    return NormSeries(dates, raw)


def smooth_series(raw, sg_window=DEFAULT_SG_WINDOW, sg_degree=DEFAULT_SG_DEGREE):
    """Savitzky-Golay smoothing by explicit per-point least-squares polynomial fits.

    Each output value is the degree-``sg_degree`` polynomial least-squares
    fit over the window of ``sg_window`` points centered on that index,
    evaluated at the index itself. Edge windows are truncated rather than
    padded, so the output has the input's length and no boundary artifacts
    from invented data.

    Parameters
    ----------
    raw : array_like
        Input series.
    sg_window : int
        Odd window width, at most the series length.
    sg_degree : int
        Polynomial degree, strictly less than ``sg_window``.
    """
    y = np.asarray(raw, dtype=float)
    w, d = int(sg_window), int(sg_degree)
    if w < 1 or w % 2 == 0:
        raise ConfigError(f"sg_window must be a positive odd integer, got {sg_window}")
    if d < 0 or d >= w:
        raise ConfigError(f"sg_degree must satisfy 0 <= degree < window, got {sg_degree}")
    n = y.size
    if n < w:
        raise ConfigError(f"series length {n} shorter than sg_window {w}")
    half = w // 2
    out = np.empty(n)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n - 1, i + half)
        x = np.arange(lo, hi + 1, dtype=float) - i  # centered for conditioning
        deg = min(d, hi - lo)
        coeffs = npoly.polyfit(x, y[lo:hi + 1], deg)
        out[i] = coeffs[0]  # value of the fit at x = 0
    return out


def _entry_pool(matrix, exclude_diagonal):
    m = matrix.matrix if isinstance(matrix, CorrelationMatrix) else np.asarray(matrix)
    if not exclude_diagonal:
        return m.ravel()
    n = m.shape[0]
    return m[~np.eye(n, dtype=bool)]


def period_entry_stats(returns: ReturnsPanel, periods: PeriodPartition,
                       exclude_diagonal=False, density_points=256):
    """Per-period correlation-entry statistics and kernel-density curves.

    For each period, one correlation matrix is built over every return day
    falling inside the period (periods are intersected with the return
    series' date range, which starts one day after the price panel).
    Reported are the signed mean and population standard deviation of all
    N² entries (or the N²−N off-diagonal entries when
    ``exclude_diagonal``), plus a Gaussian kernel-density estimate of the
    same pool (Silverman bandwidth).
    """
    first, last = returns.dates[0], returns.dates[-1]
    results = []
    for period in periods:
        lo = max(period.start, first)
        hi = min(period.end, last)
        n_days = (hi - lo).days + 1
        if n_days < 2:
            raise InputError(
                f"period {period.label!r} covers fewer than 2 return days "
                f"of {first}..{last}"
            )
        a = (lo - first).days + 1
        b = (hi - first).days + 1
        m = correlation_matrix(returns, a, b)
        pool = _entry_pool(m, exclude_diagonal)
        if pool.size == 0:
            raise InputError(
                "cannot pool off-diagonal entries of a single-asset panel"
            )
        mean = float(pool.mean())
        std = float(pool.std())
        if std > 0.0:
            kde = gaussian_kde(pool, bw_method="silverman")
            bw = float(kde.factor) * float(pool.std(ddof=1))
            grid = np.linspace(pool.min() - 3.0 * bw, pool.max() + 3.0 * bw,
                               int(density_points))
            density = kde(grid)
        else:
            grid = np.empty(0)
            density = np.empty(0)
        results.append(PeriodEntryStats(period.label, lo, hi, n_days,
                                        mean, std, grid, density))
    return results
