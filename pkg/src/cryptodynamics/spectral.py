"""Market-mode tracking: first eigenvalue of rolling correlation matrices.

The normalized first eigenvalue λ̃₁(t) = λ₁(t)/N of the trailing-window
correlation matrix measures how much of the panel's variance sits on one
collective axis. Since a correlation matrix has trace N, λ̃₁ lies in
[1/N, 1], and because the matrix is symmetric PSD it also equals
‖Ψ‖_op/N — an identity this module re-verifies with an independent power
iteration rather than trusting one eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .correlation import (
    DEFAULT_WINDOW_DAYS,
    CorrelationMatrix,
    ReturnsPanel,
    rolling_correlation_matrices,
)
from .errors import DegenerateDataError, InputError, NumericalError
from .panel import PricePanel

_NEGATIVE_EIGENVALUE_TOL = 1e-10
_IDENTITY_TOL = 1e-8


@dataclass(frozen=True)
class SpectralSeries:
    """λ̃₁ per window end date, optionally with the full spectra."""

    dates: tuple
    lambda1: np.ndarray
    n_assets: int
    full_spectrum_available: bool = False
    spectra: np.ndarray | None = None

    def __post_init__(self):
        dates = tuple(self.dates)
        lam = np.ascontiguousarray(self.lambda1, dtype=float)
        n = int(self.n_assets)
        if lam.shape != (len(dates),):
            raise InputError("lambda1 length must match dates")
        if n < 1:
            raise InputError("n_assets must be >= 1")
        if np.any(lam < 1.0 / n - 1e-9) or np.any(lam > 1.0 + 1e-9):
            raise InputError(f"lambda1 values must lie in [1/{n}, 1]")
        spectra = self.spectra
        if self.full_spectrum_available:
            spectra = np.ascontiguousarray(spectra, dtype=float)
            if spectra.shape != (len(dates), n):
                raise InputError("spectra shape must be (len(dates), n_assets)")
            if np.any(spectra < 0.0):
                raise InputError("stored spectra must be non-negative")
            if np.any(np.diff(spectra, axis=1) > 0.0):
                raise InputError("stored spectra must be non-increasing")
            if np.any(np.abs(spectra.sum(axis=1) - n) > 1e-8):
                raise InputError("stored spectra must sum to n_assets")
            spectra.flags.writeable = False
        elif spectra is not None:
            raise InputError("spectra given but full_spectrum_available is false")
        lam.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "lambda1", lam)
        object.__setattr__(self, "n_assets", n)
        object.__setattr__(self, "spectra", spectra)


@dataclass(frozen=True)
class MarketSizeSeries:
    """Trailing-window average of the cross-asset market-cap total."""

    dates: tuple
    values: np.ndarray

    def __post_init__(self):
        dates = tuple(self.dates)
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.shape != (len(dates),):
            raise InputError("values length must match dates")
        if np.any(values < 0.0) or not np.all(np.isfinite(values)):
            raise InputError("market sizes must be finite and non-negative")
        values.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)


def _clean_spectrum(values):
    """Descending, negatives-clamped eigenvalues; large negatives are an error."""
    spectrum = np.sort(np.asarray(values, dtype=float))[::-1]
    if spectrum[-1] < -_NEGATIVE_EIGENVALUE_TOL:
        raise NumericalError(
            f"eigenvalue {spectrum[-1]} below -{_NEGATIVE_EIGENVALUE_TOL}; "
            "matrix is not positive semi-definite"
        )
    return np.clip(spectrum, 0.0, None)


def eigen_spectrum(m: CorrelationMatrix) -> np.ndarray:
    """Eigenvalues of a correlation matrix, sorted non-increasing.

    Tiny negative values (floating-point noise on a PSD matrix) are
    clamped to zero; anything below -1e-10 raises NumericalError.
    """
    matrix = m.matrix if isinstance(m, CorrelationMatrix) else np.asarray(m, float)
    try:
        values = np.linalg.eigvalsh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from None
    return _clean_spectrum(values)


def lambda1_series(returns: ReturnsPanel, window_days=DEFAULT_WINDOW_DAYS,
                   keep_spectra=False) -> SpectralSeries:
    """λ̃₁(t) = λ₁/N of the trailing S-day correlation matrix, t = S..T."""
    dates, stack = rolling_correlation_matrices(returns, window_days)
    n = returns.n_assets
    try:
        values = np.linalg.eigvalsh(stack)  # ascending, per window
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from None
    if values.min() < -_NEGATIVE_EIGENVALUE_TOL:
        w = int(np.argwhere(values < -_NEGATIVE_EIGENVALUE_TOL)[0][0])
        raise NumericalError(
            f"window ending {dates[w]} has eigenvalue {values[w].min()} < "
            f"-{_NEGATIVE_EIGENVALUE_TOL}"
        )
    values = np.clip(values, 0.0, None)
    lam1 = values[:, -1] / n
    spectra = values[:, ::-1] if keep_spectra else None
    return SpectralSeries(dates, lam1, n, keep_spectra, spectra)


def operator_norm_power_iteration(matrix, max_iter=100_000, tol=1e-12):
    """Largest eigenvalue of a symmetric PSD matrix by plain power iteration.

    Deliberately independent of the LAPACK eigensolver so the two routes
    can be checked against each other. Deterministic start vector;
    converges on the Rayleigh quotient with a residual-norm criterion.
    """
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    v = 1.0 + np.arange(n) / (7.0 + n)  # fixed, generic start
    v /= np.linalg.norm(v)
    rayleigh = 0.0
    for _ in range(max_iter):
        w = m @ v
        rayleigh = float(v @ w)
        residual = np.linalg.norm(w - rayleigh * v)
        if residual <= tol * max(1.0, abs(rayleigh)):
            return rayleigh
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0  # matrix annihilates the iterate: norm 0 on this cycle
        v = w / norm
    raise NumericalError(
        f"power iteration did not converge within {max_iter} iterations"
    )


def verify_operator_norm_identity(m: CorrelationMatrix):
    """Check λ̃₁ == ‖Ψ‖_op/N via two independent routes.

    Returns (lambda1_normalized, opnorm_over_N, absolute difference); the
    difference exceeding 1e-8 raises NumericalError.
    """
    matrix = m.matrix if isinstance(m, CorrelationMatrix) else np.asarray(m, float)
    n = matrix.shape[0]
    lam1 = float(eigen_spectrum(m)[0]) / n
    opnorm = operator_norm_power_iteration(matrix) / n
    diff = abs(lam1 - opnorm)
    if not diff < _IDENTITY_TOL:
        raise NumericalError(
            f"operator-norm identity violated: |{lam1} - {opnorm}| = {diff}"
        )
    return lam1, opnorm, diff


def rolling_market_size(panel: PricePanel,
                        window_days=DEFAULT_WINDOW_DAYS) -> MarketSizeSeries:
    """M̃(t): trailing S-day average of the summed market caps, t = S..T.

    Windows cover panel days t−S+1..t, matching the correlation windows
    over return days, so the output dates align with lambda1_series.
    """
    S = int(window_days)
    if S < 2:
        raise InputError(f"window must be >= 2 days, got {S}")
    if panel.n_days - 1 < S:
        raise InputError(f"need at least {S + 1} panel days, have {panel.n_days}")
    total = panel.market_caps.sum(axis=0)
    values = sliding_window_view(total[1:], S).mean(axis=1)
    return MarketSizeSeries(panel.dates[S:], values)


def series_correlation(x, y) -> float:
    """Pearson correlation of two aligned series."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise InputError("series must be 1-d and equal length")
    if xa.size < 2:
        raise InputError("need at least 2 points to correlate")
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sx = float(np.sqrt(xc @ xc))
    sy = float(np.sqrt(yc @ yc))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateDataError("cannot correlate a constant series")
    return float((xc @ yc) / (sx * sy))
