"""Volatility dispersion: how evenly total market volatility is spread.

Each day's rolling volatilities normalize to a probability vector p(t).
Two summaries are tracked: the intra-volatility variance Σ(p_i − 1/N)²
(zero at the uniform spread, at most 1 − 1/N at a one-shot vector), and
the pairwise L1-Wasserstein distance between days, computed by the
sorted-vector quantile formula — exact for equal-size point-mass
measures. The day-by-day distance matrix feeds agglomerative
hierarchical clustering, implemented here directly via Lance-Williams
updates with deterministic lowest-index tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegenerateDataError, InputError
from .inconsistency import VolatilityPanel

LINKAGES = ("average", "complete", "single")


@dataclass(frozen=True)
class VolatilityDistribution:
    date: object
    p: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise InputError("p must be a non-empty vector")
        if np.any(p < 0.0):
            raise InputError("p entries must be non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise InputError(f"p must sum to 1, got {p.sum()!r}")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    @property
    def n(self):
        return self.p.size


@dataclass(frozen=True)
class DispersionMatrix:
    """Pairwise Wasserstein distances between the valid dates' p-vectors."""

    dates: tuple
    matrix: np.ndarray
    n_assets: int
    excluded_dates: tuple = ()

    def __post_init__(self):
        dates = tuple(self.dates)
        m = np.ascontiguousarray(self.matrix, dtype=float)
        w = len(dates)
        n = int(self.n_assets)
        if m.shape != (w, w):
            raise InputError(f"matrix shape {m.shape} does not match {w} dates")
        if np.any(np.diag(m) != 0.0):
            raise InputError("dispersion matrix diagonal must be zero")
        if not np.array_equal(m, m.T):
            raise InputError("dispersion matrix must be symmetric")
        bound = (2.0 / n) * (1.0 - 1.0 / n) + 1e-12
        if np.any(m < 0.0) or np.any(m > bound):
            raise InputError(f"entries must lie in [0, (2/{n})(1 - 1/{n})]")
        m.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_assets", n)
        object.__setattr__(self, "excluded_dates", tuple(self.excluded_dates))


@dataclass(frozen=True)
class Merge:
    step: int
    cluster_a: int
    cluster_b: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge history over W leaves.

    Cluster ids follow the usual convention: leaves are 0..W−1 and the
    cluster created at step k (0-based) is W+k.
    """

    n_leaves: int
    merges: tuple

    def __post_init__(self):
        merges = tuple(self.merges)
        w = int(self.n_leaves)
        if w < 1:
            raise InputError("dendrogram needs at least one leaf")
        if len(merges) != w - 1:
            raise InputError(f"expected {w - 1} merges for {w} leaves, got {len(merges)}")
        heights = [m.height for m in merges]
        if any(b < a - 1e-12 for a, b in zip(heights, heights[1:])):
            raise InputError("merge heights must be non-decreasing")
        object.__setattr__(self, "n_leaves", w)
        object.__setattr__(self, "merges", merges)


@dataclass(frozen=True)
class VarianceSeries:
    dates: tuple
    values: np.ndarray
    excluded_dates: tuple = ()

    def __post_init__(self):
        dates = tuple(self.dates)
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.shape != (len(dates),):
            raise InputError("values length must match dates")
        values.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "excluded_dates", tuple(self.excluded_dates))


def volatility_distribution(vol: VolatilityPanel, t: int) -> VolatilityDistribution:
    """p(t): the day's volatilities normalized to sum to 1.

    ``t`` is the return-day index (S..T), as everywhere else.
    """
    S = vol.window_days
    if not S <= t <= S + vol.n_dates - 1:
        raise InputError(f"t={t} outside valid range {S}..{S + vol.n_dates - 1}")
    column = vol.sigmas[:, t - S]
    total = column.sum()
    if total <= 0.0:
        raise DegenerateDataError(
            f"all volatilities are zero on {vol.dates[t - S]}; p(t) undefined"
        )
    return VolatilityDistribution(vol.dates[t - S], column / total)


def _as_vector(p):
    return p.p if isinstance(p, VolatilityDistribution) else np.asarray(p, float)


def wasserstein(p, q) -> float:
    """L1-Wasserstein distance of two N-point volatility distributions.

    Equal-size point-mass measures reduce to the quantile-function
    formula: sort both vectors and average the absolute differences.
    Insensitive to coordinate order by construction.
    """
    a = _as_vector(p)
    b = _as_vector(q)
    if a.shape != b.shape:
        raise InputError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(np.sort(a) - np.sort(b)).mean())


def intra_volatility_variance(p) -> float:
    """Var(p) = Σ(p_i − 1/N)²: distance of the spread from uniform."""
    a = _as_vector(p)
    return float(((a - 1.0 / a.size) ** 2).sum())


def _distributions(vol):
    """(valid dates, stacked p rows, excluded dates) for a volatility panel."""
    totals = vol.sigmas.sum(axis=0)
    valid = totals > 0.0
    excluded = tuple(d for d, ok in zip(vol.dates, valid) if not ok)
    dates = tuple(d for d, ok in zip(vol.dates, valid) if ok)
    P = (vol.sigmas[:, valid] / totals[valid]).T  # (W_valid, N)
    return dates, P, excluded


def dispersion_matrix(vol: VolatilityPanel) -> DispersionMatrix:
    """All-pairs Wasserstein distances between daily volatility spreads.

    Dates whose volatilities are all zero have no distribution and are
    excluded (and reported on the result).
    """
    dates, P, excluded = _distributions(vol)
    if len(dates) < 2:
        raise InputError(f"need at least 2 valid dates, have {len(dates)}")
    sorted_rows = np.sort(P, axis=1)
    matrix = cdist(sorted_rows, sorted_rows, "cityblock") / vol.n_assets
    return DispersionMatrix(dates, matrix, vol.n_assets, excluded)


def variance_series(vol: VolatilityPanel) -> VarianceSeries:
    """Var(p(t)) per valid date; degenerate dates are omitted and reported."""
    dates, P, excluded = _distributions(vol)
    values = ((P - 1.0 / vol.n_assets) ** 2).sum(axis=1)
    return VarianceSeries(dates, values, excluded)


def hierarchical_cluster(D, linkage="average") -> Dendrogram:
    """Agglomerative clustering of a distance matrix via Lance-Williams updates.

    At each step the smallest inter-cluster distance is merged, ties
    resolved by the lexicographically lowest slot pair; under single,
    complete or (size-weighted) average linkage the merge heights are
    monotone, so the result is a valid dendrogram.
    """
    if linkage not in LINKAGES:
        raise InputError(f"linkage must be one of {LINKAGES}, got {linkage!r}")
    base = D.matrix if isinstance(D, DispersionMatrix) else np.asarray(D, float)
    w = base.shape[0]
    if base.shape != (w, w):
        raise InputError(f"distance matrix must be square, got {base.shape}")
    if not np.array_equal(base, base.T) or np.any(np.diag(base) != 0.0):
        raise InputError("distance matrix must be symmetric with zero diagonal")
    if w == 1:
        return Dendrogram(1, ())

    work = base.astype(float).copy()
    np.fill_diagonal(work, np.inf)
    active = np.ones(w, dtype=bool)
    sizes = np.ones(w, dtype=int)
    ids = np.arange(w)
    merges = []
    for step in range(w - 1):
        flat = int(np.argmin(work))  # row-major: lowest (i, j) among ties
        i, j = divmod(flat, w)
        if i > j:
            i, j = j, i
        height = float(work[i, j])
        others = active.copy()
        others[i] = others[j] = False
        if linkage == "single":
            merged = np.minimum(work[i], work[j])
        elif linkage == "complete":
            merged = np.maximum(work[i], work[j])
        else:
            merged = (sizes[i] * work[i] + sizes[j] * work[j]) / (sizes[i] + sizes[j])
        work[i, :] = np.where(others, merged, np.inf)
        work[:, i] = work[i, :]
        work[j, :] = np.inf
        work[:, j] = np.inf
        active[j] = False
        sizes[i] += sizes[j]
        merges.append(Merge(step, int(min(ids[i], ids[j])), int(max(ids[i], ids[j])),
                            height, int(sizes[i])))
        ids[i] = w + step
    return Dendrogram(w, tuple(merges))


def cut_clusters(dendro: Dendrogram, k: int) -> np.ndarray:
    """Flat labels for exactly k clusters (undo the last k−1 merges).

    Labels are 0..k−1, assigned in order of each cluster's smallest leaf
    index, so the labeling is deterministic.
    """
    w = dendro.n_leaves
    if not 1 <= k <= w:
        raise InputError(f"k must lie in 1..{w}, got {k}")
    parent = list(range(w))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    members = {i: [i] for i in range(w)}  # root leaf -> leaves
    roots = {i: i for i in range(w)}      # cluster id -> root leaf
    for merge in dendro.merges[: w - k]:
        ra = find(roots[merge.cluster_a])
        rb = find(roots[merge.cluster_b])
        parent[rb] = ra
        members[ra].extend(members.pop(rb))
        roots[w + merge.step] = ra
    groups = sorted((min(leaves), leaves) for leaves in members.values())
    labels = np.empty(w, dtype=int)
    for label, (_, leaves) in enumerate(groups):
        labels[leaves] = label
    return labels


def two_cluster_cut(dendro: Dendrogram) -> np.ndarray:
    """The two subtrees of the final merge, as flat labels."""
    return cut_clusters(dendro, 2)


def dendrogram_to_tree(dendro: Dendrogram, dates=None) -> dict:
    """Nested-dict rendering of the merge history (for JSON export)."""
    if dates is not None and len(dates) != dendro.n_leaves:
        raise InputError("dates length must match leaf count")

    def leaf(i):
        node = {"leaf": int(i)}
        if dates is not None:
            node["date"] = dates[i].isoformat()
        return node

    nodes = {i: leaf(i) for i in range(dendro.n_leaves)}
    for merge in dendro.merges:
        nodes[dendro.n_leaves + merge.step] = {
            "height": merge.height,
            "size": merge.size,
            "children": [nodes.pop(merge.cluster_a), nodes.pop(merge.cluster_b)],
        }
    remaining = list(nodes.values())
    if len(remaining) != 1:
        raise InputError("merge history does not form a single tree")
    return remaining[0]
