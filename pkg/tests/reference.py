"""Slow reference implementations that the package is checked against.

Everything here favours obviousness over speed: plain Python loops,
explicit window slicing, distances recomputed from scratch. Nothing in
this module imports the package under test.
"""

import itertools
import math

import numpy as np


def pearson_matrix(X):
    """Pair-at-a-time Pearson correlations with population normalization."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            xi = X[i] - X[i].mean()
            xj = X[j] - X[j].mean()
            denom = math.sqrt((xi * xi).mean()) * math.sqrt((xj * xj).mean())
            out[i, j] = (xi * xj).mean() / denom
    return out


def abs_entry_mean(M, exclude_diagonal=False):
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    total, count = 0.0, 0
    for i in range(n):
        for j in range(n):
            if exclude_diagonal and i == j:
                continue
            total += abs(M[i, j])
            count += 1
    return total / count


def rolling_std(X, S):
    """Two-pass population std of every length-S window of every row."""
    X = np.asarray(X, dtype=float)
    n, T = X.shape
    out = np.empty((n, T - S + 1))
    for i in range(n):
        for w in range(T - S + 1):
            seg = X[i, w:w + S]
            m = seg.mean()
            out[i, w] = math.sqrt(((seg - m) ** 2).mean())
    return out


def turning_points(y, l=17, delta=0.2, epsilon=0.01):
    """Full turning-point extraction; returns a list of (index, kind).

    Same procedure as the package — min-adjust, clamped-window extremum
    scan with inductive alternation, then the peak-ratio and the
    log-gradient prunes, each restarted from the left after any removal —
    but written over plain lists with explicit slices.
    """
    y = [float(v) for v in np.asarray(y, dtype=float) - np.min(y)]
    n = len(y)
    seq = []
    for t in range(n):
        window = y[max(0, t - l): t + l + 1]
        at_max = y[t] == max(window)
        at_min = y[t] == min(window)
        if at_max == at_min:
            continue
        kind = "peak" if at_max else "trough"
        if not seq:
            seq.append((t, kind))
            continue
        pt, pk = seq[-1]
        improves = y[t] > y[pt] if kind == "peak" else y[t] < y[pt]
        if kind == pk:
            if improves:
                seq[-1] = (t, kind)
        elif improves:
            seq.append((t, kind))

    # rule one: a later peak under delta times the earlier one is noise
    while True:
        peaks = [s for s, (_, k) in enumerate(seq) if k == "peak"]
        fired = False
        for s1, s3 in zip(peaks, peaks[1:]):
            v1, v3 = y[seq[s1][0]], y[seq[s3][0]]
            if v1 > 0.0 and v3 / v1 < delta:
                del seq[s3]
                if s3 < len(seq):  # two troughs collided; keep the lower
                    va, vb = y[seq[s3 - 1][0]], y[seq[s3][0]]
                    del seq[s3 - 1 if va > vb else s3]
                fired = True
                break
        if not fired:
            break

    # rule two: adjacent points connected by a flat log-slope are noise
    while True:
        fired = False
        for s in range(len(seq) - 1):
            v1, v2 = y[seq[s][0]], y[seq[s + 1][0]]
            if v1 <= 0.0 or v2 <= 0.0:
                continue
            if abs(math.log(v2 / v1)) / (seq[s + 1][0] - seq[s][0]) < epsilon:
                at_end = s + 1 == len(seq) - 1
                del seq[s + 1]
                if not at_end:
                    del seq[s]
                fired = True
                break
        if not fired:
            break
    return seq


def wasserstein_by_matching(p, q):
    """Brute-force optimal transport between equal-weight atom sets."""
    p = [float(v) for v in p]
    q = [float(v) for v in q]
    n = len(p)
    best = math.inf
    for perm in itertools.permutations(range(n)):
        cost = sum(abs(p[i] - q[perm[i]]) for i in range(n)) / n
        if cost < best:
            best = cost
    return best


def agglomerate(D, linkage):
    """Naive agglomeration recomputing every cluster distance from scratch.

    Returns [(id_a, id_b, height, size), ...] with scipy-style ids (leaves
    0..w-1, merged cluster at step s gets id w+s). Assumes no exact ties.
    """
    D = np.asarray(D, dtype=float)
    w = D.shape[0]
    clusters = {i: [i] for i in range(w)}
    merges = []
    for step in range(w - 1):
        best = None
        for a, b in itertools.combinations(sorted(clusters), 2):
            cross = [D[x, y] for x in clusters[a] for y in clusters[b]]
            if linkage == "single":
                d = min(cross)
            elif linkage == "complete":
                d = max(cross)
            else:
                d = sum(cross) / len(cross)
            if best is None or d < best[0]:
                best = (d, a, b)
        d, a, b = best
        leaves = clusters.pop(a) + clusters.pop(b)
        clusters[w + step] = leaves
        merges.append((a, b, d, len(leaves)))
    return merges


def inconsistency_at(closes, caps, t, S):
    """(nu_MR, nu_MSigma) for the window of return days [t-S+1, t].

    Works straight off the raw panel arrays (N, T+1); day 0 is the price
    base, return day d compares panel columns d and d-1.
    """
    n = closes.shape[0]
    cap_mean, ret_sum, sigma = [], [], []
    for i in range(n):
        rets = [math.log(closes[i, d] / closes[i, d - 1])
                for d in range(t - S + 1, t + 1)]
        cap_mean.append(sum(caps[i, d] for d in range(t - S + 1, t + 1)) / S)
        ret_sum.append(sum(rets))
        mu = sum(rets) / S
        sigma.append(math.sqrt(sum((x - mu) ** 2 for x in rets) / S))

    def affinity(feature):
        D = [[abs(feature[i] - feature[j]) for j in range(n)] for i in range(n)]
        top = max(max(row) for row in D)
        if top == 0.0:
            return [[1.0] * n for _ in range(n)]
        return [[1.0 - D[i][j] / top for j in range(n)] for i in range(n)]

    a_m = affinity(cap_mean)
    a_r = affinity(ret_sum)
    a_s = affinity(sigma)
    nu_mr = sum(abs(a_m[i][j] - a_r[i][j]) for i in range(n) for j in range(n)) / n**2
    nu_ms = sum(abs(a_m[i][j] - a_s[i][j]) for i in range(n) for j in range(n)) / n**2
    return nu_mr, nu_ms


def intra_variance(p):
    p = [float(v) for v in p]
    n = len(p)
    return sum((v - 1.0 / n) ** 2 for v in p)
