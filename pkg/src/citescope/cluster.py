"""Milestone-type discovery: DTW k-means, Ward clustering, and labeling.

Citation-share series of milestone papers are grouped two ways, mirroring a
triangulated analysis: dynamic time warping with k-means (variable-length
series, barycenter-averaged centroids) and Ward hierarchical clustering on
interpolation-aligned series.  A three-cluster solution is then labeled
super / fading_super / milestone from computed statistics alone.

DTW uses an absolute-difference local cost with no window constraint; the
series involved are short (a few dozen points), so the full dynamic program
is cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.cluster.hierarchy import leaves_list, linkage

from .timeseries import CitationSeries

LABEL_SUPER = "super"
LABEL_FADING = "fading_super"
LABEL_MILESTONE = "milestone"

_FADING_PEAK_THRESHOLD = 0.001


class LabelingError(Exception):
    """Cluster statistics were ambiguous; a manual label override is needed."""


@dataclass(frozen=True)
class RelativeSeries:
    """Per-paper citation shares from first citation to the last corpus year."""

    paper: str
    years: tuple[int, ...]
    shares: tuple[float, ...]


@dataclass(frozen=True)
class ClusterAssignment:
    paper: str
    cluster: int
    label: str


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge history: (node_a, node_b, height, size) rows.

    Leaves are 0..n-1; merge i creates node n+i.  Heights are non-decreasing
    under Ward linkage.
    """

    merges: tuple[tuple[int, int, float, int], ...]
    leaf_order: tuple[int, ...]


@dataclass(frozen=True)
class KMeansResult:
    assignments: tuple[int, ...]
    barycenters: tuple[tuple[float, ...], ...]
    inertia: float
    n_iter: int


def relative_series(series_map: Mapping[str, CitationSeries],
                    per_year_totals: Mapping[int, int],
                    papers: Optional[Sequence[str]] = None) -> list[RelativeSeries]:
    """Build relative citation-share series for the given papers.

    Each series runs from the paper's first cited year through the last
    proceedings year, zero-filled on intermediate years without citations,
    so lengths vary with how early a paper entered the record.
    """
    if papers is None:
        papers = sorted(series_map)
    proceedings_years = sorted(per_year_totals)
    last = proceedings_years[-1]
    out = []
    for pid in papers:
        s = series_map[pid]
        years = [y for y in proceedings_years if s.first_cited <= y <= last]
        shares = tuple(s.by_year.get(y, 0) / per_year_totals[y] for y in years)
        out.append(RelativeSeries(paper=pid, years=tuple(years), shares=shares))
    return out


# --------------------------------------------------------------------------
# DTW kernels (numba-accelerated with a pure-Python fallback)

def _dtw_accum_py(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[0]
    dp = np.full((n + 1, m + 1), np.inf)
    dp[0, 0] = 0.0
    for i in range(1, n + 1):
        ai = a[i - 1]
        row = dp[i]
        prev = dp[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if row[j - 1] < best:
                best = row[j - 1]
            row[j] = abs(ai - b[j - 1]) + best
    return dp


try:
    from numba import njit

    _dtw_accum = njit(cache=True)(_dtw_accum_py)
except ImportError:  # pragma: no cover
    _dtw_accum = _dtw_accum_py


def _as_array(series) -> np.ndarray:
    values = getattr(series, "shares", series)
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("series must be non-empty one-dimensional sequences")
    return arr


def dtw_distance(a, b) -> float:
    """Dynamic-time-warping distance with absolute-difference local cost.

    Boundary-anchored, no window constraint; symmetric and zero on
    identical series.
    """
    return float(_dtw_accum(_as_array(a), _as_array(b))[-1, -1])


def _dtw_path(a: np.ndarray, b: np.ndarray) -> list[tuple[int, int]]:
    dp = _dtw_accum(a, b)
    i, j = a.shape[0], b.shape[0]
    path = []
    while i > 0 and j > 0:
        path.append((i - 1, j - 1))
        diag, up, left = dp[i - 1, j - 1], dp[i - 1, j], dp[i, j - 1]
        if diag <= up and diag <= left:
            i, j = i - 1, j - 1
        elif up <= left:
            i -= 1
        else:
            j -= 1
    path.reverse()
    return path


def _dba_update(center: np.ndarray, members: list[np.ndarray], iters: int = 3) -> np.ndarray:
    """DTW barycenter averaging: align members to the centroid and average
    the values mapped onto each centroid position."""
    for _ in range(iters):
        sums = np.zeros_like(center)
        counts = np.zeros(center.shape[0])
        for m in members:
            for ci, mi in _dtw_path(center, m):
                sums[ci] += m[mi]
                counts[ci] += 1
        mask = counts > 0
        updated = center.copy()
        updated[mask] = sums[mask] / counts[mask]
        if np.array_equal(updated, center):
            break
        center = updated
    return center


def _seed_centers(arrays: list[np.ndarray], k: int, rng: np.random.Generator) -> list[int]:
    """Distance-weighted (k-means++ style) seeding over DTW distances."""
    n = len(arrays)
    chosen = [int(rng.integers(n))]
    dists = np.array([dtw_distance(arrays[chosen[0]], x) for x in arrays])
    while len(chosen) < k:
        weights = dists ** 2
        total = weights.sum()
        if total > 0:
            idx = int(rng.choice(n, p=weights / total))
        else:
            remaining = [i for i in range(n) if i not in chosen]
            idx = remaining[0]
        chosen.append(idx)
        dists = np.minimum(dists, [dtw_distance(arrays[idx], x) for x in arrays])
    return chosen


def _kmeans_once(arrays: list[np.ndarray], k: int, rng: np.random.Generator,
                 max_iter: int,
                 initial_centers: Optional[list[np.ndarray]]) -> KMeansResult:
    if initial_centers is not None:
        centers = [c.copy() for c in initial_centers]
    else:
        centers = [arrays[i].copy() for i in _seed_centers(arrays, k, rng)]

    best: Optional[tuple[float, list[int], list[np.ndarray]]] = None
    prev_assign: Optional[list[int]] = None
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        dist = np.empty((len(arrays), k))
        for si, arr in enumerate(arrays):
            for ci, center in enumerate(centers):
                dist[si, ci] = dtw_distance(arr, center)
        assign = [int(np.argmin(dist[si])) for si in range(len(arrays))]

        # Re-seed empty clusters with the worst-fit series from a cluster
        # that can spare one.
        for ci in range(k):
            if ci not in assign:
                candidates = [si for si in range(len(arrays))
                              if assign.count(assign[si]) > 1]
                worst = max(candidates, key=lambda si: (dist[si, assign[si]], si))
                assign[worst] = ci
                centers[ci] = arrays[worst].copy()

        inertia = float(sum(dtw_distance(arrays[si], centers[assign[si]])
                            for si in range(len(arrays))))
        if best is None or inertia < best[0]:
            best = (inertia, list(assign), [c.copy() for c in centers])
        if assign == prev_assign:
            break
        prev_assign = assign
        for ci in range(k):
            members = [arrays[si] for si in range(len(arrays)) if assign[si] == ci]
            if members:
                centers[ci] = _dba_update(centers[ci], members)

    inertia, assign, centers = best
    return KMeansResult(assignments=tuple(assign),
                        barycenters=tuple(tuple(float(v) for v in c) for c in centers),
                        inertia=inertia, n_iter=n_iter)


def dtw_kmeans(series: Sequence, k: int, seed: int = 0, max_iter: int = 50,
               n_init: int = 10,
               initial_centers: Optional[Sequence[Sequence[float]]] = None) -> KMeansResult:
    """k-means over variable-length series under DTW, with DBA centroids.

    Runs ``n_init`` distance-weighted seedings and keeps the lowest-inertia
    solution; each run stops at an assignment fixpoint or ``max_iter``
    rounds.  Deterministic for a fixed seed: seeding, assignment
    tie-breaks, restart order, and centroid updates are all order-stable.
    With explicit ``initial_centers`` a single warm-started run is done.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    arrays = [_as_array(s) for s in series]
    if k > len(arrays):
        raise ValueError(f"k={k} exceeds number of series ({len(arrays)})")
    if initial_centers is not None:
        centers = [np.asarray(c, dtype=np.float64) for c in initial_centers]
        if len(centers) != k:
            raise ValueError("initial_centers length must equal k")
        return _kmeans_once(arrays, k, np.random.default_rng(seed), max_iter, centers)
    best: Optional[KMeansResult] = None
    for restart in range(max(1, n_init)):
        rng = np.random.default_rng([seed, restart])
        result = _kmeans_once(arrays, k, rng, max_iter, None)
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def elbow(series: Sequence, k_range: Sequence[int], seed: int = 0,
          restarts: int = 10) -> dict[int, float]:
    """Best-of-restarts inertia per cluster count.

    Each k additionally warm-starts from the previous k's solution plus the
    worst-fit series as the new centroid, which keeps the curve
    non-increasing in k.
    """
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("empty k range")
    if ks[0] < 1 or ks[-1] > len(series):
        raise ValueError("k range must lie within [1, number of series]")
    arrays = [_as_array(s) for s in series]
    inertias: dict[int, float] = {}
    prev_best: Optional[KMeansResult] = None
    for k in ks:
        results = [dtw_kmeans(arrays, k, seed=seed + r, n_init=1)
                   for r in range(max(1, restarts))]
        if prev_best is not None and len(prev_best.barycenters) == k - 1:
            # Warm start: the previous solution plus its worst-fit series as
            # the extra centroid keeps inertia non-increasing in k.
            dists = [dtw_distance(arrays[si], prev_best.barycenters[prev_best.assignments[si]])
                     for si in range(len(arrays))]
            worst = int(np.argmax(dists))
            warm = list(prev_best.barycenters) + [tuple(float(v) for v in arrays[worst])]
            results.append(dtw_kmeans(arrays, k, seed=seed, initial_centers=warm))
        best = min(results, key=lambda r: r.inertia)
        inertias[k] = best.inertia
        prev_best = best
    return inertias


# --------------------------------------------------------------------------
# Ward hierarchical clustering

def _resample(arr: np.ndarray, length: int) -> np.ndarray:
    if arr.shape[0] == length:
        return arr
    if arr.shape[0] == 1:
        return np.full(length, arr[0])
    old = np.linspace(0.0, 1.0, arr.shape[0])
    new = np.linspace(0.0, 1.0, length)
    return np.interp(new, old, arr)


def ward_cluster(series: Sequence) -> Dendrogram:
    """Ward-linkage dendrogram over interpolation-aligned series.

    Series are linearly resampled to the longest length (Ward needs a
    fixed-dimension embedding), then merged under the Lance-Williams Ward
    update; merge heights are monotone non-decreasing.
    """
    arrays = [_as_array(s) for s in series]
    if len(arrays) < 2:
        raise ValueError("ward clustering needs at least 2 series")
    length = max(a.shape[0] for a in arrays)
    matrix = np.vstack([_resample(a, length) for a in arrays])
    z = linkage(matrix, method="ward")
    merges = tuple((int(row[0]), int(row[1]), float(row[2]), int(row[3])) for row in z)
    return Dendrogram(merges=merges, leaf_order=tuple(int(i) for i in leaves_list(z)))


def cut_dendrogram(dendrogram: Dendrogram, k: int) -> list[int]:
    """Flat cluster labels from the first n-k merges, numbered 0..k-1 in
    order of each cluster's smallest leaf."""
    n = len(dendrogram.merges) + 1
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}]")
    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for idx, (a, b, _, _) in enumerate(dendrogram.merges[: n - k]):
        node = n + idx
        parent[find(a)] = node
        parent[find(b)] = node
    roots: dict[int, int] = {}
    labels = []
    for leaf in range(n):
        root = find(leaf)
        if root not in roots:
            roots[root] = len(roots)
        labels.append(roots[root])
    return labels


# --------------------------------------------------------------------------
# labeling

def _ols_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    n = len(xs)
    if n < 2:
        return 0.0
    x_mean = sum(xs) / n
    y_mean = sum(ys) / n
    sxx = sum((x - x_mean) ** 2 for x in xs)
    if sxx == 0:
        return 0.0
    return sum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys)) / sxx


def label_clusters(assignments: Sequence[int], series: Sequence[RelativeSeries],
                   per_year_totals: Mapping[int, int],
                   window: int = 10) -> list[ClusterAssignment]:
    """Name a k=3 clustering super / fading_super / milestone.

    Over the last ``window`` proceedings years, the cluster with the
    highest mean share among those with a non-negative trend is the super
    cluster; clusters that historically peaked above 0.1% of a year's
    citations but trend downward are fading supers; everything else is an
    ordinary milestone.  Labels are derived from these statistics only.
    """
    if len(assignments) != len(series):
        raise ValueError("assignments and series lengths differ")
    window_years = sorted(per_year_totals)[-window:]
    clusters = sorted(set(assignments))

    def share_at(s: RelativeSeries, year: int) -> float:
        try:
            return s.shares[s.years.index(year)]
        except ValueError:
            return 0.0

    stats = {}
    for c in clusters:
        members = [s for a, s in zip(assignments, series) if a == c]
        mean_series = [float(np.mean([share_at(s, y) for s in members]))
                       for y in window_years]
        stats[c] = {
            "recent_mean": float(np.mean(mean_series)) if mean_series else 0.0,
            "trend": _ols_slope(window_years, mean_series),
            "peak": max((max(s.shares) for s in members), default=0.0),
        }

    labels = {c: LABEL_MILESTONE for c in clusters}
    rising = [c for c in clusters if stats[c]["trend"] >= 0]
    if rising:
        best = max(stats[c]["recent_mean"] for c in rising)
        top = [c for c in rising if stats[c]["recent_mean"] == best]
        if len(top) > 1:
            raise LabelingError(
                f"clusters {top} tie on the super rule; rerun with an explicit "
                f"--label-override assignment")
        labels[top[0]] = LABEL_SUPER
    for c in clusters:
        if labels[c] == LABEL_MILESTONE and stats[c]["trend"] < 0 \
                and stats[c]["peak"] > _FADING_PEAK_THRESHOLD:
            labels[c] = LABEL_FADING
    return [ClusterAssignment(paper=s.paper, cluster=int(a), label=labels[a])
            for a, s in zip(assignments, series)]
