"""Weight-preserving bottleneck distance, infinity-Wasserstein matching,
magnitude profiles and the L^1 profile distance.

Bars are only ever matched within the same homological degree and the same
weight class; unmatched bars pay their diagonal projection cost (d - b) / 2.
Infinite-death bars match only infinite-death bars, at cost |b1 - b2|; a
weight class whose infinite-bar counts differ has distance +infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import CardinalityMismatch, ScaleMismatch
from .lengths import BucketedLengths
from .magnitude import compute_magnitude
from .metric import PointCloud, from_point_cloud
from .persistence import WeightedBar, WeightedBarcode

__all__ = [
    "Matching",
    "BottleneckResult",
    "bottleneck_weighted",
    "wasserstein_inf",
    "MagnitudeProfile",
    "magnitude_profile",
    "profile_l1_distance",
]


# --------------------------------------------------------------------------
# bipartite matching machinery
# --------------------------------------------------------------------------


def _augment(u, adj, match_l, match_r, seen):
    for v in adj[u]:
        if seen[v]:
            continue
        seen[v] = True
        if match_r[v] == -1 or _augment(match_r[v], adj, match_l, match_r, seen):
            match_l[u] = v
            match_r[v] = u
            return True
    return False


def max_bipartite_matching(n_left, n_right, adj):
    """Kuhn's augmenting-path maximum matching; adj[u] lists right neighbours."""
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    size = 0
    for u in range(n_left):
        seen = [False] * n_right
        if _augment(u, adj, match_l, match_r, seen):
            size += 1
    return size, match_l, match_r


# --------------------------------------------------------------------------
# weight-preserving bottleneck distance
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Matching:
    """Weight-preserving partial bijection plus diagonal assignments."""

    pairs: tuple  # (bar_from_B1, bar_from_B2)
    diagonal_1: tuple  # bars of B1 projected to the diagonal
    diagonal_2: tuple
    cost: float


@dataclass(frozen=True)
class BottleneckResult:
    distance: object  # float or Fraction; math.inf when unmatched infinities
    matching: Matching

    def __float__(self):
        return float(self.distance)


def _pair_cost(b1: WeightedBar, b2: WeightedBar):
    if b1.infinite != b2.infinite:
        return None
    db = abs(b1.birth - b2.birth)
    if b1.infinite:
        return db
    dd = abs(b1.death - b2.death)
    return max(db, dd)


def _diag_cost(b: WeightedBar):
    return (b.death - b.birth) / 2


def _weight_classes(bars1, bars2, weight_tol):
    """Joint clustering of weights: sorted values split where gaps exceed tol.

    Exact (tolerance zero) when every weight is a Fraction; transitive by
    construction either way.
    """
    items = [(float(b.weight), 0, i) for i, b in enumerate(bars1)]
    items += [(float(b.weight), 1, i) for i, b in enumerate(bars2)]
    if not items:
        return {}
    if weight_tol is None:
        exact = all(isinstance(b.weight, (Fraction, int)) for b in bars1 + bars2)
        weight_tol = 0.0 if exact else 1e-9
    items.sort(key=lambda t: t[0])
    classes = {}
    cls = 0
    prev = None
    for w, side, idx in items:
        if prev is not None and w - prev > weight_tol:
            cls += 1
        prev = w
        classes.setdefault(cls, ([], []))[side].append(idx)
    return classes


def _finite_bottleneck(bars1, bars2):
    """Classical bottleneck between finite bars of one class, with diagonal."""
    n1, n2 = len(bars1), len(bars2)
    if n1 == 0 and n2 == 0:
        return 0, [], [], []
    pair = [[_pair_cost(a, b) for b in bars2] for a in bars1]
    d1 = [_diag_cost(b) for b in bars1]
    d2 = [_diag_cost(b) for b in bars2]
    candidates = sorted(set(d1) | set(d2) | {c for row in pair for c in row}, key=float)
    candidates = [c for c in candidates if float(c) >= 0]

    # left: bars1 then shadow nodes for bars2; right: bars2 then shadows for bars1
    def feasible(c):
        adj = [[] for _ in range(n1 + n2)]
        for i in range(n1):
            for j in range(n2):
                if pair[i][j] <= c:
                    adj[i].append(j)
            if d1[i] <= c:
                adj[i].append(n2 + i)
        for j in range(n2):
            if d2[j] <= c:
                adj[n1 + j].append(j)
            for i in range(n1):
                adj[n1 + j].append(n2 + i)
        size, match_l, match_r = max_bipartite_matching(n1 + n2, n2 + n1, adj)
        return size == n1 + n2, match_l

    lo, hi = 0, len(candidates) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        ok, match_l = feasible(candidates[mid])
        if ok:
            best = (candidates[mid], match_l)
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        raise RuntimeError("bottleneck search failed to find a feasible matching")
    cost, match_l = best
    pairs, diag1, diag2 = [], [], []
    for i in range(n1):
        v = match_l[i]
        if v < n2:
            pairs.append((bars1[i], bars2[v]))
        else:
            diag1.append(bars1[i])
    matched2 = {match_l[i] for i in range(n1) if match_l[i] < n2}
    for j in range(n2):
        if j not in matched2:
            diag2.append(bars2[j])
    return cost, pairs, diag1, diag2


def _infinite_bottleneck(bars1, bars2):
    if len(bars1) != len(bars2):
        return math.inf, []
    if not bars1:
        return 0, []
    a = sorted(bars1, key=lambda b: float(b.birth))
    b = sorted(bars2, key=lambda b: float(b.birth))
    cost = max(abs(x.birth - y.birth) for x, y in zip(a, b))
    return cost, list(zip(a, b))


def bottleneck_weighted(B1: WeightedBarcode, B2: WeightedBarcode, weight_tol=None) -> BottleneckResult:
    """Weight-preserving bottleneck distance: the maximum over weight classes
    (stratified additionally by homological degree) of the classical
    bottleneck distance between the per-class bars."""
    bars1 = list(B1.bars if isinstance(B1, WeightedBarcode) else B1)
    bars2 = list(B2.bars if isinstance(B2, WeightedBarcode) else B2)
    dims = sorted({b.dim for b in bars1} | {b.dim for b in bars2})
    total = 0
    pairs, diag1, diag2 = [], [], []
    for dim in dims:
        d1 = [b for b in bars1 if b.dim == dim]
        d2 = [b for b in bars2 if b.dim == dim]
        for _cls, (idx1, idx2) in _weight_classes(d1, d2, weight_tol).items():
            c1 = [d1[i] for i in idx1]
            c2 = [d2[i] for i in idx2]
            inf1 = [b for b in c1 if b.infinite]
            inf2 = [b for b in c2 if b.infinite]
            fin1 = [b for b in c1 if not b.infinite]
            fin2 = [b for b in c2 if not b.infinite]
            icost, ipairs = _infinite_bottleneck(inf1, inf2)
            if icost == math.inf:
                return BottleneckResult(
                    math.inf, Matching((), tuple(bars1), tuple(bars2), math.inf)
                )
            fcost, fpairs, fd1, fd2 = _finite_bottleneck(fin1, fin2)
            pairs.extend(ipairs)
            pairs.extend(fpairs)
            diag1.extend(fd1)
            diag2.extend(fd2)
            cls_cost = max(icost, fcost)
            if cls_cost > total:
                total = cls_cost
    matching = Matching(tuple(pairs), tuple(diag1), tuple(diag2), float(total))
    return BottleneckResult(total, matching)


# --------------------------------------------------------------------------
# infinity-Wasserstein between equal-size point sets
# --------------------------------------------------------------------------


def wasserstein_inf(X, Y):
    """min over bijections of the maximum point displacement.

    Binary search over the sorted multiset of pairwise distances with a
    perfect-matching feasibility test at each threshold.  Returns
    (value, bijection) where bijection[i] is the index of Y matched to X[i].
    """
    Xp = X.points if isinstance(X, PointCloud) else np.asarray(X, dtype=float)
    Yp = Y.points if isinstance(Y, PointCloud) else np.asarray(Y, dtype=float)
    if Xp.shape[0] != Yp.shape[0]:
        raise CardinalityMismatch(
            f"point sets have sizes {Xp.shape[0]} and {Yp.shape[0]}"
        )
    n = Xp.shape[0]
    cost = np.sqrt(((Xp[:, None, :] - Yp[None, :, :]) ** 2).sum(axis=2))
    candidates = np.unique(cost)

    def feasible(c):
        adj = [list(np.nonzero(cost[i] <= c)[0]) for i in range(n)]
        size, match_l, _ = max_bipartite_matching(n, n, adj)
        return size == n, match_l

    lo, hi = 0, len(candidates) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        ok, match_l = feasible(candidates[mid])
        if ok:
            best = (float(candidates[mid]), match_l)
            hi = mid - 1
        else:
            lo = mid + 1
    assert best is not None  # the full distance matrix always matches
    return best[0], tuple(int(i) for i in best[1])


# --------------------------------------------------------------------------
# magnitude profiles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MagnitudeProfile:
    """Left-closed step function r -> Mag(N_r) on [0, L].

    ``values[i]`` holds on [edges[i], edges[i+1]); the last value extends to
    and includes L.
    """

    edges: tuple
    values: tuple
    L: float

    def __post_init__(self):
        if len(self.values) != len(self.edges):
            raise ValueError("values must align with edges")

    def value_at(self, r):
        if r < 0 or r > self.L:
            raise ValueError(f"radius {r} outside [0, {self.L}]")
        v = self.values[0]
        for e, val in zip(self.edges, self.values):
            if r >= e - 1e-15:
                v = val
        return v

    def critical_radii(self):
        return self.edges[1:]


def magnitude_profile(cloud, L, center=None, tau=1e-9) -> MagnitudeProfile:
    """Magnitude of the ball around the barycenter (or a given center) as a
    step function of the radius, on [0, L]."""
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(np.asarray(cloud, dtype=float))
    if not L > 0:
        raise ValueError("observation scale L must be positive")
    c = cloud.barycenter() if center is None else np.asarray(center, dtype=float)
    radii = np.sqrt(((cloud.points - c[None, :]) ** 2).sum(axis=1))
    order = np.argsort(radii)
    edges = [0.0]
    for i in order:
        r = float(radii[i])
        if r > L:
            break
        if r > edges[-1] + 1e-12:
            edges.append(r)
    values = []
    backend = BucketedLengths(tau)
    for e in edges:
        mask = radii <= e + 1e-12
        m = int(mask.sum())
        if m == 0:
            values.append(0.0)
        elif m == 1:
            values.append(1.0)
        else:
            sub = from_point_cloud(PointCloud(cloud.points[mask]), backend)
            values.append(compute_magnitude(sub))
    return MagnitudeProfile(edges=tuple(edges), values=tuple(values), L=float(L))


def profile_l1_distance(P1: MagnitudeProfile, P2: MagnitudeProfile) -> float:
    """Exact integral over [0, L] of |P1 - P2| (merged step grids)."""
    if P1.L != P2.L:
        raise ScaleMismatch(f"profiles have scales {P1.L} and {P2.L}")
    grid = sorted(set(P1.edges) | set(P2.edges) | {P1.L})
    total = 0.0
    for a, b in zip(grid, grid[1:]):
        if b <= a:
            continue
        total += abs(P1.value_at(a) - P2.value_at(a)) * (b - a)
    return float(total)
