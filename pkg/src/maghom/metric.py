"""Finite metric spaces, point clouds, ball filtrations and monotone reparameterizations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .exceptions import (
    AsymmetricMatrix,
    DuplicatePoint,
    IrrationalDistanceInRationalBackend,
    NegativeDistance,
    NonPositiveFunction,
    NotOrthogonal,
    TriangleViolation,
    ZeroOffDiagonal,
)
from .lengths import RationalLengths, as_length_backend
from .validation import check_point_array, check_square_matrix

__all__ = [
    "FiniteMetricSpace",
    "PointCloud",
    "MonotoneFunction",
    "Filtration",
    "from_distance_matrix",
    "from_point_cloud",
    "ball_neighborhood",
    "generalized_inverse",
    "build_filtration",
    "apply_isometry",
]


# --------------------------------------------------------------------------
# core types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite set of points with an exact, validated distance table.

    ``dist`` entries are Fractions (rational backend) or floats (bucketed
    backend); all comparisons go through ``lengths``.  Instances are immutable
    and safe to share across threads.
    """

    dist: tuple
    lengths: object
    labels: tuple
    euclidean: bool = False

    @property
    def n(self):
        return len(self.dist)

    def d(self, i, j):
        return self.dist[i][j]

    def min_positive_distance(self):
        vals = [self.dist[i][j] for i in range(self.n) for j in range(i + 1, self.n)]
        return min(vals) if vals else None

    def diameter(self):
        vals = [self.dist[i][j] for i in range(self.n) for j in range(i + 1, self.n)]
        return max(vals) if vals else self.lengths.zero()

    def subspace(self, indices):
        """Restriction to a subset of point indices (an isometric embedding)."""
        idx = tuple(indices)
        dist = tuple(tuple(self.dist[i][j] for j in idx) for i in idx)
        labels = tuple(self.labels[i] for i in idx)
        return FiniteMetricSpace(dist, self.lengths, labels, euclidean=self.euclidean)

    def as_float_matrix(self):
        return np.array([[float(v) for v in row] for row in self.dist], dtype=float)

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n}, backend={self.lengths.kind})"


@dataclass(frozen=True)
class PointCloud:
    """Distinct points in Euclidean space; optionally certified barycentered."""

    points: np.ndarray
    barycentered: bool = False

    def __post_init__(self):
        pts = check_point_array(self.points, name="points")
        object.__setattr__(self, "points", pts)
        if self.barycentered:
            s = np.abs(self.points.sum(axis=0))
            if np.any(s > 1e-12):
                raise ValueError("barycentered cloud must have coordinates summing to zero")

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def barycenter(self):
        return self.points.mean(axis=0)

    def recentred(self):
        """Translate so the barycenter sits at the origin."""
        return PointCloud(self.points - self.barycenter(), barycentered=True)

    def __repr__(self):
        return f"PointCloud(n={self.n}, dim={self.dim})"


class MonotoneFunction:
    """Piecewise-linear non-decreasing function, extended beyond its
    breakpoints by the boundary segment slopes.

    Breakpoint x-values must be strictly increasing and y-values
    non-decreasing and non-negative.
    """

    def __init__(self, breakpoints: Sequence):
        pts = [(float(x), float(y)) for x, y in breakpoints]
        if not pts:
            raise ValueError("need at least one breakpoint")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        for a, b in zip(xs, xs[1:]):
            if not b > a:
                raise ValueError("breakpoint x-values must be strictly increasing")
        for a, b in zip(ys, ys[1:]):
            if b < a:
                raise ValueError("breakpoint y-values must be non-decreasing")
        if any(y < 0 for y in ys):
            raise NonPositiveFunction("breakpoint values must be non-negative")
        self.xs = tuple(xs)
        self.ys = tuple(ys)

    @staticmethod
    def identity():
        return MonotoneFunction([(0.0, 0.0), (1.0, 1.0)])

    @staticmethod
    def constant(value):
        return MonotoneFunction([(0.0, value)])

    def slopes(self):
        return tuple(
            (y1 - y0) / (x1 - x0)
            for (x0, y0), (x1, y1) in zip(zip(self.xs, self.ys), zip(self.xs[1:], self.ys[1:]))
        )

    @property
    def left_slope(self):
        s = self.slopes()
        return s[0] if s else 0.0

    @property
    def right_slope(self):
        s = self.slopes()
        return s[-1] if s else 0.0

    def __call__(self, x):
        x = float(x)
        xs, ys = self.xs, self.ys
        if x <= xs[0]:
            return ys[0] + self.left_slope * (x - xs[0])
        if x >= xs[-1]:
            return ys[-1] + self.right_slope * (x - xs[-1])
        import bisect

        i = bisect.bisect_right(xs, x)
        x0, x1 = xs[i - 1], xs[i]
        y0, y1 = ys[i - 1], ys[i]
        t = (x - x0) / (x1 - x0)
        return y0 + t * (y1 - y0)

    def is_convex(self, tol=1e-12):
        s = self.slopes()
        return all(b >= a - tol for a, b in zip(s, s[1:]))

    def is_strictly_increasing(self):
        s = self.slopes()
        return bool(s) and all(v > 0 for v in s) and self.left_slope > 0 and self.right_slope > 0

    def inverse(self, y):
        """Generalized inverse inf{x : f(x) >= y}; -inf / +inf encode out-of-range."""
        return generalized_inverse(self, y)

    def sup_distance(self, other: "MonotoneFunction"):
        """Exact sup-norm of f - g over the whole real line (PL difference)."""
        if abs(self.left_slope - other.left_slope) > 0:
            return math.inf
        if abs(self.right_slope - other.right_slope) > 0:
            return math.inf
        grid = sorted(set(self.xs) | set(other.xs))
        return max(abs(self(x) - other(x)) for x in grid)

    def describe(self):
        return {"breakpoints": [[x, y] for x, y in zip(self.xs, self.ys)]}

    def __repr__(self):
        pts = ", ".join(f"({x:g},{y:g})" for x, y in zip(self.xs, self.ys))
        return f"MonotoneFunction([{pts}])"


def generalized_inverse(f: MonotoneFunction, y) -> float:
    """inf{x in R : f(x) >= y} for a non-decreasing PL function.

    Returns -inf when the set is unbounded below (y at or below the limit of f
    at -infinity) and +inf when the set is empty (y above the supremum of f).
    """
    y = float(y)
    xs, ys = f.xs, f.ys
    ls, rs = f.left_slope, f.right_slope
    if ys[0] >= y:
        if ls > 0:
            return xs[0] + (y - ys[0]) / ls
        return -math.inf
    for i in range(1, len(xs)):
        if ys[i] >= y:
            slope = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])
            return xs[i - 1] + (y - ys[i - 1]) / slope
    if rs > 0:
        return xs[-1] + (y - ys[-1]) / rs
    return math.inf


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------


def _validate_metric(dist, backend):
    n = len(dist)
    for i in range(n):
        if float(dist[i][i]) != 0.0:
            raise ZeroOffDiagonal(f"diagonal entry ({i},{i}) must be zero", i=i, j=i)
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i][j] != dist[j][i] and not backend.eq(dist[i][j], dist[j][i]):
                raise AsymmetricMatrix(f"entries ({i},{j}) and ({j},{i}) differ", i=i, j=j)
            if dist[i][j] < 0:
                raise NegativeDistance(f"entry ({i},{j}) is negative", i=i, j=j)
            if backend.is_zero(dist[i][j]):
                raise ZeroOffDiagonal(
                    f"off-diagonal entry ({i},{j}) is zero (indistinguishable points)",
                    i=i,
                    j=j,
                )
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            for k in range(n):
                if k == i or k == j:
                    continue
                if backend.lt(dist[i][j] + dist[j][k], dist[i][k]):
                    raise TriangleViolation(i, j, k)


def from_distance_matrix(table, backend="rational", tau=None, labels=None) -> FiniteMetricSpace:
    """Build a validated finite metric space from a square distance table."""
    backend = as_length_backend(backend, tau)
    rows = check_square_matrix(table)
    n = len(rows)
    dist = []
    for i in range(n):
        row = []
        for j in range(n):
            v = backend.coerce(rows[i][j])
            if v < 0:
                raise NegativeDistance(f"entry ({i},{j}) is negative", i=i, j=j)
            row.append(v)
        dist.append(tuple(row))
    dist = tuple(dist)
    # exact zero diagonal regardless of backend
    for i in range(n):
        if float(dist[i][i]) != 0.0:
            raise ZeroOffDiagonal(f"diagonal entry ({i},{i}) must be zero", i=i, j=i)
    _validate_metric(dist, backend)
    if labels is None:
        labels = tuple(str(i) for i in range(n))
    return FiniteMetricSpace(dist, backend, tuple(labels))


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None if irrational."""
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _rational_coords(points):
    out = []
    for p in points:
        row = []
        for c in p:
            if isinstance(c, Fraction):
                row.append(c)
            elif isinstance(c, int):
                row.append(Fraction(c))
            elif isinstance(c, str):
                row.append(Fraction(c))
            else:
                row.append(Fraction(str(float(c))))
        out.append(tuple(row))
    return out


def _euclidean_rational_distance(p, q):
    s = sum((a - b) ** 2 for a, b in zip(p, q))
    return _rational_sqrt(s)


def from_point_cloud(cloud, backend="bucketed", tau=None) -> FiniteMetricSpace:
    """Finite metric space of pairwise Euclidean distances of a point cloud.

    The rational backend is permitted only when every pairwise distance is
    exactly rational (squared distances that are perfect squares); otherwise
    :class:`IrrationalDistanceInRationalBackend` directs the caller to the
    bucketed backend.
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(np.asarray(cloud, dtype=float))
    backend = as_length_backend(backend, tau)
    n = cloud.n
    if isinstance(backend, RationalLengths):
        coords = _rational_coords(cloud.points.tolist())
        dist = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                d = _euclidean_rational_distance(coords[i], coords[j])
                if d is None:
                    raise IrrationalDistanceInRationalBackend(
                        f"distance between points {i} and {j} is irrational; "
                        "use the bucketed backend",
                        i=i,
                        j=j,
                    )
                dist[i][j] = dist[j][i] = d
        table = tuple(tuple(row) for row in dist)
    else:
        diffs = cloud.points[:, None, :] - cloud.points[None, :, :]
        m = np.sqrt((diffs**2).sum(axis=2))
        table = tuple(tuple(float(v) for v in row) for row in m)
    _validate_metric(table, backend)
    labels = tuple(str(i) for i in range(n))
    return FiniteMetricSpace(table, backend, labels, euclidean=True)


# --------------------------------------------------------------------------
# balls, filtrations, isometries
# --------------------------------------------------------------------------


def _center_radii(source, center, backend):
    """Distances from every point to the chosen center, in backend arithmetic."""
    if isinstance(source, FiniteMetricSpace):
        if not isinstance(center, (int, np.integer)):
            raise TypeError("for an abstract metric space the center must be a point index")
        if not 0 <= center < source.n:
            raise ValueError(f"center index {center} out of range")
        return tuple(source.dist[int(center)]), f"point:{int(center)}"
    if isinstance(source, PointCloud):
        if isinstance(center, (int, np.integer)):
            z = source.points[int(center)]
        else:
            z = np.asarray(center, dtype=float).ravel()
            if z.shape[0] != source.dim:
                raise ValueError("center dimension does not match the cloud")
        if isinstance(backend, RationalLengths):
            coords = _rational_coords(source.points.tolist())
            zc = _rational_coords([list(z)])[0]
            radii = []
            for i, p in enumerate(coords):
                d = _euclidean_rational_distance(p, zc)
                if d is None:
                    raise IrrationalDistanceInRationalBackend(
                        f"distance from point {i} to the center is irrational; "
                        "use the bucketed backend",
                        i=i,
                    )
                radii.append(d)
            return tuple(radii), f"coords:{[float(v) for v in z]}"
        radii = np.sqrt(((source.points - z[None, :]) ** 2).sum(axis=1))
        return tuple(float(r) for r in radii), f"coords:{[float(v) for v in z]}"
    raise TypeError(f"unsupported source type {type(source)!r}")


def ball_neighborhood(source, center, radius, backend=None, tau=None):
    """Indices of points within ``radius`` of the center, boundary inclusive."""
    if isinstance(source, FiniteMetricSpace):
        be = source.lengths
    else:
        be = as_length_backend(backend or "bucketed", tau)
    radii, _ = _center_radii(source, center, be)
    r = be.coerce(radius)
    return tuple(i for i, d in enumerate(radii) if be.le(d, r))


@dataclass(frozen=True)
class Filtration:
    """Ball filtration of a finite metric space around a center.

    ``critical_radii`` are the sorted distinct distances to the center;
    ``params`` are the corresponding filtration parameter values (the radii
    themselves, or their images under the reparameterization).
    """

    space: FiniteMetricSpace
    center_radii: tuple
    critical_radii: tuple
    subsets: tuple
    params: tuple
    repar: Optional[MonotoneFunction] = None
    center_desc: str = ""
    point_entry: tuple = field(default=(), repr=False)

    @property
    def n_critical(self):
        return len(self.critical_radii)

    def entry_index(self, point):
        return self.point_entry[point]

    def space_at(self, index):
        """The subspace alive at critical step ``index``."""
        return self.space.subspace(self.subsets[index])

    def step_of_param(self, a):
        """Largest critical step with parameter value <= a, or -1 if none."""
        step = -1
        for i, p in enumerate(self.params):
            if p <= a:
                step = i
        return step

    def describe(self):
        d = {
            "center": self.center_desc,
            "n_points": self.space.n,
            "critical_radii": [float(r) for r in self.critical_radii],
            "params": [float(p) for p in self.params],
        }
        d.update(self.space.lengths.describe())
        if self.repar is not None:
            d["reparameterization"] = self.repar.describe()
        return d


def build_filtration(source, center, repar: Optional[MonotoneFunction] = None,
                     backend=None, tau=None) -> Filtration:
    """Ball filtration of ``source`` around ``center``.

    Every point appears at exactly one critical radius, its distance to the
    center.  With a reparameterization f the critical parameter values are
    f(r_i); without one they are the radii themselves.
    """
    if isinstance(source, FiniteMetricSpace):
        space = source
        be = source.lengths
    else:
        if not isinstance(source, PointCloud):
            source = PointCloud(np.asarray(source, dtype=float))
        be = as_length_backend(backend or "bucketed", tau)
        space = from_point_cloud(source, be)
    radii, center_desc = _center_radii(source, center, be)

    order = sorted(range(space.n), key=lambda i: float(radii[i]))
    critical = []
    point_entry = [0] * space.n
    for i in order:
        if critical and be.eq(radii[i], critical[-1]):
            point_entry[i] = len(critical) - 1
        else:
            critical.append(radii[i])
            point_entry[i] = len(critical) - 1
    subsets = []
    for step in range(len(critical)):
        subsets.append(tuple(i for i in range(space.n) if point_entry[i] <= step))

    if repar is not None:
        params = []
        for r in critical:
            v = repar(float(r))
            if v < 0:
                raise NonPositiveFunction(
                    f"reparameterization is negative at radius {float(r)}"
                )
            params.append(v)
        params = tuple(params)
    else:
        params = tuple(critical)
    return Filtration(
        space=space,
        center_radii=tuple(radii),
        critical_radii=tuple(critical),
        subsets=tuple(subsets),
        params=params,
        repar=repar,
        center_desc=center_desc,
        point_entry=tuple(point_entry),
    )


def apply_isometry(cloud: PointCloud, matrix, translation=None) -> PointCloud:
    """Apply an orthogonal transformation plus translation to a cloud.

    The matrix must satisfy Q^T Q = I within 1e-10; pairwise distances of the
    result are verified to match the original within 1e-10.
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud(np.asarray(cloud, dtype=float))
    Q = np.asarray(matrix, dtype=float)
    if Q.shape != (cloud.dim, cloud.dim):
        raise ValueError(f"matrix must be {cloud.dim}x{cloud.dim}")
    if np.max(np.abs(Q.T @ Q - np.eye(cloud.dim))) > 1e-10:
        raise NotOrthogonal("matrix is not orthogonal within 1e-10")
    t = np.zeros(cloud.dim) if translation is None else np.asarray(translation, dtype=float)
    moved = cloud.points @ Q.T + t
    before = np.sqrt(((cloud.points[:, None] - cloud.points[None, :]) ** 2).sum(axis=2))
    after = np.sqrt(((moved[:, None] - moved[None, :]) ** 2).sum(axis=2))
    if np.max(np.abs(before - after)) > 1e-10:
        raise NotOrthogonal("pairwise distances not preserved within 1e-10")
    return PointCloud(moved)
