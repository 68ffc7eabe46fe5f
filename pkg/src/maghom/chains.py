"""Path-tuple chain bases, boundary matrices and length-graded path counting.

Generators in degree k are (k+1)-tuples of point indices with no two
consecutive entries equal; the grading is the exact total length of the
tuple's consecutive steps.  The boundary operator omits interior points and
keeps only the faces whose total length is unchanged (omitting an endpoint
always shortens a tuple because off-diagonal distances are positive).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from .metric import FiniteMetricSpace

__all__ = [
    "PathTuple",
    "MagnitudeChainBasis",
    "BoundaryMatrix",
    "enumerate_tuples",
    "enumerate_graded",
    "boundary_matrix",
    "boundary_matrix_between",
    "chain_counts",
    "chain_inclusion_matrix",
]


@dataclass(frozen=True)
class PathTuple:
    """A nondegenerate tuple of point indices together with its total length."""

    points: Tuple[int, ...]
    length: object

    @property
    def degree(self):
        return len(self.points) - 1


@dataclass(frozen=True)
class MagnitudeChainBasis:
    """All degree-k tuples of total length exactly l, in lexicographic order."""

    k: int
    length: object
    tuples: Tuple[PathTuple, ...]

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def index_map(self):
        return {t.points: i for i, t in enumerate(self.tuples)}


def _tuple_length(space, points):
    total = space.lengths.zero()
    for a, b in zip(points, points[1:]):
        total = total + space.dist[a][b]
    return total


def enumerate_tuples(space: FiniteMetricSpace, k: int, l) -> MagnitudeChainBasis:
    """Depth-first enumeration of the degree-k basis at total length exactly l.

    Partial tuples are pruned as soon as their length exceeds l or the
    remaining steps cannot reach l (fewer than ``steps * min_positive_distance``
    missing).
    """
    be = space.lengths
    l = be.coerce(l)
    n = space.n
    if k < 0:
        raise ValueError("degree k must be >= 0")
    out: List[PathTuple] = []
    if k == 0:
        if be.is_zero(l):
            out = [PathTuple((x,), be.zero()) for x in range(n)]
        return MagnitudeChainBasis(k, l, tuple(out))
    min_d = space.min_positive_distance()
    if min_d is None:
        return MagnitudeChainBasis(k, l, ())
    dist = space.dist
    prefix = [0] * (k + 1)

    def extend(last, cur, steps_left):
        if steps_left == 0:
            if be.eq(cur, l):
                out.append(PathTuple(tuple(prefix), cur))
            return
        for y in range(n):
            if y == last:
                continue
            nl = cur + dist[last][y]
            if be.lt(l, nl + (steps_left - 1) * min_d):
                continue
            prefix[k + 1 - steps_left] = y
            extend(y, nl, steps_left - 1)

    for x in range(n):
        prefix[0] = x
        extend(x, be.zero(), k)
    return MagnitudeChainBasis(k, l, tuple(out))


def enumerate_graded(space: FiniteMetricSpace, l_max, k_max: int):
    """All tuples with degree <= k_max and length <= l_max, grouped by (k, length key).

    Returns a dict mapping (k, length_key) -> MagnitudeChainBasis; tuples in
    each basis are in lexicographic order.
    """
    be = space.lengths
    l_max = be.coerce(l_max)
    n = space.n
    groups: Dict[tuple, List[PathTuple]] = {}
    lengths_seen: Dict[tuple, object] = {}

    def record(points, cur):
        k = len(points) - 1
        key = (k, be.key(cur))
        if key not in groups:
            groups[key] = []
            lengths_seen[key] = cur
        groups[key].append(PathTuple(tuple(points), cur))

    dist = space.dist

    def extend(points, cur, depth):
        record(points, cur)
        if depth == k_max:
            return
        last = points[-1]
        for y in range(n):
            if y == last:
                continue
            nl = cur + dist[last][y]
            if be.lt(l_max, nl):
                continue
            points.append(y)
            extend(points, nl, depth + 1)
            points.pop()

    if be.le(be.zero(), l_max):
        for x in range(n):
            extend([x], be.zero(), 0)
    return {
        key: MagnitudeChainBasis(key[0], lengths_seen[key], tuple(tuples))
        for key, tuples in groups.items()
    }


@dataclass(frozen=True)
class BoundaryMatrix:
    """Sparse integer matrix of the boundary operator between two chain bases.

    ``columns[j]`` maps row indices to coefficients for the j-th domain tuple.
    """

    domain: MagnitudeChainBasis
    codomain: MagnitudeChainBasis
    columns: Tuple[dict, ...]

    @property
    def shape(self):
        return (len(self.codomain), len(self.domain))

    def to_dense(self):
        rows, cols = self.shape
        M = [[0] * cols for _ in range(rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                M[i][j] = v
        return M

    def compose_is_zero(self, other: "BoundaryMatrix") -> bool:
        """True when self . other == 0 (self applied after other)."""
        ridx = {}
        for j, col in enumerate(other.columns):
            acc = {}
            for i, v in col.items():
                for r, w in self.columns[i].items():
                    acc[r] = acc.get(r, 0) + v * w
            if any(x != 0 for x in acc.values()):
                ridx[j] = acc
        return not ridx


def _face_columns(space, domain: MagnitudeChainBasis, codomain: MagnitudeChainBasis):
    be = space.lengths
    dist = space.dist
    row_of = codomain.index_map()
    k = domain.k
    cols = []
    for t in domain.tuples:
        pts = t.points
        col: Dict[int, int] = {}
        for i in range(1, k):
            a, b, c = pts[i - 1], pts[i], pts[i + 1]
            if a == c:
                # omission would duplicate a point; length also cannot be
                # preserved since d(a,b) + d(b,a) > 0 = d(a,a)
                continue
            if be.eq(dist[a][b] + dist[b][c], dist[a][c]):
                face = pts[:i] + pts[i + 1 :]
                r = row_of.get(face)
                if r is None:
                    raise RuntimeError("length-preserving face missing from codomain basis")
                col[r] = col.get(r, 0) + (-1) ** i
        cols.append({r: v for r, v in col.items() if v != 0})
    return tuple(cols)


def boundary_matrix(space: FiniteMetricSpace, k: int, l) -> BoundaryMatrix:
    """Boundary operator from the degree-k basis at length l to degree k-1."""
    if k < 1:
        raise ValueError("boundary_matrix needs k >= 1")
    domain = enumerate_tuples(space, k, l)
    codomain = enumerate_tuples(space, k - 1, l)
    return boundary_matrix_between(space, domain, codomain)


def boundary_matrix_between(space, domain, codomain) -> BoundaryMatrix:
    """Boundary matrix for pre-enumerated bases (must share the same length)."""
    return BoundaryMatrix(domain, codomain, _face_columns(space, domain, codomain))


def chain_counts(space: FiniteMetricSpace, l_max):
    """Number of degree-k tuples at every realized length <= l_max, without
    enumerating the tuples individually.

    Dynamic programming over (endpoint, accumulated length); returns a dict
    mapping length keys to ``{"length": value, "by_k": {k: count}}``.
    """
    be = space.lengths
    l_max = be.coerce(l_max)
    n = space.n
    out: Dict[object, dict] = {}

    def bucket(lval):
        key = be.key(lval)
        if key not in out:
            out[key] = {"length": lval, "by_k": {}}
        return out[key]["by_k"]

    if be.lt(l_max, be.zero()):
        return out
    # states: {(endpoint, length_key): [count, representative_length]}
    states = {(x, be.key(be.zero())): [1, be.zero()] for x in range(n)}
    b = bucket(be.zero())
    b[0] = n
    k = 0
    dist = space.dist
    while states:
        k += 1
        nxt: Dict[tuple, list] = {}
        for (x, _lk), (cnt, lval) in states.items():
            for y in range(n):
                if y == x:
                    continue
                nl = lval + dist[x][y]
                if be.lt(l_max, nl):
                    continue
                key = (y, be.key(nl))
                if key in nxt:
                    nxt[key][0] += cnt
                else:
                    nxt[key] = [cnt, nl]
        states = nxt
        for (_y, lk), (cnt, lval) in states.items():
            by_k = bucket(lval)
            by_k[k] = by_k.get(k, 0) + cnt
    return out


def chain_inclusion_matrix(space_big: FiniteMetricSpace, sub_indices, k: int, l):
    """Matrix of the chain map induced by the inclusion of a subspace.

    Returns (basis_sub, basis_big, columns) where columns[j] is the row index
    of the image of the j-th subspace tuple.  The map relabels indices and is
    injective.
    """
    sub_indices = tuple(sub_indices)
    sub = space_big.subspace(sub_indices)
    basis_sub = enumerate_tuples(sub, k, l)
    basis_big = enumerate_tuples(space_big, k, l)
    row_of = basis_big.index_map()
    cols = []
    for t in basis_sub.tuples:
        image = tuple(sub_indices[i] for i in t.points)
        r = row_of.get(image)
        if r is None:
            raise RuntimeError("inclusion image missing from ambient basis")
        cols.append(r)
    return basis_sub, basis_big, tuple(cols)
