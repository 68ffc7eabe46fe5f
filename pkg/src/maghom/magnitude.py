"""Numerical magnitude via linear solves, plus the exact power-series oracle.

The magnitude of a finite metric space is ``1^T Z^{-1} 1`` for the similarity
matrix ``Z_ij = exp(-d(x_i, x_j))``.  It is computed by solving ``Z w = 1``
(never by explicit inversion); ``w`` is the weighting and the magnitude is its
sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
import scipy.linalg

from .chains import chain_counts
from .exceptions import IncommensurableLengths, SingularSimilarityMatrix, ZeroVector
from .lengths import RationalLengths
from .metric import FiniteMetricSpace
from .validation import check_nonempty_vector

__all__ = [
    "Weighting",
    "MagnitudeSeries",
    "similarity_matrix",
    "compute_magnitude",
    "compute_weighting",
    "magnitude_upper_bound",
    "magnitude_series",
    "variational_lower_bound_check",
    "euclidean_ball_reference_bound",
]

CONDITION_LIMIT = 1e14
RESIDUAL_LIMIT = 1e-10


@dataclass(frozen=True)
class Weighting:
    """Solution w of Z w = 1; the magnitude is w.sum()."""

    values: np.ndarray
    residual: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def magnitude(self):
        return float(self.values.sum())


def similarity_matrix(space: FiniteMetricSpace) -> np.ndarray:
    """Z_ij = exp(-d_ij): symmetric, unit diagonal, entries in (0, 1]."""
    D = space.as_float_matrix()
    return np.exp(-D)


def _solve_weighting(space: FiniteMetricSpace) -> Weighting:
    Z = similarity_matrix(space)
    n = space.n
    cond = np.linalg.cond(Z)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularSimilarityMatrix(
            f"similarity matrix is numerically singular (condition {cond:.3e})",
            condition=float(cond),
        )
    ones = np.ones(n)
    try:
        w = scipy.linalg.solve(Z, ones, assume_a="sym")
    except np.linalg.LinAlgError:
        w = np.linalg.solve(Z, ones)
    residual = float(np.max(np.abs(Z @ w - ones)))
    if residual > RESIDUAL_LIMIT * max(1.0, float(np.max(np.abs(w)))):
        raise SingularSimilarityMatrix(
            f"weighting residual {residual:.3e} exceeds tolerance", residual=residual
        )
    return Weighting(w, residual)


def compute_weighting(space: FiniteMetricSpace) -> Weighting:
    """The weighting vector w with Z w = all-ones."""
    return _solve_weighting(space)


def compute_magnitude(space: FiniteMetricSpace) -> float:
    """Magnitude of the space; for Euclidean inputs asserts 1 <= Mag <= n."""
    w = _solve_weighting(space)
    mag = w.magnitude
    if space.euclidean:
        if not (1.0 - 1e-9 <= mag <= space.n + 1e-9):
            raise SingularSimilarityMatrix(
                f"Euclidean magnitude {mag} escaped [1, n]; matrix unreliable",
                magnitude=mag,
            )
    return mag


def magnitude_upper_bound(n: int, L: float) -> float:
    """Upper bound n / (1 + (n-1) exp(-2L)) for n points inside a radius-L ball."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if L < 0:
        raise ValueError("L must be >= 0")
    return n / (1.0 + (n - 1) * math.exp(-2.0 * L))


def euclidean_ball_reference_bound(L: float, dim: int) -> float:
    """Reference-only ball bounds for dim 2 and 3; reported, not certified."""
    if dim == 2:
        return 1.0 + 2.0 * L + 0.5 * L * L
    if dim == 3:
        return 1.0 + 3.0 * L + 1.5 * L * L + L**3 / 6.0
    raise ValueError("reference bounds available for dim 2 and 3 only")


@dataclass(frozen=True)
class MagnitudeSeries:
    """Exact coefficients of the magnitude power series in q, graded by length.

    ``coefficients`` maps each realized rational length l <= l_max to the
    integer coefficient of q**l in 1^T Z(q)^{-1} 1, where off-diagonal entries
    of Z(q) are q**d(i,j).  The constant coefficient equals the point count.
    """

    unit: Fraction
    l_max: Fraction
    coefficients: dict

    def coefficient(self, l) -> int:
        l = Fraction(l)
        return self.coefficients.get(l, 0)

    def lengths(self):
        return sorted(self.coefficients)

    def evaluate_exp(self) -> float:
        """Partial sum at q = exp(-1), i.e. sum of c_l * exp(-l)."""
        return float(sum(c * math.exp(-float(l)) for l, c in self.coefficients.items()))


def magnitude_series(space: FiniteMetricSpace, l_max) -> MagnitudeSeries:
    """Exact truncated expansion of 1^T Z(q)^{-1} 1 for commensurable lengths.

    The alternating Neumann expansion of (I + N)^{-1} collects, at q**l, the
    signed count of nondegenerate paths of total length exactly l; the
    coefficients are therefore exact integers, computed by length-graded path
    counting.  Only the rational backend guarantees commensurability.
    """
    if not isinstance(space.lengths, RationalLengths):
        raise IncommensurableLengths(
            "exact series requires the rational backend (commensurable lengths)"
        )
    l_max = Fraction(l_max)
    counts = chain_counts(space, l_max)
    coeffs = {}
    for _key, entry in counts.items():
        l = entry["length"]
        chi = sum((-1) ** k * c for k, c in entry["by_k"].items())
        coeffs[l] = chi
    dists = [
        space.dist[i][j]
        for i in range(space.n)
        for j in range(i + 1, space.n)
    ]
    unit = reduce(_fraction_gcd, dists) if dists else Fraction(1)
    return MagnitudeSeries(unit=unit, l_max=l_max, coefficients=coeffs)


def _fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(
        math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
        a.denominator * b.denominator,
    )


def variational_lower_bound_check(space: FiniteMetricSpace, u) -> float:
    """(sum u)^2 / (u^T Z u); never exceeds the magnitude when Z is positive
    definite (Euclidean-derived spaces), which is asserted.
    """
    u = check_nonempty_vector(u, name="u")
    if u.shape[0] != space.n:
        raise ValueError(f"u must have length {space.n}")
    if np.all(u == 0):
        raise ZeroVector("u must be nonzero")
    Z = similarity_matrix(space)
    denom = float(u @ Z @ u)
    value = float(u.sum()) ** 2 / denom
    if space.euclidean:
        mag = compute_magnitude(space)
        if value > mag + 1e-9:
            raise AssertionError(
                f"variational value {value} exceeds magnitude {mag} on a Euclidean space"
            )
    return value
