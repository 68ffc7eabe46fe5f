"""Exception hierarchy. Every domain error carries a stable machine-readable code."""


class MagError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_json_dict(self):
        return {"error": self.code, "message": str(self), "details": self.details}


class AsymmetricMatrix(MagError):
    code = "asymmetric_matrix"


class NegativeDistance(MagError):
    code = "negative_distance"


class ZeroOffDiagonal(MagError):
    code = "zero_off_diagonal"


class TriangleViolation(MagError):
    code = "triangle_violation"

    def __init__(self, i, j, k, message=None):
        message = message or (
            f"triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})"
        )
        super().__init__(message, i=i, j=j, k=k)
        self.i, self.j, self.k = i, j, k


class DuplicatePoint(MagError):
    code = "duplicate_point"


class IrrationalDistanceInRationalBackend(MagError):
    code = "irrational_distance_in_rational_backend"


class NonPositiveFunction(MagError):
    code = "non_positive_function"


class NotConvex(MagError):
    code = "not_convex"


class NotOrthogonal(MagError):
    code = "not_orthogonal"


class SingularSimilarityMatrix(MagError):
    code = "singular_similarity_matrix"


class IncommensurableLengths(MagError):
    code = "incommensurable_lengths"


class ZeroVector(MagError):
    code = "zero_vector"


class OverflowInExactArithmetic(MagError):
    """Raised only on resource exhaustion; Python integers do not overflow."""

    code = "overflow_in_exact_arithmetic"


class TruncationNotSaturated(MagError):
    code = "truncation_not_saturated"


class InvalidInterval(MagError):
    code = "invalid_interval"


class CardinalityMismatch(MagError):
    code = "cardinality_mismatch"


class ScaleMismatch(MagError):
    code = "scale_mismatch"


class SamplingExhausted(MagError):
    code = "sampling_exhausted"


class UsageError(MagError):
    code = "usage_error"
