"""Exact-comparable path-length arithmetic.

Path lengths must be compared for *exact* equality (chain groups are graded by
the precise total length), which floating point cannot deliver on its own.
Two interchangeable backends provide an equivalence relation on lengths:

* :class:`RationalLengths` stores lengths as :class:`fractions.Fraction`;
  equality and addition are exact.
* :class:`BucketedLengths` stores lengths as floats and declares two values
  equal when they fall in the same bucket of width ``tau``
  (``floor(value / tau)``), which is transitive by construction.  Sums are
  plain float sums and are re-bucketed on comparison.  Values straddling a
  bucket edge may split; callers choosing this backend accept that caveat.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "RationalLengths",
    "BucketedLengths",
    "as_length_backend",
]


class RationalLengths:
    """Exact rational lengths (numerator/denominator integers)."""

    kind = "rational"
    tau = None

    def coerce(self, value):
        """Convert user input to a Fraction; floats go through their decimal repr."""
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"length must be finite, got {value}")
            return Fraction(str(value))
        raise TypeError(f"cannot interpret {value!r} as a rational length")

    def key(self, value):
        return value

    def eq(self, a, b):
        return a == b

    def lt(self, a, b):
        return a < b

    def le(self, a, b):
        return a <= b

    def is_zero(self, value):
        return value == 0

    def zero(self):
        return Fraction(0)

    def describe(self):
        return {"backend": "rational"}

    def __repr__(self):
        return "RationalLengths()"

    def __eq__(self, other):
        return isinstance(other, RationalLengths)

    def __hash__(self):
        return hash("rational")


class BucketedLengths:
    """Float lengths with tolerance-bucketed equality of width ``tau``."""

    kind = "bucketed"

    def __init__(self, tau: float = 1e-9):
        if not (tau > 0):
            raise ValueError(f"bucket width tau must be positive, got {tau}")
        self.tau = float(tau)

    def coerce(self, value):
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(f"length must be finite, got {value}")
        return v

    def key(self, value):
        return math.floor(value / self.tau)

    def eq(self, a, b):
        return self.key(a) == self.key(b)

    def lt(self, a, b):
        # strictly smaller and not in the same bucket
        return a < b and not self.eq(a, b)

    def le(self, a, b):
        return not self.lt(b, a)

    def is_zero(self, value):
        return self.key(value) == 0

    def zero(self):
        return 0.0

    def describe(self):
        return {"backend": "bucketed", "tau": self.tau}

    def __repr__(self):
        return f"BucketedLengths(tau={self.tau!r})"

    def __eq__(self, other):
        return isinstance(other, BucketedLengths) and other.tau == self.tau

    def __hash__(self):
        return hash(("bucketed", self.tau))


def as_length_backend(backend, tau=None):
    """Normalize a backend spec: an instance, or 'rational' / 'bucketed' strings."""
    if isinstance(backend, (RationalLengths, BucketedLengths)):
        return backend
    if backend == "rational":
        return RationalLengths()
    if backend == "bucketed":
        return BucketedLengths(tau if tau is not None else 1e-9)
    raise ValueError(f"unknown length backend {backend!r}")
