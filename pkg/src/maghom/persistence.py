"""Filtered chain complexes over the ball radius, weighted barcodes and
persistent invariants.

Fixing a homological degree k and a length grade l, the subspaces of a ball
filtration give a persistence module of homology groups; its barcode is
computed by standard column reduction over a field (rationals by default, a
prime field optionally).  Every generator of the slice complex is stamped
with the critical step at which all of its points exist; restricting to
generators with entry step <= r reproduces the chain basis of the subspace at
radius r exactly.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .chains import MagnitudeChainBasis, boundary_matrix_between, chain_counts, enumerate_graded
from .exceptions import InvalidInterval, TruncationNotSaturated
from .homology import homology_rank, magnitude_from_homology, mh_rank_field, saturation_degree
from .metric import Filtration

__all__ = [
    "WeightedBar",
    "WeightedBarcode",
    "FilteredSliceComplex",
    "filtered_slice",
    "reduce_slice",
    "weighted_barcode",
    "persistent_betti",
    "PersistentMagnitude",
    "persistent_magnitude",
]


@dataclass(frozen=True)
class WeightedBar:
    """A bar (birth, death, weight, dim); death None encodes +infinity."""

    birth: object
    death: object
    weight: object
    dim: int

    @property
    def infinite(self):
        return self.death is None

    def death_value(self):
        return math.inf if self.death is None else float(self.death)

    def persistence(self):
        return self.death_value() - float(self.birth)

    def sort_key(self):
        return (self.dim, float(self.weight), float(self.birth), self.death_value())


@dataclass(frozen=True)
class WeightedBarcode:
    """Multiset of weighted bars plus bookkeeping about the filtration."""

    bars: tuple
    dropped_zero_bars: int = 0
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.bars)

    def sorted_bars(self):
        return tuple(sorted(self.bars, key=WeightedBar.sort_key))

    def bars_at(self, dim=None, weight=None, weight_eq=None):
        out = []
        for b in self.bars:
            if dim is not None and b.dim != dim:
                continue
            if weight is not None:
                same = weight_eq(b.weight, weight) if weight_eq else b.weight == weight
                if not same:
                    continue
            out.append(b)
        return tuple(out)

    def alive_at(self, value, dim=None, weight=None, weight_eq=None):
        """Bars with birth <= value < death."""
        out = []
        for b in self.bars_at(dim=dim, weight=weight, weight_eq=weight_eq):
            if float(b.birth) <= float(value) < b.death_value():
                out.append(b)
        return tuple(out)


@dataclass(frozen=True)
class FilteredSliceComplex:
    """Slice (k, l) of a filtered chain complex.

    ``basis`` is in lexicographic order; ``entry_steps`` aligns with it and
    stores, for each tuple, the index of the critical radius at which all its
    points exist.  Boundary matrices are identical to the unfiltered ones.
    """

    filtration: Filtration
    k: int
    length: object
    basis: MagnitudeChainBasis
    entry_steps: tuple
    basis_below: MagnitudeChainBasis
    entry_steps_below: tuple
    basis_above: MagnitudeChainBasis
    entry_steps_above: tuple
    boundary_down: object
    boundary_up: object

    def restrict_tuples(self, step):
        """Tuples alive at critical step ``step`` (entry step <= step)."""
        return tuple(
            t for t, s in zip(self.basis.tuples, self.entry_steps) if s <= step
        )


def _entry_steps(filtration, basis):
    pe = filtration.point_entry
    return tuple(max(pe[p] for p in t.points) for t in basis.tuples)


def filtered_slice(filtration: Filtration, k: int, l) -> FilteredSliceComplex:
    """Build the (k, l) slice with entry stamps and its two boundary maps."""
    space = filtration.space
    be = space.lengths
    l = be.coerce(l)
    groups = enumerate_graded(space, l, k + 1)
    key = be.key(l)
    empty = MagnitudeChainBasis(k, l, ())
    basis = groups.get((k, key), empty)
    below = groups.get((k - 1, key), MagnitudeChainBasis(k - 1, l, ())) if k >= 1 else MagnitudeChainBasis(-1, l, ())
    above = groups.get((k + 1, key), MagnitudeChainBasis(k + 1, l, ()))
    return _slice_from_bases(filtration, k, l, basis, below, above)


def _slice_from_bases(filtration, k, l, basis, below, above):
    space = filtration.space
    down = boundary_matrix_between(space, basis, below) if k >= 1 else None
    up = boundary_matrix_between(space, above, basis)
    return FilteredSliceComplex(
        filtration=filtration,
        k=k,
        length=l,
        basis=basis,
        entry_steps=_entry_steps(filtration, basis),
        basis_below=below,
        entry_steps_below=_entry_steps(filtration, below),
        basis_above=above,
        entry_steps_above=_entry_steps(filtration, above),
        boundary_down=down,
        boundary_up=up,
    )


def _persistence_order(basis, entry_steps):
    """Column order for reduction: (entry step, lexicographic tuple)."""
    idx = sorted(range(len(basis)), key=lambda i: (entry_steps[i], basis.tuples[i].points))
    return idx


def _reduce_columns(columns, prime):
    """Left-to-right column reduction; returns (pivots {low: col}, zero_cols set)."""
    pivots = {}
    reduced = []
    zero_cols = set()
    for j, col in enumerate(columns):
        if prime is None:
            work = {r: Fraction(v) for r, v in col.items()}
        else:
            work = {r: v % prime for r, v in col.items() if v % prime}
        while work:
            low = max(work)
            if low not in pivots:
                pivots[low] = j
                break
            pcol = reduced[pivots[low]]
            if prime is None:
                factor = work[low] / pcol[low]
                for r, v in pcol.items():
                    nv = work.get(r, Fraction(0)) - factor * v
                    if nv:
                        work[r] = nv
                    else:
                        work.pop(r, None)
            else:
                factor = (work[low] * pow(pcol[low], -1, prime)) % prime
                for r, v in pcol.items():
                    nv = (work.get(r, 0) - factor * v) % prime
                    if nv:
                        work[r] = nv
                    else:
                        work.pop(r, None)
        reduced.append(work)
        if not work:
            zero_cols.add(j)
    return pivots, zero_cols


def reduce_slice(slice_complex: FilteredSliceComplex, prime=None):
    """Persistence bars of one (k, l) slice, zero-persistence bars dropped.

    Returns (bars, dropped_count).  Bar endpoints are filtration parameter
    values; classes alive at the saturation radius never die.
    """
    C = slice_complex
    F = C.filtration
    params = F.params
    k = C.k
    n_k = len(C.basis)
    if n_k == 0:
        return [], 0

    order_k = _persistence_order(C.basis, C.entry_steps)
    pos_in_order = {orig: i for i, orig in enumerate(order_k)}

    # positivity of degree-k generators from the reduction of d_k
    if k == 0 or len(C.basis_below) == 0:
        positive = set(range(n_k))
    else:
        order_below = _persistence_order(C.basis_below, C.entry_steps_below)
        row_rank_below = {orig: i for i, orig in enumerate(order_below)}
        cols = []
        for orig_j in order_k:
            col = C.boundary_down.columns[orig_j]
            cols.append({row_rank_below[r]: v for r, v in col.items()})
        _pivots, zero_cols = _reduce_columns(cols, prime)
        positive = {order_k[j] for j in zero_cols}

    # deaths from the reduction of d_{k+1}
    deaths = {}
    if len(C.basis_above):
        order_above = _persistence_order(C.basis_above, C.entry_steps_above)
        cols = []
        for orig_j in order_above:
            col = C.boundary_up.columns[orig_j]
            cols.append({pos_in_order[r]: v for r, v in col.items()})
        pivots, _zero = _reduce_columns(cols, prime)
        for low_rank, j_rank in pivots.items():
            victim = order_k[low_rank]
            killer = order_above[j_rank]
            if victim not in positive:
                raise RuntimeError("pairing hit a non-cycle generator; reduction bug")
            deaths[victim] = C.entry_steps_above[killer]

    bars = []
    dropped = 0
    for orig in range(n_k):
        if orig not in positive:
            continue
        birth_step = C.entry_steps[orig]
        if orig in deaths:
            death_step = deaths[orig]
            birth_v, death_v = params[birth_step], params[death_step]
            if death_step == birth_step or death_v == birth_v:
                dropped += 1
                continue
            bars.append(WeightedBar(birth_v, death_v, C.length, k))
        else:
            bars.append(WeightedBar(params[birth_step], None, C.length, k))
    return bars, dropped


def weighted_barcode(filtration: Filtration, l_max, k_max: int, prime=None,
                     threads=None, torsion_check=False) -> WeightedBarcode:
    """Union of slice barcodes over all realized lengths l <= l_max and
    degrees k <= k_max.

    Deaths of degree-k bars are determined by degree k+1 generators, which are
    enumerated internally; ``k_max`` only truncates the reported dimensions.
    """
    space = filtration.space
    be = space.lengths
    l_max = be.coerce(l_max)
    groups = enumerate_graded(space, l_max, k_max + 1)
    slices = []
    for (k, key), basis in sorted(
        groups.items(), key=lambda kv: (kv[0][0], float(kv[1].length))
    ):
        if k > k_max:
            continue
        below = (
            groups.get((k - 1, key), MagnitudeChainBasis(k - 1, basis.length, ()))
            if k >= 1
            else MagnitudeChainBasis(-1, basis.length, ())
        )
        above = groups.get((k + 1, key), MagnitudeChainBasis(k + 1, basis.length, ()))
        slices.append(_slice_from_bases(filtration, k, basis.length, basis, below, above))

    def run(sl):
        return reduce_slice(sl, prime)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, slices))
    else:
        results = [run(sl) for sl in slices]

    bars = []
    dropped = 0
    for sl_bars, sl_dropped in results:
        bars.extend(sl_bars)
        dropped += sl_dropped

    if torsion_check:
        for sl in slices:
            hr = homology_rank(space, sl.k, sl.length)
            fr = mh_rank_field(space, sl.k, sl.length, prime)
            if hr.torsion or hr.rank != fr:
                warnings.warn(
                    f"torsion detected at (k={sl.k}, l={float(sl.length)}): "
                    f"integer rank {hr.rank} (divisors {hr.torsion}) vs field rank {fr}",
                    stacklevel=2,
                )

    meta = {
        "filtration": filtration.describe(),
        "l_max": float(l_max),
        "k_max": k_max,
        "coefficients": "rational" if prime is None else f"Z/{prime}",
    }
    return WeightedBarcode(
        bars=tuple(sorted(bars, key=WeightedBar.sort_key)),
        dropped_zero_bars=dropped,
        metadata=meta,
    )


def persistent_betti(filtration: Filtration, k: int, l, a, b, prime=None) -> int:
    """Number of independent classes at (k, l) born by parameter a and still
    alive strictly beyond parameter b."""
    if a > b:
        raise InvalidInterval(f"need a <= b, got a={a}, b={b}")
    sl = filtered_slice(filtration, k, l)
    bars, _ = reduce_slice(sl, prime)
    count = 0
    for bar in bars:
        if float(bar.birth) <= float(a) and bar.death_value() > float(b):
            count += 1
    return count


@dataclass(frozen=True)
class PersistentMagnitude:
    """Alternating bar-count sum, with the subspace magnitude it should match."""

    value: float
    reference: float
    by_length: dict
    subset: tuple

    @property
    def gap(self):
        return self.value - self.reference


def persistent_magnitude(filtration: Filtration, a, b, l_max, k_max=None,
                         prime=None, tolerance=1e-6,
                         barcode: WeightedBarcode = None) -> PersistentMagnitude:
    """Sum over lengths of exp(-l) times the alternating persistent Betti sum.

    Also computes the magnitude partial sum of the subspace alive at a (same
    l_max) and warns when the two disagree beyond ``tolerance``.  A precomputed
    ``barcode`` (same filtration, l_max covering, k_max saturating the
    subspace at a) avoids re-reducing when sweeping many intervals.
    """
    if a > b:
        raise InvalidInterval(f"need a <= b, got a={a}, b={b}")
    space = filtration.space
    be = space.lengths
    l_max = be.coerce(l_max)
    step = filtration.step_of_param(a)
    subset = filtration.subsets[step] if step >= 0 else ()
    sub = space.subspace(subset) if subset else None

    if sub is not None and sub.n:
        needed = saturation_degree(sub, l_max)
        if k_max is None:
            k_max = needed
        else:
            counts = chain_counts(sub, l_max)
            top = max((max(e["by_k"]) for e in counts.values()), default=0)
            if top > k_max:
                raise TruncationNotSaturated(
                    f"subspace at a={a} has chains of degree {top} > k_max={k_max}",
                    k_max=k_max,
                )
    elif k_max is None:
        k_max = 0

    if barcode is None:
        barcode = weighted_barcode(filtration, l_max, k_max, prime=prime)
    by_length = {}
    for bar in barcode.bars:
        if float(bar.birth) <= float(a) and bar.death_value() > float(b):
            key = be.key(bar.weight)
            if key not in by_length:
                by_length[key] = {"length": bar.weight, "chi": 0}
            by_length[key]["chi"] += (-1) ** bar.dim
    value = float(
        sum(e["chi"] * math.exp(-float(e["length"])) for e in by_length.values())
    )
    reference = magnitude_from_homology(sub, l_max).value if sub is not None and sub.n else 0.0
    result = PersistentMagnitude(
        value=value,
        reference=float(reference),
        by_length={e["length"]: e["chi"] for e in by_length.values()},
        subset=tuple(subset),
    )
    if abs(result.gap) > tolerance:
        warnings.warn(
            f"persistent magnitude {value} deviates from subspace magnitude "
            f"{reference} by {result.gap:+.3e} (interval a={a}, b={b})",
            stacklevel=2,
        )
    return result
