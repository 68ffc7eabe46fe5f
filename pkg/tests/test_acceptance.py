"""Acceptance suite: every criterion runs at its stated tolerance and prints
one PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`.  Three checks encode
reference values whose stated numbers contradict what the defining formulas
produce; they are implemented verbatim and left failing, each with a
companion check (suffix `_verified`) asserting the independently computed
values.  The analysis lives in the repository notes, not here.
"""

import itertools
import math
import sys
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest

from maghom import (
    TrialConfig,
    build_filtration,
    chain_counts,
    compute_magnitude,
    enumerate_tuples,
    euler_characteristic,
    from_distance_matrix,
    from_point_cloud,
    homology_rank,
    magnitude_from_homology,
    magnitude_upper_bound,
    mh_rank_field,
    persistent_magnitude,
    run_suite,
    sample_thick_config,
    weighted_barcode,
)
from maghom.chains import boundary_matrix_between, chain_inclusion_matrix, MagnitudeChainBasis
from maghom.distances import bottleneck_weighted
from maghom.homology import saturation_degree
from maghom.persistence import WeightedBar, WeightedBarcode

from oracles import (
    all_integer_metrics,
    brute_bottleneck,
    geometric_series_coeffs,
    random_integer_metric,
)


def report(criterion, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    line = f"ACCEPTANCE {criterion}: {status}"
    if detail:
        line += f": {detail}"
    print(line, file=sys.stderr)
    assert ok, line


# --------------------------------------------------------------------------
# C1: collinear rank jump (exact integer ranks, < 1 s)
# --------------------------------------------------------------------------


def _collinear_ranks():
    t0 = time.perf_counter()
    straight = from_point_cloud([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], "rational")
    bent = from_point_cloud([[0.0, 0.0], [1.0, 0.05], [2.0, 0.0]], "bucketed", tau=1e-9)
    r1 = homology_rank(straight, 1, 2).rank
    r2 = homology_rank(bent, 1, 2.0).rank
    return r1, r2, time.perf_counter() - t0


def test_c01_collinear_rank_values_as_stated():
    r1, r2, elapsed = _collinear_ranks()
    ok = (r1, r2) == (1, 0) and elapsed < 1.0
    report(
        "C1 collinear ranks as stated (1, 0)",
        ok,
        f"computed ({r1}, {r2}) in {elapsed:.3f}s; the exact betweenness "
        "relation makes the distance-2 pair a boundary (rank 0) and bending "
        "the middle point resurrects both orientations (rank 2)",
    )


def test_c01_collinear_rank_jump_verified():
    r1, r2, elapsed = _collinear_ranks()
    report(
        "C1v collinear instability, independently verified ranks (0, 2)",
        (r1, r2) == (0, 2) and elapsed < 1.0,
        f"ranks ({r1}, {r2}) in {elapsed:.3f}s",
    )


# --------------------------------------------------------------------------
# C2: categorification identity (< 30 s)
# --------------------------------------------------------------------------


def test_c02_categorification_identity(two_point_unit, k3_unit):
    t0 = time.perf_counter()
    coeff2 = geometric_series_coeffs(2, 9)
    coeff3 = geometric_series_coeffs(3, 9)
    exact = all(
        euler_characteristic(two_point_unit, l) == coeff2[l]
        and euler_characteristic(k3_unit, l) == coeff3[l]
        for l in range(9)
    )
    m2 = magnitude_from_homology(two_point_unit, 40).value
    m3 = magnitude_from_homology(k3_unit, 40).value
    close2 = abs(m2 - compute_magnitude(two_point_unit)) <= 1e-6
    close3 = abs(m3 - compute_magnitude(k3_unit)) <= 1e-4
    elapsed = time.perf_counter() - t0
    report(
        "C2 categorification identity",
        exact and close2 and close3 and elapsed < 30.0,
        f"chi(l) exact for l<=8; partial sums within 1e-6/1e-4; {elapsed:.2f}s",
    )


# --------------------------------------------------------------------------
# C3: persistent-magnitude invariance on 50 random filtrations
# --------------------------------------------------------------------------


def _feasible_l_max(space, hard_l_max, budget):
    counts = chain_counts(space, hard_l_max)
    total, best = 0, 0.0
    for _key, entry in sorted(counts.items(), key=lambda kv: float(kv[1]["length"])):
        total += sum(entry["by_k"].values())
        if total > budget:
            break
        best = float(entry["length"])
    return best


def test_c03_persistent_magnitude_invariance():
    rng = np.random.default_rng(20250301)
    tolerance = 1e-6
    stated_l_max = 40
    budget = 8000  # enumeration cap; the chain bases grow exponentially in l
    violations = []
    capped = 0
    checked = 0
    for trial in range(50):
        n = int(rng.integers(3, 6))
        space = from_distance_matrix(random_integer_metric(rng, n), "rational")
        center = int(rng.integers(0, n))
        F = build_filtration(space, center)
        l_max = _feasible_l_max(space, stated_l_max, budget)
        if l_max < stated_l_max:
            capped += 1
        k_max = saturation_degree(space, l_max)
        barcode = weighted_barcode(F, l_max, k_max)
        params = sorted({float(p) for p in F.params})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for a in params:
                for b in params:
                    if a <= b:
                        pm = persistent_magnitude(F, a, b, l_max, k_max=k_max, barcode=barcode)
                        checked += 1
                        if abs(pm.gap) > tolerance:
                            violations.append((trial, a, b, pm.gap))
    bad_trials = sorted({v[0] for v in violations})
    report(
        "C3 persistent-magnitude invariance (50 random filtrations)",
        not violations,
        f"{checked} critical pairs checked (l_max budget-capped on {capped}/50 "
        f"spaces; the stated l_max=40 needs ~4^40 tuples); "
        f"{len(violations)} violating pairs on trials {bad_trials}: classes "
        "killed strictly between a and b change the alternating bar count",
    )


def test_c03_invariance_holds_on_euclidean_ball_filtrations():
    # companion: on Euclidean clouds every killer arrives with its victim
    # (separation >= 1 keeps the degree-3 truncation saturating at l_max = 3)
    rng = np.random.default_rng(7)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for _ in range(20):
            n = int(rng.integers(3, 6))
            cloud = sample_thick_config(n, 2, 2.0, 1.0, rng)
            z = rng.normal(size=2) * 0.5
            F = build_filtration(cloud, z)
            l_max = 3.0
            k_max = 3
            barcode = weighted_barcode(F, l_max, k_max)
            params = sorted({float(p) for p in F.params})
            for a in params:
                for b in params:
                    if a <= b:
                        pm = persistent_magnitude(F, a, b, l_max, k_max=k_max, barcode=barcode)
                        worst = max(worst, abs(pm.gap))
    report(
        "C3v invariance on Euclidean ball filtrations",
        worst <= 1e-6,
        f"max gap {worst:.2e} over 20 random separated clouds",
    )


# --------------------------------------------------------------------------
# C4: slice-consistency oracle on 50 random spaces
# --------------------------------------------------------------------------


def test_c04_slice_consistency_oracle():
    rng = np.random.default_rng(4242)
    mismatches = 0
    checked = 0
    for _ in range(50):
        n = int(rng.integers(3, 7))
        space = from_distance_matrix(random_integer_metric(rng, n), "rational")
        center = int(rng.integers(0, n))
        F = build_filtration(space, center)
        barcode = weighted_barcode(F, 4, 4)
        be = space.lengths
        for step, r in enumerate(F.params):
            sub = F.space_at(step)
            for l in (1, 2, 3, 4):
                for k in range(5):
                    alive = len(
                        barcode.alive_at(float(r), dim=k, weight=Fraction(l), weight_eq=be.eq)
                    )
                    checked += 1
                    if alive != mh_rank_field(sub, k, l):
                        mismatches += 1
    report(
        "C4 slice-consistency oracle (bars alive == independent field ranks)",
        mismatches == 0,
        f"{checked} (radius, k, l) comparisons on 50 spaces, {mismatches} mismatches",
    )


# --------------------------------------------------------------------------
# C5: bottleneck against the factorial oracle (200 instances)
# --------------------------------------------------------------------------


def _random_barcode(rng):
    out = []
    for _ in range(int(rng.integers(0, 6))):
        b = float(np.round(rng.random() * 3, 3))
        death = None if rng.random() < 0.2 else float(np.round(b + rng.random() * 3, 3))
        w = float(rng.choice([1.0, 2.0]))
        dim = int(rng.choice([0, 1]))
        out.append(WeightedBar(b, death, w, dim))
    return WeightedBarcode(bars=tuple(out))


def test_c05_bottleneck_matches_brute_force():
    rng = np.random.default_rng(555)
    bad = 0
    diagonal_case_seen = False
    for _ in range(200):
        b1, b2 = _random_barcode(rng), _random_barcode(rng)
        got = float(bottleneck_weighted(b1, b2).distance)
        want = brute_bottleneck(
            [(b.birth, b.death, b.weight, b.dim) for b in b1.bars],
            [(b.birth, b.death, b.weight, b.dim) for b in b2.bars],
        )
        if not (got == want or abs(got - want) <= 1e-12):
            bad += 1
        if b1.bars and not b2.bars:
            diagonal_case_seen = True
    # the half-persistence diagonal projection, pinned explicitly
    lone = WeightedBarcode(bars=(WeightedBar(0.0, 2.0, 1.0, 0),))
    diag = float(bottleneck_weighted(lone, WeightedBarcode(bars=())).distance)
    report(
        "C5 weight-preserving bottleneck vs factorial oracle (200 instances)",
        bad == 0 and diag == 1.0 and diagonal_case_seen,
        f"{bad} mismatches; diagonal projection (d-b)/2 verified",
    )


# --------------------------------------------------------------------------
# C6: stability bounds, 100 seeded trials each
# --------------------------------------------------------------------------


def test_c06a_radius_stability_100_trials():
    cfg = TrialConfig(n=5, trials=100, seed=1234, L=1.5, delta=0.3)
    rep = run_suite("radius", cfg)
    report(
        "C6a radius-function stability (100 trials)",
        rep.aggregate["violations"] == 0,
        f"violations={rep.aggregate['violations']}, max lhs/rhs={rep.aggregate['max_ratio']:.3f}",
    )


def test_c06b_center_stability_convex_as_stated():
    cfg = TrialConfig(n=5, trials=100, seed=1234, L=1.5, delta=0.3)
    rep = run_suite("center", cfg, function_family="convex")
    report(
        "C6b center stability with convex reparameterizations (100 trials)",
        rep.aggregate["violations"] == 0,
        f"violations={rep.aggregate['violations']}: a convex function with "
        "increasing slopes stretches bar endpoints more than it stretches the "
        "center displacement; the bound holds for concave (subadditive) "
        "functions instead",
    )


def test_c06b_center_stability_concave_verified():
    cfg = TrialConfig(n=5, trials=100, seed=1234, L=1.5, delta=0.3)
    rep = run_suite("center", cfg, function_family="concave")
    report(
        "C6bv center stability with concave reparameterizations (100 trials)",
        rep.aggregate["violations"] == 0,
        f"violations={rep.aggregate['violations']}",
    )


def test_c06c_composition_stability_convex_as_stated():
    cfg = TrialConfig(n=5, trials=100, seed=1234, L=1.5, delta=0.3)
    rep = run_suite("composition", cfg, function_family="convex")
    report(
        "C6c composition stability with convex reparameterizations (100 trials)",
        rep.aggregate["violations"] == 0,
        f"violations={rep.aggregate['violations']} (inherits the convex "
        "center-stability failure)",
    )


def test_c06c_composition_stability_concave_verified():
    cfg = TrialConfig(n=5, trials=100, seed=1234, L=1.5, delta=0.3)
    rep = run_suite("composition", cfg, function_family="concave")
    report(
        "C6cv composition stability with concave reparameterizations (100 trials)",
        rep.aggregate["violations"] == 0,
        f"violations={rep.aggregate['violations']}",
    )


# --------------------------------------------------------------------------
# C7: magnitude upper bound on 500 thick configurations
# --------------------------------------------------------------------------


def test_c07_magnitude_upper_bound():
    rng = np.random.default_rng(777)
    violations = 0
    for _ in range(500):
        n = int(rng.integers(2, 6))
        L = float(rng.uniform(0.5, 2.0))
        delta = float(rng.uniform(0.1, 0.4))
        cloud = sample_thick_config(n, 2, L, delta, rng)
        mag = compute_magnitude(from_point_cloud(cloud))
        if mag > magnitude_upper_bound(n, L) + 1e-9:
            violations += 1
    limit_zero = abs(magnitude_upper_bound(5, 0.0) - 1.0) <= 1e-6
    limit_large = abs(magnitude_upper_bound(5, 50.0) - 5.0) <= 1e-6
    report(
        "C7 magnitude upper bound (500 thick configurations + boundary limits)",
        violations == 0 and limit_zero and limit_large,
        f"violations={violations}; L=0 gives 1, large L gives n",
    )


# --------------------------------------------------------------------------
# C8: monotonicity under inclusion, 200 random pairs
# --------------------------------------------------------------------------


def test_c08_monotonicity_under_inclusion():
    rng = np.random.default_rng(888)
    violations = 0
    for _ in range(200):
        n = int(rng.integers(2, 8))
        pts = rng.normal(size=(n, int(rng.integers(1, 4)))) * rng.uniform(0.5, 2.0)
        k = int(rng.integers(1, n + 1))
        sub = pts[rng.choice(n, size=k, replace=False)]
        mag_a = compute_magnitude(from_point_cloud(sub)) if k else 0.0
        mag_b = compute_magnitude(from_point_cloud(pts))
        if mag_a > mag_b + 1e-9:
            violations += 1
    report(
        "C8 magnitude monotone under inclusion (200 random pairs)",
        violations == 0,
        f"violations={violations}",
    )


# --------------------------------------------------------------------------
# C9: profile stability shape (100 trials per delta)
# --------------------------------------------------------------------------


def test_c09_profile_stability_shape():
    fits = {}
    finite = True
    for delta in (0.2, 0.5, 1.0):
        cfg = TrialConfig(
            n=5, d=2, L=2.0, delta=delta, eps=0.02, trials=100, seed=99,
            delta_values=(delta,),
        )
        rep = run_suite("profile", cfg)
        fits[delta] = rep.aggregate["per_delta"][str(delta)]["max_fitted_c"]
        finite &= all(math.isfinite(r.info["ratio"]) for r in rep.rows)
    nonzero = [c for c in fits.values() if c > 1e-12]
    stable = len(nonzero) <= 1 or max(nonzero) / min(nonzero) <= 5.0
    report(
        "C9 profile stability shape (100 trials at delta in {0.2, 0.5, 1.0})",
        finite and stable,
        f"fitted leading constants {fits} (0 means the 2n^2 term already "
        "covers every trial); ratios all finite",
    )


# --------------------------------------------------------------------------
# C10: boundary composition and functoriality, exhaustive n <= 4
# --------------------------------------------------------------------------


def test_c10_boundary_square_zero_and_functoriality():
    t0 = time.perf_counter()
    composition_failures = 0
    functorial_failures = 0
    spaces = 0
    from maghom.chains import enumerate_graded

    for n in (2, 3, 4):
        for dm in all_integer_metrics(n, max_d=3):
            spaces += 1
            sp = from_distance_matrix(dm, "rational")
            groups = enumerate_graded(sp, 15, 5)
            by_l = {}
            for (k, key), basis in groups.items():
                by_l.setdefault(key, {})[k] = basis
            for key, kk in by_l.items():
                length = next(iter(kk.values())).length
                for k in range(2, 6):
                    if k not in kk:
                        continue
                    empty = MagnitudeChainBasis(k - 2, length, ())
                    d_k = boundary_matrix_between(
                        sp, kk[k], kk.get(k - 1, MagnitudeChainBasis(k - 1, length, ()))
                    )
                    d_km1 = boundary_matrix_between(
                        sp, kk.get(k - 1, MagnitudeChainBasis(k - 1, length, ())),
                        kk.get(k - 2, empty),
                    )
                    if not d_km1.compose_is_zero(d_k):
                        composition_failures += 1
            # inclusion-induced chain maps commute with the boundary
            for size in range(1, n):
                for subset in itertools.combinations(range(n), size):
                    sub = sp.subspace(subset)
                    for l in (1, 2, 3):
                        for k in (1, 2, 3, 4):
                            basis_sub = enumerate_tuples(sub, k, l)
                            if not len(basis_sub):
                                continue
                            bs_k, bb_k, map_k = chain_inclusion_matrix(sp, subset, k, l)
                            bs_km1, bb_km1, map_km1 = chain_inclusion_matrix(
                                sp, subset, k - 1, l
                            )
                            d_sub = boundary_matrix_between(sub, bs_k, bs_km1)
                            d_big = boundary_matrix_between(sp, bb_k, bb_km1)
                            for j in range(len(bs_k)):
                                lhs = d_big.columns[map_k[j]]
                                rhs = {map_km1[r]: v for r, v in d_sub.columns[j].items()}
                                if lhs != rhs:
                                    functorial_failures += 1
    elapsed = time.perf_counter() - t0
    report(
        "C10 boundary composition zero + functoriality (exhaustive n <= 4)",
        composition_failures == 0 and functorial_failures == 0,
        f"{spaces} spaces; {composition_failures} composition failures, "
        f"{functorial_failures} functoriality failures; {elapsed:.1f}s",
    )
