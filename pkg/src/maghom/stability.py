"""Randomized experiment driver for the stability bounds.

Exact-bound trials (radius / center / composition) compute both sides of the
inequality and count violations; unknown-constant trials (magnitude
difference, profile) fit the constant empirically and report it, never
asserting a particular value.  Everything is deterministic under a fixed
seed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, asdict

import numpy as np

from .distances import bottleneck_weighted, magnitude_profile, profile_l1_distance, wasserstein_inf
from .exceptions import NotConvex, SamplingExhausted
from .homology import homology_rank
from .magnitude import compute_magnitude, magnitude_upper_bound
from .metric import MonotoneFunction, PointCloud, build_filtration, from_point_cloud
from .persistence import weighted_barcode

__all__ = [
    "TrialConfig",
    "TrialRow",
    "TrialReport",
    "sample_thick_config",
    "random_monotone_pl",
    "random_convex_pl",
    "random_concave_pl",
    "perturb_within",
    "trial_radius_stability",
    "trial_center_stability",
    "trial_composition_stability",
    "trial_difference_bound",
    "trial_profile_stability",
    "run_suite",
    "collinear_instability_example",
    "SUITES",
]

VIOLATION_SLACK = 1e-9  # numerical slack when deciding violations of exact bounds


@dataclass
class TrialConfig:
    """Knobs for the randomized suites; a fixed seed makes runs reproducible."""

    n: int = 4
    d: int = 2
    L: float = 1.5
    delta: float = 0.3
    eps: float = 0.05
    eps_values: tuple = (1e-2, 1e-3, 1e-4)
    delta_values: tuple = (0.2, 0.5, 1.0)
    trials: int = 100
    seed: int = 0
    tau: float = 1e-9
    l_max: float | None = None
    k_max: int = 2
    max_attempts: int = 20000

    def to_dict(self):
        d = asdict(self)
        d["eps_values"] = list(self.eps_values)
        d["delta_values"] = list(self.delta_values)
        return d


@dataclass(frozen=True)
class TrialRow:
    index: int
    lhs: float
    rhs: float | None
    margin: float | None
    info: dict = field(default_factory=dict)


@dataclass
class TrialReport:
    suite: str
    rows: list
    aggregate: dict
    config: dict

    def violations(self):
        return self.aggregate.get("violations")

    def to_json_dict(self):
        return {
            "suite": self.suite,
            "config": self.config,
            "aggregate": self.aggregate,
            "trials": [
                {
                    "index": r.index,
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "margin": r.margin,
                    **{k: v for k, v in r.info.items()},
                }
                for r in self.rows
            ],
        }

    def rows_to_csv(self):
        buf = io.StringIO()
        keys = sorted({k for r in self.rows for k in r.info})
        writer = csv.writer(buf)
        writer.writerow(["index", "lhs", "rhs", "margin", *keys])
        for r in self.rows:
            writer.writerow(
                [r.index, r.lhs, r.rhs, r.margin, *[r.info.get(k, "") for k in keys]]
            )
        return buf.getvalue()


# --------------------------------------------------------------------------
# samplers
# --------------------------------------------------------------------------


def _uniform_ball(rng, n, d, radius):
    g = rng.normal(size=(n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / d)
    return g * r[:, None]


def sample_thick_config(n, d, L, delta, rng, max_attempts=20000) -> PointCloud:
    """n points pairwise >= delta apart, inside the radius-L ball, barycentered.

    Rejection sampling; raises :class:`SamplingExhausted` when the attempt cap
    is reached (packing feasibility is not certified).
    """
    if n == 1:
        return PointCloud(np.zeros((1, d)), barycentered=True)
    for _ in range(max_attempts):
        pts = _uniform_ball(rng, n, d, L)
        pts = pts - pts.mean(axis=0)
        if np.max(np.sqrt((pts**2).sum(axis=1))) > L:
            continue
        dist = np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(axis=2))
        off = dist[np.triu_indices(n, k=1)]
        if np.min(off) >= delta:
            return PointCloud(pts, barycentered=True)
    raise SamplingExhausted(
        f"could not sample {n} points with separation {delta} in a ball of radius {L}",
        n=n,
        delta=delta,
        L=L,
    )


def perturb_within(cloud: PointCloud, eps, delta, rng, max_attempts=20000,
                   recentre=True) -> PointCloud:
    """Displace each point by at most eps while keeping the separation >= delta."""
    pts = cloud.points
    n, d = pts.shape
    for _ in range(max_attempts):
        noise = _uniform_ball(rng, n, d, eps)
        moved = pts + noise
        if recentre:
            moved = moved - moved.mean(axis=0)
        dist = np.sqrt(((moved[:, None] - moved[None, :]) ** 2).sum(axis=2))
        off = dist[np.triu_indices(n, k=1)]
        if np.min(off) >= delta:
            return PointCloud(moved, barycentered=recentre)
    raise SamplingExhausted(
        f"could not perturb cloud by {eps} keeping separation {delta}",
        eps=eps,
        delta=delta,
    )


def _shared_grid(rng, x_max, n_breaks):
    xs = np.sort(rng.random(n_breaks - 1)) * x_max
    return np.concatenate([[0.0], xs])


def random_monotone_pl(rng, x_max, n_breaks=5, y_scale=1.0, flat_ends=True):
    """Random non-decreasing PL function with flat boundary segments, so that
    sup-norm distances between two such functions are finite."""
    xs = _shared_grid(rng, x_max, n_breaks)
    incr = rng.random(len(xs) - 1) * y_scale
    if flat_ends:
        incr[0] = 0.0
        incr[-1] = 0.0
    ys = rng.random() * y_scale + np.concatenate([[0.0], np.cumsum(incr)])
    return MonotoneFunction(list(zip(xs, ys)))


def perturbed_copy(f: MonotoneFunction, rng, amplitude):
    """A monotone function sharing f's boundary segments, within sup distance
    ``amplitude`` of f (interior y-values shifted, monotonicity restored)."""
    ys = list(f.ys)
    m = len(ys)
    if m <= 4:
        return MonotoneFunction(list(zip(f.xs, ys)))
    lo, hi = ys[1], ys[-2]
    for i in range(2, m - 2):
        ys[i] = min(max(ys[i] + (rng.random() * 2 - 1) * amplitude, lo), hi)
    for i in range(2, m - 2):
        ys[i] = max(ys[i], ys[i - 1])
    for i in range(m - 3, 1, -1):
        ys[i] = min(ys[i], ys[i + 1])
    return MonotoneFunction(list(zip(f.xs, ys)))


def random_convex_pl(rng, x_max, n_breaks=5, slope_scale=1.0, y0_scale=0.5):
    """Convex non-decreasing PL: slopes increase segment by segment."""
    xs = _shared_grid(rng, x_max, n_breaks)
    slopes = np.sort(rng.random(len(xs) - 1)) * slope_scale
    ys = [rng.random() * y0_scale]
    for (x0, x1), s in zip(zip(xs, xs[1:]), slopes):
        ys.append(ys[-1] + s * (x1 - x0))
    return MonotoneFunction(list(zip(xs, ys)))


def random_concave_pl(rng, x_max, n_breaks=5, slope_scale=1.0, y0_scale=0.5):
    """Concave non-decreasing PL: slopes decrease segment by segment."""
    xs = _shared_grid(rng, x_max, n_breaks)
    slopes = np.sort(rng.random(len(xs) - 1))[::-1] * slope_scale
    ys = [rng.random() * y0_scale]
    for (x0, x1), s in zip(zip(xs, xs[1:]), slopes):
        ys.append(ys[-1] + s * (x1 - x0))
    return MonotoneFunction(list(zip(xs, ys)))


# --------------------------------------------------------------------------
# individual trials
# --------------------------------------------------------------------------


def _barcode_for(cloud, center, f, config):
    filt = build_filtration(cloud, center, repar=f, backend="bucketed", tau=config.tau)
    diam = float(filt.space.diameter())
    l_max = config.l_max if config.l_max is not None else 2.0 * diam + 1e-9
    return weighted_barcode(filt, l_max, config.k_max)


def trial_radius_stability(cloud, center, f, g, config, index=0) -> TrialRow:
    """d_B between the barcodes reparameterized by f and by g, against sup|f-g|."""
    b_f = _barcode_for(cloud, center, f, config)
    b_g = _barcode_for(cloud, center, g, config)
    lhs = float(bottleneck_weighted(b_f, b_g).distance)
    rhs = float(f.sup_distance(g))
    return TrialRow(index, lhs, rhs, rhs - lhs, {"kind": "radius"})


def trial_center_stability(cloud, z, z_prime, f, config, index=0,
                           require_convex=True) -> TrialRow:
    """d_B between barcodes around two centers, against f(|z - z'|)."""
    if require_convex and not f.is_convex():
        raise NotConvex("center-stability bound requires a convex reparameterization")
    b1 = _barcode_for(cloud, z, f, config)
    b2 = _barcode_for(cloud, z_prime, f, config)
    lhs = float(bottleneck_weighted(b1, b2).distance)
    dz = float(np.linalg.norm(np.asarray(z, float) - np.asarray(z_prime, float)))
    rhs = float(f(dz))
    return TrialRow(index, lhs, rhs, rhs - lhs, {"kind": "center", "dz": dz})


def trial_composition_stability(cloud, z, z_prime, f, g, config, index=0,
                                require_convex=True) -> TrialRow:
    """d_B across both a center change and a reparameterization change."""
    if require_convex and not f.is_convex():
        raise NotConvex("composition bound requires a convex first function")
    b1 = _barcode_for(cloud, z, f, config)
    b2 = _barcode_for(cloud, z_prime, g, config)
    lhs = float(bottleneck_weighted(b1, b2).distance)
    dz = float(np.linalg.norm(np.asarray(z, float) - np.asarray(z_prime, float)))
    rhs = float(f.sup_distance(g)) + float(f(dz))
    return TrialRow(index, lhs, rhs, rhs - lhs, {"kind": "composition", "dz": dz})


def trial_difference_bound(cloud, eps_target, config, rng, index=0) -> TrialRow:
    """|Mag(X) - Mag(Y)| for a <= eps perturbation inside the thick set.

    The bound constant is unknown; the row records the empirical constant
    |dMag| * delta / eps (eps measured from the realized displacement).
    """
    Y = perturb_within(cloud, eps_target, config.delta, rng,
                       max_attempts=config.max_attempts)
    disp = np.sqrt(((cloud.points - Y.points) ** 2).sum(axis=1))
    eps = float(np.max(disp))
    mx = compute_magnitude(from_point_cloud(cloud, "bucketed", config.tau))
    my = compute_magnitude(from_point_cloud(Y, "bucketed", config.tau))
    lhs = abs(mx - my)
    constant = lhs * config.delta / eps if eps > 0 else 0.0
    bound_ok = mx <= magnitude_upper_bound(cloud.n, config.L) + VIOLATION_SLACK
    return TrialRow(
        index,
        lhs,
        None,
        None,
        {"kind": "difference", "eps": eps, "constant": constant,
         "upper_bound_ok": bool(bound_ok)},
    )


def trial_profile_stability(cloud_x, cloud_y, config, index=0) -> TrialRow:
    """L1 distance of magnitude profiles against the infinity-Wasserstein
    displacement; reports the ratio and the fitted leading constant."""
    px = magnitude_profile(cloud_x, config.L, tau=config.tau)
    py = magnitude_profile(cloud_y, config.L, tau=config.tau)
    lhs = profile_l1_distance(px, py)
    w, _ = wasserstein_inf(cloud_x, cloud_y)
    n = cloud_x.n
    ratio = lhs / w if w > 0 else 0.0
    fitted_c = max(0.0, (ratio - 2.0 * n * n) * config.delta / config.L)
    return TrialRow(
        index,
        lhs,
        None,
        None,
        {"kind": "profile", "wasserstein": w, "ratio": ratio, "fitted_c": fitted_c},
    )


# --------------------------------------------------------------------------
# suites
# --------------------------------------------------------------------------


def _sample_cloud_and_center(rng, config):
    cloud = sample_thick_config(config.n, config.d, config.L, config.delta, rng,
                                config.max_attempts)
    z = _uniform_ball(rng, 1, config.d, config.L)[0]
    return cloud, z


def _aggregate_exact(rows):
    violations = sum(1 for r in rows if r.lhs > r.rhs + VIOLATION_SLACK)
    ratios = [r.lhs / r.rhs for r in rows if r.rhs and r.rhs > 0]
    return {
        "violations": violations,
        "max_ratio": max(ratios) if ratios else 0.0,
        "min_margin": min(r.margin for r in rows) if rows else None,
    }


def _suite_radius(config):
    rng = np.random.default_rng(config.seed)
    rows = []
    for t in range(config.trials):
        cloud, z = _sample_cloud_and_center(rng, config)
        f = random_monotone_pl(rng, x_max=2.5 * config.L)
        g = perturbed_copy(f, rng, amplitude=0.3)
        rows.append(trial_radius_stability(cloud, z, f, g, config, index=t))
    return TrialReport("radius", rows, _aggregate_exact(rows), config.to_dict())


def _make_center_function(rng, config, family):
    if family == "convex":
        return random_convex_pl(rng, x_max=2.5 * config.L)
    if family == "concave":
        return random_concave_pl(rng, x_max=2.5 * config.L)
    if family == "affine":
        slope = 0.2 + rng.random()
        return MonotoneFunction([(0.0, rng.random() * 0.5), (1.0, rng.random() * 0.5 + slope)])
    raise ValueError(f"unknown function family {family!r}")


def _suite_center(config, function_family="convex"):
    rng = np.random.default_rng(config.seed)
    rows = []
    for t in range(config.trials):
        cloud, z = _sample_cloud_and_center(rng, config)
        z2 = z + _uniform_ball(rng, 1, config.d, 0.5 * config.L)[0]
        f = _make_center_function(rng, config, function_family)
        rows.append(
            trial_center_stability(cloud, z, z2, f, config, index=t,
                                   require_convex=(function_family == "convex"))
        )
    agg = _aggregate_exact(rows)
    agg["function_family"] = function_family
    return TrialReport("center", rows, agg, config.to_dict())


def _suite_composition(config, function_family="convex"):
    rng = np.random.default_rng(config.seed)
    rows = []
    for t in range(config.trials):
        cloud, z = _sample_cloud_and_center(rng, config)
        z2 = z + _uniform_ball(rng, 1, config.d, 0.5 * config.L)[0]
        f = _make_center_function(rng, config, function_family)
        g = perturbed_copy(f, rng, amplitude=0.2)
        rows.append(
            trial_composition_stability(cloud, z, z2, f, g, config, index=t,
                                        require_convex=(function_family == "convex"))
        )
    agg = _aggregate_exact(rows)
    agg["function_family"] = function_family
    return TrialReport("composition", rows, agg, config.to_dict())


def _suite_difference(config):
    rng = np.random.default_rng(config.seed)
    rows = []
    per_eps = {}
    index = 0
    for eps in config.eps_values:
        consts = []
        for _ in range(config.trials):
            cloud = sample_thick_config(config.n, config.d, config.L, config.delta,
                                        rng, config.max_attempts)
            row = trial_difference_bound(cloud, eps, config, rng, index=index)
            rows.append(row)
            consts.append(row.info["constant"])
            index += 1
        per_eps[str(eps)] = {"max_constant": max(consts), "mean_constant": float(np.mean(consts))}
    ordered = [per_eps[str(e)]["max_constant"] for e in config.eps_values]
    # Lipschitz sanity: the empirical constant must not blow up as eps shrinks
    no_blowup = len(ordered) < 2 or ordered[-1] <= 3.0 * max(ordered[:-1])
    agg = {
        "violations": sum(0 if r.info["upper_bound_ok"] else 1 for r in rows),
        "per_eps": per_eps,
        "no_blowup": bool(no_blowup),
        "fitted": {"max_constant": max(v["max_constant"] for v in per_eps.values())},
    }
    return TrialReport("difference", rows, agg, config.to_dict())


def _suite_profile(config):
    rng = np.random.default_rng(config.seed)
    rows = []
    per_delta = {}
    index = 0
    for delta in config.delta_values:
        cfg = TrialConfig(**{**config.to_dict(), "delta": delta})
        cfg.eps_values = tuple(config.eps_values)
        cfg.delta_values = tuple(config.delta_values)
        fits = []
        for _ in range(config.trials):
            cloud = sample_thick_config(cfg.n, cfg.d, cfg.L, delta, rng,
                                        cfg.max_attempts)
            other = perturb_within(cloud, cfg.eps, delta, rng, cfg.max_attempts)
            row = trial_profile_stability(cloud, other, cfg, index=index)
            rows.append(row)
            fits.append(row.info["fitted_c"])
            index += 1
        per_delta[str(delta)] = {"max_fitted_c": max(fits)}
    agg = {
        "violations": 0,
        "per_delta": per_delta,
        "fitted": {"max_c": max(v["max_fitted_c"] for v in per_delta.values())},
    }
    return TrialReport("profile", rows, agg, config.to_dict())


SUITES = ("radius", "center", "composition", "difference", "profile")


def run_suite(suite, config: TrialConfig, function_family="convex") -> TrialReport:
    """Run one named suite (or 'all') deterministically under config.seed."""
    if suite == "radius":
        return _suite_radius(config)
    if suite == "center":
        return _suite_center(config, function_family)
    if suite == "composition":
        return _suite_composition(config, function_family)
    if suite == "difference":
        return _suite_difference(config)
    if suite == "profile":
        return _suite_profile(config)
    raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")


def collinear_instability_example(eps=0.05, tau=1e-9):
    """Rank of the degree-1, length-2 homology for three evenly spaced
    collinear points, before and after nudging the middle point off the line.

    The exact additive relation of the straight configuration makes the
    distance-2 pair a boundary; any off-line nudge beyond the bucket width
    destroys the relation and the rank jumps discontinuously.
    """
    straight = from_point_cloud([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], "bucketed", tau)
    bent = from_point_cloud([[0.0, 0.0], [1.0, eps], [2.0, 0.0]], "bucketed", tau)
    r_straight = homology_rank(straight, 1, 2).rank
    r_bent = homology_rank(bent, 1, 2).rank
    return {
        "collinear_rank": r_straight,
        "perturbed_rank": r_bent,
        "jump": r_straight != r_bent,
    }
