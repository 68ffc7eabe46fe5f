"""Unified command-line front end.

Exit codes: 0 success, 1 domain error (machine-readable JSON on stderr),
2 usage error.  MAG_THREADS caps the number of worker threads used for
independent persistence slices.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .distances import bottleneck_weighted, magnitude_profile, profile_l1_distance, wasserstein_inf
from .exceptions import MagError, UsageError
from .homology import homology_rank
from .io import (
    RunManifest,
    dump_json,
    encode_value,
    load_cloud,
    load_monotone_function,
    load_space,
    read_barcode_json,
    read_profile_json,
    write_barcode_csv,
    write_barcode_json,
    write_profile_json,
)
from .magnitude import compute_weighting, magnitude_upper_bound
from .metric import build_filtration
from .chains import chain_counts
from .persistence import weighted_barcode
from .stability import SUITES, TrialConfig, run_suite

__all__ = ["main"]


def _threads():
    raw = os.environ.get("MAG_THREADS", "").strip()
    if not raw:
        return None
    try:
        return max(1, int(raw))
    except ValueError:
        return None


def _emit(obj, out):
    text = dump_json(obj, out)
    if out is None:
        sys.stdout.write(text + "\n")


def _parse_center(raw, cloud):
    if raw is None or raw == "barycenter":
        return cloud.barycenter()
    if raw.startswith("index:"):
        return int(raw.split(":", 1)[1])
    try:
        return np.array([float(v) for v in raw.split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"cannot parse center {raw!r}") from exc


def _cmd_magnitude(args):
    space = load_space(args.space, kind=args.kind, backend=args.backend, tau=args.tau)
    weighting = compute_weighting(space)
    diam = float(space.diameter())
    obj = {
        "manifest": RunManifest.for_command(
            "magnitude", [args.space], backend=space.lengths.kind, tau=space.lengths.tau
        ).to_json_dict(),
        "magnitude": weighting.magnitude,
        "weighting": [float(v) for v in weighting.values],
        "upper_bound": magnitude_upper_bound(space.n, diam / 2.0),
    }
    _emit(obj, args.out)
    return 0


def _cmd_homology(args):
    space = load_space(args.space, kind=args.kind, backend=args.backend, tau=args.tau)
    counts = chain_counts(space, args.lmax)
    table = []
    euler = []
    for _key, entry in sorted(counts.items(), key=lambda kv: float(kv[1]["length"])):
        l = entry["length"]
        chi = sum((-1) ** k * c for k, c in entry["by_k"].items())
        euler.append({"l": encode_value(l), "chi": chi})
        for k in range(args.kmax + 1):
            hr = homology_rank(space, k, l)
            if hr.rank or hr.torsion or k in entry["by_k"]:
                table.append(
                    {"k": k, "l": encode_value(l), "rank": hr.rank, "torsion": list(hr.torsion)}
                )
    obj = {
        "manifest": RunManifest.for_command(
            "homology",
            [args.space],
            backend=space.lengths.kind,
            tau=space.lengths.tau,
            l_max=float(args.lmax),
            k_max=args.kmax,
        ).to_json_dict(),
        "table": table,
        "euler": euler,
    }
    _emit(obj, args.out)
    return 0


def _cmd_barcode(args):
    cloud = load_cloud(args.cloud)
    center = _parse_center(args.center, cloud)
    repar = load_monotone_function(args.repar) if args.repar else None
    filt = build_filtration(cloud, center, repar=repar, backend=args.backend, tau=args.tau)
    prime = None if args.field in (None, "rational") else int(args.field)
    barcode = weighted_barcode(filt, args.lmax, args.kmax, prime=prime, threads=_threads())
    manifest = RunManifest.for_command(
        "barcode",
        [args.cloud] + ([args.repar] if args.repar else []),
        backend=filt.space.lengths.kind,
        tau=filt.space.lengths.tau,
        l_max=float(args.lmax),
        k_max=args.kmax,
    )
    text = write_barcode_json(barcode, manifest, args.out)
    if args.out is None:
        sys.stdout.write(text + "\n")
    if args.csv:
        write_barcode_csv(barcode, args.csv)
    return 0


def _cmd_profile(args):
    cloud = load_cloud(args.cloud)
    center = None if args.center in (None, "barycenter") else _parse_center(args.center, cloud)
    if isinstance(center, int):
        center = cloud.points[center]
    profile = magnitude_profile(cloud, args.L, center=center, tau=args.tau)
    manifest = RunManifest.for_command(
        "profile", [args.cloud], backend="bucketed", tau=args.tau, l_max=args.L
    )
    text = write_profile_json(profile, manifest, args.out)
    if args.out is None:
        sys.stdout.write(text + "\n")
    return 0


def _cmd_distance(args):
    if args.which == "bottleneck":
        b1 = read_barcode_json(args.first)
        b2 = read_barcode_json(args.second)
        result = bottleneck_weighted(b1, b2)
        matching = [
            [
                {"birth": encode_value(x.birth), "death": encode_value(x.death)},
                {"birth": encode_value(y.birth), "death": encode_value(y.death)},
            ]
            for x, y in result.matching.pairs
        ]
        obj = {
            "manifest": RunManifest.for_command(
                "distance bottleneck", [args.first, args.second]
            ).to_json_dict(),
            "kind": "bottleneck",
            "distance": encode_value(
                float(result.distance) if result.distance != float("inf") else None
            ),
            "matching": matching,
        }
    elif args.which == "wasserstein":
        X = load_cloud(args.first)
        Y = load_cloud(args.second)
        value, bijection = wasserstein_inf(X, Y)
        obj = {
            "manifest": RunManifest.for_command(
                "distance wasserstein", [args.first, args.second]
            ).to_json_dict(),
            "kind": "wasserstein",
            "distance": value,
            "matching": list(bijection),
        }
    else:
        p1 = read_profile_json(args.first)
        p2 = read_profile_json(args.second)
        obj = {
            "manifest": RunManifest.for_command(
                "distance profile", [args.first, args.second]
            ).to_json_dict(),
            "kind": "profile",
            "distance": profile_l1_distance(p1, p2),
            "matching": None,
        }
    _emit(obj, args.out)
    return 0


def _cmd_stability(args):
    if args.config:
        raw = json.loads(open(args.config).read())
        known = {f for f in TrialConfig.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        config = TrialConfig(**raw)
    else:
        config = TrialConfig()
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    reports = [run_suite(s, config, function_family=args.function_family) for s in suites]
    payload = {
        "manifest": RunManifest.for_command(
            "stability",
            [args.config] if args.config else [],
            seed=config.seed,
            tau=config.tau,
        ).to_json_dict(),
        "suite": args.suite,
        "config": config.to_dict(),
        "aggregate": {r.suite: r.aggregate for r in reports},
        "trials": [row for r in reports for row in r.to_json_dict()["trials"]],
    }
    _emit(payload, args.out)
    if args.csv:
        with open(args.csv, "w") as fh:
            for r in reports:
                fh.write(r.rows_to_csv())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mag",
        description="Magnitude, magnitude homology and weighted persistence barcodes",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_backend(p):
        p.add_argument("--backend", choices=["rational", "bucketed"], default="bucketed")
        p.add_argument("--tau", type=float, default=1e-9)
        p.add_argument("--kind", choices=["auto", "points", "dist"], default="auto")

    p = sub.add_parser("magnitude", help="magnitude and weighting of a space")
    p.add_argument("space")
    add_backend(p)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_magnitude)

    p = sub.add_parser("homology", help="homology ranks and Euler characteristics")
    p.add_argument("space")
    add_backend(p)
    p.add_argument("--lmax", type=float, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_homology)

    p = sub.add_parser("barcode", help="weighted barcode of a ball filtration")
    p.add_argument("cloud")
    p.add_argument("--center", default="barycenter",
                   help="'barycenter', 'index:N', or comma-separated coordinates")
    p.add_argument("--lmax", type=float, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--repar", help="JSON file with monotone function breakpoints")
    p.add_argument("--backend", choices=["rational", "bucketed"], default="bucketed")
    p.add_argument("--tau", type=float, default=1e-9)
    p.add_argument("--field", default="rational",
                   help="'rational' or a prime for Z/p coefficients")
    p.add_argument("--out")
    p.add_argument("--csv", help="also write a flat CSV for plotting")
    p.set_defaults(func=_cmd_barcode)

    p = sub.add_parser("profile", help="magnitude profile of a cloud")
    p.add_argument("cloud")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--center", default="barycenter")
    p.add_argument("--tau", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("distance", help="distances between barcodes, clouds or profiles")
    dsub = p.add_subparsers(dest="which", required=True)
    for which in ("bottleneck", "wasserstein", "profile"):
        q = dsub.add_parser(which)
        q.add_argument("first")
        q.add_argument("second")
        q.add_argument("--out")
        q.set_defaults(func=_cmd_distance, which=which)

    p = sub.add_parser("stability", help="randomized stability suites")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--config", help="TrialConfig JSON file")
    p.add_argument("--function-family", default="convex",
                   choices=["convex", "concave", "affine"],
                   help="reparameterization family for center/composition suites")
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_stability)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(json.dumps(exc.to_json_dict()) + "\n")
        return 2
    except MagError as exc:
        sys.stderr.write(json.dumps(exc.to_json_dict()) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io_error", "message": str(exc)}) + "\n")
        return 2
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(
            json.dumps({"error": "invalid_input", "message": str(exc)}) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
