"""File formats, run manifests and schema access.

All numeric JSON output round-trips exactly: floats use the shortest
round-trip decimal form (at most 17 significant digits), exact rationals are
serialized as "p/q" strings, and infinite deaths as the string "inf".
"""

from __future__ import annotations

import csv
import hashlib
import importlib.resources
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .distances import MagnitudeProfile
from .exceptions import UsageError
from .metric import MonotoneFunction, PointCloud, from_distance_matrix, from_point_cloud
from .persistence import WeightedBar, WeightedBarcode

__all__ = [
    "RunManifest",
    "encode_value",
    "decode_value",
    "dump_json",
    "load_space",
    "load_cloud",
    "load_monotone_function",
    "write_barcode_json",
    "read_barcode_json",
    "write_barcode_csv",
    "read_barcode_csv",
    "write_profile_json",
    "read_profile_json",
    "load_schema",
]


# --------------------------------------------------------------------------
# manifests and JSON encoding
# --------------------------------------------------------------------------


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record embedded in every output file."""

    command: str
    inputs: dict = field(default_factory=dict)
    backend: str = "bucketed"
    tau: float | None = 1e-9
    l_max: float | None = None
    k_max: int | None = None
    seed: int | None = None
    version: str = __version__

    @staticmethod
    def for_command(command, input_paths, **kwargs):
        inputs = {str(p): _sha256(p) for p in input_paths}
        return RunManifest(command=command, inputs=inputs, **kwargs)

    def to_json_dict(self):
        return {
            "command": self.command,
            "inputs": self.inputs,
            "backend": self.backend,
            "tau": self.tau,
            "l_max": self.l_max,
            "k_max": self.k_max,
            "seed": self.seed,
            "version": self.version,
        }


def encode_value(v):
    """JSON-safe encoding: Fractions as 'p/q', infinities as 'inf'."""
    if v is None:
        return "inf"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def decode_value(v):
    """Inverse of :func:`encode_value` for scalar entries."""
    if v == "inf":
        return None
    if isinstance(v, str) and "/" in v:
        return Fraction(v)
    return v


def dump_json(obj, path=None):
    text = json.dumps(obj, indent=2, allow_nan=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


# --------------------------------------------------------------------------
# space / cloud input
# --------------------------------------------------------------------------


def _read_csv_rows(path):
    with open(path, newline="") as fh:
        return [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]


def _looks_like_distance_matrix(rows):
    n = len(rows)
    if any(len(r) != n for r in rows):
        return False
    try:
        vals = [[float(Fraction(c.strip())) for c in r] for r in rows]
    except (ValueError, ZeroDivisionError):
        return False
    for i in range(n):
        if vals[i][i] != 0.0:
            return False
        for j in range(n):
            if abs(vals[i][j] - vals[j][i]) > 1e-12:
                return False
    return True


def load_space(path, kind="auto", backend="bucketed", tau=None):
    """Load a finite metric space from JSON or CSV.

    JSON is self-describing ({"points": ...} or {"dist": ...}, rational
    entries allowed as "p/q" strings).  A CSV square symmetric zero-diagonal
    table is read as a distance matrix, anything else as one point per row;
    ``kind`` overrides the sniffing.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text())
        if "dist" in data:
            table = [[decode_value(v) for v in row] for row in data["dist"]]
            return from_distance_matrix(table, backend=backend, tau=tau,
                                        labels=data.get("labels"))
        if "points" in data:
            return from_point_cloud(np.asarray(data["points"], dtype=float),
                                    backend=backend, tau=tau)
        raise UsageError(f"JSON space file {path} needs a 'points' or 'dist' key")
    rows = _read_csv_rows(path)
    if kind == "auto":
        kind = "dist" if _looks_like_distance_matrix(rows) else "points"
    if kind == "dist":
        return from_distance_matrix([[c.strip() for c in r] for r in rows],
                                    backend=backend, tau=tau)
    if kind == "points":
        pts = np.array([[float(c) for c in r] for r in rows], dtype=float)
        return from_point_cloud(pts, backend=backend, tau=tau)
    raise UsageError(f"unknown space kind {kind!r}")


def load_cloud(path) -> PointCloud:
    """Load a point cloud from CSV (one point per row) or JSON {"points": ...}."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text())
        if "points" not in data:
            raise UsageError(f"JSON cloud file {path} needs a 'points' key")
        return PointCloud(np.asarray(data["points"], dtype=float))
    rows = _read_csv_rows(path)
    return PointCloud(np.array([[float(c) for c in r] for r in rows], dtype=float))


def load_monotone_function(path) -> MonotoneFunction:
    data = json.loads(Path(path).read_text())
    if "breakpoints" not in data:
        raise UsageError(f"function file {path} needs a 'breakpoints' key")
    return MonotoneFunction([(float(x), float(y)) for x, y in data["breakpoints"]])


# --------------------------------------------------------------------------
# barcodes and profiles
# --------------------------------------------------------------------------


def write_barcode_json(barcode: WeightedBarcode, manifest: RunManifest, path=None):
    obj = {
        "manifest": manifest.to_json_dict(),
        "bars": [
            {
                "birth": encode_value(b.birth),
                "death": encode_value(b.death),
                "weight": encode_value(b.weight),
                "dim": b.dim,
            }
            for b in barcode.sorted_bars()
        ],
        "dropped_zero_bars": barcode.dropped_zero_bars,
    }
    return dump_json(obj, path)


def read_barcode_json(path) -> WeightedBarcode:
    data = json.loads(Path(path).read_text())
    bars = tuple(
        WeightedBar(
            birth=decode_value(b["birth"]),
            death=decode_value(b["death"]),
            weight=decode_value(b["weight"]),
            dim=int(b["dim"]),
        )
        for b in data["bars"]
    )
    return WeightedBarcode(
        bars=bars,
        dropped_zero_bars=int(data.get("dropped_zero_bars", 0)),
        metadata=data.get("manifest", {}),
    )


def write_barcode_csv(barcode: WeightedBarcode, path):
    """Flat plot-ready table: birth, death_or_inf, weight, dim, sorted by
    (dim, weight, birth)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["birth", "death_or_inf", "weight", "dim"])
        for b in barcode.sorted_bars():
            writer.writerow(
                [encode_value(b.birth), encode_value(b.death), encode_value(b.weight), b.dim]
            )


def _parse_csv_scalar(s):
    s = s.strip()
    if s == "inf":
        return None
    if "/" in s:
        return Fraction(s)
    return float(s)


def read_barcode_csv(path) -> WeightedBarcode:
    rows = _read_csv_rows(path)
    bars = []
    for row in rows[1:]:
        birth, death, weight, dim = row
        bars.append(
            WeightedBar(
                birth=_parse_csv_scalar(birth),
                death=_parse_csv_scalar(death),
                weight=_parse_csv_scalar(weight),
                dim=int(dim),
            )
        )
    return WeightedBarcode(bars=tuple(bars))


def write_profile_json(profile: MagnitudeProfile, manifest: RunManifest, path=None):
    obj = {
        "manifest": manifest.to_json_dict(),
        "L": profile.L,
        "edges": list(profile.edges),
        "values": list(profile.values),
    }
    return dump_json(obj, path)


def read_profile_json(path) -> MagnitudeProfile:
    data = json.loads(Path(path).read_text())
    return MagnitudeProfile(
        edges=tuple(float(e) for e in data["edges"]),
        values=tuple(float(v) for v in data["values"]),
        L=float(data["L"]),
    )


def load_schema(name):
    """Load one of the shipped JSON schemas by stem name (e.g. 'barcode')."""
    ref = importlib.resources.files("maghom") / "schemas" / f"{name}.json"
    return json.loads(ref.read_text())
