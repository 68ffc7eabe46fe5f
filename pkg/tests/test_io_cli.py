import json
import math
from fractions import Fraction

import jsonschema
import numpy as np
import pytest

from maghom import build_filtration, weighted_barcode
from maghom.cli import main
from maghom.distances import MagnitudeProfile
from maghom.io import (
    RunManifest,
    decode_value,
    encode_value,
    load_schema,
    load_space,
    read_barcode_csv,
    read_barcode_json,
    read_profile_json,
    write_barcode_csv,
    write_barcode_json,
    write_profile_json,
)


def validate(payload, schema_name):
    schema = load_schema(schema_name)
    manifest_schema = load_schema("manifest")
    # inline the local manifest reference so plain validation works
    def inline(obj):
        if isinstance(obj, dict):
            if obj.get("$ref") == "manifest.json":
                return {k: v for k, v in manifest_schema.items() if k != "$id"}
            return {k: inline(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [inline(v) for v in obj]
        return obj

    jsonschema.validate(payload, inline(schema))


class TestEncoding:
    def test_round_trip_scalars(self):
        assert encode_value(Fraction(3, 7)) == "3/7"
        assert decode_value("3/7") == Fraction(3, 7)
        assert encode_value(None) == "inf"
        assert decode_value("inf") is None
        assert encode_value(math.inf) == "inf"
        assert encode_value(1.5) == 1.5 and decode_value(1.5) == 1.5


class TestBarcodeRoundTrips:
    @pytest.fixture
    def barcode(self, collinear_cloud):
        return weighted_barcode(build_filtration(collinear_cloud, (0.0, 0.0)), 4.0, 2)

    def test_json_round_trip(self, tmp_path, barcode):
        manifest = RunManifest(command="test", inputs={})
        path = tmp_path / "bc.json"
        write_barcode_json(barcode, manifest, path)
        back = read_barcode_json(path)
        assert back.sorted_bars() == barcode.sorted_bars()
        assert back.dropped_zero_bars == barcode.dropped_zero_bars
        validate(json.loads(path.read_text()), "barcode")

    def test_csv_round_trip(self, tmp_path, barcode):
        path = tmp_path / "bc.csv"
        write_barcode_csv(barcode, path)
        back = read_barcode_csv(path)
        assert back.sorted_bars() == barcode.sorted_bars()

    def test_rational_weights_preserved(self, tmp_path, collinear_space):
        bc = weighted_barcode(build_filtration(collinear_space, 0), 3, 2)
        path = tmp_path / "bc.json"
        write_barcode_json(bc, RunManifest(command="t", inputs={}), path)
        back = read_barcode_json(path)
        assert any(isinstance(b.weight, Fraction) for b in back.bars)
        assert back.sorted_bars() == bc.sorted_bars()

    def test_empty_barcode_header_only_csv(self, tmp_path):
        from maghom.persistence import WeightedBarcode

        path = tmp_path / "empty.csv"
        write_barcode_csv(WeightedBarcode(bars=()), path)
        assert path.read_text().strip() == "birth,death_or_inf,weight,dim"

    def test_two_point_barcode_row_count(self, tmp_path, two_point_unit):
        k_max = 3
        bc = weighted_barcode(build_filtration(two_point_unit, 0), 2 * k_max, k_max)
        path = tmp_path / "two.csv"
        write_barcode_csv(bc, path)
        rows = [r for r in path.read_text().splitlines() if r.strip()]
        assert len(rows) - 1 == 2 + 2 * k_max


class TestProfileRoundTrip:
    def test_json_round_trip(self, tmp_path):
        p = MagnitudeProfile(edges=(0.0, 0.5, 1.25), values=(0.0, 1.0, 2.3), L=2.0)
        path = tmp_path / "p.json"
        write_profile_json(p, RunManifest(command="t", inputs={}), path)
        back = read_profile_json(path)
        assert back == p
        validate(json.loads(path.read_text()), "profile")


class TestLoadSpace:
    def test_json_points(self, tmp_path):
        path = tmp_path / "pts.json"
        path.write_text(json.dumps({"points": [[0, 0], [1, 0]]}))
        sp = load_space(path)
        assert sp.n == 2 and sp.euclidean

    def test_json_dist_with_rationals(self, tmp_path):
        path = tmp_path / "d.json"
        path.write_text(json.dumps({"dist": [[0, "1/2"], ["1/2", 0]]}))
        sp = load_space(path, backend="rational")
        assert sp.d(0, 1) == Fraction(1, 2)

    def test_csv_sniffing(self, tmp_path):
        dist = tmp_path / "dist.csv"
        dist.write_text("0,1,2\n1,0,1\n2,1,0\n")
        sp = load_space(dist, backend="rational")
        assert not sp.euclidean and sp.n == 3
        pts = tmp_path / "pts.csv"
        pts.write_text("0,0\n1,0\n2,0\n")
        sp2 = load_space(pts)
        assert sp2.euclidean and sp2.n == 3

    def test_kind_override(self, tmp_path):
        # a 2x2 block of coordinates that also parses as a distance matrix
        ambiguous = tmp_path / "amb.csv"
        ambiguous.write_text("0,1\n1,0\n")
        assert not load_space(ambiguous).euclidean
        assert load_space(ambiguous, kind="points").euclidean


class TestCli:
    def run(self, *argv):
        return main(list(argv))

    def test_magnitude_json(self, tmp_path, capsys):
        f = tmp_path / "two.json"
        f.write_text(json.dumps({"dist": [[0, math.log(2)], [math.log(2), 0]]}))
        assert self.run("magnitude", str(f)) == 0
        payload = json.loads(capsys.readouterr().out)
        validate(payload, "magnitude")
        assert payload["magnitude"] == pytest.approx(4 / 3)

    def test_homology_collinear(self, tmp_path, capsys):
        f = tmp_path / "collinear.csv"
        f.write_text("0,0\n1,0\n2,0\n")
        assert self.run("homology", str(f), "--backend", "rational", "--lmax", "2", "--kmax", "2") == 0
        payload = json.loads(capsys.readouterr().out)
        validate(payload, "homology")
        entry = [r for r in payload["table"] if r["k"] == 1 and r["l"] == "2/1"]
        assert entry and entry[0]["rank"] == 0  # corrected collinear value
        chi = {r["l"]: r["chi"] for r in payload["euler"]}
        assert chi["2/1"] == 4

    def test_barcode_csv_and_repar(self, tmp_path, capsys):
        cloud = tmp_path / "cloud.csv"
        cloud.write_text("0,0\n1,0\n2,0\n")
        repar = tmp_path / "f.json"
        repar.write_text(json.dumps({"breakpoints": [[0, 0], [1, 2]]}))
        out = tmp_path / "bc.json"
        plot = tmp_path / "bc.csv"
        code = self.run(
            "barcode", str(cloud), "--center", "0,0", "--lmax", "4", "--kmax", "2",
            "--repar", str(repar), "--out", str(out), "--csv", str(plot),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        validate(payload, "barcode")
        births = {b["birth"] for b in payload["bars"] if b["dim"] == 0}
        assert births == {0.0, 2.0, 4.0}
        assert read_barcode_csv(plot).sorted_bars() == read_barcode_json(out).sorted_bars()

    def test_distance_subcommands(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("0,0\n1,0\n")
        b.write_text("0,0.1\n1,0\n")
        assert self.run("distance", "wasserstein", str(a), str(b)) == 0
        payload = json.loads(capsys.readouterr().out)
        validate(payload, "distance")
        assert payload["distance"] == pytest.approx(0.1)

        pa = tmp_path / "pa.json"
        pb = tmp_path / "pb.json"
        assert self.run("profile", str(a), "--L", "2", "--out", str(pa)) == 0
        assert self.run("profile", str(b), "--L", "2", "--out", str(pb)) == 0
        validate(json.loads(pa.read_text()), "profile")
        assert self.run("distance", "profile", str(pa), str(pb)) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["distance"] >= 0

        bca = tmp_path / "bca.json"
        bcb = tmp_path / "bcb.json"
        assert self.run("barcode", str(a), "--lmax", "3", "--kmax", "1", "--out", str(bca)) == 0
        assert self.run("barcode", str(b), "--lmax", "3", "--kmax", "1", "--out", str(bcb)) == 0
        assert self.run("distance", "bottleneck", str(bca), str(bcb)) == 0
        payload = json.loads(capsys.readouterr().out)
        validate(payload, "distance")

    def test_stability_suite(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 3, "trials": 3, "seed": 1}))
        out = tmp_path / "report.json"
        csvp = tmp_path / "trials.csv"
        code = self.run("stability", "radius", "--config", str(cfg), "--out", str(out),
                        "--csv", str(csvp))
        assert code == 0
        payload = json.loads(out.read_text())
        validate(payload, "stability")
        assert payload["aggregate"]["radius"]["violations"] == 0
        assert csvp.read_text().startswith("index,lhs,rhs,margin")

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            self.run("nonsense")
        assert exc.value.code == 2

    def test_missing_file_exit_2(self, capsys):
        assert self.run("magnitude", "does_not_exist.json") == 2
        err = capsys.readouterr().err
        assert json.loads(err)["error"] == "io_error"

    def test_domain_error_exit_1(self, tmp_path, capsys):
        f = tmp_path / "bad.json"
        f.write_text(json.dumps({"dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]}))
        assert self.run("magnitude", str(f)) == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "triangle_violation"
        assert err["details"] == {"i": 0, "j": 1, "k": 2}

    def test_byte_identical_reruns(self, tmp_path):
        cloud = tmp_path / "c.csv"
        cloud.write_text("0,0\n0.5,0.25\n1,0\n")
        out1 = tmp_path / "o1.json"
        out2 = tmp_path / "o2.json"
        self.run("barcode", str(cloud), "--lmax", "3", "--kmax", "2", "--out", str(out1))
        self.run("barcode", str(cloud), "--lmax", "3", "--kmax", "2", "--out", str(out2))
        assert out1.read_bytes() == out2.read_bytes()


class TestCliExtras:
    def test_profile_center_override(self, tmp_path, capsys):
        cloud = tmp_path / "c.csv"
        cloud.write_text("0,0\n1,0\n2,0\n")
        assert main(["profile", str(cloud), "--L", "3", "--center", "0,0"]) == 0
        payload = json.loads(capsys.readouterr().out)
        # centered at the first point the radii are 0, 1, 2
        assert payload["edges"] == [0.0, 1.0, 2.0]

    def test_mag_threads_env_matches_serial(self, tmp_path, monkeypatch):
        cloud = tmp_path / "c.csv"
        cloud.write_text("0,0\n0.5,0.25\n1,0\n")
        out1 = tmp_path / "serial.json"
        out2 = tmp_path / "threaded.json"
        main(["barcode", str(cloud), "--lmax", "3", "--kmax", "2", "--out", str(out1)])
        monkeypatch.setenv("MAG_THREADS", "3")
        main(["barcode", str(cloud), "--lmax", "3", "--kmax", "2", "--out", str(out2)])
        b1 = json.loads(out1.read_text())
        b2 = json.loads(out2.read_text())
        assert b1["bars"] == b2["bars"]

    def test_magnitude_rational_pq_output(self, tmp_path, capsys):
        f = tmp_path / "d.json"
        f.write_text(json.dumps({"dist": [[0, "1/2"], ["1/2", 0]]}))
        assert main(["magnitude", str(f), "--backend", "rational"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["manifest"]["backend"] == "rational"
