import csv
import io
import json
import math
import re

import pytest
from conftest import SQUARE, TRIANGLE_CENTROID

from emptystar.cli import main
from emptystar.enumeration import deg_k_max
from emptystar.geom import PointSet, format_point_set, read_point_set


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def square_file(tmp_path):
    p = tmp_path / "square.txt"
    p.write_text(format_point_set(PointSet(SQUARE)))
    return p


@pytest.fixture
def centroid_file(tmp_path):
    p = tmp_path / "tc.txt"
    p.write_text(format_point_set(PointSet(TRIANGLE_CENTROID)))
    return p


class TestAnalyze:
    def test_square(self, capsys, square_file):
        code, out, err = run(capsys, "analyze", "--input", square_file, "--k", 2)
        assert code == 0 and "seed=none" in err
        rep = json.loads(out)
        assert rep["total"] == 4 and rep["max_degree"] == 2
        assert rep["schema_version"] == "1"
        assert len(rep["witness_star"]) == 2

    def test_centroid(self, capsys, centroid_file):
        rep = json.loads(run(capsys, "analyze", "--input", centroid_file, "--k", 1)[1])
        assert rep["max_degree"] == 3 and rep["witness"] == [3]

    def test_degenerate_input(self, capsys, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("2 4\n0 0\n1 1\n2 2\n0 1\n")
        code, _, err = run(capsys, "analyze", "--input", p)
        assert code == 2
        assert re.search(r"subset \[0, 1, 2\]", err)

    def test_missing_file_and_bad_flags(self, capsys, tmp_path):
        assert run(capsys, "analyze", "--input", tmp_path / "nope.txt")[0] == 2
        assert run(capsys, "analyze")[0] == 2
        assert run(capsys, "frobnicate")[0] == 2

    def test_agrees_with_library(self, capsys, tmp_path):
        p = tmp_path / "g.txt"
        assert run(capsys, "gen", "--body", "disk", "--n", 25, "--seed", 5, "--out", p)[0] == 0
        rep = json.loads(run(capsys, "analyze", "--input", p, "--k", 2)[1])
        assert rep["max_degree"] == deg_k_max(read_point_set(p), 2)[0]


class TestGen:
    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        run(capsys, "gen", "--body", "ball3", "--n", 30, "--seed", 1, "--out", a)
        run(capsys, "gen", "--body", "ball3", "--n", 30, "--seed", 1, "--out", b)
        assert a.read_bytes() == b.read_bytes()
        X = read_point_set(a)
        assert X.coords.shape == (30, 3)

    def test_errors(self, capsys, tmp_path):
        assert run(capsys, "gen", "--body", "disk", "--n", 0)[0] == 2
        assert run(capsys, "gen", "--body", "blob", "--n", 5)[0] == 2
        p = tmp_path / "x.txt"
        assert run(capsys, "gen", "--body", "disk", "--n", 5, "--out", p)[0] == 0
        assert run(capsys, "gen", "--body", "disk", "--n", 5, "--out", p)[0] == 2
        assert run(capsys, "gen", "--body", "disk", "--n", 5, "--out", p, "--force")[0] == 0

    def test_default_seed_reported(self, capsys):
        code, out, err = run(capsys, "gen", "--body", "square", "--n", 4)
        assert code == 0 and "seed=0" in err
        assert out.startswith("2 4\n")


class TestStarSvg:
    def test_square(self, capsys, tmp_path, square_file):
        out = tmp_path / "s.svg"
        assert run(capsys, "star-svg", "--input", square_file, "--k", 2, "--out", out)[0] == 0
        svg = out.read_text()
        assert svg.count('class="spike"') == 2
        assert svg.count('class="base"') == 1
        assert "n=4 k=2 degree=2" in svg

    def test_centroid(self, capsys, tmp_path, centroid_file):
        out = tmp_path / "c.svg"
        run(capsys, "star-svg", "--input", centroid_file, "--k", 1, "--out", out)
        assert out.read_text().count('class="spike"') == 3

    def test_spikes_equal_degree(self, capsys, tmp_path):
        p, out = tmp_path / "g.txt", tmp_path / "g.svg"
        run(capsys, "gen", "--body", "square", "--n", 40, "--seed", 2, "--out", p)
        rep = json.loads(run(capsys, "analyze", "--input", p, "--k", 2)[1])
        run(capsys, "star-svg", "--input", p, "--k", 2, "--out", out)
        assert out.read_text().count('class="spike"') == rep["max_degree"]

    def test_rejects_space(self, capsys, tmp_path):
        p = tmp_path / "g.txt"
        run(capsys, "gen", "--body", "cube3", "--n", 8, "--out", p)
        assert run(capsys, "star-svg", "--input", p, "--out", tmp_path / "x.svg")[0] == 2


class TestConstantsAndIntegral:
    def test_constants(self, capsys):
        c2 = json.loads(run(capsys, "constants", "--dim", 2)[1])
        assert c2["lower_c"] == pytest.approx(1) and c2["upper_c"] == pytest.approx(2)
        assert c2["planar_deg_c"] == pytest.approx(0.11157, abs=1e-5)
        c3 = json.loads(run(capsys, "constants", "--dim", 3)[1])
        assert c3["upper_c"] == pytest.approx(3.3841, rel=1e-3)
        assert c3["schema_version"] == "1"

    def test_integral(self, capsys):
        code, out, err = run(capsys, "integral", "--body", "disk", "--m", 3,
                             "--samples", 200_000, "--seed", 4)
        assert code == 0 and "seed=4" in err
        r = json.loads(out)
        assert r["closed_form"] == pytest.approx(3 * math.pi)
        lo, hi = r["ci95"]
        assert lo <= r["mean"] <= hi
        assert abs(r["mean"] - 3 * math.pi) <= 4 * r["stderr"]

    def test_integral_errors(self, capsys):
        assert run(capsys, "integral", "--body", "disk", "--quantity", "appendix")[0] == 2
        assert run(capsys, "integral", "--body", "disk", "--samples", 0)[0] == 2


class TestSweep:
    ARGS = ("sweep", "--quantity", "empty-count", "--body", "disk", "--n", "20,40",
            "--trials", 4, "--seed", 7)

    def test_files_and_rerun(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        code, out, _ = run(capsys, *self.ARGS, "--out", a)
        assert code == 0
        run(capsys, *self.ARGS, "--out", b)
        for ext in (".csv", ".json"):
            assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()
        assert out == (tmp_path / "a.json").read_text()
        rows = list(csv.DictReader(io.StringIO((tmp_path / "a.csv").read_text())))
        assert len(rows) == 8 and rows[0]["seed"] == "7"

    def test_force(self, capsys, tmp_path):
        a = tmp_path / "a"
        assert run(capsys, *self.ARGS, "--out", a)[0] == 0
        assert run(capsys, *self.ARGS, "--out", a)[0] == 2
        assert run(capsys, *self.ARGS, "--out", a, "--force")[0] == 0

    def test_bad_flags(self, capsys):
        assert run(capsys, "sweep", "--quantity", "nope", "--body", "disk", "--n", 10)[0] == 2
        assert run(capsys, "sweep", "--quantity", "empty-count", "--body", "disk", "--n", "x")[0] == 2
        assert run(capsys, "sweep", "--quantity", "max-degree", "--body", "disk", "--n", 10)[0] == 2

    def test_single_trial_matches_analyze(self, capsys, tmp_path):
        p, out = tmp_path / "g.txt", tmp_path / "s"
        run(capsys, "gen", "--body", "disk", "--n", 30, "--seed", 12, "--out", p)
        run(capsys, "sweep", "--quantity", "max-degree", "--k", 2, "--body", "disk",
            "--n", 30, "--trials", 1, "--seed", 12, "--out", out)
        row = next(csv.DictReader(io.StringIO((tmp_path / "s.csv").read_text())))
        rep = json.loads(run(capsys, "analyze", "--input", p, "--k", 2)[1])
        assert float(row["value"]) * 30 == pytest.approx(rep["max_degree"], abs=1e-9)
        run(capsys, "sweep", "--quantity", "empty-count", "--body", "disk",
            "--n", 30, "--trials", 1, "--seed", 12, "--out", out, "--force")
        row = next(csv.DictReader(io.StringIO((tmp_path / "s.csv").read_text())))
        assert float(row["value"]) * 900 == pytest.approx(rep["total"], abs=1e-9)
