"""End-to-end tests of the command line front end."""
import json

import numpy as np
import pytest

from local_rupert.catalog import SolidSpec, survey_set
from local_rupert.cli import EXIT_INPUT, EXIT_NOT_CERTIFIED, EXIT_OK, format_table, main, resolve_input, run_survey
from local_rupert.offio import write_off
from local_rupert.passage import SearchConfig, verify_certificate


class TestCertify:
    def test_cube_writes_reverse_certificate(self, tmp_path):
        out = tmp_path / "cube.json"
        assert main(["--quiet", "certify", "cube", "-o", str(out)]) == EXIT_OK
        document = json.loads(out.read_text())
        assert document["kind"] == "ReverseRupert"
        assert document["solid"] == "cube"
        assert document["margin"] > 0

    def test_default_output_name(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(["--quiet", "certify", "prism-6"]) == EXIT_OK
        assert (tmp_path / "prism-6.certificate.json").is_file()

    def test_tetrahedron_is_not_certified(self, capsys):
        assert main(["--quiet", "certify", "tetrahedron"]) == EXIT_NOT_CERTIFIED
        assert "trivial-double-arch" in capsys.readouterr().out

    def test_unknown_solid(self):
        assert main(["--quiet", "certify", "gyroelongated_nonsense"]) == EXIT_INPUT

    def test_missing_argument_is_an_input_error(self):
        with pytest.raises(SystemExit) as info:
            main(["certify"])
        assert info.value.code == EXIT_INPUT

    def test_off_file_with_theorem_a(self, tmp_path, octahedron):
        mesh = tmp_path / "mesh.off"
        write_off(mesh, octahedron.vertices)
        out = tmp_path / "mesh.json"
        code = main(["--quiet", "certify", str(mesh), "--theorem", "A", "--delta0", "1e-3", "-o", str(out)])
        assert code == EXIT_OK
        document = json.loads(out.read_text())
        assert document["kind"] == "Rupert"
        assert document["delta"] <= 1e-3

    def test_non_convex_off_file(self, tmp_path, cube):
        mesh = tmp_path / "dented.off"
        write_off(mesh, np.vstack([cube.vertices, [[0.0, 0.0, 0.5]]]))
        assert main(["--quiet", "certify", str(mesh)]) == EXIT_INPUT

    def test_catalog_name_wins_over_stray_file(self, tmp_path, monkeypatch, cube):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "cube").write_text("not a mesh\n")
        Q, label = resolve_input("cube")
        assert label == "cube"
        np.testing.assert_array_equal(Q.vertices, cube.vertices)
        assert main(["--quiet", "certify", "cube", "--seed", "3"]) == EXIT_OK

    def test_unsuffixed_mesh_file(self, tmp_path, octahedron):
        mesh = tmp_path / "lump"
        write_off(mesh, octahedron.vertices)
        Q, label = resolve_input(str(mesh))
        assert label == "lump"
        assert Q.n == 6


class TestVerify:
    def test_round_trip_and_tamper(self, tmp_path):
        out = tmp_path / "octahedron.json"
        assert main(["--quiet", "certify", "octahedron", "-o", str(out)]) == EXIT_OK
        assert main(["--quiet", "verify", "octahedron", str(out)]) == EXIT_OK
        document = json.loads(out.read_text())
        document["rotation"]["angle"] = 0.5
        out.write_text(json.dumps(document))
        assert main(["--quiet", "verify", "octahedron", str(out)]) == EXIT_NOT_CERTIFIED


class TestFigures:
    def test_shadow_is_deterministic(self, tmp_path):
        first, second = tmp_path / "a.svg", tmp_path / "b.svg"
        for path in (first, second):
            assert main(["--quiet", "shadow", "cube", "--align", "1,1,1", "-o", str(path)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        assert first.read_text().startswith("<svg")

    def test_bad_vector(self):
        with pytest.raises(SystemExit) as info:
            main(["shadow", "cube", "--axis", "1,2"])
        assert info.value.code == EXIT_INPUT

    def test_section(self, tmp_path, capsys):
        out = tmp_path / "section.svg"
        assert main(["--quiet", "section", "octahedron", "-o", str(out)]) == EXIT_OK
        assert "PolygonalSection" in capsys.readouterr().out
        assert "<polyline" in out.read_text()

    def test_allowable_polygon(self, tmp_path):
        out = tmp_path / "allowable.svg"
        code = main(["--quiet", "allowable", "polygon-4", "--vertex", "0", "--resolution", "32", "-o", str(out)])
        assert code == EXIT_OK
        assert "<polygon" in out.read_text()

    def test_allowable_triangle_vertex(self, tmp_path):
        out = tmp_path / "triangle.svg"
        code = main(["--quiet", "allowable", "polygon-3", "--vertex", "0", "--resolution", "32", "-o", str(out)])
        assert code == EXIT_OK
        assert out.read_text().startswith("<svg")

    def test_allowable_vertex_out_of_range(self, tmp_path):
        out = tmp_path / "allowable.svg"
        assert main(["--quiet", "allowable", "polygon-4", "--vertex", "9", "-o", str(out)]) == EXIT_INPUT


class TestSurvey:
    def test_table_is_reproducible(self):
        specs = [SolidSpec(name="octahedron"), SolidSpec(name="cube"), SolidSpec(name="tetrahedron")]
        cfg = SearchConfig()
        first = format_table(run_survey(specs, cfg))
        second = format_table(run_survey(specs, cfg, workers=3))
        assert first == second
        assert "3 solids, 0 mismatches" in first

    def test_full_survey_matches_expectations(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        for out, workers in ((first, "4"), (second, "1")):
            assert main(["--quiet", "survey", "--output", str(out), "--workers", workers]) == EXIT_OK
        rows = json.loads((first / "survey.json").read_text())
        assert len(rows) == len(survey_set())
        assert all("ms" not in row for row in rows)
        certified = [row for row in rows if row.get("certificate_path")]
        assert certified
        for row in certified:
            document = json.loads((first / row["certificate_path"]).read_text())
            Q, _ = resolve_input(row["solid"])
            margin = verify_certificate(Q, document)
            assert margin == pytest.approx(document["margin"], abs=1e-12)
            assert margin > SearchConfig().tolerance
        assert (first / "survey.txt").read_text().endswith("0 mismatches\n")

        files = sorted(path.relative_to(first) for path in first.rglob("*") if path.is_file())
        assert files == sorted(path.relative_to(second) for path in second.rglob("*") if path.is_file())
        for name in files:
            assert (first / name).read_bytes() == (second / name).read_bytes()
