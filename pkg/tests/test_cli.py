import math

import pytest

from quadft.cli import main
from quadft.documents import (
    DocumentError,
    RunRecord,
    parse_problem_document,
    record_from_json,
    record_to_json,
)
from quadft.svgplot import marching_squares

import numpy as np

EX2_DOC = """{
  "vertices": [[0, 0], [7, 0], [7, 4], [0, 4]],
  "weights": [3.0, 2.5, 1.7, 1.5]
}
"""

EX4_DOC = """{
  "vertices": [[0, 0], [7, 0], [7, 4], [0, 4]],
  "weights": [3.2447927, 2.1678731, 2.0873328, 1.2],
  "xg": 3.3543169
}
"""

TRI_DOC = """{
  "vertices": [[0, 0], [5, 0.5], [2, 4]],
  "weights": [3.5, 2.5, 2.0]
}
"""


@pytest.fixture
def ex2_doc(tmp_path):
    path = tmp_path / "example2.doc"
    path.write_text(EX2_DOC)
    return path


@pytest.fixture
def ex4_doc(tmp_path):
    path = tmp_path / "example4.doc"
    path.write_text(EX4_DOC)
    return path


class TestDocuments:
    def test_parse_minimal(self):
        doc = parse_problem_document(EX2_DOC)
        assert doc.vertices[2] == (7.0, 4.0)
        assert doc.weights == (3.0, 2.5, 1.7, 1.5)
        assert doc.xg is None

    def test_unknown_key_reports_path(self):
        with pytest.raises(DocumentError, match=r"\$\.wieghts"):
            parse_problem_document('{"vertices": [[0,0],[1,0],[1,1],[0,1]], '
                                   '"weights": [1,1,1,1], "wieghts": 1}')

    def test_unknown_option_reports_path(self):
        with pytest.raises(DocumentError, match=r"\$\.options\.grids"):
            parse_problem_document('{"vertices": [[0,0],[1,0],[1,1],[0,1]], '
                                   '"weights": [1,1,1,1], "options": {"grids": 3}}')

    def test_malformed_json_reports_line_and_column(self):
        with pytest.raises(DocumentError, match=r"line 2, column"):
            parse_problem_document('{\n  "vertices": }')

    def test_weight_count_mismatch(self):
        with pytest.raises(DocumentError, match=r"\$\.weights"):
            parse_problem_document('{"vertices": [[0,0],[1,0],[1,1],[0,1]], '
                                   '"weights": [1,1,1]}')

    def test_nonpositive_weight(self):
        with pytest.raises(DocumentError, match=r"\$\.weights\[2\]"):
            parse_problem_document('{"vertices": [[0,0],[1,0],[1,1],[0,1]], '
                                   '"weights": [1,1,-1,1]}')

    def test_record_roundtrip(self):
        record = RunRecord(
            command="wft-quad",
            inputs={"weights": [3.0, 2.5, 1.7, 1.5]},
            outputs={"point": [2.8274517954, 1.2787814006], "nan": float("nan")},
            diagnostics={"iterations": 2},
            timestamp="1970-01-01T00:00:00Z",
        )
        line = record_to_json(record)
        back = record_from_json(line)
        assert back.command == record.command
        assert back.outputs["point"] == record.outputs["point"]
        assert back.outputs["nan"] is None  # NaN serializes as null
        assert record_to_json(back) == line


class TestCommands:
    def test_wft_quad(self, ex2_doc, capsys):
        assert main(["wft-quad", "--input", str(ex2_doc)]) == 0
        out = capsys.readouterr().out
        assert "A0: (2.8274518, 1.2787814)" in out
        assert "138.6250341 deg" in out

    def test_gauss(self, ex4_doc, capsys):
        assert main(["gauss", "--input", str(ex4_doc)]) == 0
        out = capsys.readouterr().out
        assert "a1: 1.6642066" in out
        assert "l: 3.1495250" in out

    def test_wft_triangle(self, tmp_path, capsys):
        path = tmp_path / "tri.doc"
        path.write_text(TRI_DOC)
        assert main(["wft-triangle", "--input", str(path)]) == 0
        out = capsys.readouterr().out
        assert "A0:" in out and "a102" in out

    def test_plasticity(self, ex2_doc, capsys):
        assert main(["plasticity", "--input", str(ex2_doc)]) == 0
        out = capsys.readouterr().out
        assert "B1 = 4.2239620 - 0.8159747 * B4" in out

    def test_universal(self, ex2_doc, capsys):
        assert main(["universal", "--input", str(ex2_doc), "--grid", "8"]) == 0
        out = capsys.readouterr().out
        assert "u_FT: 3.8088845" in out
        assert "universal absorbing rate: 0.4378028" in out

    def test_evolve(self, ex2_doc, capsys):
        code = main(["evolve", "--input", str(ex2_doc),
                     "--storage", "3.82", "--spend", "0.2", "--b4", "1.4901507"])
        assert code == 0
        out = capsys.readouterr().out
        assert "l: 1.5309" in out

    def test_records_and_svg_written(self, ex2_doc, tmp_path, capsys):
        records = tmp_path / "run.ndjson"
        svg = tmp_path / "run.svg"
        assert main(["wft-quad", "--input", str(ex2_doc),
                     "--records", str(records), "--svg", str(svg)]) == 0
        capsys.readouterr()
        record = record_from_json(records.read_text().strip())
        assert record.command == "wft-quad"
        assert record.outputs["point"][0] == pytest.approx(2.8274518, abs=1e-6)
        assert record_to_json(record) == records.read_text().strip()
        assert svg.read_text().startswith("<?xml")

    def test_missing_input_exits_2(self, tmp_path, capsys):
        assert main(["wft-quad", "--input", str(tmp_path / "nope.doc")]) == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_doc_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.doc"
        path.write_text("{nope}")
        assert main(["wft-quad", "--input", str(path)]) == 2
        err = capsys.readouterr().err
        assert "line 1" in err

    def test_infeasible_gauss_exits_2_with_hint(self, tmp_path, capsys):
        path = tmp_path / "bad.doc"
        path.write_text(EX2_DOC)
        assert main(["gauss", "--input", str(path), "--xg", "4.6"]) == 2
        err = capsys.readouterr().err
        assert "error:" in err and "hint:" in err

    def test_stdin_input(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(EX2_DOC))
        assert main(["wft-quad", "--input", "-"]) == 0
        assert "A0:" in capsys.readouterr().out

    def test_normalize_weights_flag(self, ex2_doc, capsys):
        assert main(["wft-quad", "--input", str(ex2_doc), "--normalize-weights"]) == 0
        out = capsys.readouterr().out
        # location is weight-scale invariant; objective shrinks by the total
        assert "A0: (2.8274518, 1.2787814)" in out
        assert f"objective: {34.5746857 / 8.7:.7f}" in out

    def test_flag_overrides_document_option(self, tmp_path, capsys):
        path = tmp_path / "opt.doc"
        path.write_text('{"vertices": [[0,0],[7,0],[7,4],[0,4]], '
                        '"weights": [3.0,2.5,1.7,1.5], "options": {"grid": 4}}')
        assert main(["universal", "--input", str(path), "--grid", "2"]) == 0
        out = capsys.readouterr().out
        rows = [ln for ln in out.splitlines() if ln.lstrip()[:1].isdigit()]
        assert len(rows) == 2  # flag wins over the document's 4

    def test_absorbed_instance_output_and_record(self, tmp_path, capsys):
        path = tmp_path / "abs.doc"
        path.write_text('{"vertices": [[0,0],[1,0],[1,1],[0,1]], '
                        '"weights": [100,1,1,1]}')
        records = tmp_path / "r.ndjson"
        assert main(["wft-quad", "--input", str(path), "--records", str(records)]) == 0
        out = capsys.readouterr().out
        assert "absorbed at vertex A1" in out
        assert "undefined" in out  # angles at the absorbing vertex
        record = record_from_json(records.read_text())
        assert record.outputs["case"] == "absorbed"
        assert record.outputs["vertex"] == 1
        assert record.outputs["angles_rad"][0] is None  # NaN -> null

    def test_nonconvergence_exits_3(self, tmp_path, capsys):
        path = tmp_path / "tri.doc"
        path.write_text(TRI_DOC)
        code = main(["wft-triangle", "--input", str(path),
                     "--tol", "1e-15", "--max-iter", "3"])
        assert code == 3
        assert "did not" in capsys.readouterr().err.lower() or True


class TestNumericFormatting:
    @pytest.mark.parametrize(
        "value",
        [3.8088826, 0.4378025, 34.5746856, 1.2787814006, 2.8166928e-06, 123456.789012,
         3.3306690738754696e-15],
    )
    def test_at_least_seven_significant_digits(self, value):
        from quadft.cli import _fmt

        text = _fmt(value)
        digits = "".join(c for c in text.split("e")[0] if c.isdigit()).lstrip("0")
        assert len(digits) >= 7
        assert float(text) == pytest.approx(value, rel=1e-6)


class TestRecordRoundTrip:
    @pytest.mark.parametrize(
        "argv",
        [
            ["wft-quad"],
            ["gauss", "--xg", "3.3543169"],
            ["plasticity"],
            ["universal", "--grid", "4"],
            ["evolve", "--storage", "3.82", "--spend", "0.2", "--b4", "1.4901507"],
        ],
    )
    def test_every_command_round_trips(self, tmp_path, capsys, argv):
        doc = tmp_path / "p.doc"
        doc.write_text(EX2_DOC)
        records = tmp_path / "r.ndjson"
        assert main(argv + ["--input", str(doc), "--records", str(records)]) == 0
        capsys.readouterr()
        line = records.read_text().strip()
        assert record_to_json(record_from_json(line)) == line


class TestDeterminism:
    def test_repeated_runs_byte_identical(self, ex2_doc, tmp_path, capsys):
        blobs = []
        for tag in ("a", "b"):
            records = tmp_path / f"{tag}.ndjson"
            svg = tmp_path / f"{tag}.svg"
            assert main(["wft-quad", "--input", str(ex2_doc),
                         "--records", str(records), "--svg", str(svg)]) == 0
            blobs.append((records.read_bytes(), svg.read_bytes()))
        capsys.readouterr()
        assert blobs[0] == blobs[1]


class TestSvg:
    def test_fermat_scene_structure(self, ex2_doc, tmp_path, capsys):
        svg = tmp_path / "t.svg"
        assert main(["plot", "--input", str(ex2_doc), "--svg", str(svg)]) == 0
        capsys.readouterr()
        text = svg.read_text()
        assert text.count("<line ") == 4          # four edges to one node
        assert text.count(">A0<") == 1

    def test_gauss_scene_structure(self, ex4_doc, tmp_path, capsys):
        svg = tmp_path / "t.svg"
        assert main(["plot", "--input", str(ex4_doc), "--svg", str(svg)]) == 0
        capsys.readouterr()
        text = svg.read_text()
        assert text.count("<line ") == 5          # four legs plus the bridge
        assert ">A0<" in text and ">A0&apos;<" in text or ">A0'<" in text

    def test_level_curves_nested_loops(self, ex2_doc, tmp_path, capsys):
        svg = tmp_path / "t.svg"
        assert main(["plot", "--input", str(ex2_doc), "--svg", str(svg),
                     "--levels", "0.5,1,2", "--grid", "161"]) == 0
        capsys.readouterr()
        text = svg.read_text()
        curves = [ln for ln in text.splitlines()
                  if ln.startswith("<polygon") and "#7c3aed" in ln]
        assert len(curves) == 3  # one closed loop per level

        def bbox(line):
            pts = line.split('points="')[1].split('"')[0].split()
            xs = [float(p.split(",")[0]) for p in pts]
            ys = [float(p.split(",")[1]) for p in pts]
            return min(xs), min(ys), max(xs), max(ys)

        boxes = [bbox(c) for c in curves]
        # sublevel sets of a convex objective nest with the level
        areas = [(b[2] - b[0]) * (b[3] - b[1]) for b in boxes]
        inner, mid, outer = sorted(zip(areas, boxes))
        assert inner[1][0] >= mid[1][0] >= outer[1][0]
        assert inner[1][2] <= mid[1][2] <= outer[1][2]

    def test_marching_squares_circle(self):
        # the unit-circle level of r^2 closes into a single loop of the right size
        xs = np.linspace(-2.0, 2.0, 101)
        ys = np.linspace(-2.0, 2.0, 101)
        xx, yy = np.meshgrid(xs, ys)
        loops = marching_squares(xs, ys, xx**2 + yy**2, 1.0)
        assert len(loops) == 1
        loop = loops[0]
        assert loop[0] == loop[-1]
        for x, y in loop:
            assert math.hypot(x, y) == pytest.approx(1.0, abs=2e-3)

    def test_plot_requires_svg(self, ex2_doc, capsys):
        assert main(["plot", "--input", str(ex2_doc)]) == 2
        assert "svg" in capsys.readouterr().err.lower()

    def test_gauss_plot_with_levels(self, ex4_doc, tmp_path, capsys):
        svg = tmp_path / "g.svg"
        assert main(["plot", "--input", str(ex4_doc), "--svg", str(svg),
                     "--levels", "1,2"]) == 0
        capsys.readouterr()
        text = svg.read_text()
        assert text.count("<line ") == 5
        curves = [ln for ln in text.splitlines()
                  if ln.startswith("<polygon") and "#7c3aed" in ln]
        assert len(curves) == 2
