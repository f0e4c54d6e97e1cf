"""End-to-end command line checks via main(argv)."""

import json

import pytest

from kml.affine import AffineObject
from kml.cli import main
from kml.cubes import typical_cube
from kml.graded import free_graded
from kml.io import (
    affine_to_json,
    cube_to_json,
    dump_document,
    graded_to_json,
    matrix_to_json,
)
from kml.linalg import Matrix, ZZ


def run(argv):
    return main(argv)


def report_at(path):
    with open(path) as fh:
        return json.load(fh)


def test_pn_example(tmp_path):
    out = tmp_path / "pn.json"
    assert run(["verify", "pn", "--n", "2", "--truncation", "16",
                "--out", str(out)]) == 0
    rep = report_at(out)
    (result,) = rep["results"]
    assert result["verdict"] == "pass"
    assert result["witness"]["cokernel_rank"] == 3


def test_adams_example(tmp_path):
    out = tmp_path / "adams.json"
    assert run(["verify", "adams", "--p", "3", "--k", "2", "--random", "0",
                "--out", str(out)]) == 0
    rep = report_at(out)
    (result,) = rep["results"]
    assert result["witness"]["evaluated_cofactor"] == 8


def test_noncommuting_cube_is_a_schema_failure(tmp_path, capsys):
    doc = cube_to_json(typical_cube(ZZ, [2, 3], 2, [1, 2]))
    key = next(iter(doc["boundaries"]))
    doc["boundaries"][key]["entries"][0][0] = "99"
    path = tmp_path / "bad.json"
    dump_document(doc, str(path))
    assert run(["compute", "homology", "--cube", str(path)]) == 2
    err = capsys.readouterr().err
    assert "does not commute" in err and str(path) in err
    # the top-level alias takes the same route
    assert run(["homology", "--cube", str(path)]) == 2


def test_homology_of_valid_cube(tmp_path):
    doc = cube_to_json(typical_cube(ZZ, [2], 1, [1]))
    path = tmp_path / "cube.json"
    dump_document(doc, str(path))
    out = tmp_path / "h.json"
    assert run(["compute", "homology", "--cube", str(path),
                "--out", str(out)]) == 0
    rep = report_at(out)
    assert [r["check"] for r in rep["results"]] == ["homology/i=0", "homology/i=1"]


def test_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["verify", "grf1", "--count", "4", "--out"]
    assert run(argv + [str(a)]) == 0
    assert run(argv + [str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_results_sorted_by_check_id(tmp_path):
    out = tmp_path / "split.json"
    assert run(["verify", "split", "--out", str(out)]) == 0
    ids = [r["check"] for r in report_at(out)["results"]]
    assert ids == sorted(ids)


def test_figures_written(tmp_path):
    figdir = tmp_path / "figs"
    assert run(["verify", "pn", "--n", "1", "--figdir", str(figdir)]) == 0
    names = sorted(p.name for p in figdir.iterdir())
    assert names == ["pn-values.png", "pn-verdicts.png"]


def test_non_verdict_exit_codes(tmp_path):
    # a free module is not Nil, so the extension square is a non-verdict
    path = tmp_path / "free.json"
    dump_document(graded_to_json(free_graded(1, 1, 0, 6)), str(path))
    assert run(["verify", "one-minus-s", "--module", str(path)]) == 1
    assert run(["verify", "one-minus-s", "--module", str(path),
                "--allow-non-verdict"]) == 0


def test_snf_witness(tmp_path):
    path = tmp_path / "mat.json"
    dump_document(matrix_to_json(Matrix.from_rows(ZZ, [[4, 2], [2, 8], [6, 10]])),
                  str(path))
    out = tmp_path / "snf.json"
    assert run(["compute", "snf", "--matrix", str(path), "--out", str(out)]) == 0
    (result,) = report_at(out)["results"]
    assert result["witness"]["diagonal"] == ["2", "14"]
    assert result["witness"]["verified"] is True


def test_k0_class_of_free_module(tmp_path):
    path = tmp_path / "mod.json"
    dump_document(graded_to_json(free_graded(2, 1, 1, 6)), str(path))
    out = tmp_path / "cls.json"
    assert run(["compute", "k0-class", "--module", str(path),
                "--out", str(out)]) == 0
    (result,) = report_at(out)["results"]
    assert result["witness"]["coeffs"][:2] == [0, 2]
    assert result["witness"]["pretty"] == "2s^1"


def test_artin_rees_worked_example(tmp_path):
    out = tmp_path / "ar.json"
    assert run(["verify", "artin-rees", "--count", "3", "--out", str(out)]) == 0
    rep = report_at(out)
    worked = [r for r in rep["results"] if r["check"] == "artin-rees/worked-example"]
    assert worked and worked[0]["witness"]["index"] == 1


def test_artin_rees_unstable_submodule_rejected(tmp_path, capsys):
    obj = tmp_path / "swap.json"
    sub = tmp_path / "sub.json"
    x = AffineObject.free(ZZ, 2, [Matrix.from_rows(ZZ, [[0, 1], [1, 0]])])
    dump_document(affine_to_json(x), str(obj))
    dump_document(matrix_to_json(Matrix.from_rows(ZZ, [[1], [0]])), str(sub))
    assert run(["verify", "artin-rees", "--object", str(obj),
                "--submodule", str(sub)]) == 2
    assert "not stable" in capsys.readouterr().err


def test_missing_input_file_is_exit_2(capsys):
    assert run(["compute", "snf", "--matrix", "/tmp/no-such-file.json"]) == 2
    assert "error:" in capsys.readouterr().err


def test_wrong_document_shape_is_exit_2(tmp_path, capsys):
    path = tmp_path / "notamatrix.json"
    dump_document({"vars": 1}, str(path))
    assert run(["compute", "snf", "--matrix", str(path)]) == 2
    err = capsys.readouterr().err
    assert "matrix" in err


def test_seed_changes_random_instances(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["verify", "stability", "--count", "6", "--seed", "1",
                "--out", str(a)]) == 0
    assert run(["verify", "stability", "--count", "6", "--seed", "2",
                "--out", str(b)]) == 0
    assert report_at(a)["seed"] == 1 and report_at(b)["seed"] == 2


def test_timings_flag_controls_serialization(tmp_path):
    out = tmp_path / "t.json"
    assert run(["verify", "pn", "--n", "0", "--out", str(out)]) == 0
    assert "seconds" not in report_at(out)["results"][0]
    assert run(["verify", "pn", "--n", "0", "--out", str(out), "--timings"]) == 0
    assert "seconds" in report_at(out)["results"][0]


def test_verify_all_merges_every_suite(tmp_path):
    out = tmp_path / "all.json"
    assert run(["verify", "all", "--count", "2", "--random", "2",
                "--out", str(out)]) == 0
    prefixes = {r["check"].split("/")[0] for r in report_at(out)["results"]}
    assert prefixes == {"pn", "split", "one-minus-s", "adams", "artin-rees",
                        "stability", "devissage", "grf1"}
