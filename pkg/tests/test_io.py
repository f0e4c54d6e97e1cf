"""Round trips and schema diagnostics for the JSON document layer."""

from fractions import Fraction

import pytest

from kml.affine import AffineObject, ff_adic_filtration
from kml.cubes import typical_cube
from kml.errors import SchemaError
from kml.graded import free_graded, from_parts, truncate_above
from kml.io import (
    affine_from_json,
    affine_to_json,
    cube_from_json,
    cube_to_json,
    dump_document,
    filtration_from_json,
    filtration_to_json,
    graded_from_json,
    graded_to_json,
    load_document,
    matrix_from_json,
    matrix_to_json,
    module_from_json,
    module_to_json,
    parse_base,
    reinterpret_matrix,
)
from kml.linalg import GF, Matrix, QQ, ZZ
from kml.presentations import PresentedModule


def test_matrix_round_trip_over_z():
    M = Matrix.from_rows(ZZ, [[1, -2, 3], [0, 5, -7]])
    assert matrix_from_json(matrix_to_json(M)) == M


def test_matrix_round_trip_over_q():
    M = Matrix.from_rows(QQ, [[Fraction(1, 2), Fraction(-3, 4)]])
    back = matrix_from_json(matrix_to_json(M))
    assert back == M and back.ring == QQ


def test_matrix_round_trip_over_fp():
    M = Matrix.from_rows(GF(7), [[3, 6], [5, 0]])
    back = matrix_from_json(matrix_to_json(M))
    assert back == M and back.ring == GF(7)


def test_bare_entry_array_needs_ring_context():
    assert matrix_from_json([[1, 2]], "m", ZZ) == Matrix.from_rows(ZZ, [[1, 2]])
    with pytest.raises(SchemaError):
        matrix_from_json([[1, 2]], "m")


def test_matrix_schema_errors_carry_paths():
    doc = matrix_to_json(Matrix.from_rows(ZZ, [[1, 2]]))
    doc["entries"][0][1] = "not-a-number"
    with pytest.raises(SchemaError) as exc:
        matrix_from_json(doc, "m")
    assert "m.entries[0][1]" in str(exc.value)


def test_matrix_row_count_mismatch():
    doc = matrix_to_json(Matrix.from_rows(ZZ, [[1], [2]]))
    doc["entries"].pop()
    with pytest.raises(SchemaError) as exc:
        matrix_from_json(doc, "m")
    assert "m.entries" in str(exc.value)


def test_boolean_entries_rejected():
    with pytest.raises(SchemaError):
        matrix_from_json({"ring": "Z", "rows": 1, "cols": 1,
                          "entries": [[True]]}, "m")


def test_parse_base():
    assert parse_base("Z") == ZZ
    assert parse_base("Q") == QQ
    assert parse_base("Fp:5") == GF(5)
    with pytest.raises(SchemaError):
        parse_base("F5")


def test_reinterpret_rational_matrix_as_integers():
    M = Matrix.from_rows(QQ, [[Fraction(4), Fraction(-6)]])
    assert reinterpret_matrix(M, ZZ) == Matrix.from_rows(ZZ, [[4, -6]])
    with pytest.raises(SchemaError):
        reinterpret_matrix(Matrix.from_rows(QQ, [[Fraction(1, 2)]]), ZZ)


def test_module_round_trip():
    m = PresentedModule.quotient(ZZ, 2, Matrix.from_rows(ZZ, [[2, 0], [0, 3]]))
    assert module_from_json(module_to_json(m), ZZ, "mod") == m
    free = PresentedModule.free(ZZ, 3)
    assert module_to_json(free) == 3
    assert module_from_json(3, ZZ, "mod") == free


def test_cube_round_trip():
    cube = typical_cube(ZZ, [2, 3], 2, [1, 2])
    assert cube_from_json(cube_to_json(cube)) == cube


def test_cube_schema_error_names_the_boundary():
    doc = cube_to_json(typical_cube(ZZ, [2], 1, [1]))
    key = next(iter(doc["boundaries"]))
    doc["boundaries"][key]["rows"] = 9
    with pytest.raises(SchemaError) as exc:
        cube_from_json(doc, "cube")
    assert "cube" in str(exc.value)


def test_graded_round_trip():
    x = truncate_above(from_parts([1, 0, 2], 2, 6), 5)
    assert graded_from_json(graded_to_json(x)) == x


def test_graded_rejects_stray_keys():
    doc = graded_to_json(free_graded(1, 1, 0, 4))
    doc["extra"] = 1
    with pytest.raises(SchemaError):
        graded_from_json(doc)


def test_affine_round_trip():
    x = AffineObject.free(ZZ, 2, [Matrix.from_rows(ZZ, [[0, 1], [0, 0]])])
    assert affine_from_json(affine_to_json(x)) == x


def test_filtration_round_trip():
    x = AffineObject.free(ZZ, 1, [Matrix.from_rows(ZZ, [[4]])])
    fil = ff_adic_filtration(x, 5)
    back = filtration_from_json(filtration_to_json(fil))
    assert back.parent == fil.parent
    assert back.variables == fil.variables
    assert len(back.steps) == len(fil.steps)
    assert all(a == b for a, b in zip(back.steps, fil.steps))


def test_load_document_missing_file():
    with pytest.raises(SchemaError) as exc:
        load_document("/tmp/definitely-not-here.json")
    assert "definitely-not-here" in str(exc.value)


def test_load_document_bad_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_document(str(p))


def test_dump_then_load(tmp_path):
    p = tmp_path / "doc.json"
    doc = matrix_to_json(Matrix.from_rows(ZZ, [[1, 2], [3, 4]]))
    dump_document(doc, str(p))
    assert load_document(str(p)) == doc
    assert p.read_text().endswith("\n")
