"""Self-describing JSON documents for every object the CLI accepts.

Each document carries its own base ring; entries are serialized as
decimal strings (rational entries as "a/b") so nothing depends on JSON
number limits.  Parse errors raise SchemaError with a path into the
document, e.g. "maps.t2[3].entries[1][0]".
"""

import json
from fractions import Fraction
from typing import Any, List, Mapping, Optional, Sequence, Union

from .affine import AffineObject, FFiltration
from .cubes import SCube
from .errors import SchemaError
from .graded import GradedModule
from .linalg import GF, Matrix, QQ, Ring, Submodule, ZZ
from .presentations import PresentedModule


# ---------------------------------------------------------------------------
# rings and entries


def ring_to_json(ring: Ring) -> dict:
    doc = {"ring": ring.tag}
    if ring.tag == "Fp":
        doc["p"] = ring.p
    return doc


def ring_from_json(doc: Mapping, path: str) -> Ring:
    tag = doc.get("ring")
    if tag == "Z":
        return ZZ
    if tag == "Q":
        return QQ
    if tag == "Fp":
        p = doc.get("p")
        if not isinstance(p, int):
            raise SchemaError(f"{path}.p", "Fp needs an integer prime p")
        try:
            return GF(p)
        except ValueError as exc:
            raise SchemaError(f"{path}.p", str(exc))
    raise SchemaError(f"{path}.ring", f"unknown ring tag {tag!r}")


def parse_base(text: str) -> Ring:
    """The --base flag: Z, Q or Fp:<p>."""
    if text == "Z":
        return ZZ
    if text == "Q":
        return QQ
    if text.startswith("Fp:"):
        try:
            return GF(int(text[3:]))
        except ValueError as exc:
            raise SchemaError("--base", str(exc))
    raise SchemaError("--base", f"unknown base {text!r}; expected Z, Q or Fp:<p>")


def _entry_from_json(ring: Ring, value: Any, path: str):
    if isinstance(value, bool):
        raise SchemaError(path, "matrix entries are numbers or strings")
    if isinstance(value, int):
        return ring.normalize(value)
    if isinstance(value, str):
        try:
            if ring.tag == "Q":
                return ring.normalize(Fraction(value))
            return ring.normalize(int(value))
        except (ValueError, ZeroDivisionError):
            raise SchemaError(path, f"cannot read {value!r} in {ring.tag}")
    raise SchemaError(path, "matrix entries are numbers or strings")


def _entry_to_json(value) -> str:
    return str(value)


# ---------------------------------------------------------------------------
# matrices


def matrix_to_json(M: Matrix) -> dict:
    doc = ring_to_json(M.ring)
    doc.update({
        "rows": M.rows,
        "cols": M.cols,
        "entries": [[_entry_to_json(v) for v in row] for row in M.entries],
    })
    return doc


def matrix_from_json(doc: Any, path: str = "matrix",
                     default_ring: Optional[Ring] = None) -> Matrix:
    """Full matrix documents, or bare entry arrays when a ring is implied."""
    if isinstance(doc, list):
        if default_ring is None:
            raise SchemaError(path, "bare entry arrays need a surrounding base ring")
        rows = len(doc)
        cols = len(doc[0]) if rows else 0
        doc = {"rows": rows, "cols": cols, "entries": doc, **ring_to_json(default_ring)}
    if not isinstance(doc, Mapping):
        raise SchemaError(path, "expected a matrix object")
    ring = (default_ring if "ring" not in doc and default_ring is not None
            else ring_from_json(doc, path))
    rows, cols = doc.get("rows"), doc.get("cols")
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 0 or cols < 0:
        raise SchemaError(path, "rows and cols must be nonnegative integers")
    entries = doc.get("entries")
    if not isinstance(entries, list) or len(entries) != rows:
        raise SchemaError(f"{path}.entries", f"expected {rows} rows")
    parsed = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"{path}.entries[{i}]", f"expected {cols} entries")
        parsed.append(tuple(
            _entry_from_json(ring, v, f"{path}.entries[{i}][{j}]")
            for j, v in enumerate(row)
        ))
    return Matrix(ring, rows, cols, tuple(parsed))


def reinterpret_matrix(M: Matrix, ring: Ring, path: str = "matrix") -> Matrix:
    """Move a matrix to another base ring; fails on non-integral rationals."""
    if ring == M.ring:
        return M
    entries = []
    for i, row in enumerate(M.entries):
        out = []
        for j, v in enumerate(row):
            f = Fraction(v)
            if ring.tag != "Q" and f.denominator != 1:
                raise SchemaError(f"{path}.entries[{i}][{j}]",
                                  f"{v} is not integral in {ring.tag}")
            out.append(ring.normalize(f if ring.tag == "Q" else f.numerator))
        entries.append(tuple(out))
    return Matrix(ring, M.rows, M.cols, tuple(entries))


# ---------------------------------------------------------------------------
# presented modules


def module_to_json(m: PresentedModule) -> Union[int, dict]:
    if m.is_free:
        return m.ngens
    return {"ngens": m.ngens, "relations": matrix_to_json(m.relations.gens)}


def module_from_json(doc: Any, ring: Ring, path: str) -> PresentedModule:
    if isinstance(doc, int) and not isinstance(doc, bool):
        if doc < 0:
            raise SchemaError(path, "negative generator count")
        return PresentedModule.free(ring, doc)
    if not isinstance(doc, Mapping):
        raise SchemaError(path, "expected a generator count or a module object")
    ngens = doc.get("ngens")
    if not isinstance(ngens, int) or ngens < 0:
        raise SchemaError(f"{path}.ngens", "ngens must be a nonnegative integer")
    if "relations" not in doc:
        return PresentedModule.free(ring, ngens)
    rel = matrix_from_json(doc["relations"], f"{path}.relations", ring)
    if rel.rows != ngens:
        raise SchemaError(f"{path}.relations",
                          f"relation matrix needs {ngens} rows, has {rel.rows}")
    if rel.ring != ring:
        raise SchemaError(f"{path}.relations", "relation ring differs from base")
    return PresentedModule.quotient(ring, ngens, rel)


# ---------------------------------------------------------------------------
# cubes


def _subset_key(T: frozenset) -> str:
    return "{" + ",".join(str(t) for t in sorted(T)) + "}"


def _subset_from_key(key: str, path: str) -> frozenset:
    text = key.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise SchemaError(path, f"subset keys look like {{1,3}}, got {key!r}")
    inner = text[1:-1].strip()
    if not inner:
        return frozenset()
    try:
        return frozenset(int(p) for p in inner.split(","))
    except ValueError:
        raise SchemaError(path, f"subset keys list integers, got {key!r}")


def cube_to_json(cube: SCube) -> dict:
    return {
        **ring_to_json(cube.ring),
        "directions": sorted(cube.directions),
        "vertices": {
            _subset_key(T): module_to_json(m) for T, m in sorted(
                cube.vertices.items(), key=lambda kv: _subset_key(kv[0]))
        },
        "boundaries": {
            f"{_subset_key(T)}:{t}": matrix_to_json(M)
            for (T, t), M in sorted(cube.boundaries.items(),
                                    key=lambda kv: (_subset_key(kv[0][0]), kv[0][1]))
        },
    }


def cube_from_json(doc: Any, path: str = "cube") -> SCube:
    if not isinstance(doc, Mapping):
        raise SchemaError(path, "expected a cube object")
    ring = ring_from_json(doc, path) if "ring" in doc else ZZ
    dirs = doc.get("directions")
    if not isinstance(dirs, list) or not all(
            isinstance(d, int) and not isinstance(d, bool) for d in dirs):
        raise SchemaError(f"{path}.directions", "expected a list of integer labels")
    vdoc = doc.get("vertices")
    if not isinstance(vdoc, Mapping):
        raise SchemaError(f"{path}.vertices", "expected an object keyed by subsets")
    vertices = {}
    for key, m in vdoc.items():
        T = _subset_from_key(key, f"{path}.vertices[{key!r}]")
        vertices[T] = module_from_json(m, ring, f"{path}.vertices[{key!r}]")
    bdoc = doc.get("boundaries", {})
    if not isinstance(bdoc, Mapping):
        raise SchemaError(f"{path}.boundaries", "expected an object keyed by subset:direction")
    boundaries = {}
    for key, m in bdoc.items():
        where = f"{path}.boundaries[{key!r}]"
        if ":" not in key:
            raise SchemaError(where, "boundary keys look like {1,3}:1")
        subset_part, _, dir_part = key.rpartition(":")
        T = _subset_from_key(subset_part, where)
        try:
            t = int(dir_part)
        except ValueError:
            raise SchemaError(where, f"direction {dir_part!r} is not an integer")
        boundaries[(T, t)] = matrix_from_json(m, where, ring)
    return SCube(tuple(dirs), vertices, boundaries)


# ---------------------------------------------------------------------------
# graded modules


def graded_to_json(x: GradedModule) -> dict:
    return {
        **ring_to_json(x.ring),
        "vars": x.nvars,
        "truncation": x.truncation,
        "window": x.window,
        "components": [module_to_json(x.component(d)) for d in range(x.truncation + 1)],
        "maps": {
            f"t{i + 1}": [matrix_to_json(x.map_matrix(i, d))
                          for d in range(x.truncation)]
            for i in range(x.nvars)
        },
    }


def graded_from_json(doc: Any, path: str = "module") -> GradedModule:
    if not isinstance(doc, Mapping):
        raise SchemaError(path, "expected a graded module object")
    allowed = {"ring", "p", "vars", "truncation", "window", "components", "maps"}
    stray = sorted(set(doc) - allowed)
    if stray:
        raise SchemaError(path, f"unexpected keys {stray}")
    ring = ring_from_json(doc, path) if "ring" in doc else ZZ
    nvars = doc.get("vars")
    if not isinstance(nvars, int) or nvars < 0:
        raise SchemaError(f"{path}.vars", "vars must be a nonnegative integer")
    D = doc.get("truncation")
    if not isinstance(D, int) or D < 0:
        raise SchemaError(f"{path}.truncation", "truncation must be nonnegative")
    comps = doc.get("components")
    if not isinstance(comps, list) or len(comps) != D + 1:
        raise SchemaError(f"{path}.components",
                          f"expected {D + 1} components for truncation {D}")
    components = tuple(
        module_from_json(c, ring, f"{path}.components[{d}]")
        for d, c in enumerate(comps)
    )
    mdoc = doc.get("maps", {})
    if not isinstance(mdoc, Mapping):
        raise SchemaError(f"{path}.maps", "expected an object keyed t1..tn")
    expected = [f"t{i + 1}" for i in range(nvars)]
    stray = sorted(set(mdoc) - set(expected))
    if stray:
        raise SchemaError(f"{path}.maps", f"unexpected map keys {stray}")
    maps = []
    for i, key in enumerate(expected):
        seq = mdoc.get(key)
        if not isinstance(seq, list) or len(seq) != D:
            raise SchemaError(f"{path}.maps.{key}",
                              f"expected {D} matrices for truncation {D}")
        maps.append(tuple(
            matrix_from_json(m, f"{path}.maps.{key}[{d}]", ring)
            for d, m in enumerate(seq)
        ))
    window = doc.get("window", D)
    if not isinstance(window, int) or window > D:
        raise SchemaError(f"{path}.window", "window must be an integer <= truncation")
    return GradedModule(ring, nvars, D, components, tuple(maps), window)


# ---------------------------------------------------------------------------
# affine objects and filtrations


def affine_to_json(x: AffineObject) -> dict:
    return {
        **ring_to_json(x.ring),
        "module": module_to_json(x.module),
        "endos": [matrix_to_json(M) for M in x.endos],
    }


def affine_from_json(doc: Any, path: str = "object") -> AffineObject:
    if not isinstance(doc, Mapping):
        raise SchemaError(path, "expected an affine object")
    ring = ring_from_json(doc, path) if "ring" in doc else ZZ
    if "module" not in doc:
        raise SchemaError(f"{path}.module", "missing module")
    module = module_from_json(doc["module"], ring, f"{path}.module")
    edoc = doc.get("endos")
    if not isinstance(edoc, list):
        raise SchemaError(f"{path}.endos", "expected a list of matrices")
    endos = tuple(
        matrix_from_json(m, f"{path}.endos[{i}]", ring) for i, m in enumerate(edoc)
    )
    return AffineObject(ring, module, endos)


def filtration_to_json(fil: FFiltration) -> dict:
    return {
        "object": affine_to_json(fil.parent),
        "variables": [v + 1 for v in fil.variables],
        "steps": [matrix_to_json(S.gens) for S in fil.steps],
    }


def filtration_from_json(doc: Any, path: str = "filtration") -> FFiltration:
    if not isinstance(doc, Mapping):
        raise SchemaError(path, "expected a filtration object")
    if "object" not in doc:
        raise SchemaError(f"{path}.object", "missing ambient object")
    parent = affine_from_json(doc["object"], f"{path}.object")
    vdoc = doc.get("variables", list(range(1, parent.nendos + 1)))
    if (not isinstance(vdoc, list)
            or not all(isinstance(v, int) and 1 <= v <= parent.nendos for v in vdoc)):
        raise SchemaError(f"{path}.variables",
                          f"variables are labels in 1..{parent.nendos}")
    sdoc = doc.get("steps")
    if not isinstance(sdoc, list) or not sdoc:
        raise SchemaError(f"{path}.steps", "expected a nonempty list of generator matrices")
    steps = []
    for i, m in enumerate(sdoc):
        gens = matrix_from_json(m, f"{path}.steps[{i}]", parent.ring)
        if gens.rows != parent.module.ngens:
            raise SchemaError(f"{path}.steps[{i}]",
                              f"generators need {parent.module.ngens} rows")
        steps.append(Submodule.span(parent.ring, gens.rows, gens))
    return FFiltration(parent, tuple(v - 1 for v in vdoc), tuple(steps))


# ---------------------------------------------------------------------------
# files


def load_document(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(path, f"cannot read file: {exc}")
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"not valid JSON: {exc}")


def dump_document(doc: Any, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
