"""Command line front end.

Two families of subcommands: ``verify`` runs a named verification suite
and ``compute`` evaluates a single object from a JSON document.  Every
subcommand accepts --out (JSON report plus a CSV table next to it),
--figdir (matplotlib renderings of the report), --seed and --truncation.
Exit codes: 0 all checks passed (non-verdicts allowed only with
--allow-non-verdict), 1 some check failed, 2 malformed or invalid input.
"""

import argparse
import random
import sys
import time
from typing import Callable, List, Optional

from . import __version__
from .adams import adams, verify_adams_koszul
from .affine import (
    FFiltration,
    artin_rees_index,
    devissage_filtration,
    endo_nil_index,
    stability_index,
    validate_filtration,
)
from .cubes import total_complex, validate_cube
from .errors import (
    KmlError,
    NotNil,
    NotNilpotent,
    SchemaError,
    WindowTooSmall,
)
from .graded import (
    free_graded,
    from_parts,
    koszul_homology,
    to_parts,
    twist,
)
from .io import (
    affine_from_json,
    cube_from_json,
    filtration_from_json,
    graded_from_json,
    load_document,
    matrix_from_json,
    parse_base,
    reinterpret_matrix,
)
from .k0 import (
    check_additivity,
    k0_class,
    projective_space_decomposition,
    split_sequence_verify,
    verify_one_minus_s,
)
from .linalg import Matrix, ZZ, is_unimodular, smith_normal_form
from .report import CheckRecord, Report, non_verdict, record
from .samples import (
    random_affine,
    random_invariant_submodule,
    random_laurent,
    random_nilpotent_affine,
    random_ses,
    random_valid_filtration,
)

DEFAULT_SEED = 0


def _timed(fn: Callable):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# verify suites


def _suite_pn(args) -> List[CheckRecord]:
    truncation = args.truncation or 20
    ns = [args.n] if args.n is not None else list(range(5))
    records = []
    for n in ns:
        rep, secs = _timed(lambda n=n: projective_space_decomposition(n, truncation))
        records.append(record(
            f"pn/n={n}", bool(rep["ok"]),
            {"n": n, "truncation": truncation},
            window=truncation, witness=dict(rep), seconds=secs,
        ))
    return records


def _suite_split(args) -> List[CheckRecord]:
    truncation = args.truncation or 12
    pairs = ([(args.n, args.dim)] if args.n is not None and args.dim is not None
             else [(n, m) for n in range(3) for m in range(4)])
    records = []
    for n, m in pairs:
        rep, secs = _timed(lambda n=n, m=m: split_sequence_verify(m, n, truncation))
        records.append(record(
            f"split/n={n},dim={m}", bool(rep["ok"]),
            {"n": n, "dim": m, "truncation": truncation},
            window=truncation, witness=dict(rep), seconds=secs,
        ))
    return records


def _suite_one_minus_s(args, rng: random.Random) -> List[CheckRecord]:
    records = []
    if args.module:
        x = graded_from_json(load_document(args.module))
        params = {"module": args.module}
        try:
            rep, secs = _timed(lambda: verify_one_minus_s(x))
        except NotNil:
            return [non_verdict("one-minus-s/module",
                                "module is not certified Nil within its window",
                                params)]
        except WindowTooSmall:
            return [non_verdict("one-minus-s/module",
                                "window too small for the extended Koszul homology",
                                params)]
        return [record("one-minus-s/module", bool(rep["ok"]), params,
                       window=rep["window"], witness=dict(rep), seconds=secs)]
    count = args.count or 50
    truncation = args.truncation or 8
    from .samples import random_nil_graded

    for i in range(count):
        nvars = rng.randint(1, 2)
        x = random_nil_graded(rng, nvars, truncation)
        rep, secs = _timed(lambda x=x: verify_one_minus_s(x))
        records.append(record(
            f"one-minus-s/random/{i:03d}", bool(rep["ok"]),
            {"vars": nvars, "truncation": truncation},
            window=rep["window"], witness=dict(rep), seconds=secs,
        ))
    return records


def _suite_adams(args, rng: random.Random) -> List[CheckRecord]:
    records = []
    pairs = ([(args.p, args.k)] if args.p is not None and args.k is not None
             else [(p, k) for p in range(1, 5) for k in range(1, 6)])
    for p, k in pairs:
        rep, secs = _timed(lambda p=p, k=k: verify_adams_koszul(p, k))
        records.append(record(
            f"adams/p={p},k={k}", bool(rep["ok"]), {"p": p, "k": k},
            witness=dict(rep), seconds=secs,
        ))
    for i in range(args.random if args.random is not None else 100):
        nvars = rng.randint(1, 3)
        f = random_laurent(rng, nvars)
        k, m = rng.randint(1, 4), rng.randint(1, 4)
        ok, secs = _timed(lambda: adams(k, adams(m, f)) == adams(k * m, f))
        records.append(record(
            f"adams/random/{i:03d}", ok, {"k": k, "m": m, "vars": nvars},
            witness=None if ok else {
                "k": k, "m": m,
                "terms": sorted([list(e), c] for e, c in f.terms.items()),
            },
            seconds=secs,
        ))
    return records


def _suite_artin_rees(args, rng: random.Random) -> List[CheckRecord]:
    window = args.window or 12
    records = []
    if args.object:
        x = affine_from_json(load_document(args.object))
        if not args.submodule:
            raise SchemaError("--submodule", "artin-rees needs the submodule document")
        gens = matrix_from_json(load_document(args.submodule), "submodule", x.ring)
        from .linalg import Submodule

        y = Submodule.span(x.ring, x.module.ngens, gens)
        rep, secs = _timed(lambda: artin_rees_index(x, y, window=window))
        params = {"object": args.object, "submodule": args.submodule,
                  "window": window}
        if rep.index is None:
            return [non_verdict("artin-rees/module",
                                f"no stable index within window {window}", params)]
        return [record("artin-rees/module", True, params, window=window,
                       witness={"index": rep.index}, seconds=secs)]

    def worked() -> CheckRecord:
        from .affine import AffineObject
        from .linalg import Submodule

        x = AffineObject.free(ZZ, 1, [Matrix.from_rows(ZZ, [[4]])])
        y = Submodule.span(ZZ, 1, Matrix.from_rows(ZZ, [[2]]))
        rep, secs = _timed(lambda: artin_rees_index(x, y, window=window))
        return record("artin-rees/worked-example", rep.index == 1,
                      {"window": window}, window=window,
                      witness={"index": rep.index}, seconds=secs)

    records.append(worked())
    for i in range(args.count or 100):
        x = random_affine(rng)
        y = random_invariant_submodule(rng, x)
        rep, secs = _timed(lambda: artin_rees_index(x, y, window=window))
        ok = rep.index is not None and rep.index <= 8
        records.append(record(
            f"artin-rees/random/{i:03d}", ok,
            {"rank": x.module.ngens, "endos": x.nendos, "window": window},
            window=window,
            witness={"index": rep.index,
                     **({} if ok else {"submodule": [list(r) for r in y.gens.entries]})},
            seconds=secs,
        ))
    return records


def _suite_stability(args, rng: random.Random) -> List[CheckRecord]:
    records = []
    if args.filtration:
        fil = filtration_from_json(load_document(args.filtration))
        validate_filtration(fil)
        rep, secs = _timed(lambda: stability_index(fil))
        return [record("stability/module", rep.cross_check,
                       {"filtration": args.filtration, "depth": fil.depth},
                       window=fil.depth,
                       witness={"stable_from": rep.stable_from,
                                "cross_check": rep.cross_check},
                       seconds=secs)]

    def constant_example() -> CheckRecord:
        from .affine import AffineObject
        from .linalg import Submodule

        x = AffineObject.free(ZZ, 1, [Matrix.from_rows(ZZ, [[2]])])
        steps = tuple(Submodule.full(ZZ, 1) for _ in range(9))
        rep, secs = _timed(lambda: stability_index(FFiltration(x, (0,), steps)))
        ok = rep.stable_from is None and rep.cross_check
        return record("stability/constant-unstable", ok, {"depth": 8},
                      window=8,
                      witness={"stable_from": rep.stable_from,
                               "cross_check": rep.cross_check},
                      seconds=secs)

    records.append(constant_example())
    for i in range(args.count or 100):
        fil = random_valid_filtration(rng)
        rep, secs = _timed(lambda: stability_index(fil))
        records.append(record(
            f"stability/random/{i:03d}", rep.cross_check,
            {"rank": fil.parent.module.ngens, "depth": fil.depth},
            window=fil.depth,
            witness={"stable_from": rep.stable_from,
                     "cross_check": rep.cross_check},
            seconds=secs,
        ))
    return records


def _check_devissage(x, check_id: str, params: dict) -> CheckRecord:
    def run():
        chain = devissage_filtration(x)
        annihilated = all(
            chain[k + 1].contains(chain[k].image_under(x.endos[v]))
            for k in range(len(chain) - 1)
            for v in range(x.nendos)
        )
        verdicts = [endo_nil_index(x, i) for i in range(x.nendos)]
        if x.nendos == 1:
            bound = verdicts[0].index
        else:
            bound = sum(max(v.index - 1, 0) for v in verdicts) + 1
        length = max(len(chain) - 1, 0)
        return chain, annihilated, bound, length

    (chain, annihilated, bound, length), secs = _timed(run)
    ok = annihilated and length <= bound
    return record(check_id, ok, params, witness={
        "length": length, "bound": bound, "annihilated": annihilated,
    }, seconds=secs)


def _suite_devissage(args, rng: random.Random) -> List[CheckRecord]:
    if args.object:
        x = affine_from_json(load_document(args.object))
        try:
            return [_check_devissage(x, "devissage/module",
                                     {"object": args.object})]
        except NotNilpotent:
            return [non_verdict("devissage/module",
                                "endomorphisms are not nilpotent; no finite chain",
                                {"object": args.object})]
    records = []
    for i in range(args.count or 100):
        x = random_nilpotent_affine(rng)
        records.append(_check_devissage(
            x, f"devissage/random/{i:03d}",
            {"rank": x.module.ngens, "endos": x.nendos},
        ))
    return records


def _suite_grf1(args, rng: random.Random) -> List[CheckRecord]:
    truncation = args.truncation or 8
    count = args.count or 25
    records = []
    for n in (1, 2):
        for k in (0, 1):
            for dim in (1, 2):
                def run(n=n, k=k, dim=dim):
                    table = koszul_homology(free_graded(dim, n, k, truncation))
                    spherical = all(
                        table.structure(i, d).is_zero
                        for i in range(1, n + 1)
                        for d in range(table.window + 1)
                    )
                    zero_row = all(
                        table.dim(0, d) == (dim if d == k else 0)
                        for d in range(table.window + 1)
                    )
                    return spherical and zero_row

                ok, secs = _timed(run)
                records.append(record(
                    f"grf1/sphericity/n={n},k={k},dim={dim}", ok,
                    {"n": n, "k": k, "dim": dim, "truncation": truncation},
                    window=truncation - n, seconds=secs,
                    witness=None if ok else {"n": n, "k": k, "dim": dim},
                ))
    for i in range(count):
        nvars = rng.randint(1, 2)
        parts = [rng.randint(0, 2) for _ in range(rng.randint(1, 3))]

        def run(nvars=nvars, parts=parts):
            x = from_parts(parts, nvars, truncation)
            back = to_parts(x)
            upto = min(len(parts) - 1, x.window - nvars)
            round_trip = all(
                back[k].free_rank == parts[k] and not back[k].invariant_factors
                for k in range(upto + 1)
            )
            shifted = k0_class(twist(x, -1)).agrees_with(k0_class(x).times_s())
            return round_trip and shifted

        ok, secs = _timed(run)
        records.append(record(
            f"grf1/parts/{i:03d}", ok,
            {"vars": nvars, "parts": parts, "truncation": truncation},
            window=truncation - nvars, seconds=secs,
            witness=None if ok else {"parts": parts, "vars": nvars},
        ))
    for i in range(count):
        w = random_ses(rng, rng.randint(1, 2), max(truncation - 2, 2))
        rep, secs = _timed(lambda w=w: check_additivity(w))
        records.append(record(
            f"grf1/additivity/{i:03d}", bool(rep["ok"]),
            {"truncation": max(truncation - 2, 2)},
            window=rep["window"], witness=dict(rep), seconds=secs,
        ))
    return records


_SUITES = {
    "pn": lambda args, rng: _suite_pn(args),
    "split": lambda args, rng: _suite_split(args),
    "one-minus-s": _suite_one_minus_s,
    "adams": _suite_adams,
    "artin-rees": _suite_artin_rees,
    "stability": _suite_stability,
    "devissage": _suite_devissage,
    "grf1": _suite_grf1,
}


def _run_verify(args) -> int:
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    rng = random.Random(seed)
    if args.suite == "all":
        records = []
        for name in sorted(_SUITES):
            records.extend(_SUITES[name](args, rng))
    else:
        records = _SUITES[args.suite](args, rng)
    return _finish(Report(args.suite, records, seed=seed), args)


# ---------------------------------------------------------------------------
# compute commands


def _compute_homology(args) -> int:
    cube = cube_from_json(load_document(args.cube))
    findings = validate_cube(cube)
    if findings:
        for f in findings:
            print(f"error: {args.cube}: {f}", file=sys.stderr)
        return 2
    complex_ = total_complex(cube)
    records = []
    for i, h in enumerate(complex_.homology_all()):
        records.append(record(
            f"homology/i={i}", True, {"cube": args.cube, "i": i},
            witness={"structure": h.describe(), "rank": h.free_rank,
                     "invariant_factors": list(h.invariant_factors)},
        ))
    return _finish(Report("homology", records), args)


def _compute_koszul(args) -> int:
    x = graded_from_json(load_document(args.module))
    try:
        table = koszul_homology(x)
    except WindowTooSmall as exc:
        return _finish(Report("koszul", [
            non_verdict("koszul/table", str(exc), {"module": args.module})
        ]), args)
    records = []
    for i in range(table.max_index + 1):
        row = [table.structure(i, d) for d in range(table.window + 1)]
        records.append(record(
            f"koszul/i={i}", True, {"module": args.module, "i": i},
            window=table.window,
            witness={"dims": [m.free_rank for m in row],
                     "structures": [m.describe() for m in row]},
        ))
    return _finish(Report("koszul", records), args)


def _compute_k0_class(args) -> int:
    x = graded_from_json(load_document(args.module))
    try:
        cls = k0_class(x)
    except WindowTooSmall as exc:
        return _finish(Report("k0-class", [
            non_verdict("k0-class/vector", str(exc), {"module": args.module})
        ]), args)
    rec = record("k0-class/vector", True, {"module": args.module},
                 window=cls.window,
                 witness={"coeffs": cls.to_list(), "pretty": cls.describe()})
    return _finish(Report("k0-class", [rec]), args)


def _compute_snf(args) -> int:
    M = matrix_from_json(load_document(args.matrix), "matrix")
    if args.base:
        M = reinterpret_matrix(M, parse_base(args.base))
    dec = smith_normal_form(M)
    verified = (dec.U @ M @ dec.V == dec.D
                and is_unimodular(dec.U) and is_unimodular(dec.V))
    diag = [dec.D.entries[i][i] for i in range(min(M.rows, M.cols))]
    rec = record("snf/decomposition", verified, {"matrix": args.matrix},
                 witness={"diagonal": [str(v) for v in diag],
                          "verified": verified,
                          "rank": sum(1 for v in diag if v != 0)})
    return _finish(Report("snf", [rec]), args)


# ---------------------------------------------------------------------------
# plumbing


def _finish(report: Report, args) -> int:
    timings = bool(getattr(args, "timings", False))
    for rec in report.sorted_records():
        print(f"{rec.check}: {rec.verdict}")
    counts = report.counts()
    print(f"suite {report.suite}: {counts['pass']} pass, {counts['fail']} fail, "
          f"{counts['non-verdict']} non-verdict")
    if args.out:
        for path in report.write(args.out, timings=timings):
            print(f"wrote {path}")
    if getattr(args, "figdir", None):
        from .figures import render_report_figures

        for path in render_report_figures(report, args.figdir):
            print(f"wrote {path}")
    return report.exit_code(bool(getattr(args, "allow_non_verdict", False)))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kml",
        description="Exact verification suites for cube, graded and K0 calculus.",
    )
    parser.add_argument("--version", action="version",
                        version=f"kml {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report (and a CSV) here")
    common.add_argument("--figdir", help="render report figures into this directory")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--truncation", type=int, help="truncation window override")
    common.add_argument("--base", help="base ring: Z, Q or Fp:<p>")
    common.add_argument("--allow-non-verdict", action="store_true",
                        help="exit 0 even when some checks are non-verdicts")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock seconds per check in the report")

    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification suite")
    vsub = verify.add_subparsers(dest="suite", required=True)
    vp = vsub.add_parser("pn", parents=[common],
                         help="projective space decomposition ladder")
    vp.add_argument("--n", type=int)
    vs = vsub.add_parser("split", parents=[common],
                         help="split exactness of the unit-power operator")
    vs.add_argument("--n", type=int)
    vs.add_argument("--dim", type=int)
    vo = vsub.add_parser("one-minus-s", parents=[common],
                         help="the extension square for Nil modules")
    vo.add_argument("--module", help="graded module document")
    vo.add_argument("--count", type=int)
    va = vsub.add_parser("adams", parents=[common],
                         help="Adams operations on Koszul classes")
    va.add_argument("--p", type=int)
    va.add_argument("--k", type=int)
    va.add_argument("--random", type=int,
                    help="number of random composition checks")
    var_ = vsub.add_parser("artin-rees", parents=[common],
                           help="intersection stability index search")
    var_.add_argument("--object", help="affine object document")
    var_.add_argument("--submodule", help="generator matrix document")
    var_.add_argument("--count", type=int)
    var_.add_argument("--window", type=int)
    vst = vsub.add_parser("stability", parents=[common],
                          help="two characterizations of stable filtrations")
    vst.add_argument("--filtration", help="filtration document")
    vst.add_argument("--count", type=int)
    vd = vsub.add_parser("devissage", parents=[common],
                         help="finite filtrations for nilpotent families")
    vd.add_argument("--object", help="affine object document")
    vd.add_argument("--count", type=int)
    vg = vsub.add_parser("grf1", parents=[common],
                         help="graded module calculus spot checks")
    vg.add_argument("--count", type=int)
    vall = vsub.add_parser("all", parents=[common], help="every suite")
    for flag in ("--n", "--dim", "--p", "--k"):
        vall.add_argument(flag, type=int, help=argparse.SUPPRESS)
    vall.add_argument("--module", help=argparse.SUPPRESS)
    vall.add_argument("--object", help=argparse.SUPPRESS)
    vall.add_argument("--submodule", help=argparse.SUPPRESS)
    vall.add_argument("--filtration", help=argparse.SUPPRESS)
    vall.add_argument("--count", type=int, help=argparse.SUPPRESS)
    vall.add_argument("--window", type=int, help=argparse.SUPPRESS)
    vall.add_argument("--random", type=int, help=argparse.SUPPRESS)

    compute = sub.add_parser("compute", help="evaluate one object")
    csub = compute.add_subparsers(dest="what", required=True)
    ch = csub.add_parser("homology", parents=[common],
                         help="homology of a cube's total complex")
    ch.add_argument("--cube", required=True, help="cube document")
    ck = csub.add_parser("koszul", parents=[common],
                         help="Koszul homology table of a graded module")
    ck.add_argument("--module", required=True)
    cc = csub.add_parser("k0-class", parents=[common],
                         help="class vector of a graded module")
    cc.add_argument("--module", required=True)
    cs = csub.add_parser("snf", parents=[common],
                         help="Smith decomposition of an integer matrix")
    cs.add_argument("--matrix", required=True)

    # convenience alias: `kml homology --cube c.json`
    alias = sub.add_parser("homology", parents=[common])
    alias.add_argument("--cube", required=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _run_verify(args)
        if args.command == "homology":
            return _compute_homology(args)
        what = args.what
        if what == "homology":
            return _compute_homology(args)
        if what == "koszul":
            return _compute_koszul(args)
        if what == "k0-class":
            return _compute_k0_class(args)
        return _compute_snf(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KmlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
