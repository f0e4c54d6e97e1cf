"""Class vectors in the symbol s and the verifications built on them.

The class of a graded module is the Euler characteristic of its Koszul
homology, one integer per degree.  On top of that live the additivity
check for short exact sequences, the (1-s) square for Nil modules, the
split-exact sequence of the operator (1-t)^(n+1), and the projective
space decomposition.  Truncation edge effects always shrink the verified
window; nothing is zero-padded.
"""

from dataclasses import dataclass
from math import comb
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from .errors import NotExact, NotNil, RingMismatch, WindowTooSmall
from .graded import (
    GradedModule,
    free_graded,
    is_nil,
    koszul_homology,
    twist,
)
from .linalg import (
    Matrix,
    ModulePresentation,
    Ring,
    Submodule,
    ZZ,
    invert_unimodular,
    is_unimodular,
    kernel_basis,
    smith_normal_form,
    solve_columns,
)
from .presentations import PresentedMap, PresentedModule


@dataclass(frozen=True)
class K0Vector:
    """Finitely supported integer coefficients of s^0 .. s^window."""

    coeffs: Tuple[int, ...]

    @property
    def window(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def zero(window: int) -> "K0Vector":
        return K0Vector((0,) * (window + 1))

    @staticmethod
    def unit(degree: int, window: int) -> "K0Vector":
        if not 0 <= degree <= window:
            raise ValueError("unit degree outside the window")
        return K0Vector(tuple(1 if d == degree else 0 for d in range(window + 1)))

    @staticmethod
    def from_coeffs(values: Sequence[int]) -> "K0Vector":
        return K0Vector(tuple(int(v) for v in values))

    def restrict(self, window: int) -> "K0Vector":
        if window > self.window:
            raise WindowTooSmall("cannot widen a class vector")
        return K0Vector(self.coeffs[: window + 1])

    def coefficient(self, degree: int) -> int:
        if 0 <= degree <= self.window:
            return self.coeffs[degree]
        raise WindowTooSmall(f"degree {degree} outside verified window {self.window}")

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "K0Vector") -> "K0Vector":
        w = min(self.window, other.window)
        return K0Vector(tuple(self.coeffs[d] + other.coeffs[d] for d in range(w + 1)))

    def __sub__(self, other: "K0Vector") -> "K0Vector":
        w = min(self.window, other.window)
        return K0Vector(tuple(self.coeffs[d] - other.coeffs[d] for d in range(w + 1)))

    def scale(self, c: int) -> "K0Vector":
        return K0Vector(tuple(c * v for v in self.coeffs))

    def times_s(self) -> "K0Vector":
        # degree d picks up the old coefficient at d-1; everything stays known
        return K0Vector((0,) + self.coeffs)

    def one_minus_s_times(self) -> "K0Vector":
        return self - self.times_s()

    def agrees_with(self, other: "K0Vector") -> bool:
        w = min(self.window, other.window)
        return self.coeffs[: w + 1] == other.coeffs[: w + 1]

    def to_list(self) -> List[int]:
        return list(self.coeffs)

    def describe(self) -> str:
        terms = []
        for d, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = "" if abs(c) == 1 else str(abs(c))
            term = f"{mag}s^{d}"
            if not terms:
                terms.append(term if c > 0 else "-" + term)
            else:
                terms.append(("+ " if c > 0 else "- ") + term)
        return " ".join(terms) if terms else "0"


def k0_class(x: GradedModule) -> K0Vector:
    """Alternating sum of Koszul homology dimensions, one slot per degree."""
    table = koszul_homology(x)
    coeffs = []
    for d in range(table.window + 1):
        total = 0
        for i in range(table.max_index + 1):
            total += (-1) ** i * table.structure(i, d).free_rank
        coeffs.append(total)
    return K0Vector(tuple(coeffs))


# ---------------------------------------------------------------------------
# short exact sequences


def _direct_sum_presented(ring: Ring, parts: Sequence[PresentedModule]) -> PresentedModule:
    ngens = sum(p.ngens for p in parts)
    rel = Matrix.block_diagonal(ring, [p.relations.gens for p in parts])
    return PresentedModule(ring, ngens, Submodule.span(ring, ngens, rel))


@dataclass(frozen=True)
class SesWitness:
    """A degreewise short exact sequence sub -> middle -> quotient.

    The matrices are per-degree maps on generators for degrees up to the
    common window.  Exactness is a property checked by validate_ses, not
    an invariant of construction.
    """

    sub: GradedModule
    middle: GradedModule
    quotient: GradedModule
    injections: Tuple[Matrix, ...]
    surjections: Tuple[Matrix, ...]

    def __post_init__(self) -> None:
        mods = (self.sub, self.middle, self.quotient)
        if len({m.ring for m in mods}) != 1:
            raise RingMismatch("sequence terms live over different rings")
        if len({m.nvars for m in mods}) != 1:
            raise ValueError("sequence terms have different variable counts")
        w = self.window
        if len(self.injections) != w + 1 or len(self.surjections) != w + 1:
            raise ValueError("need one injection and one surjection per degree")
        for d in range(w + 1):
            inj, sur = self.injections[d], self.surjections[d]
            if (inj.rows, inj.cols) != (self.middle.component(d).ngens,
                                        self.sub.component(d).ngens):
                raise ValueError(f"injection shape wrong at degree {d}")
            if (sur.rows, sur.cols) != (self.quotient.component(d).ngens,
                                        self.middle.component(d).ngens):
                raise ValueError(f"surjection shape wrong at degree {d}")

    @property
    def window(self) -> int:
        return min(self.sub.window, self.middle.window, self.quotient.window)


def validate_ses(w: SesWitness) -> List[str]:
    """Exactness and graded-map findings, empty when the witness is valid."""
    findings: List[str] = []
    for d in range(w.window + 1):
        imap = PresentedMap(w.sub.component(d), w.middle.component(d), w.injections[d])
        smap = PresentedMap(w.middle.component(d), w.quotient.component(d),
                            w.surjections[d])
        if not imap.is_well_defined():
            findings.append(f"injection not well defined at degree {d}")
            continue
        if not smap.is_well_defined():
            findings.append(f"surjection not well defined at degree {d}")
            continue
        if not imap.is_injective():
            findings.append(f"injection has a kernel at degree {d}")
        if not smap.is_surjective():
            findings.append(f"surjection misses generators at degree {d}")
        if not smap.compose(imap).is_zero_map():
            findings.append(f"composite is nonzero at degree {d}")
        rel = w.middle.component(d).relations
        image = rel.add(Submodule.span(w.middle.ring, rel.ambient, w.injections[d]))
        kernel = rel.add(smap.kernel_lattice())
        if image != kernel:
            findings.append(f"kernel differs from image at degree {d}")
    for d in range(w.window):
        for i in range(w.sub.nvars):
            lhs = w.injections[d + 1] @ w.sub.map_matrix(i, d)
            rhs = w.middle.map_matrix(i, d) @ w.injections[d]
            if not w.middle.component(d + 1).relations.contains_matrix(lhs - rhs):
                findings.append(f"injection does not intertwine t{i + 1} at degree {d}")
            lhs = w.surjections[d + 1] @ w.middle.map_matrix(i, d)
            rhs = w.quotient.map_matrix(i, d) @ w.surjections[d]
            if not w.quotient.component(d + 1).relations.contains_matrix(lhs - rhs):
                findings.append(f"surjection does not intertwine t{i + 1} at degree {d}")
    return findings


def check_additivity(w: SesWitness) -> Mapping[str, object]:
    """Class of the middle term against sub plus quotient."""
    findings = validate_ses(w)
    if findings:
        raise NotExact("; ".join(findings))
    cs = k0_class(w.sub)
    cm = k0_class(w.middle)
    cq = k0_class(w.quotient)
    total = cs + cq
    window = min(cm.window, total.window)
    ok = cm.agrees_with(total)
    return {
        "check": "additivity",
        "window": window,
        "class_sub": cs.restrict(window).to_list(),
        "class_middle": cm.restrict(window).to_list(),
        "class_quotient": cq.restrict(window).to_list(),
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# the (1-s) square


def add_zero_variable(x: GradedModule) -> GradedModule:
    """The same components with one extra variable acting by zero."""
    zero_row = tuple(
        Matrix.zero(x.ring, x.component(d + 1).ngens, x.component(d).ngens)
        for d in range(x.truncation)
    )
    return GradedModule(x.ring, x.nvars + 1, x.truncation, x.components,
                        x.maps + (zero_row,), x.window)


def polynomial_extension(x: GradedModule) -> GradedModule:
    """x[t]: one new polynomial variable, component d = sum of x_e for e <= d."""
    ring = x.ring
    D = x.truncation
    sizes = [x.component(e).ngens for e in range(D + 1)]
    components = tuple(
        _direct_sum_presented(ring, [x.component(e) for e in range(d + 1)])
        for d in range(D + 1)
    )

    def block(i: Optional[int], d: int) -> Matrix:
        # map from degree d to d+1; copy e lands in copy e+1 under t_i of x,
        # and in copy e under the new variable (i is None)
        rows = []
        for tgt in range(d + 2):
            row = []
            for src in range(d + 1):
                if i is None:
                    cell = (Matrix.identity(ring, sizes[src]) if tgt == src
                            else Matrix.zero(ring, sizes[tgt], sizes[src]))
                else:
                    cell = (x.map_matrix(i, src) if tgt == src + 1
                            else Matrix.zero(ring, sizes[tgt], sizes[src]))
                row.append(cell)
            rows.append(Matrix.hstack(ring, row, rows=sizes[tgt]))
        return Matrix.vstack(ring, rows)

    maps = tuple(
        tuple(block(i, d) for d in range(D))
        for i in range(x.nvars)
    ) + (tuple(block(None, d) for d in range(D)),)
    return GradedModule(ring, x.nvars + 1, D, components, maps, x.window)


def one_minus_s_witness(x: GradedModule) -> SesWitness:
    """The degreewise sequence x[t](-1) -> x[t] -> x[t]/t over n+1 variables."""
    xt = polynomial_extension(x)
    sub = twist(xt, -1)
    quot = add_zero_variable(x)
    n_new = x.nvars  # index of the adjoined variable
    injections = []
    surjections = []
    window = min(sub.window, xt.window, quot.window)
    for d in range(window + 1):
        if d == 0:
            injections.append(Matrix.zero(x.ring, xt.component(0).ngens, 0))
        else:
            injections.append(xt.map_matrix(n_new, d - 1))
        top = x.component(d).ngens
        rest = xt.component(d).ngens - top
        surjections.append(Matrix.hstack(
            x.ring,
            [Matrix.zero(x.ring, top, rest), Matrix.identity(x.ring, top)],
            rows=top,
        ))
    return SesWitness(sub, xt, quot, tuple(injections), tuple(surjections))


def verify_one_minus_s(x: GradedModule) -> Mapping[str, object]:
    """Exactness of the extension sequence and the class identity it forces."""
    verdict = is_nil(x)
    if not verdict.certified:
        raise NotNil("the (1-s) square needs a certified Nil module")
    if x.window < x.nvars + 1:
        raise WindowTooSmall("window cannot see the extended Koszul homology")
    witness = one_minus_s_witness(x)
    additivity = check_additivity(witness)
    class_x = k0_class(x)
    class_quotient = k0_class(witness.quotient)
    expected = class_x.one_minus_s_times()
    window = min(class_quotient.window, expected.window)
    match = class_quotient.agrees_with(expected)
    ok = bool(additivity["ok"]) and match
    return {
        "check": "one-minus-s",
        "nil_bound": verdict.bound,
        "window": window,
        "exact": additivity["ok"],
        "class": class_quotient.restrict(window).to_list(),
        "expected": expected.restrict(window).to_list(),
        "match": match,
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# the split sequence of (1-t)^(n+1)


def toeplitz_power_matrix(power: int, truncation: int, dim: int = 1) -> Matrix:
    """Multiplication by (1-t)^power between truncated slot spaces.

    Source slots 0..truncation-power keep every image inside the target
    slots 0..truncation; columns are binomial coefficients with signs.
    """
    if power < 0 or truncation < power:
        raise WindowTooSmall("truncation does not fit one application of the operator")
    rows = (truncation + 1) * dim
    cols = (truncation - power + 1) * dim
    entries = [[0] * cols for _ in range(rows)]
    for d in range(truncation - power + 1):
        for j in range(power + 1):
            c = (-1) ** j * comb(power, j)
            for b in range(dim):
                entries[(d + j) * dim + b][d * dim + b] = c
    return Matrix.from_rows(ZZ, entries)


def _slot_shift_matrix(truncation: int, dim: int) -> Matrix:
    """Multiplication by t on the truncated carrier; the top slot falls off."""
    n = (truncation + 1) * dim
    entries = [[0] * n for _ in range(n)]
    for d in range(truncation):
        for b in range(dim):
            entries[(d + 1) * dim + b][d * dim + b] = 1
    return Matrix.from_rows(ZZ, entries)


def split_sequence_verify(x0: Union[int, ModulePresentation], n: int,
                          truncation: int) -> Mapping[str, object]:
    """Constructive split exactness of (1-t)^(n+1) on the truncated carrier.

    Derives the retraction and the section from the Smith decomposition
    rather than trusting any printed closed form, and checks every
    splitting identity by exact multiplication.
    """
    if isinstance(x0, ModulePresentation):
        if x0.invariant_factors:
            raise ValueError("the carrier is built on a free base")
        dim = x0.free_rank
    else:
        dim = int(x0)
    if dim < 0:
        raise ValueError("negative base dimension")
    if truncation < 3 * (n + 1):
        raise WindowTooSmall("need truncation >= 3(n+1) for a safe margin")

    power = n + 1
    T = toeplitz_power_matrix(power, truncation, dim)
    nrows, ncols = T.rows, T.cols
    injective = kernel_basis(T).cols == 0

    dec = smith_normal_form(T)
    diag = [dec.D.entries[i][i] for i in range(min(nrows, ncols))]
    rank = sum(1 for v in diag if v != 0)
    coker_rank = nrows - rank
    coker_free = all(v in (0, 1) for v in diag)
    rank_ok = rank == ncols and coker_rank == power * dim

    retraction_ok = False
    projection_kills = False
    section_ok = False
    complete_ok = False
    unipotent_ok = False
    basis_ok = False
    if coker_free and rank_ok:
        pinv = Matrix.from_rows(ZZ, [
            [1 if i == j else 0 for j in range(nrows)] for i in range(ncols)
        ])
        q = dec.V @ pinv @ dec.U
        retraction_ok = q @ T == Matrix.identity(ZZ, ncols)
        uinv = invert_unimodular(dec.U)
        proj = dec.U.submatrix(range(rank, nrows), range(nrows))
        sect = uinv.submatrix(range(nrows), range(rank, nrows))
        projection_kills = (proj @ T).is_zero
        section_ok = proj @ sect == Matrix.identity(ZZ, coker_rank)
        complete_ok = T @ q + sect @ proj == Matrix.identity(ZZ, nrows)
        # the bottom slots t^0..t^n of the carrier represent a basis of the
        # cokernel; express the induced t-action there and check unipotency
        low = proj.submatrix(range(coker_rank), range(power * dim))
        basis_ok = dim == 0 or is_unimodular(low)
        if basis_ok:
            shifted = proj.submatrix(range(coker_rank),
                                     range(dim, (power + 1) * dim))
            action = invert_unimodular(low) @ shifted if dim else low
            nil_part = action - Matrix.identity(ZZ, power * dim)
            acc = Matrix.identity(ZZ, power * dim)
            for _ in range(power):
                acc = acc @ nil_part
            unipotent_ok = acc.is_zero

    ok = all([injective, coker_free, rank_ok, retraction_ok, projection_kills,
              section_ok, complete_ok, basis_ok, unipotent_ok])
    return {
        "check": "split-sequence",
        "n": n,
        "dim": dim,
        "truncation": truncation,
        "injective": injective,
        "cokernel_free": coker_free,
        "cokernel_rank": coker_rank,
        "expected_rank": power * dim,
        "retraction_ok": retraction_ok,
        "projection_kills_image": projection_kills,
        "section_ok": section_ok,
        "splitting_complete": complete_ok,
        "basis_slots_ok": basis_ok,
        "unipotent_action": unipotent_ok,
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# projective space


def _remainder_mod_unit_power(degree: int, power: int) -> List[int]:
    """Coefficients of X^degree modulo (1-X)^power, lowest degree first."""
    return [
        sum((-1) ** (k - j) * comb(degree, k) * comb(k, j)
            for k in range(j, power))
        for j in range(power)
    ]


def projective_space_decomposition(n: int, truncation: int) -> Mapping[str, object]:
    """Rank and basis of the cokernel of (1-s)^(n+1) on class vectors.

    Two independent routes: the Smith form of the Toeplitz matrix, and
    per-degree polynomial reduction modulo (1-s)^(n+1) certified by exact
    membership in the column span.  The unit classes are recomputed from
    twisted free modules through k0_class.
    """
    if truncation < 4 * (n + 1):
        raise WindowTooSmall("need truncation >= 4(n+1) for a safe margin")
    power = n + 1
    T = toeplitz_power_matrix(power, truncation, 1)
    nrows = T.rows
    dec = smith_normal_form(T)
    diag = [dec.D.entries[i][i] for i in range(min(nrows, T.cols))]
    rank = sum(1 for v in diag if v != 0)
    coker_rank = nrows - rank
    torsion_free = all(v in (0, 1) for v in diag)
    rank_ok = coker_rank == power and rank == T.cols

    basis_unimodular = False
    if rank_ok and torsion_free:
        proj = dec.U.submatrix(range(rank, nrows), range(nrows))
        basis_unimodular = is_unimodular(
            proj.submatrix(range(coker_rank), range(power))
        )

    unit_classes_ok = True
    for i in range(power):
        cls = k0_class(free_graded(1, 1, i, i + 2))
        unit_classes_ok = unit_classes_ok and cls == K0Vector.unit(i, i + 1)

    polynomial_route_ok = True
    for d in range(truncation + 1):
        rem = _remainder_mod_unit_power(d, power)
        column = [[(1 if r == d else 0) - (rem[r] if r < power else 0)]
                  for r in range(nrows)]
        if solve_columns(T, Matrix.from_rows(ZZ, column)) is None:
            polynomial_route_ok = False

    connecting_vanishes = rank_ok and torsion_free and basis_unimodular
    ok = all([rank_ok, torsion_free, basis_unimodular, unit_classes_ok,
              polynomial_route_ok])
    return {
        "check": "projective-space",
        "n": n,
        "truncation": truncation,
        "cokernel_rank": coker_rank,
        "rank_ok": rank_ok,
        "torsion_free": torsion_free,
        "basis_unimodular": basis_unimodular,
        "unit_classes_ok": unit_classes_ok,
        "polynomial_route_ok": polynomial_route_ok,
        "connecting_map_vanishes": connecting_vanishes,
        "ok": ok,
    }
