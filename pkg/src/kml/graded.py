"""Truncated graded modules over a free commutative monoid on t_1..t_n.

An object holds components x_0..x_D and, for each variable, degree-one
maps x_d -> x_{d+1} that commute pairwise.  Degrees beyond the
truncation D are unknown, so every derived object carries a *window*:
the largest degree at which its data is claimed exact.  Windows only
ever shrink, by worst-case bookkeeping (a twist by k costs |k| degrees,
Koszul homology costs n), and no operation certifies anything it cannot
see; in particular "not nilpotent" is never asserted, only "no bound
visible within the window".

The Koszul cube of an object is realized degreewise: the degree-d slice
is an honest cube over the base ring (vertex at T is x_{d-#T}, boundary
in direction i is t_i), and T_i(x)_d is the homology of its total
complex.  That keeps one sign convention for everything.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Optional, Sequence, Union

from .affine import AffineObject
from .cubes import ChainComplex, SCube, total_complex
from .errors import (
    InvalidGradedModule,
    NotFound,
    NotNil,
    NotTRegular,
    WindowTooSmall,
)
from .linalg import (
    Matrix,
    ModulePresentation,
    Ring,
    Submodule,
    ZZ,
)
from .presentations import PresentedMap, PresentedModule

MAX_VARIABLES = 8


def monomials(nvars: int, degree: int) -> list:
    """Exponent vectors of total degree ``degree``, lexicographically sorted."""
    if degree < 0:
        return []
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []
    for head in range(degree, -1, -1):
        for tail in monomials(nvars - 1, degree - head):
            out.append((head,) + tail)
    return sorted(out)


def monomial_count(nvars: int, degree: int) -> int:
    if degree < 0:
        return 0
    if nvars == 0:
        return 1 if degree == 0 else 0
    return comb(degree + nvars - 1, nvars - 1)


def presented_from_structure(ring: Ring, mp: ModulePresentation) -> PresentedModule:
    n = mp.free_rank + len(mp.invariant_factors)
    rel = Matrix.diagonal(
        ring, list(mp.invariant_factors), rows=n, cols=len(mp.invariant_factors)
    )
    return PresentedModule.quotient(ring, n, rel)


@dataclass(frozen=True)
class GradedModule:
    """Components x_0..x_truncation with commuting degree-one maps."""

    ring: Ring
    nvars: int
    truncation: int
    components: tuple
    maps: tuple  # maps[i][d]: x_d -> x_{d+1}
    window: int

    def __post_init__(self) -> None:
        if not 0 <= self.nvars <= MAX_VARIABLES:
            raise InvalidGradedModule(f"variable count must be in [0, {MAX_VARIABLES}]")
        if self.truncation < 0:
            raise InvalidGradedModule("truncation degree must be nonnegative")
        if len(self.components) != self.truncation + 1:
            raise InvalidGradedModule("need one component per degree 0..D")
        if self.window > self.truncation:
            raise InvalidGradedModule("window cannot exceed the truncation")
        if len(self.maps) != self.nvars:
            raise InvalidGradedModule("need one map family per variable")
        for fam in self.maps:
            if len(fam) != self.truncation:
                raise InvalidGradedModule("need one map per degree 0..D-1")
            for d, M in enumerate(fam):
                if (M.rows != self.components[d + 1].ngens
                        or M.cols != self.components[d].ngens):
                    raise InvalidGradedModule(f"map at degree {d} has the wrong shape")
                if M.ring != self.ring:
                    raise InvalidGradedModule("map over the wrong ring")
        for c in self.components:
            if c.ring != self.ring:
                raise InvalidGradedModule("component over the wrong ring")

    def component(self, d: int) -> PresentedModule:
        if 0 <= d <= self.truncation:
            return self.components[d]
        return PresentedModule.free(self.ring, 0)

    def map_matrix(self, var: int, d: int) -> Matrix:
        if 0 <= d < self.truncation:
            return self.maps[var][d]
        return Matrix.zero(self.ring, self.component(d + 1).ngens,
                           self.component(d).ngens)

    def map_between(self, var: int, d: int) -> PresentedMap:
        return PresentedMap(self.component(d), self.component(d + 1),
                            self.map_matrix(var, d))

    def component_structures(self) -> list:
        return [c.structure() for c in self.components]

    def dims(self) -> list:
        return [s.free_rank for s in self.component_structures()]


def validate_graded(x: GradedModule) -> list:
    """Well-definedness and commutation findings; empty means valid."""
    findings = []
    for i in range(x.nvars):
        for d in range(x.truncation):
            if not x.map_between(i, d).is_well_defined():
                findings.append(f"t{i + 1} at degree {d} does not respect relations")
    for i, j in itertools.combinations(range(x.nvars), 2):
        for d in range(x.truncation - 1):
            one = x.map_between(j, d + 1).compose(x.map_between(i, d))
            two = x.map_between(i, d + 1).compose(x.map_between(j, d))
            if not one.equals(two):
                findings.append(
                    f"t{i + 1} and t{j + 1} do not commute out of degree {d}"
                )
    return findings


def agree_on_window(x: GradedModule, y: GradedModule) -> bool:
    """Same components and maps up to the smaller window."""
    if x.ring != y.ring or x.nvars != y.nvars:
        return False
    w = min(x.window, y.window)
    for d in range(w + 1):
        if x.component(d) != y.component(d):
            return False
    for i in range(x.nvars):
        for d in range(w):
            if not x.map_between(i, d).equals(y.map_between(i, d)):
                return False
    return True


# ---------------------------------------------------------------------------
# constructors


def free_graded(base: Union[int, ModulePresentation, PresentedModule], nvars: int,
                shift: int, truncation: int, ring: Ring = ZZ) -> GradedModule:
    """Free graded module on ``base``, twisted down by ``shift`` >= 0.

    Degree d is one copy of the base per monomial of degree d - shift,
    monomials in lexicographic order; each t_i matrix is the block 0/1
    inclusion sending the copy at m to the copy at m + e_i.
    """
    if shift < 0:
        raise ValueError("shift must be nonnegative")
    if isinstance(base, int):
        base = PresentedModule.free(ring, base)
    elif isinstance(base, ModulePresentation):
        base = presented_from_structure(ring, base)
    if base.ring != ring:
        raise ValueError("base over the wrong ring")
    g = base.ngens
    comps = []
    index = []  # per degree: monomial -> block position
    for d in range(truncation + 1):
        mons = monomials(nvars, d - shift)
        index.append({m: k for k, m in enumerate(mons)})
        rel_blocks = [base.relations.gens] * len(mons)
        rel = (Matrix.block_diagonal(ring, rel_blocks) if mons
               else Matrix.zero(ring, 0, 0))
        comps.append(PresentedModule.quotient(ring, g * len(mons), rel))
    maps = []
    for i in range(nvars):
        fam = []
        for d in range(truncation):
            src = index[d]
            dst = index[d + 1]
            rows = g * len(dst)
            cols = g * len(src)
            grid = [[ring.zero] * cols for _ in range(rows)]
            for m, k in src.items():
                target = tuple(e + 1 if a == i else e for a, e in enumerate(m))
                k2 = dst[target]
                for a in range(g):
                    grid[g * k2 + a][g * k + a] = ring.one
            fam.append(Matrix(ring, rows, cols, tuple(tuple(r) for r in grid)))
        maps.append(tuple(fam))
    return GradedModule(ring, nvars, truncation, tuple(comps), tuple(maps), truncation)


def concentrated_graded(base: Union[int, PresentedModule], nvars: int, degree: int,
                        truncation: int, ring: Ring = ZZ) -> GradedModule:
    """One object in a single degree; every map is zero."""
    if isinstance(base, int):
        base = PresentedModule.free(ring, base)
    if not 0 <= degree <= truncation:
        raise ValueError("degree outside 0..truncation")
    z = PresentedModule.free(ring, 0)
    comps = tuple(base if d == degree else z for d in range(truncation + 1))
    maps = tuple(
        tuple(
            Matrix.zero(ring, comps[d + 1].ngens, comps[d].ngens)
            for d in range(truncation)
        )
        for _ in range(nvars)
    )
    return GradedModule(ring, nvars, truncation, comps, maps, truncation)


def zero_graded(ring: Ring, nvars: int, truncation: int) -> GradedModule:
    z = PresentedModule.free(ring, 0)
    comps = (z,) * (truncation + 1)
    maps = tuple(tuple(Matrix.zero(ring, 0, 0) for _ in range(truncation))
                 for _ in range(nvars))
    return GradedModule(ring, nvars, truncation, comps, maps, truncation)


def direct_sum(parts: Sequence[GradedModule]) -> GradedModule:
    parts = list(parts)
    if not parts:
        raise ValueError("empty direct sum needs an explicit shape; use zero_graded")
    first = parts[0]
    for p in parts:
        if (p.ring, p.nvars, p.truncation) != (first.ring, first.nvars, first.truncation):
            raise ValueError("summands must share ring, variables, and truncation")
    ring = first.ring
    comps = []
    for d in range(first.truncation + 1):
        rel = Matrix.block_diagonal(ring, [p.component(d).relations.gens for p in parts])
        n = sum(p.component(d).ngens for p in parts)
        comps.append(PresentedModule.quotient(ring, n, rel))
    maps = tuple(
        tuple(
            Matrix.block_diagonal(ring, [p.map_matrix(i, d) for p in parts])
            for d in range(first.truncation)
        )
        for i in range(first.nvars)
    )
    return GradedModule(ring, first.nvars, first.truncation, tuple(comps), maps,
                        min(p.window for p in parts))


def twist(x: GradedModule, k: int) -> GradedModule:
    """Serre twist: degree m of the result is degree m + k of ``x``.

    Degrees that fall outside 0..D are zero; the window shrinks by |k|
    (worst case in either direction) so no shifted-in boundary junk is
    ever trusted.
    """
    if k == 0:
        return x
    ring = x.ring
    D = x.truncation
    comps = tuple(x.component(m + k) for m in range(D + 1))
    maps = tuple(
        tuple(x.map_matrix(i, m + k) for m in range(D))
        for i in range(x.nvars)
    )
    window = max(min(x.window - abs(k), D), -1)
    return GradedModule(ring, x.nvars, D, comps, maps, window)


def truncate_above(x: GradedModule, bound: int) -> GradedModule:
    """Kill every component in degrees >= bound; maps into the dead zone are zero."""
    ring = x.ring
    z = PresentedModule.free(ring, 0)
    comps = tuple(x.component(d) if d < bound else z for d in range(x.truncation + 1))
    maps = tuple(
        tuple(
            x.map_matrix(i, d) if d + 1 < bound
            else Matrix.zero(ring, comps[d + 1].ngens, comps[d].ngens)
            for d in range(x.truncation)
        )
        for i in range(x.nvars)
    )
    return GradedModule(ring, x.nvars, x.truncation, comps, maps, x.window)


# ---------------------------------------------------------------------------
# graded submodules, canonical filtration, generation degree


@dataclass(frozen=True)
class GradedSubmodule:
    """Per-degree lattices inside the components' generator covers.

    Every lattice contains the component relations, so each degree
    describes an honest subobject of the quotient; closure under the
    t maps is a checkable invariant.
    """

    parent: GradedModule
    degrees: tuple

    def __post_init__(self) -> None:
        if len(self.degrees) != self.parent.truncation + 1:
            raise ValueError("need one lattice per degree")
        for d, S in enumerate(self.degrees):
            if S.ambient != self.parent.component(d).ngens:
                raise ValueError(f"lattice at degree {d} has the wrong ambient rank")

    def is_t_closed(self) -> bool:
        for i in range(self.parent.nvars):
            for d in range(self.parent.truncation):
                img = self.degrees[d].image_under(self.parent.map_matrix(i, d))
                if not self.degrees[d + 1].contains(img):
                    return False
        return True

    def piece_presentation(self, d: int) -> PresentedModule:
        """The degree-d subquotient (lattice over relations), on the lattice basis."""
        from .linalg import solve_columns

        rel = self.parent.component(d).relations
        B = self.degrees[d].gens
        if B.cols == 0:
            return PresentedModule.free(self.parent.ring, 0)
        if rel.gens.cols:
            coords = solve_columns(B, rel.gens)
            if coords is None:
                raise AssertionError("relations escaped their containing lattice")
        else:
            coords = Matrix.zero(self.parent.ring, B.cols, 0)
        return PresentedModule.quotient(self.parent.ring, B.cols, coords)

    def piece_structure(self, d: int) -> ModulePresentation:
        return self.piece_presentation(d).structure()

    def piece_is_zero(self, d: int) -> bool:
        rel = self.parent.component(d).relations
        return rel.add(self.degrees[d]) == rel


def full_graded_submodule(x: GradedModule) -> GradedSubmodule:
    return GradedSubmodule(
        x, tuple(Submodule.full(x.ring, x.component(d).ngens)
                 for d in range(x.truncation + 1))
    )


def canonical_filtration(x: GradedModule, m: int) -> GradedSubmodule:
    """Everything up to degree m, then only what the t maps generate."""
    lats = []
    for d in range(x.truncation + 1):
        n = x.component(d).ngens
        if d <= m:
            lats.append(Submodule.full(x.ring, n))
        else:
            span = x.component(d).relations
            prev = lats[d - 1]
            for i in range(x.nvars):
                span = span.add(prev.image_under(x.map_matrix(i, d - 1)))
            lats.append(span)
    return GradedSubmodule(x, tuple(lats))


def degree_of_generation(x: GradedModule) -> int:
    """Least m with F_m x = x across the window.

    Raises NotFound when new content still appears at the window edge,
    since then no generation bound is witnessed by visible degrees.
    """
    if x.window < 0:
        raise NotFound("window is empty")
    last_new = 0
    for d in range(1, x.window + 1):
        span = x.component(d).relations
        for i in range(x.nvars):
            span = span.add(
                Submodule.full(x.ring, x.component(d - 1).ngens)
                .image_under(x.map_matrix(i, d - 1))
            )
        generated = span.is_full or x.component(d).ngens == 0
        if not generated:
            last_new = d
    if last_new == x.window and x.window > 0:
        raise NotFound("content appears at the window edge; no bound witnessed")
    return last_new


# ---------------------------------------------------------------------------
# Nil membership


@dataclass(frozen=True)
class NilVerdict:
    """Either a certified vanishing bound, or no certificate in the window."""

    certified: bool
    bound: Optional[int] = None

    @staticmethod
    def yes(bound: int) -> "NilVerdict":
        return NilVerdict(True, bound)

    @staticmethod
    def no_within_window() -> "NilVerdict":
        return NilVerdict(False, None)


def is_nil(x: GradedModule) -> NilVerdict:
    """Yes(b) with minimal b when x vanishes from b through the window."""
    if x.window < 0:
        return NilVerdict.no_within_window()
    if not x.component(x.window).is_zero_module:
        return NilVerdict.no_within_window()
    b = x.window
    while b > 0 and x.component(b - 1).is_zero_module:
        b -= 1
    return NilVerdict.yes(b)


# ---------------------------------------------------------------------------
# the ideal generated by a set of variables


def ff_graded_submodule(x: GradedModule, variables: Sequence[int]) -> GradedSubmodule:
    """Sum of the images of t_i over i in ``variables``, degree by degree."""
    vs = sorted(set(variables))
    for i in vs:
        if not 0 <= i < x.nvars:
            raise ValueError(f"no variable {i}")
    lats = []
    for d in range(x.truncation + 1):
        span = x.component(d).relations
        if d >= 1:
            full_prev = Submodule.full(x.ring, x.component(d - 1).ngens)
            for i in vs:
                span = span.add(full_prev.image_under(x.map_matrix(i, d - 1)))
        lats.append(span)
    return GradedSubmodule(x, tuple(lats))


def submodule_as_graded(sub: GradedSubmodule) -> GradedModule:
    """Present a t-closed graded submodule as a graded module of its own."""
    x = sub.parent
    ring = x.ring
    from .linalg import solve_columns

    comps = []
    for d in range(x.truncation + 1):
        B = sub.degrees[d].gens
        rel = x.component(d).relations.gens
        if B.cols == 0:
            comps.append(PresentedModule.free(ring, 0))
            continue
        coords = solve_columns(B, rel) if rel.cols else Matrix.zero(ring, B.cols, 0)
        if coords is None:
            raise AssertionError("relations escaped their containing lattice")
        comps.append(PresentedModule.quotient(ring, B.cols, coords))
    maps = []
    for i in range(x.nvars):
        fam = []
        for d in range(x.truncation):
            B = sub.degrees[d].gens
            B2 = sub.degrees[d + 1].gens
            if B.cols == 0 or B2.cols == 0:
                fam.append(Matrix.zero(ring, B2.cols, B.cols))
                continue
            coords = solve_columns(B2, x.map_matrix(i, d) @ B)
            if coords is None:
                raise ValueError("submodule is not closed under the t maps")
            fam.append(coords)
        maps.append(tuple(fam))
    return GradedModule(ring, x.nvars, x.truncation, tuple(comps), tuple(maps),
                        x.window)


def ff_sub(x: GradedModule, variables: Sequence[int]) -> GradedModule:
    return submodule_as_graded(ff_graded_submodule(x, variables))


def quotient_by_vars(x: GradedModule, variables: Sequence[int]) -> GradedModule:
    """Quotient by the ideal the chosen variables generate; their maps become zero."""
    vs = sorted(set(variables))
    ideal = ff_graded_submodule(x, vs)
    comps = tuple(
        PresentedModule(x.ring, x.component(d).ngens, ideal.degrees[d])
        for d in range(x.truncation + 1)
    )
    maps = tuple(
        tuple(
            Matrix.zero(x.ring, comps[d + 1].ngens, comps[d].ngens) if i in vs
            else x.map_matrix(i, d)
            for d in range(x.truncation)
        )
        for i in range(x.nvars)
    )
    return GradedModule(x.ring, x.nvars, x.truncation, comps, maps, x.window)


# ---------------------------------------------------------------------------
# Koszul homology


def koszul_cube_slice(x: GradedModule, d: int) -> SCube:
    """Degree-d slice of the Koszul cube: vertex at T is x_{d-#T}, boundaries t_i."""
    dirs = tuple(range(1, x.nvars + 1))
    verts = {}
    bnds = {}
    for size in range(x.nvars + 1):
        for combo in itertools.combinations(dirs, size):
            T = frozenset(combo)
            verts[T] = x.component(d - size)
            for t in T:
                bnds[(T, t)] = x.map_matrix(t - 1, d - size)
    return SCube(dirs, verts, bnds)


@dataclass(frozen=True)
class GradedClassWindow:
    """Koszul homology per homological index and degree, plus its window.

    ``structures[i][d]`` is T_i at degree d; entries beyond the window
    are absent, not zero.
    """

    window: int
    structures: tuple

    def structure(self, i: int, d: int) -> ModulePresentation:
        return self.structures[i][d]

    def dim(self, i: int, d: int) -> int:
        return self.structures[i][d].free_rank

    def index_row(self, i: int) -> tuple:
        return self.structures[i]

    @property
    def max_index(self) -> int:
        return len(self.structures) - 1


def koszul_homology(x: GradedModule) -> GradedClassWindow:
    """All T_i across the window, via total complexes of the degree slices."""
    if x.truncation < x.nvars:
        raise WindowTooSmall(
            f"truncation {x.truncation} cannot support {x.nvars} Koszul directions"
        )
    w = x.window - x.nvars
    if w < 0:
        raise WindowTooSmall("window is smaller than the variable count")
    rows = [[] for _ in range(x.nvars + 1)]
    for d in range(w + 1):
        cx = total_complex(koszul_cube_slice(x, d))
        for i in range(x.nvars + 1):
            rows[i].append(cx.homology(i))
    return GradedClassWindow(w, tuple(tuple(r) for r in rows))


def is_t_regular(x: GradedModule) -> bool:
    table = koszul_homology(x)
    return all(
        table.structure(i, d).is_zero
        for i in range(1, table.max_index + 1)
        for d in range(table.window + 1)
    )


# ---------------------------------------------------------------------------
# the part-list functors


def from_parts(parts: Sequence, nvars: int, truncation: int,
               ring: Ring = ZZ) -> GradedModule:
    """Direct sum over k of the free graded module on parts[k], twisted by -k."""
    if len(parts) > truncation + 1:
        raise ValueError("more parts than degrees")
    summands = [
        free_graded(p, nvars, k, truncation, ring) for k, p in enumerate(parts)
    ]
    if not summands:
        return zero_graded(ring, nvars, truncation)
    return direct_sum(summands)


def to_parts(x: GradedModule, upto: Optional[int] = None) -> list:
    """Degreewise T_0, defined when all higher Koszul homology vanishes."""
    table = koszul_homology(x)
    for i in range(1, table.max_index + 1):
        for d in range(table.window + 1):
            if not table.structure(i, d).is_zero:
                raise NotTRegular(f"T_{i} is nonzero at degree {d}")
    if upto is None:
        upto = table.window
    if upto > table.window:
        raise WindowTooSmall(f"requested degree {upto} beyond window {table.window}")
    return [table.structure(0, d) for d in range(upto + 1)]


# ---------------------------------------------------------------------------
# Nil witnesses and forgetting the grading


@dataclass(frozen=True)
class NilWitness:
    """Truncation z of the ambient object, with the composite x -> y -> z."""

    quotient: GradedModule
    bound: int
    composite: tuple  # per degree: sub lattice basis written in z's generators


def nil_truncation_witness(sub: GradedSubmodule) -> NilWitness:
    """For a Nil subobject x of y, the truncation z = y(<b) receives x injectively.

    The bound is read off the per-degree lattices directly, so families
    that are not t-closed (only degreewise subobjects) work too.
    """
    y = sub.parent
    if y.window < 0 or not sub.piece_is_zero(y.window):
        raise NotNil("the subobject has no visible vanishing bound")
    b = y.window
    while b > 0 and sub.piece_is_zero(b - 1):
        b -= 1
    z = truncate_above(y, b)
    composite = []
    for d in range(y.truncation + 1):
        B = sub.degrees[d].gens
        if d < b:
            composite.append(B)  # z_d = y_d there
        else:
            composite.append(Matrix.zero(y.ring, z.component(d).ngens, B.cols))
    return NilWitness(z, b, tuple(composite))


def witness_composite_injective(sub: GradedSubmodule, witness: NilWitness) -> bool:
    for d in range(sub.parent.truncation + 1):
        src = sub.piece_presentation(d)
        dst = witness.quotient.component(d)
        M = witness.composite[d]
        if not PresentedMap(src, dst, M).is_injective():
            return False
    return True


def forget_grading(x: GradedModule) -> AffineObject:
    """Direct sum of the components below the Nil bound, with t_i as block shifts."""
    verdict = is_nil(x)
    if not verdict.certified:
        raise NotNil("cannot forget the grading of an object with no vanishing bound")
    b = verdict.bound
    ring = x.ring
    degs = list(range(b))
    offsets = []
    total = 0
    for d in degs:
        offsets.append(total)
        total += x.component(d).ngens
    rel = (Matrix.block_diagonal(ring, [x.component(d).relations.gens for d in degs])
           if degs else Matrix.zero(ring, 0, 0))
    module = PresentedModule.quotient(ring, total, rel)
    endos = []
    for i in range(x.nvars):
        grid = [[ring.zero] * total for _ in range(total)]
        for d in degs[:-1]:
            M = x.map_matrix(i, d)
            r0 = offsets[d + 1]
            c0 = offsets[d]
            for r in range(M.rows):
                for c in range(M.cols):
                    v = M.entries[r][c]
                    if v != ring.zero:
                        grid[r0 + r][c0 + c] = v
        endos.append(Matrix(ring, total, total, tuple(tuple(row) for row in grid)))
    return AffineObject(ring, module, tuple(endos))
