"""Modules with commuting endomorphism families, and their filtrations.

An affine object is a presented module together with square matrices
phi_1..phi_r that commute pairwise (and respect the relations).  On top
of these sit the ideal f = (phi_i : i in F): images and quotients,
exact nilpotency decisions, f-filtrations with the stability
characterization, the abstract Artin-Rees search, and f-adic devissage
chains.

All submodule arithmetic is exact lattice arithmetic: images are never
saturated, which is the whole point for Artin-Rees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    AmbientMismatch,
    InvalidAffineObject,
    InvalidFiltration,
    NotInvariant,
    NotNilpotent,
)
from .linalg import (
    Matrix,
    QQ,
    Ring,
    Submodule,
    ZZ,
    intersect_submodules,
    solve_columns,
)
from .presentations import PresentedMap, PresentedModule


@dataclass(frozen=True)
class AffineObject:
    """Presented module with pairwise commuting endomorphisms."""

    ring: Ring
    module: PresentedModule
    endos: tuple

    def __post_init__(self) -> None:
        n = self.module.ngens
        if self.module.ring != self.ring:
            raise InvalidAffineObject("module over the wrong ring")
        for phi in self.endos:
            if phi.rows != n or phi.cols != n or phi.ring != self.ring:
                raise InvalidAffineObject("endomorphism with the wrong shape or ring")
        for phi in self.endos:
            if not PresentedMap(self.module, self.module, phi).is_well_defined():
                raise InvalidAffineObject("endomorphism does not respect relations")
        rel = self.module.relations
        for a in range(len(self.endos)):
            for b in range(a + 1, len(self.endos)):
                diff = self.endos[a] @ self.endos[b] - self.endos[b] @ self.endos[a]
                if not rel.contains_matrix(diff):
                    raise InvalidAffineObject(
                        f"endomorphisms {a} and {b} do not commute"
                    )

    @staticmethod
    def free(ring: Ring, dim: int, endos: Sequence[Matrix]) -> "AffineObject":
        return AffineObject(ring, PresentedModule.free(ring, dim), tuple(endos))

    @property
    def nendos(self) -> int:
        return len(self.endos)

    def endo_map(self, i: int) -> PresentedMap:
        return PresentedMap(self.module, self.module, self.endos[i])

    def _all_vars(self, variables: Optional[Sequence[int]]) -> list:
        if variables is None:
            return list(range(self.nendos))
        vs = sorted(set(variables))
        for i in vs:
            if not 0 <= i < self.nendos:
                raise ValueError(f"no endomorphism {i}")
        return vs


def direct_sum_affine(parts: Sequence[AffineObject]) -> AffineObject:
    parts = list(parts)
    if not parts:
        raise ValueError("empty direct sum")
    ring = parts[0].ring
    r = parts[0].nendos
    for p in parts:
        if p.ring != ring or p.nendos != r:
            raise ValueError("summands must share ring and endomorphism count")
    rel = Matrix.block_diagonal(ring, [p.module.relations.gens for p in parts])
    n = sum(p.module.ngens for p in parts)
    module = PresentedModule.quotient(ring, n, rel)
    endos = tuple(
        Matrix.block_diagonal(ring, [p.endos[i] for p in parts]) for i in range(r)
    )
    return AffineObject(ring, module, endos)


# ---------------------------------------------------------------------------
# the ideal generated by a set of endomorphisms


def ff_image(x: AffineObject, lattice: Submodule,
             variables: Optional[Sequence[int]] = None) -> Submodule:
    """Sum of the phi_i images of ``lattice`` plus the relations."""
    vs = x._all_vars(variables)
    out = x.module.relations
    for i in vs:
        out = out.add(lattice.image_under(x.endos[i]))
    return out


def ff_submodule(x: AffineObject, variables: Optional[Sequence[int]] = None) -> Submodule:
    """The subobject f*x: images of all chosen endomorphisms, plus relations."""
    return ff_image(x, Submodule.full(x.ring, x.module.ngens), variables)


def ff_power(x: AffineObject, n: int,
             variables: Optional[Sequence[int]] = None) -> Submodule:
    """The subobject f^n * x, by iterating images (never saturated)."""
    lat = Submodule.full(x.ring, x.module.ngens)
    for _ in range(n):
        lat = ff_image(x, lat, variables)
    return lat


def reduce_mod_ff(x: AffineObject,
                  variables: Optional[Sequence[int]] = None) -> AffineObject:
    """Quotient by f*x; the chosen endomorphisms become zero matrices."""
    vs = x._all_vars(variables)
    module = PresentedModule(x.ring, x.module.ngens, ff_submodule(x, vs))
    n = x.module.ngens
    endos = tuple(
        Matrix.zero(x.ring, n, n) if i in vs else phi
        for i, phi in enumerate(x.endos)
    )
    return AffineObject(x.ring, module, endos)


# ---------------------------------------------------------------------------
# exact nilpotency


@dataclass(frozen=True)
class NilpotencyVerdict:
    """Exact decision: nilpotent with its least index, or genuinely not."""

    nilpotent: bool
    index: Optional[int] = None

    @staticmethod
    def yes(index: int) -> "NilpotencyVerdict":
        return NilpotencyVerdict(True, index)

    @staticmethod
    def no() -> "NilpotencyVerdict":
        return NilpotencyVerdict(False, None)


def _rationally_nilpotent(x: AffineObject, phi: Matrix) -> bool:
    # over Q the quotient is a finite-dimensional space; phi^dim decides
    n = x.module.ngens
    phi_q = Matrix.from_rows(QQ, [[v for v in row] for row in phi.entries])
    rel_q = Matrix.from_rows(
        QQ, [[v for v in row] for row in x.module.relations.gens.entries]
    ) if x.module.relations.gens.cols else Matrix.zero(QQ, n, 0)
    power = Matrix.identity(QQ, n)
    for _ in range(n):
        power = phi_q @ power
    if power.is_zero:
        return True
    if rel_q.cols == 0:
        return False
    return solve_columns(rel_q, power) is not None


def endo_nil_index(x: AffineObject, i: int) -> NilpotencyVerdict:
    """Least N with phi_i^N = 0 on the quotient, decided exactly.

    Over Z, first decide on the rational quotient (power of the matrix),
    then walk the decreasing chain im(phi^k) + relations; the chain lives
    in a finite group once the rational part dies, so a stall is a real
    stall, not a truncation artifact.
    """
    phi = x.endos[i]
    rel = x.module.relations
    if x.ring == ZZ and not _rationally_nilpotent(x, phi):
        return NilpotencyVerdict.no()
    lat = Submodule.full(x.ring, x.module.ngens)
    k = 0
    while True:
        if rel.contains(lat):
            return NilpotencyVerdict.yes(k)
        nxt = rel.add(lat.image_under(phi))
        if nxt == lat:
            return NilpotencyVerdict.no()
        lat = nxt
        k += 1


def nil_index(x: AffineObject,
              variables: Optional[Sequence[int]] = None) -> NilpotencyVerdict:
    """Least N with phi_i^N = 0 for every chosen i; exact in both directions."""
    vs = x._all_vars(variables)
    best = 0
    for i in vs:
        verdict = endo_nil_index(x, i)
        if not verdict.nilpotent:
            return NilpotencyVerdict.no()
        best = max(best, verdict.index)
    return NilpotencyVerdict.yes(best)


# ---------------------------------------------------------------------------
# f-filtrations and stability


@dataclass(frozen=True)
class FFiltration:
    """Decreasing chain x = x_0 >= x_1 >= ... >= x_D with f x_n <= x_{n+1}."""

    parent: AffineObject
    variables: tuple
    steps: tuple  # Submodule per index 0..D

    def __post_init__(self) -> None:
        if not self.steps:
            raise InvalidFiltration("a filtration needs at least x_0")
        n = self.parent.module.ngens
        for S in self.steps:
            if S.ambient != n:
                raise AmbientMismatch("filtration step in the wrong ambient module")

    @property
    def depth(self) -> int:
        return len(self.steps) - 1


def validate_filtration(fil: FFiltration) -> None:
    x = fil.parent
    if not fil.steps[0].add(x.module.relations).is_full:
        raise InvalidFiltration("x_0 must be the whole module")
    for n in range(fil.depth):
        if not fil.steps[n].contains(fil.steps[n + 1]):
            raise InvalidFiltration(f"x_{n} does not contain x_{n + 1}")
        img = ff_image(x, fil.steps[n], fil.variables)
        if not fil.steps[n + 1].contains(img):
            raise InvalidFiltration(f"f x_{n} is not inside x_{n + 1}")


def ff_adic_filtration(x: AffineObject, depth: int,
                       variables: Optional[Sequence[int]] = None) -> FFiltration:
    vs = tuple(x._all_vars(variables))
    steps = [Submodule.full(x.ring, x.module.ngens)]
    for _ in range(depth):
        steps.append(ff_image(x, steps[-1], vs))
    return FFiltration(x, vs, tuple(steps))


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the stability search, with the cross-checked criterion."""

    stable_from: Optional[int]  # None: not found within the window
    cross_check: bool
    window: int


def stability_index(fil: FFiltration) -> StabilityReport:
    """Least n0 with f x_n = x_{n+1} from n0 on, cross-checked two ways.

    The second criterion asks that every later step is generated by
    monomial images of the steps up to the candidate index; the two
    minimal indices provably coincide, and the report records whether
    they did here.
    """
    validate_filtration(fil)
    x = fil.parent
    D = fil.depth
    equal_at = [
        ff_image(x, fil.steps[n], fil.variables)
        == fil.steps[n + 1].add(x.module.relations)
        for n in range(D)
    ]
    stable_from = None
    for n0 in range(D - 1, -1, -1):
        if equal_at[n0]:
            stable_from = n0
        else:
            break

    # criterion two: x_n = sum over k <= m of f^(n-k) x_k, for all n > m
    powers = [[s.add(x.module.relations) for s in fil.steps]]
    for _ in range(D):
        powers.append([ff_image(x, lat, fil.variables) for lat in powers[-1]])
    second = None
    for m in range(D + 1):
        ok = True
        for n in range(m + 1, D + 1):
            span = x.module.relations
            for k in range(m + 1):
                span = span.add(powers[n - k][k])
            if span != fil.steps[n].add(x.module.relations):
                ok = False
                break
        if ok:
            second = m if m < D else None
            break
    return StabilityReport(stable_from, second == stable_from, D)


# ---------------------------------------------------------------------------
# abstract Artin-Rees


@dataclass(frozen=True)
class ArtinReesReport:
    """Least index making the intersection formula hold through the window."""

    index: Optional[int]  # None: not found within the window
    window: int


def artin_rees_index(x: AffineObject, y: Submodule, window: int = 12,
                     variables: Optional[Sequence[int]] = None) -> ArtinReesReport:
    """Search for n0 with f^n x meet y = f^(n-n0) (f^n0 x meet y) up to the window.

    y must be a subobject, i.e. stable under the chosen endomorphisms;
    for an unstable lattice the intersection formula has no reason to
    hold and the search would only ever confirm the vacuous window edge.
    """
    if y.ambient != x.module.ngens:
        raise AmbientMismatch("y lives in the wrong ambient module")
    vs = tuple(x._all_vars(variables))
    y = y.add(x.module.relations)
    if not y.contains(ff_image(x, y, vs)):
        raise NotInvariant("y is not stable under the chosen endomorphisms")
    fpow = [Submodule.full(x.ring, x.module.ngens)]
    for _ in range(window):
        fpow.append(ff_image(x, fpow[-1], vs))
    meets = [intersect_submodules(fp, y) for fp in fpow]
    for n0 in range(window + 1):
        rhs = meets[n0]
        ok = True
        for n in range(n0, window + 1):
            if rhs != meets[n]:
                ok = False
                break
            rhs = ff_image(x, rhs, vs)
        if ok:
            return ArtinReesReport(n0, window)
    return ArtinReesReport(None, window)


# ---------------------------------------------------------------------------
# devissage


def devissage_filtration(x: AffineObject,
                         variables: Optional[Sequence[int]] = None) -> list:
    """The f-adic chain full >= f x >= f^2 x >= ... >= 0 for nilpotent ideals.

    Each quotient is killed by every chosen endomorphism by construction.
    The chain provably reaches the zero subobject within the sum of the
    individual nilpotency indices.
    """
    vs = tuple(x._all_vars(variables))
    verdicts = [endo_nil_index(x, i) for i in vs]
    for v in verdicts:
        if not v.nilpotent:
            raise NotNilpotent("some chosen endomorphism is not nilpotent")
    if x.module.is_zero_module:
        return []
    bound = sum(max(v.index - 1, 0) for v in verdicts) + 1
    rel = x.module.relations
    chain = [Submodule.full(x.ring, x.module.ngens)]
    while not rel.contains(chain[-1]):
        if len(chain) > bound + 1:
            raise AssertionError("devissage chain failed to terminate in bound")
        chain.append(ff_image(x, chain[-1], vs))
    return chain


# ---------------------------------------------------------------------------
# equivariant maps (componentwise calculus)


def equivariant_cokernel(src: AffineObject, dst: AffineObject,
                         matrix: Matrix) -> AffineObject:
    """Cokernel of an equivariant map, with the induced endomorphisms."""
    _check_equivariant(src, dst, matrix)
    module = dst.module.with_extra_relations(matrix)
    return AffineObject(dst.ring, module, dst.endos)


def equivariant_kernel(src: AffineObject, dst: AffineObject,
                       matrix: Matrix) -> AffineObject:
    """Kernel subobject of an equivariant map, in its own presentation."""
    _check_equivariant(src, dst, matrix)
    pm = PresentedMap(src.module, dst.module, matrix)
    lat = pm.kernel_lattice()
    B = lat.gens
    if B.cols == 0:
        return AffineObject(src.ring, PresentedModule.free(src.ring, 0),
                            tuple(Matrix.zero(src.ring, 0, 0) for _ in src.endos))
    rel = src.module.relations.gens
    rel_coords = solve_columns(B, rel) if rel.cols else Matrix.zero(src.ring, B.cols, 0)
    if rel_coords is None:
        raise AssertionError("relations escaped the kernel lattice")
    module = PresentedModule.quotient(src.ring, B.cols, rel_coords)
    endos = []
    for phi in src.endos:
        coords = solve_columns(B, phi @ B)
        if coords is None:
            raise AssertionError("kernel lattice is not endomorphism-stable")
        endos.append(coords)
    return AffineObject(src.ring, module, tuple(endos))


def _check_equivariant(src: AffineObject, dst: AffineObject, matrix: Matrix) -> None:
    if src.nendos != dst.nendos:
        raise ValueError("endomorphism family sizes differ")
    pm = PresentedMap(src.module, dst.module, matrix)
    if not pm.is_well_defined():
        raise ValueError("map does not respect relations")
    for ps, pd in zip(src.endos, dst.endos):
        lhs = matrix @ ps
        rhs = pd @ matrix
        if not dst.module.relations.contains_matrix(lhs - rhs):
            raise ValueError("map is not equivariant")
