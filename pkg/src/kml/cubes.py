"""Cube calculus: cubes of modules over a finite direction set.

A cube assigns a module to every subset of its direction set and a
boundary map x_T -> x_{T minus t} to every t in T, with all squares
commuting.  On top of that sit the total complex with its sign
convention, directional zeroth homology (cokernel cubes), the
admissibility recursion, Koszul-cube detection against a scalar tuple,
typical cubes, and the semi-direct membership test.

Vertices are :class:`~kml.presentations.PresentedModule` values.  Input
cubes normally have free vertices; taking directional homology adds the
image of the collapsed boundary to the relations and keeps every other
boundary matrix unchanged, which is what makes iterated homology
literally order-independent here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Mapping, Optional, Sequence

from .errors import (
    BoundExceeded,
    InvalidCube,
    NotAComplex,
    UnknownDirection,
)
from .linalg import (
    Matrix,
    ModulePresentation,
    Ring,
    Submodule,
    ZZ,
    homology_at,
    kernel_basis,
)
from .presentations import PresentedMap, PresentedModule, presented_homology

Label = object  # direction labels: ints or strings


def _subset_key(T, positions: Mapping) -> tuple:
    return tuple(sorted(positions[t] for t in T))


@dataclass(frozen=True)
class SCube:
    """Contravariant cube: subsets of ``directions`` to presented modules."""

    directions: tuple
    vertices: dict
    boundaries: dict

    def __post_init__(self) -> None:
        labels = self.directions
        if len(set(labels)) != len(labels):
            raise InvalidCube("duplicate direction labels")
        if len(labels) > 8:
            raise InvalidCube("more than 8 directions")
        expected = {frozenset(c) for k in range(len(labels) + 1)
                    for c in itertools.combinations(labels, k)}
        if set(self.vertices) != expected:
            raise InvalidCube("vertex map does not cover the subsets exactly")
        rings = {v.ring for v in self.vertices.values()}
        if len(rings) > 1:
            raise InvalidCube("vertices over different rings")
        for T in expected:
            for t in T:
                key = (T, t)
                if key not in self.boundaries:
                    raise InvalidCube(f"missing boundary for {sorted(T)} in direction {t}")
                M = self.boundaries[key]
                src = self.vertices[T]
                dst = self.vertices[T - {t}]
                if M.rows != dst.ngens or M.cols != src.ngens:
                    raise InvalidCube(
                        f"boundary {sorted(T)}/{t} has shape {M.rows}x{M.cols}, "
                        f"expected {dst.ngens}x{src.ngens}"
                    )
        extra = set(self.boundaries) - {(T, t) for T in expected for t in T}
        if extra:
            raise InvalidCube(f"stray boundary keys: {sorted(str(k) for k in extra)}")

    @property
    def ring(self) -> Ring:
        return self.vertices[frozenset()].ring

    @property
    def n(self) -> int:
        return len(self.directions)

    def vertex(self, T) -> PresentedModule:
        return self.vertices[frozenset(T)]

    def boundary(self, T, t) -> Matrix:
        return self.boundaries[(frozenset(T), t)]

    def boundary_map(self, T, t) -> PresentedMap:
        T = frozenset(T)
        return PresentedMap(
            self.vertices[T], self.vertices[T - {t}], self.boundaries[(T, t)]
        )

    def subsets(self, size: Optional[int] = None):
        sizes = range(self.n + 1) if size is None else (size,)
        for k in sizes:
            for combo in itertools.combinations(self.directions, k):
                yield frozenset(combo)

    @staticmethod
    def from_free(ring: Ring, directions: Sequence, ranks: Mapping,
                  boundaries: Mapping) -> "SCube":
        """Build a cube with free vertices from ranks and raw matrices."""
        directions = tuple(directions)
        verts = {frozenset(T): PresentedModule.free(ring, r) for T, r in ranks.items()}
        bnds = {(frozenset(T), t): M for (T, t), M in boundaries.items()}
        return SCube(directions, verts, bnds)


def validate_cube(cube: SCube) -> list:
    """All functoriality failures, as human-readable findings; empty means valid."""
    findings = []
    for T in cube.subsets():
        for t in T:
            bmap = cube.boundary_map(T, t)
            if not bmap.is_well_defined():
                findings.append(
                    f"boundary {sorted(T)}/{t} does not respect the vertex relations"
                )
    for T in cube.subsets():
        if len(T) < 2:
            continue
        for s, t in itertools.combinations(sorted(T, key=str), 2):
            one = cube.boundary_map(T - {t}, s).compose(cube.boundary_map(T, t))
            two = cube.boundary_map(T - {s}, t).compose(cube.boundary_map(T, s))
            if not one.equals(two):
                findings.append(
                    f"square at {sorted(T)} in directions {s},{t} does not commute"
                )
    return findings


def is_valid(cube: SCube) -> bool:
    return not validate_cube(cube)


# ---------------------------------------------------------------------------
# total complex


@dataclass(frozen=True)
class ChainComplex:
    """Bounded complex ... -> C_1 -> C_0; ``differentials[i]`` maps C_{i+1} to C_i."""

    components: tuple
    differentials: tuple

    def __post_init__(self) -> None:
        if len(self.differentials) != max(len(self.components) - 1, 0):
            raise ValueError("need one differential per adjacent pair")
        for i, d in enumerate(self.differentials):
            src = self.components[i + 1]
            dst = self.components[i]
            if d.rows != dst.ngens or d.cols != src.ngens:
                raise ValueError(f"differential {i} has the wrong shape")
        for i in range(len(self.differentials) - 1):
            down = self.map_at(i)
            up = self.map_at(i + 1)
            if not down.compose(up).is_zero_map():
                raise NotAComplex(f"d_{i + 1} then d_{i} is not zero")

    @property
    def length(self) -> int:
        return len(self.components) - 1

    def map_at(self, i: int) -> PresentedMap:
        return PresentedMap(
            self.components[i + 1], self.components[i], self.differentials[i]
        )

    def homology(self, i: int) -> ModulePresentation:
        C = self.components[i]
        d_out = (
            self.differentials[i - 1] if i >= 1
            else Matrix.zero(C.ring, 0, C.ngens)
        )
        d_in = (
            self.differentials[i] if i < len(self.differentials)
            else Matrix.zero(C.ring, C.ngens, 0)
        )
        if all(c.is_free for c in self.components):
            return homology_at(d_out, d_in)
        out_dst = self.components[i - 1] if i >= 1 else PresentedModule.free(C.ring, 0)
        in_src = (
            self.components[i + 1] if i < len(self.differentials)
            else PresentedModule.free(C.ring, 0)
        )
        return presented_homology(
            PresentedMap(C, out_dst, d_out), PresentedMap(in_src, C, d_in)
        )

    def homology_all(self) -> list:
        return [self.homology(i) for i in range(len(self.components))]


def total_complex(cube: SCube, order: Optional[Sequence] = None) -> ChainComplex:
    """Collapse a cube to its total complex.

    Degree k is the direct sum of the vertices over k-element subsets.
    The block of the differential from x_T to x_{T minus j} is the j-boundary
    times (-1)^(number of directions in T after j in ``order``).  The order
    defaults to the listed direction order and only moves signs around.
    """
    problems = validate_cube(cube)
    if problems:
        raise InvalidCube("; ".join(problems))
    order = tuple(order) if order is not None else cube.directions
    if sorted(map(str, order)) != sorted(map(str, cube.directions)):
        raise InvalidCube("order must be a permutation of the directions")
    pos = {t: i for i, t in enumerate(order)}
    ring = cube.ring

    by_size = []
    for k in range(cube.n + 1):
        subs = sorted(cube.subsets(k), key=lambda T: _subset_key(T, pos))
        by_size.append(subs)

    components = []
    offsets = []
    for subs in by_size:
        off = {}
        total = 0
        rel_blocks = []
        for T in subs:
            off[T] = total
            total += cube.vertices[T].ngens
            rel_blocks.append(cube.vertices[T].relations.gens)
        offsets.append(off)
        rel = Matrix.block_diagonal(ring, rel_blocks) if subs else Matrix.zero(ring, 0, 0)
        components.append(PresentedModule.quotient(ring, total, rel))

    differentials = []
    for k in range(1, cube.n + 1):
        rows = components[k - 1].ngens
        cols = components[k].ngens
        grid = [[ring.zero] * cols for _ in range(rows)]
        for T in by_size[k]:
            col0 = offsets[k][T]
            for j in T:
                target = T - {j}
                row0 = offsets[k - 1][target]
                sign = -1 if sum(1 for t in T if pos[t] > pos[j]) % 2 else 1
                M = cube.boundaries[(T, j)]
                for i in range(M.rows):
                    for c in range(M.cols):
                        v = M.entries[i][c]
                        if v != ring.zero:
                            grid[row0 + i][col0 + c] = v if sign == 1 else ring.neg(v)
        differentials.append(Matrix(ring, rows, cols, tuple(tuple(r) for r in grid)))

    # ChainComplex stores C_0 first; differentials[i]: C_{i+1} -> C_i
    return ChainComplex(tuple(components), tuple(differentials))


# ---------------------------------------------------------------------------
# directional homology and admissibility


def directional_h0(cube: SCube, k) -> SCube:
    """Cokernel cube in direction ``k``: quotient every vertex by the k-image.

    The vertex at T becomes x_T / im(d^k), presented on the same
    generators, and every remaining boundary keeps its matrix (the induced
    map on cokernels of a commuting square needs no lift).
    """
    if k not in cube.directions:
        raise UnknownDirection(f"{k!r} is not a direction of this cube")
    rest = tuple(t for t in cube.directions if t != k)
    verts = {}
    bnds = {}
    for T in cube.subsets():
        if k in T:
            continue
        collapsed = cube.boundaries[(T | {k}, k)]
        verts[T] = cube.vertices[T].with_extra_relations(collapsed)
        for t in T:
            bnds[(T, t)] = cube.boundaries[(T, t)]
    return SCube(rest, verts, bnds)


def iterated_h0(cube: SCube, subset) -> SCube:
    out = cube
    for k in sorted(subset, key=str):
        out = directional_h0(out, k)
    return out


def is_monic(cube: SCube) -> bool:
    """True when every boundary map is injective (as a map of quotients)."""
    return all(
        cube.boundary_map(T, t).is_injective()
        for T in cube.subsets() for t in T
    )


def is_admissible(cube: SCube) -> bool:
    """Monic at every iterated cokernel stage.

    The recursion "monic, and every directional homology is admissible"
    unrolls to: for every proper subset T of the directions, the iterated
    cokernel cube in the T directions is monic.  Iterated cokernels here
    are order-independent on the nose, so each subset is checked once.
    """
    problems = validate_cube(cube)
    if problems:
        raise InvalidCube("; ".join(problems))
    if cube.n == 0:
        return True
    current = {frozenset(): cube}
    if not is_monic(cube):
        return False
    for _ in range(cube.n - 1):
        nxt = {}
        for T, c in current.items():
            for k in c.directions:
                key = T | {k}
                if key in nxt:
                    continue
                h = directional_h0(c, k)
                if not is_monic(h):
                    return False
                nxt[key] = h
        current = nxt
    return True


# ---------------------------------------------------------------------------
# typical cubes and Koszul detection


def typical_cube(ring: Ring, scalars: Sequence, rank: int,
                 multiplicities: Sequence, directions: Optional[Sequence] = None) -> SCube:
    """Cube with every vertex free of the given rank and constant boundaries.

    The boundary in direction s is diag(f_s, ..., f_s, 1, ..., 1) with
    ``multiplicities[s]`` copies of the scalar, at every face.
    """
    if len(scalars) != len(multiplicities):
        raise ValueError("one multiplicity per scalar")
    for m in multiplicities:
        if not 0 <= m <= rank:
            raise ValueError("multiplicities must lie in [0, rank]")
    if directions is None:
        directions = tuple(range(1, len(scalars) + 1))
    directions = tuple(directions)
    if len(directions) != len(scalars):
        raise ValueError("one direction label per scalar")
    diag = {
        d: Matrix.diagonal(
            ring, [scalars[i]] * multiplicities[i] + [1] * (rank - multiplicities[i])
        )
        for i, d in enumerate(directions)
    }
    verts = {}
    bnds = {}
    for size in range(len(directions) + 1):
        for combo in itertools.combinations(directions, size):
            T = frozenset(combo)
            verts[T] = PresentedModule.free(ring, rank)
            for t in T:
                bnds[(T, t)] = diag[t]
    return SCube(directions, verts, bnds)


def annihilation_exponent(order: int, scalar: int) -> Optional[int]:
    """Least m with order dividing scalar**m, or None when no power works."""
    e = abs(order)
    f = abs(scalar)
    if e == 1:
        return 0
    m = 0
    while e > 1:
        g = gcd(e, f)
        if g == 1:
            return None
        e //= g
        m += 1
    return m


def is_koszul_cube(cube: SCube, scalars: Mapping, bound: int = 64) -> bool:
    """Koszul test: boundaries injective, cokernels killed by scalar powers.

    ``scalars`` maps each direction to its integer; each cokernel may use
    its own exponent m <= bound.  A cokernel no power can kill makes the
    answer False; one killable only beyond the bound raises BoundExceeded.
    """
    if cube.ring != ZZ:
        raise InvalidCube("Koszul detection is defined over the integers")
    for v in cube.vertices.values():
        if not v.is_free:
            raise InvalidCube("Koszul detection needs free vertices")
    missing = [t for t in cube.directions if t not in scalars]
    if missing:
        raise UnknownDirection(f"no scalar for directions {missing}")
    exceeded = False
    for T in cube.subsets():
        for t in T:
            M = cube.boundaries[(T, t)]
            if kernel_basis(M).cols:
                return False
            struct = cube.boundary_map(T, t).cokernel_module().structure()
            if struct.free_rank:
                return False
            for e in struct.invariant_factors:
                m = annihilation_exponent(e, scalars[t])
                if m is None:
                    return False
                if m > bound:
                    exceeded = True
    if exceeded:
        raise BoundExceeded(f"a cokernel needs an exponent beyond {bound}")
    return True


# ---------------------------------------------------------------------------
# semi-direct membership


def semidirect_membership(cube: SCube, pred: Callable) -> bool:
    """Admissible, and every vertex of every iterated cokernel passes ``pred``.

    ``pred(T, module)`` receives the frozenset of collapsed directions and
    one vertex of the corresponding cokernel cube.
    """
    if not is_admissible(cube):
        return False
    for T in cube.subsets():
        h = iterated_h0(cube, T)
        for module in h.vertices.values():
            if not pred(T, module):
                return False
    return True


def directional_torsion_predicate(scalars: Mapping) -> Callable:
    """Vertex test for the semi-direct decomposition of Koszul cubes.

    Collapsing no directions must leave a torsion-free module; collapsing
    T must leave pure torsion killed by a power of the product of the
    scalars of T.
    """

    def pred(T, module: PresentedModule) -> bool:
        struct = module.structure()
        if not T:
            return not struct.invariant_factors
        if struct.free_rank:
            return False
        prod = 1
        for t in T:
            prod *= scalars[t]
        return all(
            annihilation_exponent(e, prod) is not None
            for e in struct.invariant_factors
        )

    return pred
