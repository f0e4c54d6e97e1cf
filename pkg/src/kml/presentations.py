"""Modules presented by generators and relations, and maps between them.

A presented module is a quotient of a free module by a canonical
(Hermite-form) relation submodule, so equal values mean equal quotients
of the same free cover.  Maps are matrices on generators; well-defined
when they carry relations into relations.  This representation makes
induced maps on cokernel cubes literal: quotienting adds relations and
keeps the generator matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotAComplex, RingMismatch
from .linalg import (
    Matrix,
    ModulePresentation,
    Ring,
    Submodule,
    cokernel,
    kernel_basis,
    solve_columns,
)


@dataclass(frozen=True)
class PresentedModule:
    """Quotient of ``ring^ngens`` by a canonical relation submodule."""

    ring: Ring
    ngens: int
    relations: Submodule

    @staticmethod
    def free(ring: Ring, n: int) -> "PresentedModule":
        return PresentedModule(ring, n, Submodule.zero(ring, n))

    @staticmethod
    def quotient(ring: Ring, n: int, relation_gens: Matrix) -> "PresentedModule":
        return PresentedModule(ring, n, Submodule.span(ring, n, relation_gens))

    def __post_init__(self) -> None:
        if self.relations.ambient != self.ngens:
            raise ValueError("relations live in the wrong free module")

    @property
    def is_free(self) -> bool:
        return self.relations.is_zero

    @property
    def is_zero_module(self) -> bool:
        return self.ngens == 0 or self.relations.is_full

    def structure(self) -> ModulePresentation:
        """Free rank and invariant factors of the underlying module."""
        if self.ngens == 0:
            return ModulePresentation(self.ring, 0, ())
        return cokernel(
            self.relations.gens if self.relations.gens.cols
            else Matrix.zero(self.ring, self.ngens, 0)
        )

    def with_extra_relations(self, extra: Matrix) -> "PresentedModule":
        return PresentedModule(
            self.ring, self.ngens,
            self.relations.add(Submodule.span(self.ring, self.ngens, extra)),
        )

    def identity_map(self) -> "PresentedMap":
        return PresentedMap(self, self, Matrix.identity(self.ring, self.ngens))


@dataclass(frozen=True)
class PresentedMap:
    """Map of presented modules, as a matrix on generators."""

    src: PresentedModule
    dst: PresentedModule
    matrix: Matrix

    def __post_init__(self) -> None:
        if self.src.ring != self.dst.ring or self.matrix.ring != self.src.ring:
            raise RingMismatch("map endpoints over different rings")
        if self.matrix.rows != self.dst.ngens or self.matrix.cols != self.src.ngens:
            raise ValueError("matrix shape does not match generator counts")

    @property
    def ring(self) -> Ring:
        return self.src.ring

    def is_well_defined(self) -> bool:
        if self.src.relations.is_zero:
            return True
        return self.dst.relations.contains_matrix(self.matrix @ self.src.relations.gens)

    def is_zero_map(self) -> bool:
        return self.dst.relations.contains_matrix(self.matrix)

    def equals(self, other: "PresentedMap") -> bool:
        """Equality as maps of quotients (matrices may differ by relations)."""
        if self.src != other.src or self.dst != other.dst:
            return False
        return self.dst.relations.contains_matrix(self.matrix - other.matrix)

    def compose(self, first: "PresentedMap") -> "PresentedMap":
        """self after first."""
        if first.dst != self.src:
            raise ValueError("maps are not composable")
        return PresentedMap(first.src, self.dst, self.matrix @ first.matrix)

    def kernel_lattice(self) -> Submodule:
        """Generators of {v : matrix @ v dies in dst} inside the free cover of src."""
        n = self.src.ngens
        rel = self.dst.relations.gens
        if rel.cols == 0:
            return Submodule(self.ring, n, kernel_basis(self.matrix))
        combined = Matrix.hstack(self.ring, [self.matrix, rel])
        K = kernel_basis(combined)
        top = K.submatrix(range(n), range(K.cols))
        return Submodule.span(self.ring, n, top)

    def is_injective(self) -> bool:
        return self.src.relations.contains(self.kernel_lattice())

    def is_surjective(self) -> bool:
        return self.dst.relations.add(
            Submodule.span(self.ring, self.dst.ngens, self.matrix)
        ).is_full

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def cokernel_module(self) -> PresentedModule:
        return self.dst.with_extra_relations(self.matrix)

    def image_of(self, vectors: Matrix) -> Matrix:
        return self.matrix @ vectors


def presented_homology(d_out: PresentedMap, d_in: PresentedMap) -> ModulePresentation:
    """Homology at the shared middle module of two composable presented maps."""
    if d_in.dst != d_out.src:
        raise ValueError("maps do not share the middle module")
    if not d_out.compose(d_in).is_zero_map():
        raise NotAComplex("composite is not zero modulo relations")
    middle = d_out.src
    cycles = d_out.kernel_lattice()
    if cycles.is_zero:
        return ModulePresentation(middle.ring, 0, ())
    B = cycles.gens
    targets = Matrix.hstack(
        middle.ring, [d_in.matrix, middle.relations.gens], rows=middle.ngens
    )
    if targets.cols == 0:
        return cokernel(Matrix.zero(middle.ring, B.cols, 0))
    coords = solve_columns(B, targets)
    if coords is None:
        raise AssertionError("boundaries escaped the cycle lattice")
    return cokernel(coords)
