"""Seeded random instances for tests and the verification suites.

Everything here is deterministic in the provided ``random.Random``.  The
generators produce structured objects (commuting cubes, genuinely split
short exact sequences, nilpotent endomorphism families) by building an
obviously correct instance and then conjugating by random unimodular
matrices, which preserves the structure being tested while scrambling
the presentation.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from .affine import AffineObject, FFiltration, ff_image
from .cubes import SCube, typical_cube
from .graded import GradedModule, direct_sum, from_parts, truncate_above
from .linalg import Matrix, Ring, Submodule, ZZ, invert_unimodular


def random_unimodular(rng: random.Random, n: int, steps: int = 6,
                      ring: Ring = ZZ) -> Matrix:
    """Product of random elementary shear and swap matrices; det is +-1."""
    M = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        if rng.random() < 0.25:
            M[i], M[j] = M[j], M[i]
        else:
            c = ring.normalize(rng.choice((-2, -1, 1, 2)))
            M[i] = [ring.add(a, ring.mul(c, b)) for a, b in zip(M[i], M[j])]
    return Matrix(ring, n, n, tuple(tuple(row) for row in M))


def conjugate_cube(cube: SCube, bases: dict) -> SCube:
    """Change basis at every vertex: boundaries become g_dst @ d @ g_src^-1."""
    verts = dict(cube.vertices)
    bnds = {}
    inv = {T: invert_unimodular(g) for T, g in bases.items()}
    for (T, t), M in cube.boundaries.items():
        bnds[(T, t)] = bases[T - {t}] @ M @ inv[T]
    return SCube(cube.directions, verts, bnds)


def random_typical_cube(rng: random.Random, n_dirs: int, max_rank: int = 3,
                        scalar_pool: Sequence = (2, 3, 4, 5, 6),
                        ring: Ring = ZZ) -> SCube:
    rank = rng.randint(1, max_rank)
    scalars = [rng.choice(scalar_pool) for _ in range(n_dirs)]
    mults = [rng.randint(0, rank) for _ in range(n_dirs)]
    return typical_cube(ring, scalars, rank, mults)


def random_commuting_cube(rng: random.Random, n_dirs: int, max_rank: int = 3,
                          scalar_pool: Sequence = (2, 3, 4, 5, 6),
                          ring: Ring = ZZ) -> SCube:
    """Random valid cube: a typical cube in a scrambled basis at each vertex."""
    cube = random_typical_cube(rng, n_dirs, max_rank, scalar_pool, ring)
    rank = cube.vertices[frozenset()].ngens
    bases = {T: random_unimodular(rng, rank, ring=ring) for T in cube.subsets()}
    return conjugate_cube(cube, bases)


def random_matrix(rng: random.Random, ring: Ring, rows: int, cols: int,
                  bound: int = 9) -> Matrix:
    entries = tuple(
        tuple(ring.normalize(rng.randint(-bound, bound)) for _ in range(cols))
        for _ in range(rows)
    )
    return Matrix(ring, rows, cols, entries)


def random_graded(rng: random.Random, nvars: int, truncation: int,
                  max_dim: int = 2) -> GradedModule:
    """Graded module with free components and a valid commuting family."""
    parts = [rng.randint(0, max_dim) for _ in range(rng.randint(1, 4))]
    x = from_parts(parts, nvars, truncation)
    if rng.random() < 0.4:
        x = truncate_above(x, rng.randint(0, truncation))
    if rng.random() < 0.3:
        extra = from_parts([rng.randint(0, max_dim)], nvars, truncation)
        x = direct_sum([x, extra])
    return x


def random_nil_graded(rng: random.Random, nvars: int, truncation: int,
                      max_degree: int = 4, max_dim: int = 2) -> GradedModule:
    """Nil module: random free-component family cut off at a low degree."""
    parts = [rng.randint(0, max_dim) for _ in range(rng.randint(1, max_degree + 1))]
    if not any(parts):
        parts[0] = 1
    x = from_parts(parts, nvars, truncation)
    return truncate_above(x, rng.randint(len(parts) - 1, max_degree))


def conjugate_graded(rng: random.Random, x: GradedModule) -> GradedModule:
    """Per-degree unimodular change of basis; needs free components."""
    assert all(c.is_free for c in x.components)
    dims = [c.ngens for c in x.components]
    bases = [random_unimodular(rng, d, ring=x.ring) for d in dims]
    inv = [invert_unimodular(g) for g in bases]
    maps = tuple(
        tuple(bases[d + 1] @ x.map_matrix(i, d) @ inv[d]
              for d in range(x.truncation))
        for i in range(x.nvars)
    )
    return GradedModule(x.ring, x.nvars, x.truncation, x.components, maps, x.window)


def random_ses(rng: random.Random, nvars: int, truncation: int):
    """Degreewise short exact sequence, scrambled by a change of basis.

    The middle term is the direct sum of the ends, optionally glued by a
    random extension block when a single variable leaves it unconstrained,
    then rewritten in a random basis at every degree.
    """
    from .k0 import SesWitness

    sub = random_graded(rng, nvars, truncation)
    quot = random_graded(rng, nvars, truncation)
    a = [sub.component(d).ngens for d in range(truncation + 1)]
    b = [quot.component(d).ngens for d in range(truncation + 1)]
    plain = direct_sum([sub, quot])
    extend = nvars == 1 and rng.random() < 0.5
    bases = [random_unimodular(rng, a[d] + b[d]) for d in range(truncation + 1)]
    inv = [invert_unimodular(g) for g in bases]
    maps = []
    for i in range(nvars):
        row = []
        for d in range(truncation):
            block = plain.map_matrix(i, d)
            if extend:
                top = Matrix.hstack(ZZ, [
                    sub.map_matrix(i, d),
                    random_matrix(rng, ZZ, a[d + 1], b[d], bound=2),
                ], rows=a[d + 1])
                bottom = Matrix.hstack(ZZ, [
                    Matrix.zero(ZZ, b[d + 1], a[d]),
                    quot.map_matrix(i, d),
                ], rows=b[d + 1])
                block = Matrix.vstack(ZZ, [top, bottom])
            row.append(bases[d + 1] @ block @ inv[d])
        maps.append(tuple(row))
    middle = GradedModule(ZZ, nvars, truncation, plain.components,
                          tuple(maps), plain.window)
    window = min(sub.window, middle.window, quot.window)
    injections = tuple(
        bases[d] @ Matrix.vstack(ZZ, [
            Matrix.identity(ZZ, a[d]), Matrix.zero(ZZ, b[d], a[d])
        ])
        for d in range(window + 1)
    )
    surjections = tuple(
        Matrix.hstack(ZZ, [Matrix.zero(ZZ, b[d], a[d]),
                           Matrix.identity(ZZ, b[d])], rows=b[d]) @ inv[d]
        for d in range(window + 1)
    )
    return SesWitness(sub, middle, quot, injections, surjections)


def _matrix_polynomial(rng: random.Random, base: Matrix,
                       degree: int = 2, bound: int = 2,
                       constant: bool = True) -> Matrix:
    n = base.rows
    acc = Matrix.zero(ZZ, n, n)
    power = Matrix.identity(ZZ, n)
    for k in range(degree + 1):
        if k > 0:
            power = power @ base
        if k == 0 and not constant:
            continue
        c = rng.randint(-bound, bound)
        if c:
            acc = acc + power.scale(c)
    return acc


def random_affine(rng: random.Random, max_rank: int = 3,
                  max_endos: int = 2, bound: int = 2) -> AffineObject:
    """Free module with commuting endomorphisms: polynomials in one matrix."""
    rank = rng.randint(1, max_rank)
    base = random_matrix(rng, ZZ, rank, rank, bound)
    endos = [_matrix_polynomial(rng, base, bound=bound)
             for _ in range(rng.randint(1, max_endos))]
    return AffineObject.free(ZZ, rank, endos)


def random_submodule(rng: random.Random, ambient: int,
                     bound: int = 4) -> Submodule:
    gens = random_matrix(rng, ZZ, ambient, rng.randint(1, max(ambient, 1)), bound)
    return Submodule.span(ZZ, ambient, gens)


def random_invariant_submodule(rng: random.Random, x: AffineObject,
                               bound: int = 4) -> Submodule:
    """Random lattice closed off under the endomorphisms (a subobject)."""
    scale = rng.choice((1, 1, 2, 3, 4))
    gens = random_matrix(rng, ZZ, x.module.ngens,
                         rng.randint(1, max(x.module.ngens, 1)), bound)
    sub = Submodule.span(ZZ, x.module.ngens, gens.scale(scale))
    while True:
        bigger = sub.add(ff_image(x, sub))
        if bigger == sub:
            return sub
        sub = bigger


def random_nilpotent_affine(rng: random.Random, max_rank: int = 4,
                            max_endos: int = 2) -> AffineObject:
    """Commuting nilpotent endomorphisms in a scrambled basis."""
    rank = rng.randint(1, max_rank)
    entries = [[rng.randint(-2, 2) if j > i else 0 for j in range(rank)]
               for i in range(rank)]
    strict = Matrix.from_rows(ZZ, entries)
    endos = [_matrix_polynomial(rng, strict, bound=2, constant=False)
             for _ in range(rng.randint(1, max_endos))]
    g = random_unimodular(rng, rank)
    ginv = invert_unimodular(g)
    return AffineObject.free(ZZ, rank, [g @ e @ ginv for e in endos])


def random_valid_filtration(rng: random.Random, depth: int = 8,
                            max_rank: int = 3) -> FFiltration:
    """Decreasing chain with f x_n inside x_{n+1}, mixing delays and junk."""
    x = random_affine(rng, max_rank=max_rank)
    steps = [Submodule.full(ZZ, x.module.ngens)]
    for _ in range(depth):
        current = steps[-1]
        nxt = ff_image(x, current)
        if rng.random() < 0.4 and current.gens.cols:
            # keep some random combinations of the current step as well
            keep = current.gens @ random_matrix(
                rng, ZZ, current.gens.cols, rng.randint(1, 2), 2)
            nxt = nxt.add(Submodule.span(ZZ, x.module.ngens, keep))
        steps.append(nxt)
    return FFiltration(x, tuple(range(x.nendos)), tuple(steps))


def random_laurent(rng: random.Random, nvars: int, max_terms: int = 4,
                   bound: int = 3):
    from .adams import LaurentPolynomial

    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        expo = tuple(rng.randint(-2, 2) for _ in range(nvars))
        c = rng.randint(-bound, bound)
        if c:
            terms[expo] = terms.get(expo, 0) + c
    return LaurentPolynomial.from_terms(nvars, terms)
