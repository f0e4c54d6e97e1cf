"""Graded modules: twists, filtrations, Koszul homology, the part functors."""

import random

import pytest

from kml.affine import nil_index
from kml.cubes import is_admissible
from kml.errors import NotFound, NotNil, NotTRegular, WindowTooSmall
from kml.graded import (
    GradedModule,
    agree_on_window,
    canonical_filtration,
    concentrated_graded,
    degree_of_generation,
    direct_sum,
    ff_graded_submodule,
    ff_sub,
    forget_grading,
    free_graded,
    from_parts,
    full_graded_submodule,
    is_nil,
    is_t_regular,
    koszul_cube_slice,
    koszul_homology,
    monomial_count,
    monomials,
    nil_truncation_witness,
    quotient_by_vars,
    submodule_as_graded,
    to_parts,
    truncate_above,
    twist,
    validate_graded,
    witness_composite_injective,
    zero_graded,
)
from kml.linalg import Matrix, ModulePresentation, Submodule, ZZ
from kml.presentations import PresentedModule


def mz(rows):
    return Matrix.from_rows(ZZ, rows)


def two_term_identity(D=8):
    """1-dim in degrees 0 and 1, the t map an isomorphism between them."""
    z = PresentedModule.free(ZZ, 0)
    one = PresentedModule.free(ZZ, 1)
    comps = tuple([one, one] + [z] * (D - 1))
    maps = [mz([[1]])] + [Matrix.zero(ZZ, comps[d + 1].ngens, comps[d].ngens)
                          for d in range(1, D)]
    return GradedModule(ZZ, 1, D, comps, (tuple(maps),), D)


# ---------------------------------------------------------------------------
# construction and validation


def test_monomial_order_and_count():
    assert monomials(2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert monomial_count(3, 4) == 15
    assert monomials(0, 0) == [()]
    assert monomials(0, 3) == []


def test_free_dims_oracle():
    assert free_graded(2, 2, 1, 3).dims() == [0, 2, 4, 6]


def test_free_no_variables_is_concentrated():
    x = free_graded(3, 0, 0, 4)
    assert x.dims() == [3, 0, 0, 0, 0]


def test_free_one_variable_identity_maps():
    x = free_graded(1, 1, 0, 5)
    assert x.dims() == [1] * 6
    for d in range(5):
        assert x.map_matrix(0, d) == Matrix.identity(ZZ, 1)


def test_free_maps_commute():
    for n in (2, 3):
        assert validate_graded(free_graded(1, n, 0, 4)) == []
        assert validate_graded(free_graded(2, n, 1, 4)) == []


def test_validation_catches_noncommuting():
    one = PresentedModule.free(ZZ, 2)
    comps = (one, one, one)
    a = mz([[0, 1], [0, 0]])
    b = mz([[0, 0], [1, 0]])
    x = GradedModule(ZZ, 2, 2, comps, ((a, a), (b, b)), 2)
    assert any("commute" in f for f in validate_graded(x))


# ---------------------------------------------------------------------------
# twist


def test_twist_zero_is_identity():
    x = free_graded(1, 2, 0, 4)
    assert twist(x, 0) is x


def test_twist_down_matches_shifted_free():
    x = twist(free_graded(1, 1, 0, 6), -1)
    assert x.dims() == [0, 1, 1, 1, 1, 1, 1]
    assert x.window == 5
    assert agree_on_window(x, free_graded(1, 1, 1, 6))


def test_twist_round_trip_agrees():
    x = free_graded(2, 2, 0, 5)
    back = twist(twist(x, -1), 1)
    assert back.window == 3
    assert agree_on_window(back, x)


# ---------------------------------------------------------------------------
# canonical filtration and generation degree


def test_generation_degree_of_free():
    for k in (0, 1, 2):
        assert degree_of_generation(free_graded(1, 2, k, 6)) == k


def test_generation_degree_sees_late_generator():
    x = direct_sum([free_graded(1, 1, 0, 8), concentrated_graded(1, 1, 5, 8)])
    assert degree_of_generation(x) == 5


def test_generation_degree_of_zero():
    assert degree_of_generation(zero_graded(ZZ, 1, 4)) == 0


def test_generation_not_witnessed_at_edge():
    with pytest.raises(NotFound):
        degree_of_generation(concentrated_graded(1, 1, 4, 4))


def test_canonical_filtration_pieces():
    x = free_graded(1, 1, 0, 5)
    F0 = canonical_filtration(x, 0)
    assert F0.is_t_closed()
    # F_0 of the free module on one generator is everything
    for d in range(6):
        assert F0.degrees[d].is_full
    y = direct_sum([x, concentrated_graded(1, 1, 3, 5)])
    G0 = canonical_filtration(y, 0)
    assert G0.piece_structure(3).free_rank == 1  # misses the degree-3 summand
    G3 = canonical_filtration(y, 3)
    for d in range(6):
        assert G3.degrees[d].is_full


# ---------------------------------------------------------------------------
# Nil


def test_is_nil_truncated():
    x = truncate_above(free_graded(1, 1, 0, 8), 3)
    v = is_nil(x)
    assert v.certified and v.bound == 3


def test_is_nil_free_is_open():
    assert not is_nil(free_graded(1, 1, 0, 8)).certified


def test_is_nil_zero():
    v = is_nil(zero_graded(ZZ, 2, 5))
    assert v.certified and v.bound == 0


# ---------------------------------------------------------------------------
# the variable ideal


def test_quotient_by_single_variable():
    x = free_graded(1, 1, 0, 6)
    q = quotient_by_vars(x, [0])
    structs = [c.structure() for c in q.components]
    assert structs[0].free_rank == 1
    assert all(s.is_zero for s in structs[1:])
    assert quotient_by_vars(q, [0]) == q  # idempotent


def test_quotient_by_nothing():
    x = free_graded(2, 2, 0, 4)
    assert quotient_by_vars(x, []) == x


def test_quotient_partial_variables():
    # killing t2 in two variables leaves the one-variable free module sizes
    x = free_graded(1, 2, 0, 5)
    q = quotient_by_vars(x, [1])
    assert [c.structure().free_rank for c in q.components] == [1] * 6
    assert validate_graded(q) == []


def test_ff_sub_of_free():
    x = free_graded(1, 1, 0, 6)
    ideal = ff_graded_submodule(x, [0])
    assert ideal.is_t_closed()
    s = ff_sub(x, [0])
    assert s.dims() == [0] + [1] * 6
    assert validate_graded(s) == []


def test_submodule_as_graded_of_full():
    x = free_graded(1, 2, 1, 4)
    assert submodule_as_graded(full_graded_submodule(x)).dims() == x.dims()


# ---------------------------------------------------------------------------
# Koszul homology


def test_free_modules_are_zero_spherical():
    for n in (1, 2, 3):
        for k in (0, 1):
            x = free_graded(2, n, k, n + 3)
            table = koszul_homology(x)
            for d in range(table.window + 1):
                expected = 2 if d == k else 0
                assert table.dim(0, d) == expected
                assert not table.structure(0, d).invariant_factors
                for i in range(1, n + 1):
                    assert table.structure(i, d).is_zero
            assert is_t_regular(x)


def test_koszul_of_two_term_identity():
    x = two_term_identity(8)
    table = koszul_homology(x)
    t0 = [table.structure(0, d) for d in range(table.window + 1)]
    t1 = [table.structure(1, d) for d in range(table.window + 1)]
    assert t0[0].free_rank == 1 and all(s.is_zero for s in t0[1:])
    assert t1[2].free_rank == 1 and all(
        s.is_zero for i, s in enumerate(t1) if i != 2
    )
    assert not is_t_regular(x)


def test_koszul_of_zero_module():
    table = koszul_homology(zero_graded(ZZ, 2, 5))
    for i in range(table.max_index + 1):
        for d in range(table.window + 1):
            assert table.structure(i, d).is_zero


def test_koszul_window_too_small():
    with pytest.raises(WindowTooSmall):
        koszul_homology(free_graded(1, 3, 0, 2))


def test_koszul_slices_of_free_are_admissible():
    # admissibility bridge for the free-module Koszul cubes
    for n in (1, 2, 3):
        x = free_graded(1, n, 1, n + 2)
        for d in range(x.window - n + 1):
            assert is_admissible(koszul_cube_slice(x, d))


# ---------------------------------------------------------------------------
# part functors


def test_from_parts_dims_oracle():
    x = from_parts([1, 0, 1], 1, 8)
    assert x.dims() == [1, 1, 2, 2, 2, 2, 2, 2, 2]


def test_to_parts_of_free():
    x = free_graded(2, 2, 1, 5)
    parts = to_parts(x)
    assert parts[1].free_rank == 2
    assert all(p.is_zero for i, p in enumerate(parts) if i != 1)


def test_to_parts_requires_t_regular():
    with pytest.raises(NotTRegular):
        to_parts(two_term_identity(8))


def test_round_trip_parts():
    rng = random.Random(83)
    for _ in range(8):
        n = rng.randint(1, 2)
        m = rng.randint(0, 3)
        parts = [rng.randint(0, 2) for _ in range(m + 1)]
        D = m + n + 3
        x = from_parts(parts, n, D)
        back = to_parts(x)
        window = x.window - n
        for k in range(min(len(parts) - 1, window) + 1):
            assert back[k] == ModulePresentation(ZZ, parts[k], ())
        for k in range(len(parts), window + 1):
            assert back[k].is_zero


def test_parts_match_filtration_pieces():
    # per-degree dimensions of a(b(x)) equal the sums over the canonical
    # filtration's graded pieces
    rng = random.Random(89)
    for _ in range(5):
        parts = [rng.randint(0, 2) for _ in range(3)]
        n = rng.randint(1, 2)
        D = 6
        x = from_parts(parts, n, D)
        rebuilt = from_parts([p.free_rank for p in to_parts(x, 2)], n, D)
        piece_dims = []
        for d in range(x.window + 1):
            total = 0
            prev = None
            for p in range(d + 1):
                cur = canonical_filtration(x, p)
                if prev is None:
                    total += cur.piece_structure(d).free_rank if p <= d else 0
                    inner = cur.degrees[d]
                else:
                    # piece F_p/F_{p-1} at degree d
                    from kml.linalg import cokernel, solve_columns

                    B = cur.degrees[d].gens
                    coords = solve_columns(B, prev.gens)
                    total += cokernel(coords).free_rank if coords is not None else 0
                prev = cur.degrees[d]
            piece_dims.append(total)
        for d in range(min(x.window, rebuilt.window) + 1):
            assert rebuilt.component(d).structure().free_rank == x.dims()[d]
            assert piece_dims[d] == x.dims()[d]


# ---------------------------------------------------------------------------
# Nil witnesses


def test_nil_witness_degree_zero_sub_of_free():
    y = free_graded(1, 1, 0, 6)
    degs = [Submodule.full(ZZ, 1)] + [Submodule.zero(ZZ, 1)] * 6
    from kml.graded import GradedSubmodule

    sub = GradedSubmodule(y, tuple(degs))
    w = nil_truncation_witness(sub)
    assert w.bound == 1
    assert w.quotient.dims() == [1, 0, 0, 0, 0, 0, 0]
    assert witness_composite_injective(sub, w)


def test_nil_witness_zero_sub():
    y = free_graded(1, 1, 0, 4)
    from kml.graded import GradedSubmodule

    sub = GradedSubmodule(y, tuple(Submodule.zero(ZZ, 1) for _ in range(5)))
    w = nil_truncation_witness(sub)
    assert w.bound == 0
    assert all(c.is_zero_module for c in w.quotient.components)
    assert witness_composite_injective(sub, w)


def test_nil_witness_full_nil_parent():
    y = truncate_above(free_graded(1, 1, 0, 6), 2)
    sub = full_graded_submodule(y)
    w = nil_truncation_witness(sub)
    assert w.bound == 2
    assert agree_on_window(w.quotient, y)
    assert witness_composite_injective(sub, w)


def test_nil_witness_rejects_open_sub():
    y = free_graded(1, 1, 0, 4)
    with pytest.raises(NotNil):
        nil_truncation_witness(full_graded_submodule(y))


# ---------------------------------------------------------------------------
# forgetting the grading


def test_forget_concentrated():
    a = forget_grading(concentrated_graded(1, 1, 0, 4))
    assert a.module.ngens == 1
    assert a.endos[0].is_zero


def test_forget_shift_block():
    x = truncate_above(free_graded(1, 1, 0, 8), 3)
    a = forget_grading(x)
    assert a.module.ngens == 3
    v = nil_index(a)
    assert v.nilpotent and v.index == 3


def test_forget_invariant_under_twist():
    x = truncate_above(free_graded(1, 1, 0, 8), 3)
    assert forget_grading(twist(x, -2)) == forget_grading(x)


def test_forget_requires_nil():
    with pytest.raises(NotNil):
        forget_grading(free_graded(1, 1, 0, 5))


def test_forget_commutes_with_ideal():
    # the affine ideal image of the forgotten module matches forgetting the
    # graded ideal submodule
    from kml.affine import ff_submodule

    x = truncate_above(free_graded(1, 2, 0, 6), 3)
    a = forget_grading(x)
    lat = ff_submodule(a)
    graded_ideal = ff_sub(x, [0, 1])
    total = sum(
        graded_ideal.component(d).structure().free_rank
        for d in range(3)
    )
    assert lat.rank == total
