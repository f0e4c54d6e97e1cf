"""Class vectors, additivity, the (1-s) square, splitting, projective space."""

import random

import pytest

from kml.errors import NotExact, NotNil, WindowTooSmall
from kml.graded import (
    concentrated_graded,
    direct_sum,
    free_graded,
    from_parts,
    quotient_by_vars,
    truncate_above,
    twist,
    zero_graded,
)
from kml.k0 import (
    K0Vector,
    SesWitness,
    add_zero_variable,
    check_additivity,
    k0_class,
    polynomial_extension,
    projective_space_decomposition,
    split_sequence_verify,
    toeplitz_power_matrix,
    verify_one_minus_s,
)
from kml.linalg import Matrix, ZZ
from kml.presentations import PresentedModule
from kml.samples import random_ses
from tests.test_graded import two_term_identity


def mz(rows):
    return Matrix.from_rows(ZZ, rows)


# ---------------------------------------------------------------------------
# the vector type


def test_vector_basics():
    v = K0Vector.unit(1, 3)
    assert v.coeffs == (0, 1, 0, 0)
    assert v.window == 3
    assert (v + v).coeffs == (0, 2, 0, 0)
    assert v.times_s() == K0Vector.unit(2, 4)
    assert v.restrict(1).coeffs == (0, 1)
    assert K0Vector.zero(2).is_zero
    assert v.describe() == "s^1"
    assert (v.scale(-3) + v).describe() == "-2s^1"


def test_vector_window_arithmetic():
    u = K0Vector((1, 2, 3))
    v = K0Vector((1, 1))
    assert (u - v).coeffs == (0, 1)
    assert u.agrees_with(K0Vector((1, 2)))
    assert not u.agrees_with(K0Vector((1, 3)))
    assert u.one_minus_s_times().coeffs == (1, 1, 1)
    with pytest.raises(WindowTooSmall):
        v.coefficient(5)


# ---------------------------------------------------------------------------
# classes


def test_class_of_free_modules():
    for n in (1, 2):
        for k in (0, 1, 2):
            cls = k0_class(free_graded(3, n, k, k + n + 2))
            assert cls == K0Vector.from_coeffs(
                [3 if d == k else 0 for d in range(cls.window + 1)]
            )


def test_class_of_two_term_identity():
    assert k0_class(two_term_identity(6)).coeffs == (1, 0, -1, 0, 0, 0)


def test_class_of_zero_module():
    assert k0_class(zero_graded(ZZ, 2, 5)).is_zero


def test_class_twist_equivariance():
    rng = random.Random(11)
    for _ in range(6):
        parts = [rng.randint(0, 2) for _ in range(3)]
        n = rng.randint(1, 2)
        x = from_parts(parts, n, 8)
        assert k0_class(twist(x, -1)).agrees_with(k0_class(x).times_s())


def test_class_concentrated_in_top_degree_only_for_regular():
    # built from parts, the class is the part vector itself
    x = from_parts([2, 1], 2, 7)
    assert k0_class(x).coeffs[:2] == (2, 1)
    assert all(c == 0 for c in k0_class(x).coeffs[2:])


# ---------------------------------------------------------------------------
# additivity


def split_witness(x, z):
    y = direct_sum([x, z])
    w = min(x.window, y.window, z.window)
    injections = tuple(
        Matrix.vstack(ZZ, [
            Matrix.identity(ZZ, x.component(d).ngens),
            Matrix.zero(ZZ, z.component(d).ngens, x.component(d).ngens),
        ])
        for d in range(w + 1)
    )
    surjections = tuple(
        Matrix.hstack(ZZ, [
            Matrix.zero(ZZ, z.component(d).ngens, x.component(d).ngens),
            Matrix.identity(ZZ, z.component(d).ngens),
        ], rows=z.component(d).ngens)
        for d in range(w + 1)
    )
    return SesWitness(x, y, z, injections, surjections)


def test_additivity_split_case():
    x = free_graded(1, 1, 0, 6)
    z = from_parts([0, 2], 1, 6)
    report = check_additivity(split_witness(x, z))
    assert report["ok"]


def test_additivity_resolution_of_the_simple():
    mid = free_graded(1, 1, 0, 8)
    sub = twist(mid, -1)
    quot = quotient_by_vars(mid, [0])
    w = min(sub.window, mid.window, quot.window)
    injections = [Matrix.zero(ZZ, 1, 0)]
    injections += [mz([[1]]) for _ in range(w)]
    # the quotient keeps its single generator with full relations above 0,
    # so the projection stays the 1x1 identity in every degree
    surjections = [mz([[1]]) for _ in range(w + 1)]
    report = check_additivity(SesWitness(sub, mid, quot,
                                         tuple(injections), tuple(surjections)))
    assert report["ok"]
    assert k0_class(sub).coeffs[:3] == (0, 1, 0)
    assert k0_class(quot).coeffs[:3] == (1, -1, 0)
    assert k0_class(mid).coeffs[:3] == (1, 0, 0)


def test_additivity_rejects_broken_sequence():
    x = free_graded(1, 1, 0, 5)
    z = free_graded(1, 1, 0, 5)
    w = split_witness(x, z)
    bad = SesWitness(x, w.middle, z,
                     w.injections,
                     tuple(Matrix.zero(ZZ, 1, 2) for _ in range(w.window + 1)))
    with pytest.raises(NotExact):
        check_additivity(bad)


def test_additivity_random_witnesses():
    rng = random.Random(23)
    for _ in range(12):
        w = random_ses(rng, rng.randint(1, 2), 6)
        assert check_additivity(w)["ok"]


# ---------------------------------------------------------------------------
# the (1-s) square


def test_extension_carrier_shape():
    x = truncate_above(free_graded(1, 1, 0, 6), 2)
    xt = polynomial_extension(x)
    assert xt.nvars == 2
    assert xt.dims() == [1, 2, 2, 2, 2, 2, 2]
    q = add_zero_variable(x)
    assert q.nvars == 2 and q.dims() == x.dims()


def test_one_minus_s_base_point():
    report = verify_one_minus_s(concentrated_graded(1, 0, 0, 6))
    assert report["ok"]
    assert report["class"] == [1, -1, 0, 0, 0, 0]
    assert report["nil_bound"] == 1


def test_one_minus_s_shifted_fat_point():
    report = verify_one_minus_s(concentrated_graded(3, 0, 2, 8))
    assert report["ok"]
    assert report["class"][: 4] == [0, 0, 3, -3]


def test_one_minus_s_zero_module():
    report = verify_one_minus_s(zero_graded(ZZ, 1, 5))
    assert report["ok"]
    assert all(c == 0 for c in report["class"])


def test_one_minus_s_one_variable_nil():
    x = truncate_above(free_graded(1, 1, 0, 8), 2)
    report = verify_one_minus_s(x)
    assert report["ok"]


def test_one_minus_s_requires_nil():
    with pytest.raises(NotNil):
        verify_one_minus_s(free_graded(1, 1, 0, 6))


# ---------------------------------------------------------------------------
# split sequence


def test_toeplitz_shape_and_entries():
    T = toeplitz_power_matrix(2, 4, 1)
    assert (T.rows, T.cols) == (5, 3)
    assert [row[0] for row in T.entries] == [1, -2, 1, 0, 0]


def test_split_sequence_line():
    report = split_sequence_verify(1, 0, 6)
    assert report["ok"]
    assert report["cokernel_rank"] == 1


def test_split_sequence_plane_rank_two():
    report = split_sequence_verify(1, 1, 12)
    assert report["ok"]
    assert report["cokernel_rank"] == 2


def test_split_sequence_fat_base():
    report = split_sequence_verify(2, 2, 9)
    assert report["ok"]
    assert report["cokernel_rank"] == 6


def test_split_sequence_zero_base():
    report = split_sequence_verify(0, 1, 8)
    assert report["ok"]
    assert report["cokernel_rank"] == 0


def test_split_sequence_window_guard():
    with pytest.raises(WindowTooSmall):
        split_sequence_verify(1, 2, 8)


def test_split_sequence_accepts_free_descriptor():
    from kml.linalg import ModulePresentation

    report = split_sequence_verify(ModulePresentation(ZZ, 2, ()), 0, 6)
    assert report["ok"] and report["dim"] == 2
    with pytest.raises(ValueError):
        split_sequence_verify(ModulePresentation(ZZ, 1, (2,)), 0, 6)


# ---------------------------------------------------------------------------
# projective space


def test_projective_line():
    report = projective_space_decomposition(1, 16)
    assert report["ok"]
    assert report["cokernel_rank"] == 2


def test_projective_point():
    report = projective_space_decomposition(0, 4)
    assert report["ok"]
    assert report["cokernel_rank"] == 1


def test_projective_three_space():
    report = projective_space_decomposition(3, 20)
    assert report["ok"]
    assert report["cokernel_rank"] == 4


def test_projective_window_guard():
    with pytest.raises(WindowTooSmall):
        projective_space_decomposition(3, 15)
