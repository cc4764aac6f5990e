import random
from fractions import Fraction

import numpy as np
import pytest

from rsoskit.convolution import (ConvolutionElement, character, chi,
                                 conv_mul, involution, to_difference_operator)
from rsoskit.errors import SupportOutsideAlcove
from rsoskit.graded import dual_space, tensor_space
from rsoskit.groupoid import Arrow, WeightPoint, rsos_alcove
from rsoskit.rsos import ModelKind, build_vector_space

KIND = ModelKind.rsos(2, 5)
CTX = KIND.context()
POINTS = rsos_alcove(2, 5)


def _rand_element(rng, n_terms=4):
    inside = set(POINTS)
    coeffs = {}
    for _ in range(n_terms):
        a = rng.choice(POINTS)
        mu = (rng.randrange(-1, 2), rng.randrange(-1, 2))
        if (a + mu) in inside:
            coeffs[Arrow(a, mu)] = rng.randrange(-3, 4)
    return ConvolutionElement(CTX, coeffs)


def test_chi_is_idempotent_unit_of_subring():
    unit = chi(CTX, POINTS)
    assert conv_mul(unit, unit) == unit
    rng = random.Random(0)
    for _ in range(20):
        x = _rand_element(rng)
        assert conv_mul(unit, x) == x
        assert conv_mul(x, unit) == x


def test_vector_character_support():
    chv = character(build_vector_space(KIND))
    ups = sorted(g.source.level_coordinate() for g in chv.coeffs
                 if g.shift == (1, 0))
    downs = sorted(g.source.level_coordinate() for g in chv.coeffs
                   if g.shift == (0, 1))
    assert ups == [1, 2, 3]
    assert downs == [2, 3, 4]


def test_square_of_vector_character_coefficients():
    chv = character(build_vector_space(KIND))
    sq = conv_mul(chv, chv)
    for l, expected in ((1, 1), (2, 2), (3, 2), (4, 1)):
        assert sq.coeff(Arrow(WeightPoint.from_level_coordinate(l), (1, 1))) \
            == expected


def test_character_is_multiplicative_and_additive():
    V = build_vector_space(KIND)
    chv = character(V)
    assert character(tensor_space(V, V)) == conv_mul(chv, chv)
    assert (chv + chv).coeffs == {g: 2 for g in chv.coeffs}


def test_character_of_dual_is_involution():
    V = build_vector_space(KIND)
    assert character(dual_space(V).dual) == involution(character(V))


def test_involution_is_involutive_antihomomorphism():
    rng = random.Random(17)
    for _ in range(50):
        x, y = _rand_element(rng), _rand_element(rng)
        assert involution(involution(x)) == x
        assert involution(conv_mul(x, y)) == conv_mul(involution(y),
                                                      involution(x))


def test_convolution_associative_exact():
    rng = random.Random(23)
    for _ in range(50):
        x, y, z = (_rand_element(rng) for _ in range(3))
        assert conv_mul(conv_mul(x, y), z) == conv_mul(x, conv_mul(y, z))


def test_fraction_coefficients_supported():
    a = POINTS[0]
    x = ConvolutionElement(CTX, {Arrow(a, (0, 0)): Fraction(1, 2)})
    assert conv_mul(x, x).coeff(Arrow(a, (0, 0))) == Fraction(1, 4)


def test_unit_maps_to_characteristic_multiplication():
    op = to_difference_operator(chi(CTX, POINTS), POINTS)
    assert np.array_equal(op.matrix(), np.eye(4, dtype=np.int64))


def test_vector_character_is_path_adjacency_operator():
    chv = character(build_vector_space(KIND))
    m = to_difference_operator(chv, POINTS).matrix()
    expected = np.zeros((4, 4), dtype=np.int64)
    for k in range(3):
        expected[k, k + 1] = expected[k + 1, k] = 1
    assert np.array_equal(m, expected)


def test_matrix_realization_is_ring_homomorphism():
    rng = random.Random(29)
    for _ in range(50):
        x, y = _rand_element(rng), _rand_element(rng)
        lhs = to_difference_operator(conv_mul(x, y), POINTS).matrix()
        rhs = (to_difference_operator(x, POINTS).matrix()
               @ to_difference_operator(y, POINTS).matrix())
        assert np.array_equal(lhs, rhs)


def test_homomorphism_exhaustive_small_levels():
    for r in (4, 5, 6):
        kind = ModelKind.rsos(2, r)
        pts = rsos_alcove(2, r)
        chv = character(build_vector_space(kind))
        unit = chi(kind.context(), pts)
        elements = [unit, chv, conv_mul(chv, chv)]
        for x in elements:
            for y in elements:
                lhs = to_difference_operator(conv_mul(x, y), pts).matrix()
                rhs = (to_difference_operator(x, pts).matrix()
                       @ to_difference_operator(y, pts).matrix())
                assert np.array_equal(lhs, rhs)


def test_support_outside_alcove_rejected():
    bad = ConvolutionElement(
        CTX, {Arrow(WeightPoint.from_level_coordinate(4), (1, 0)): 1})
    with pytest.raises(SupportOutsideAlcove):
        to_difference_operator(bad, POINTS)


def test_loop_shifts_land_on_diagonal():
    a = POINTS[1]
    x = ConvolutionElement(CTX, {Arrow(a, (2, 2)): 3})
    m = to_difference_operator(x, POINTS).matrix()
    assert m[1, 1] == 3 and np.count_nonzero(m) == 1


def test_rows_serialization():
    chv = character(build_vector_space(KIND))
    rows = chv.to_rows()
    assert rows[0] == {"source": [1, 0], "shift": [1, 0], "coeff": 1}


def test_difference_operator_json_dump():
    chv = character(build_vector_space(KIND))
    doc = to_difference_operator(chv, POINTS).to_json_dict()
    assert doc["points"][0] == [1, 0]
    assert doc["matrix"][0][1] == [1.0, 0.0]


def test_involution_fixes_unit():
    unit = chi(CTX, POINTS)
    assert involution(unit) == unit


def test_character_of_unit_object_is_unit_element():
    from rsoskit.graded import unit_space
    assert character(unit_space(CTX, POINTS)) == chi(CTX, POINTS)
