import cmath
import random

import numpy as np
import pytest

from rsoskit.elliptic import (EllipticParams, bracket, dynamical_ybe_residual,
                              r_matrix, r_minus1, r_reg1,
                              residue_extrapolation, theta, theta_dz0,
                              unitarity_residual)
from rsoskit.errors import InvalidTau, NearPole
from rsoskit.groupoid import WeightPoint, rsos_alcove

TAU = 0.8j


def params(n, r, tau=TAU):
    return EllipticParams.rsos(n, r, tau)


def test_theta_vanishes_at_origin():
    for tau in (1j, 0.3 + 0.8j):
        assert abs(theta(0.0, tau)) < 1e-14


def test_theta_odd():
    rng = random.Random(3)
    for _ in range(20):
        z = complex(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3))
        assert abs(theta(-z, TAU) + theta(z, TAU)) < 1e-13


def test_theta_quasi_periodicity_against_double_truncation():
    rng = random.Random(5)
    for _ in range(20):
        z = complex(rng.uniform(-1, 1), rng.uniform(-0.2, 0.2))
        ref = theta(z, TAU, truncation=40)
        assert abs(theta(z, TAU) - ref) < 1e-14
        assert abs(theta(z + 1, TAU) + ref) < 1e-12
        factor = -cmath.exp(-1j * cmath.pi * TAU - 2j * cmath.pi * z)
        assert abs(theta(z + TAU, TAU) - factor * ref) < 1e-12


def test_theta_rejects_lower_half_plane():
    with pytest.raises(InvalidTau):
        theta(0.3, -1j)
    with pytest.raises(InvalidTau):
        theta_dz0(0.5 + 0j)


def test_gamma_on_lattice_rejected():
    with pytest.raises(ValueError):
        EllipticParams(tau=TAU, gamma=1.0 + 0j, rank=2)


def test_bracket_normalization_and_zeros():
    p = params(2, 5)
    assert abs(bracket(0.0, p)) < 1e-14
    h = 1e-5
    deriv = (bracket(h, p) - bracket(-h, p)) / (2 * h)
    assert abs(deriv - 1) < 1e-8
    assert abs(bracket(5.0, p)) < 1e-12
    assert abs(bracket(5.0 * TAU, p)) < 1e-10 * abs(theta_dz0(TAU))


def test_bracket_reflection_identity_r5():
    p = params(2, 5)
    rng = random.Random(7)
    for _ in range(10):
        u = complex(rng.uniform(0, 3), rng.uniform(-0.2, 0.2))
        assert abs(bracket(u, p) - bracket(5 - u, p)) < 1e-12


def test_r_matrix_diagonal_entries_are_one():
    p = params(3, 5)
    a = WeightPoint.integer((3, 1, 0))
    flat = r_matrix(0.42 + 0.1j, a, p)
    for i in range(1, 4):
        assert abs(flat.entry((i, i), (i, i)) - 1) < 1e-14


def test_r_matrix_at_zero_is_identity():
    p = params(3, 5)
    a = WeightPoint.integer((3, 1, 0))
    m = r_matrix(0.0, a, p).matrix
    assert np.abs(m - np.eye(9)).max() < 1e-13


def test_r_matrix_unitarity_spec_point():
    p = params(3, 5)
    a = WeightPoint.integer((3, 1, 0))
    assert unitarity_residual(0.37 + 0.11j, a, p) < 1e-10


def test_r_matrix_near_pole_refused():
    p = params(2, 5)
    a = WeightPoint.from_level_coordinate(2)
    with pytest.raises(NearPole):
        r_matrix(1.0, a, p)
    with pytest.raises(NearPole):
        r_matrix(0.3, WeightPoint.from_level_coordinate(5), p)


def test_unitarity_sweep():
    rng = random.Random(31)
    for n, r in ((2, 5), (3, 5), (3, 7)):
        p = params(n, r)
        points = rsos_alcove(n, r)
        for _ in range(25):
            z = complex(rng.uniform(0.1, 0.6), rng.uniform(0, 0.2))
            a = rng.choice(points)
            assert unitarity_residual(z, a, p) < 1e-9


def _generic_point(rng, n, r):
    base = tuple(complex(rng.uniform(0.05, 0.45), rng.uniform(0, 0.1))
                 for _ in range(n - 1)) + (0.0,)
    offset = tuple(rng.randrange(0, r) for _ in range(n - 1)) + (0,)
    return WeightPoint(base=base, offset=offset)


def test_dynamical_ybe_residual_generic_points():
    rng = random.Random(13)
    for n, r in ((2, 5), (3, 5), (3, 7)):
        p = params(n, r)
        for _ in range(5):
            z = complex(rng.uniform(0.1, 0.6), rng.uniform(0, 0.2))
            w = complex(rng.uniform(0.1, 0.6), rng.uniform(0, 0.2))
            a = _generic_point(rng, n, r)
            assert dynamical_ybe_residual(z, w, a, p) < 1e-9


def test_dynamical_ybe_sos_base():
    p = params(3, 5)
    b = WeightPoint(base=(0.29, 0.11, 0.0), offset=(0, 0, 0))
    assert dynamical_ybe_residual(0.31, 0.17 + 0.05j, b, p) < 1e-9


def test_r_reg1_matches_numerical_residue():
    p = params(3, 5)
    a = WeightPoint.integer((3, 1, 0))
    reg = r_reg1(a, p).matrix
    eps = 1e-6
    approx = eps * r_matrix(1.0 + eps, a, p).matrix
    rel = np.abs(approx - reg).max() / np.abs(reg).max()
    assert rel < 1e-4
    oracle = residue_extrapolation(a, p)
    assert np.abs(oracle - reg).max() / np.abs(reg).max() < 1e-6


def test_r_reg1_vanishes_on_diagonal_vectors():
    p = params(3, 5)
    a = WeightPoint.integer((3, 1, 0))
    flat = r_reg1(a, p)
    for i in range(1, 4):
        col = flat.matrix[:, (i - 1) * 3 + (i - 1)]
        assert np.abs(col).max() == 0.0


def test_r_reg1_middle_block_rank_one_interior():
    p = params(2, 5)
    for l in (2, 3):
        a = WeightPoint.from_level_coordinate(l)
        m = r_reg1(a, p).matrix[1:3, 1:3]
        assert abs(abs(m[0, 0]) - abs(m[0, 1])) < 1e-12
        s = np.linalg.svd(m, compute_uv=False)
        assert s[1] < 1e-10 * s[0]


def test_r_minus1_consistent_with_r_matrix():
    p = params(3, 5)
    for coords in ((3, 1, 0), (4, 2, 0)):
        a = WeightPoint.integer(coords)
        diff = np.abs(r_minus1(a, p).matrix - r_matrix(-1.0, a, p).matrix).max()
        assert diff < 1e-10


def test_r_minus1_nonzero_on_diagonal_sectors():
    p = params(3, 5)
    a = WeightPoint.integer((3, 1, 0))
    flat = r_minus1(a, p)
    for i in range(1, 4):
        assert abs(flat.entry((i, i), (i, i))) > 0.1


def test_r_minus1_vanishes_on_wall_sector():
    # a_{i-1} = a_i + 1 kills the sector through a + eps_i
    p = params(3, 5)
    a = WeightPoint.integer((2, 1, 0))  # a_1 = a_2 + 1
    flat = r_minus1(a, p)
    assert abs(flat.entry((1, 2), (1, 2))) < 1e-14
    assert abs(flat.entry((2, 1), (1, 2))) < 1e-14


def test_theta_truncation_rule_handles_large_imaginary_part():
    for z in (2.0 + 0.5j, -1.3 + 0.9j, 0.1 + 1.4j):
        auto = theta(z, TAU)
        ref = theta(z, TAU, truncation=80)
        assert abs(auto - ref) <= 1e-13 * max(1.0, abs(ref))
