import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_tuple
from oracles import random_hermitian
from rankrange.errors import DimensionError, DomainError
from rankrange.geometry import (
    check_against_halfspaces,
    outer_halfspaces,
    sample_directions,
    sample_inner,
    sphere_coefficients,
    sphere_family,
    star_segment_rank_1,
    star_segment_rank_k,
)
from rankrange.linalg import HermitianTuple, orth_complement, seeded_random
from rankrange.rank_k import single_matrix_interval, translate_tuple, verify_point
from rankrange.tverberg import construct_point


def collinear(seg, tol=1e-9):
    c, t = seg.center.point, seg.tip.point
    for s, cert in seg.samples:
        if np.abs(cert.point - ((1 - s) * c + s * t)).max() > tol:
            return False
    return True


# -- outer half-spaces --------------------------------------------------------

def test_directions_include_axes():
    C = sample_directions(3, 10, seed=0)
    np.testing.assert_allclose(C[:6], [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]])
    np.testing.assert_allclose(np.linalg.norm(C, axis=1), 1.0)
    assert np.array_equal(C, sample_directions(3, 10, seed=0))


def test_single_matrix_halfspaces_match_interval():
    A1 = seeded_random("hermitian", 6, seed=2)
    for k in (1, 2, 3):
        H = outer_halfspaces(HermitianTuple([A1]), k, [[1.0], [-1.0]])
        iv = single_matrix_interval(A1, k)
        assert H.bounds[0] == pytest.approx(iv.hi, abs=1e-12)
        assert -H.bounds[1] == pytest.approx(iv.lo, abs=1e-12)


def test_identity_halfspaces():
    H = outer_halfspaces(HermitianTuple([np.eye(3)]), 2, 16, seed=1)
    np.testing.assert_allclose(H.bounds, H.directions[:, 0])


def test_sphere_halfspaces_are_the_unit_ball():
    A, _ = sphere_family(2)
    H = outer_halfspaces(A, 2, 64, seed=0)
    np.testing.assert_allclose(H.bounds, 1.0, atol=1e-12)
    rep = check_against_halfspaces(H, np.zeros(3))
    assert rep.consistent and rep.min_slack == pytest.approx(1.0)


def test_slack_of_far_point():
    A = random_tuple(0, 2, 5)
    H = outer_halfspaces(A, 1, 32)
    assert not check_against_halfspaces(H, 10 * np.abs(H.bounds).max() * np.ones(2)).consistent
    with pytest.raises(DimensionError):
        check_against_halfspaces(H, np.zeros(3))


def test_constructed_point_is_inside_outer_set():
    A = random_tuple(4, 2, 9)
    cert = construct_point(A, 2)
    assert check_against_halfspaces(outer_halfspaces(A, 2), cert.point).min_slack >= -1e-8


@given(st.integers(0, 2**31))
def test_halfspaces_monotone_in_k(seed):
    A = random_tuple(seed, 2, 5)
    bounds = [outer_halfspaces(A, k, 24, seed=seed).bounds for k in (1, 2, 3)]
    assert np.all(bounds[1] <= bounds[0] + 1e-12) and np.all(bounds[2] <= bounds[1] + 1e-12)


@given(st.integers(0, 2**31), st.integers(1, 3))
def test_random_witness_points_inside_outer_set(seed, k):
    A = random_tuple(seed, 2, 6)
    H = outer_halfspaces(A, k, 64, seed=seed)
    cert = construct_point(A, 1) if k == 1 else None
    for c in sample_inner(A, k, 3, seed) + ([cert] if cert else []):
        assert check_against_halfspaces(H, c.point).min_slack >= -1e-8


# -- star segments ------------------------------------------------------------

def test_star_segment_rank_k_endpoints_and_audit():
    A = random_tuple(5, 2, 36)
    center = construct_point(A, 4)
    tip = sample_inner(A, 1, 1, seed=5)[0]
    seg = star_segment_rank_k(A, center, tip, np.linspace(0, 1, 21))
    assert seg.all_verified and len(seg.samples) == 21
    assert collinear(seg)
    np.testing.assert_allclose(seg.samples[0][1].point, center.point, atol=1e-12)
    np.testing.assert_allclose(seg.samples[-1][1].point, tip.point, atol=1e-12)
    assert max(c.residual for _, c in seg.samples) <= 1e-8


def test_star_segment_rank_k_needs_large_center():
    A = random_tuple(5, 2, 9)
    center = construct_point(A, 2)
    tip = sample_inner(A, 1, 1, seed=0)[0]
    with pytest.raises(DimensionError):
        star_segment_rank_k(A, center, tip, [0.5])


def _rank1_center(seed, m=2, n=18, k_hat=2):
    A = random_tuple(seed, m, n)
    return A, construct_point(A, k_hat)


def test_star_segment_rank_1_endpoints():
    A, center = _rank1_center(1)
    x = seeded_random("unit_vector", A.n, seed=1)
    seg = star_segment_rank_1(A, center, x, [0.0, 0.5, 1.0])
    assert seg.all_verified and collinear(seg)
    np.testing.assert_allclose(seg.samples[0][1].point, center.point, atol=1e-12)
    xb = np.array([np.vdot(x, M @ x).real for M in A])
    np.testing.assert_allclose(seg.samples[-1][1].point, xb, atol=1e-12)


def test_star_segment_rank_1_forced_case_1():
    A, center = _rank1_center(2)
    shifted = translate_tuple(A, center.point)
    x = orth_complement(np.column_stack([center.witness, shifted[1] @ center.witness]), dim=1)[:, 0]
    seg = star_segment_rank_1(A, center, x, np.linspace(0, 1, 11))
    assert seg.case == 1 and seg.first_row_rank < A.m
    assert seg.all_verified and collinear(seg)


def test_star_segment_rank_1_generic_case_2():
    A, center = _rank1_center(3)
    seg = star_segment_rank_1(A, center, seeded_random("unit_vector", A.n, seed=3), np.linspace(0, 1, 11))
    assert seg.case == 2 and seg.all_verified and collinear(seg)


def test_star_segment_rank_1_vector_inside_center():
    A, center = _rank1_center(4)
    seg = star_segment_rank_1(A, center, center.witness[:, 0], [0.0, 0.3, 1.0])
    assert seg.all_verified
    for _, c in seg.samples:
        np.testing.assert_allclose(c.point, center.point, atol=1e-12)


def test_star_segment_rank_1_precondition():
    A = random_tuple(0, 3, 16)
    center = construct_point(A, 2)  # needs k_hat > 2
    with pytest.raises(DimensionError):
        star_segment_rank_1(A, center, seeded_random("unit_vector", 16, seed=0), [0.5])


# -- sphere family ------------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2, 3])
def test_sphere_north_pole(k):
    A, w = sphere_family(k)
    U = w([1, 0, 0])
    np.testing.assert_allclose(U, np.vstack([np.eye(k), np.zeros((k, k))]))
    assert verify_point(A, U, 1e-12, point=[1, 0, 0]).accepted


def test_sphere_south_pole_branch():
    A, w = sphere_family(2)
    assert sphere_coefficients([-1, 0, 0]) == (0, 1)
    np.testing.assert_allclose(w([-1, 0, 0]), np.vstack([np.zeros((2, 2)), np.eye(2)]))
    assert verify_point(A, w([-1, 0, 0]), 1e-12, point=[-1, 0, 0]).accepted


def test_sphere_a3():
    alpha, beta = sphere_coefficients([0, 0, 1])
    assert alpha == pytest.approx(1 / np.sqrt(2)) and beta == pytest.approx(-1j / np.sqrt(2))
    A, w = sphere_family(1)
    assert verify_point(A, w([0, 0, 1]), 1e-12, point=[0, 0, 1]).accepted


def test_sphere_domain():
    _, w = sphere_family(1)
    with pytest.raises(DomainError):
        w([0.5, 0, 0])
    with pytest.raises(DimensionError):
        sphere_family(0)


@given(st.integers(0, 2**31), st.integers(1, 3))
def test_sphere_witness_property(seed, k):
    a = np.random.default_rng(seed).standard_normal(3)
    a /= np.linalg.norm(a)
    A, w = sphere_family(k)
    assert verify_point(A, w(a), 1e-12, point=a).accepted


def test_sample_inner_identity():
    certs = sample_inner(HermitianTuple([np.eye(4)]), 2, 5, seed=0)
    assert len(certs) == 5
    assert all(c.point == pytest.approx([1.0]) for c in certs)


def test_sample_inner_on_sphere():
    A, _ = sphere_family(2)
    certs = sample_inner(A, 2, 100, seed=0)
    assert len(certs) > 50
    norms = np.array([np.linalg.norm(c.point) for c in certs])
    assert np.abs(norms - 1).max() <= 1e-6


def test_sample_inner_deterministic_and_inside():
    rng = np.random.default_rng(0)
    A = HermitianTuple([random_hermitian(rng, 3) for _ in range(2)])
    a = sample_inner(A, 1, 20, seed=3)
    b = sample_inner(A, 1, 20, seed=3)
    assert [c.point.tolist() for c in a] == [c.point.tolist() for c in b]
    H = outer_halfspaces(A, 1)
    assert all(check_against_halfspaces(H, c.point).min_slack >= -1e-8 for c in a)
