import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_tuple
from oracles import in_convex_hull
from rankrange.errors import BoundError, ComplexityError, DimensionError
from rankrange.linalg import HermitianTuple
from rankrange.rank_k import single_matrix_interval, verify_point
from rankrange.tverberg import (
    assemble_witness,
    build_chain,
    chain_bound,
    construct_point,
    restricted_growth_strings,
    tverberg_partition,
)


def chain_audit(A, chain, tol=1e-9):
    X = chain.vectors
    assert np.linalg.norm(X.conj().T @ X - np.eye(chain.q)) <= tol
    for j in range(A.m):
        G = X.conj().T @ A[j] @ X
        assert np.abs(G - np.diag(np.diag(G))).max() <= tol
        np.testing.assert_allclose(np.diag(G).real, chain.diag_points[:, j], atol=1e-12)


def test_chain_identity():
    A = HermitianTuple([np.eye(5)])
    chain = build_chain(A, 3)
    chain_audit(A, chain)
    np.testing.assert_allclose(chain.diag_points, 1.0)


def test_chain_diagonal_has_disjoint_supports():
    A = HermitianTuple([np.diag(np.arange(1.0, 10))])
    chain = build_chain(A, 3)
    assert np.abs(chain.vectors[:, 0]) @ np.eye(9)[:, 0] == pytest.approx(1.0)
    supports = [set(np.flatnonzero(np.abs(v) > 1e-12)) for v in chain.vectors.T]
    assert all(not (a & b) for i, a in enumerate(supports) for b in supports[i + 1:])
    chain_audit(A, chain)


def test_chain_first_vector_is_lowest_eigenvector():
    A = random_tuple(0, 2, 9)
    x1 = build_chain(A, 4).vectors[:, 0]
    lam = np.linalg.eigvalsh(A[0])[0]
    np.testing.assert_allclose(A[0] @ x1, lam * x1, atol=1e-10)


def test_chain_random_m2_n9():
    A = random_tuple(3, 2, 9)
    chain_audit(A, build_chain(A, 4))


def test_chain_runs_out_of_room():
    A = random_tuple(0, 2, 5)
    with pytest.raises(DimensionError, match=r"\(k-1\)\(m\+1\)\^2"):
        build_chain(A, 4)


def test_restricted_growth_strings():
    strings = list(restricted_growth_strings(4, 2))
    assert len(strings) == 7  # Stirling number S(4, 2)
    assert strings == sorted(strings)
    assert all(s[0] == 0 and set(s) == {0, 1} for s in strings)
    assert len(list(restricted_growth_strings(6, 3))) == 90


def test_partition_midpoint():
    part = tverberg_partition(np.array([[0.0], [1.0], [2.0]]), 2)
    assert part.parts == ((0, 2), (1,))
    np.testing.assert_allclose(part.common_point, [1.0])
    np.testing.assert_allclose(part.weights[0], [0.5, 0.5])
    np.testing.assert_allclose(part.weights[1], [1.0])


def test_partition_square():
    pts = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    part = tverberg_partition(pts, 2)
    assert part.parts == ((0, 1), (2, 3))
    np.testing.assert_allclose(part.common_point, [0, 0], atol=1e-12)


def test_partition_guards():
    with pytest.raises(ComplexityError):
        tverberg_partition(np.zeros((17, 1)), 2)
    with pytest.raises(DimensionError):
        tverberg_partition(np.zeros((3, 2)), 2)  # needs 4 points in the plane


@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(2, 3))
def test_partition_soundness(seed, m, k):
    q = (m + 1) * (k - 1) + 1
    pts = np.random.default_rng(seed).standard_normal((q, m))
    part = tverberg_partition(pts, k)
    assert sorted(i for p in part.parts for i in p) == list(range(q))
    assert part.residual(pts) <= 1e-8
    for w in part.weights:
        assert w.min() >= -1e-12 and abs(w.sum() - 1) <= 1e-12


def test_assemble_identity_any_partition():
    A = HermitianTuple([np.eye(4)])
    chain = build_chain(A, 3)
    part = tverberg_partition(chain.diag_points, 2)
    cert = assemble_witness(A, chain, part)
    assert cert.accepted and cert.point == pytest.approx([1.0])


def test_construct_diag4():
    A = HermitianTuple([np.diag([1.0, 2.0, 3.0, 4.0])])
    cert = construct_point(A, 2)
    assert cert.accepted and 2 - 1e-12 <= cert.point[0] <= 3 + 1e-12
    iv = single_matrix_interval(A[0], 2)
    assert iv.lo - 1e-12 <= cert.point[0] <= iv.hi + 1e-12


def test_construct_random_tight_bound():
    A = random_tuple(8, 2, 9)
    cert = construct_point(A, 2)
    assert cert.residual <= 1e-8


@pytest.mark.parametrize("k", [1, 2, 3])
def test_construct_identity(k):
    cert = construct_point(HermitianTuple([np.eye(9)]), k)
    assert cert.point == pytest.approx([1.0]) and cert.k == k


def test_construct_below_bound():
    with pytest.raises(BoundError, match=str(chain_bound(2, 2))):
        construct_point(random_tuple(0, 2, 8), 2)


def test_construct_complexity_guard():
    with pytest.raises(ComplexityError):
        construct_point(HermitianTuple([np.eye(4 * 25)] * 4), 5)  # q = 17


@given(st.integers(0, 2**31), st.sampled_from([(1, 2), (2, 2), (1, 3)]))
def test_construct_end_to_end(seed, mk):
    m, k = mk
    A = random_tuple(seed, m, chain_bound(m, k))
    cert = construct_point(A, k)
    assert verify_point(A, cert.witness, 1e-8, point=cert.point).accepted
    chain = build_chain(A, (m + 1) * (k - 1) + 1)
    assert in_convex_hull(chain.diag_points, cert.point, tol=1e-8)
