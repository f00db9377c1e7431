import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import kl_defect, random_isometry
from rankrange.channel import KrausChannel, kl_tuple, validate_kraus
from rankrange.errors import DimensionError, DomainError
from rankrange.linalg import seeded_random
from rankrange.qec import PAULI, builtin_channel, find_code, pauli_on, verify_code
from rankrange.rank_k import verify_point


def bitflip(p=0.3):
    return builtin_channel("bit_flip_3q", {"p": p}).channel


def basis(*indices, n=8):
    U = np.zeros((n, len(indices)))
    for col, i in enumerate(indices):
        U[i, col] = 1
    return U


def test_pauli_placement_most_significant_first():
    X1 = pauli_on("X", 1, 3)
    np.testing.assert_allclose(X1, np.kron(PAULI["X"], np.eye(4)))
    assert X1[0b100, 0b000] == 1  # flips the leading bit


def test_verify_trivial_channel():
    code = verify_code(KrausChannel([np.eye(3)]), seeded_random("isometry", 3, 2, seed=0))
    np.testing.assert_allclose(code.gamma, [[1]], atol=1e-15)
    assert code.residual <= 1e-15 and code.accepted


def test_verify_repetition_code():
    code = verify_code(bitflip(), basis(0, 7), tol=1e-10)
    assert code.accepted
    np.testing.assert_allclose(code.gamma, np.diag([0.7, 0.1, 0.1, 0.1]), atol=1e-14)
    worst, gamma = kl_defect(bitflip().kraus, basis(0, 7))
    assert worst <= 1e-14
    np.testing.assert_allclose(code.gamma, gamma, atol=1e-14)


def test_verify_rejects_bad_code():
    code = verify_code(bitflip(), basis(0, 4))
    assert not code.accepted
    worst, _ = kl_defect(bitflip().kraus, basis(0, 4))
    assert code.residual == pytest.approx(worst, rel=1e-12)


def test_verify_shape_error():
    with pytest.raises(DimensionError):
        verify_code(bitflip(), np.eye(4)[:, :2])


@given(st.integers(0, 2**31))
def test_residual_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    U = random_isometry(rng, 8, 2)
    code = verify_code(bitflip(0.2), U)
    worst, gamma = kl_defect(bitflip(0.2).kraus, U)
    assert code.residual == pytest.approx(worst, rel=1e-10, abs=1e-14)
    np.testing.assert_allclose(code.gamma, gamma, atol=1e-13)
    np.testing.assert_allclose(code.gamma, code.gamma.conj().T, atol=1e-12)


@given(st.integers(0, 2**31))
def test_equivalence_with_kl_tuple(seed):
    # KL residual and tuple residual agree within sqrt(2) either way
    rng = np.random.default_rng(seed)
    ch = bitflip(0.25)
    kl = kl_tuple(ch)
    U = random_isometry(rng, 8, 2) if seed % 2 else basis(0, 7) @ random_isometry(rng, 2, 2)
    code = verify_code(ch, U)
    cert = verify_point(kl.base, U)
    r = ch.r
    assert code.residual <= np.sqrt(2) * cert.residual + 1e-12
    assert cert.residual <= np.sqrt(2) * r * code.residual + 1e-12
    np.testing.assert_allclose(kl.gamma_from_point(cert.point), code.gamma, atol=1e-12)


@given(st.integers(0, 2**31))
def test_unitary_covariance(seed):
    rng = np.random.default_rng(seed)
    W = random_isometry(rng, 8, 8)
    ch = bitflip()
    rotated = KrausChannel([W @ T @ W.conj().T for T in ch.kraus])
    a = verify_code(ch, basis(0, 7))
    b = verify_code(rotated, W @ basis(0, 7))
    np.testing.assert_allclose(a.gamma, b.gamma, atol=1e-12)
    assert abs(a.residual - b.residual) <= 1e-12


def test_gamma_psd_for_accepted_codes():
    code = find_code(bitflip(), 2, seed=7).certificate
    assert np.linalg.eigvalsh(code.gamma).min() >= -1e-8


def test_find_code_identity_full_space():
    res = find_code(KrausChannel([np.eye(3)]), 3)
    assert res.success
    np.testing.assert_allclose(res.certificate.gamma, [[1]], atol=1e-12)


def test_find_code_bitflip():
    res = find_code(bitflip(), 2, seed=7)
    assert res.success and res.best_residual <= 1e-6
    worst, _ = kl_defect(bitflip().kraus, res.certificate.basis)
    assert worst <= 1e-6


def test_find_code_depolarizing_fails():
    ch = builtin_channel("depolarizing_1q", {"p": 0.5}).channel
    res = find_code(ch, 2, seed=0)
    assert not res.success and res.certificate is None
    assert res.best_residual >= 0.1


def test_find_code_constructive_path():
    # one Kraus operator: the reduced tuple is a single matrix, so the bound is met
    res = find_code(KrausChannel([np.eye(5)]), 2)
    assert res.method == "construct" and res.success


@pytest.mark.parametrize("name,params,r,n", [
    ("bit_flip_3q", {"p": 0.3}, 4, 8),
    ("phase_flip_3q", {"p": 0.3}, 4, 8),
    ("single_qubit_bitflip", {"p": 0.2}, 2, 2),
    ("depolarizing_1q", {"p": 0.4}, 4, 2),
    ("amplitude_damping", {"gamma": 0.3}, 2, 2),
])
def test_builtin_channels_validate(name, params, r, n):
    ch = builtin_channel(name, params).channel
    assert (ch.r, ch.n) == (r, n)
    assert validate_kraus(ch, 1e-10).ok


def test_amplitude_damping_zero_reduces_to_identity():
    ch = builtin_channel("amplitude_damping", {"gamma": 0}).channel
    assert ch.r == 1
    np.testing.assert_allclose(ch.kraus[0], np.eye(2))


@given(st.floats(0, 1))
def test_depolarizing_validates(p):
    assert validate_kraus(builtin_channel("depolarizing_1q", {"p": p}).channel).ok


def test_builtin_errors():
    with pytest.raises(DomainError):
        builtin_channel("teleporter")
    with pytest.raises(DomainError):
        builtin_channel("depolarizing_1q", {"p": 1.5})
    with pytest.raises(DomainError):
        builtin_channel("amplitude_damping")
