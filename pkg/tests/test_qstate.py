import json
import math

import numpy as np
import pytest

from noisytele.channels import NoiseSpec, analytic_channel, channel_coefficients
from noisytele.qstate import (
    BELL_00,
    MAGIC_BASIS,
    RHO_EPR,
    as_density,
    as_pure_state,
    embed,
    fidelity_pure,
    from_magic_basis,
    hermitian_eigensystem,
    kron,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    partial_transpose,
    random_density,
    random_pure_state,
    random_unitary,
    to_magic_basis,
)

KET0 = np.array([1, 0], dtype=complex)
KET00 = np.array([1, 0, 0, 0], dtype=complex)


def test_magic_basis_is_unitary():
    assert np.allclose(MAGIC_BASIS.conj().T @ MAGIC_BASIS, np.eye(4), atol=1e-15)


def test_validation_rejects_bad_inputs():
    with pytest.raises(ValueError):
        as_pure_state([1, 1])
    with pytest.raises(ValueError):
        as_pure_state(np.ones(3) / math.sqrt(3))
    with pytest.raises(ValueError):
        as_pure_state(KET0, n_qubits=2)
    with pytest.raises(ValueError):
        as_density(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        as_density(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        as_density(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(ValueError):
        as_density(np.eye(16) / 16)
    with pytest.raises(ValueError):
        as_density(np.array([[np.nan, 0], [0, 1]]))


class TestPartialTrace:
    def test_bell_reduces_to_half_identity(self):
        assert np.allclose(partial_trace(RHO_EPR, keep=[0]), np.eye(2) / 2, atol=1e-15)

    def test_product_state(self):
        rho = np.outer(KET00, KET00)
        assert np.allclose(partial_trace(rho, keep=[0]), np.diag([1, 0]), atol=1e-15)

    def test_isotropic_long_time(self):
        rho = analytic_channel(NoiseSpec("iso", 40.0))
        assert np.allclose(partial_trace(rho, keep=[1]), np.eye(2) / 2, atol=1e-14)

    def test_bad_subsets(self):
        for keep in ([], [0, 1], [2], [0, 0]):
            with pytest.raises(ValueError):
                partial_trace(RHO_EPR, keep=keep)

    def test_chain_matches_single_step(self, rng):
        rho = random_density(rng, 3)
        one_step = partial_trace(rho, keep=[2])
        two_step = partial_trace(partial_trace(rho, keep=[1, 2]), keep=[1])
        assert np.allclose(one_step, two_step, atol=1e-14)

    def test_ordering_is_msb_first(self):
        # |0> on qubit 0, |1> on qubit 1
        psi = np.array([0, 1, 0, 0], dtype=complex)
        rho = np.outer(psi, psi)
        assert np.allclose(partial_trace(rho, keep=[0]), np.diag([1, 0]))
        assert np.allclose(partial_trace(rho, keep=[1]), np.diag([0, 1]))


class TestPartialTranspose:
    def test_bell_min_eigenvalue(self):
        w, _ = hermitian_eigensystem(partial_transpose(RHO_EPR, 1))
        assert w[-1] == pytest.approx(-0.5, abs=1e-14)

    def test_isotropic_at_threshold(self):
        rho = analytic_channel(NoiseSpec("iso", math.log(3) / 8))
        w, _ = hermitian_eigensystem(partial_transpose(rho, 0))
        assert abs(w[-1]) <= 1e-10

    def test_product_state_stays_psd(self, rng):
        rho = np.kron(random_density(rng, 1), random_density(rng, 1))
        w, _ = hermitian_eigensystem(partial_transpose(rho, 1))
        assert w[-1] >= -1e-12

    def test_involution_and_trace(self, rng):
        rho = random_density(rng, 2)
        for s in (0, 1):
            pt = partial_transpose(rho, s)
            assert np.trace(pt).real == pytest.approx(1.0, abs=1e-14)
            assert np.allclose(pt, pt.conj().T, atol=1e-15)
            assert np.max(np.abs(partial_transpose(pt, s) - rho)) <= 1e-14

    def test_needs_two_qubits(self):
        with pytest.raises(ValueError):
            partial_transpose(np.eye(8) / 8, 0)
        with pytest.raises(ValueError):
            partial_transpose(RHO_EPR, 2)


class TestMagicBasis:
    def test_bell(self):
        assert np.allclose(to_magic_basis(BELL_00), [1, 0, 0, 0], atol=1e-15)

    def test_ket00(self):
        s = 1 / math.sqrt(2)
        assert np.allclose(to_magic_basis(KET00), [s, -1j * s, 0, 0], atol=1e-15)

    def test_x1_member(self):
        co = channel_coefficients(0.25)
        alpha = np.array([math.sqrt(co.tau_plus), 0, 1j * math.sqrt(co.tau_minus), 0])
        psi = MAGIC_BASIS @ alpha
        assert np.allclose(to_magic_basis(psi), alpha, atol=1e-15)

    def test_round_trip(self, rng):
        for _ in range(20):
            psi = random_pure_state(rng, 2)
            alpha = to_magic_basis(psi)
            assert np.sum(np.abs(alpha) ** 2) == pytest.approx(1.0, abs=1e-12)
            assert np.max(np.abs(from_magic_basis(alpha) - psi)) <= 1e-14

    def test_wrong_size(self):
        with pytest.raises(ValueError):
            to_magic_basis(KET0)


class TestEigensystem:
    def test_identity(self):
        w, v = hermitian_eigensystem(np.eye(4))
        assert np.allclose(w, 1)
        assert np.allclose(v.conj().T @ v, np.eye(4))

    def test_isotropic_long_time(self):
        w, _ = hermitian_eigensystem(analytic_channel(NoiseSpec("iso", 40.0)))
        assert np.allclose(w, 0.25, atol=1e-14)

    def test_same_axis_spectrum(self):
        for kt in (0.1, 0.25, 0.7):
            co = channel_coefficients(kt)
            w, _ = hermitian_eigensystem(analytic_channel(NoiseSpec("x", kt)))
            assert np.allclose(w, [co.tau_plus, co.tau_minus, 0, 0], atol=1e-14)

    @pytest.mark.parametrize("dim", [2, 4, 8])
    def test_random_against_numpy(self, rng, dim):
        for _ in range(10):
            a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            h = a + a.conj().T
            w, v = hermitian_eigensystem(h)
            assert np.all(np.diff(w) <= 0)
            assert np.allclose(w, np.linalg.eigvalsh(h)[::-1], atol=1e-12)
            for k in range(dim):
                assert np.linalg.norm(h @ v[:, k] - w[k] * v[:, k]) <= 1e-10
            assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - h)) <= 1e-10

    def test_degenerate(self, rng):
        u = random_unitary(rng, 4)
        h = u @ np.diag([2.0, 2.0, -1.0, -1.0]) @ u.conj().T
        w, v = hermitian_eigensystem(h)
        assert np.allclose(w, [2, 2, -1, -1], atol=1e-12)
        assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_eigensystem(np.array([[0, 1], [0, 0]], dtype=complex))


class TestFidelity:
    def test_pure(self, rng):
        psi = random_pure_state(rng, 1)
        assert fidelity_pure(psi, np.outer(psi, psi.conj())) == pytest.approx(1.0, abs=1e-14)

    def test_mixed(self):
        assert fidelity_pure(KET0, np.eye(2) / 2) == pytest.approx(0.5)

    def test_isotropic_at_threshold(self):
        rho = analytic_channel(NoiseSpec("iso", math.log(3) / 8))
        assert fidelity_pure(BELL_00, rho) == pytest.approx(0.5, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity_pure(KET0, RHO_EPR)


def test_kron_and_embed():
    x = np.array([[0, 1], [1, 0]])
    assert np.allclose(embed(x, 1, 3), kron(np.eye(2), x, np.eye(2)))
    with pytest.raises(ValueError):
        embed(x, 3, 3)


def test_matrix_json_round_trip(rng):
    rho = random_density(rng, 2)
    text = matrix_to_json(rho)
    data = json.loads(text)
    assert data["dim"] == 4 and len(data["re"]) == 4 and len(data["im"][0]) == 4
    assert np.array_equal(matrix_from_json(text), rho)


def test_random_generators(rng):
    u = random_unitary(rng, 4)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-13)
    rho = random_density(rng, 2, rank=2)
    assert np.sum(np.linalg.eigvalsh(rho) > 1e-12) == 2
    as_density(rho)
