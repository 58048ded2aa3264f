import numpy as np
import pytest

from qfibound.operators import (
    fock_basis,
    fixed_total_number_projector,
    herm_anti_split,
    hilbert_schmidt_inner,
    positive_negative_split,
    spectral_norm,
    truncated_annihilator,
)

from conftest import random_complex, random_hermitian


def power_iteration_norm(a, iterations=3000):
    """Independent spectral-norm oracle: power iteration on A^dag A."""
    gram = a.conj().T @ a
    v = np.ones(gram.shape[0], dtype=complex) / np.sqrt(gram.shape[0])
    for _ in range(iterations):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
    return float(np.sqrt(np.real(np.vdot(v, gram @ v))))


class TestHermAntiSplit:
    def test_hermitian_input_passthrough(self, paulis):
        _, _, sz = paulis
        herm, anti = herm_anti_split(sz)
        assert np.allclose(herm, sz)
        assert np.allclose(anti, 0)

    def test_pauli_lowering_identity(self, paulis):
        sx, sy, _ = paulis
        herm, anti = herm_anti_split(sx - 1j * sy)
        assert np.allclose(herm, sx, atol=1e-14)
        assert np.allclose(anti, sy, atol=1e-14)

    def test_reconstruction_random(self, rng):
        for _ in range(20):
            a = random_complex(rng, (4, 4))
            herm, anti = herm_anti_split(a)
            assert np.linalg.norm(a - (herm - 1j * anti)) <= 1e-13 * np.linalg.norm(a)
            for out in (herm, anti):
                assert np.linalg.norm(out - out.conj().T) <= 1e-13

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            herm_anti_split(np.zeros((2, 3)))


class TestSpectralNorm:
    def test_diagonal(self):
        assert spectral_norm(np.diag([1.0, -3.0, 2.0])) == pytest.approx(3.0)

    def test_zero(self):
        assert spectral_norm(np.zeros((4, 4))) == 0.0

    def test_against_power_iteration(self, rng):
        for _ in range(10):
            a = random_complex(rng, (6, 6))
            expected = power_iteration_norm(a)
            assert spectral_norm(a) == pytest.approx(expected, rel=1e-10)

    def test_submultiplicativity(self, rng):
        for _ in range(25):
            a = random_complex(rng, (5, 5))
            b = random_complex(rng, (5, 5))
            assert spectral_norm(a @ b) <= spectral_norm(a) * spectral_norm(b) * (1 + 1e-10)


class TestHilbertSchmidtInner:
    def test_pauli_normalization(self, paulis):
        sx, sy, sz = paulis
        assert hilbert_schmidt_inner(sx, sx) == pytest.approx(2.0)
        assert hilbert_schmidt_inner(sx, sy) == pytest.approx(0.0)
        assert hilbert_schmidt_inner(np.eye(2), sz) == pytest.approx(0.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            hilbert_schmidt_inner(np.eye(2), np.eye(3))


class TestPositiveNegativeSplit:
    def test_sigma_z(self, paulis):
        _, _, sz = paulis
        pos, neg = positive_negative_split(sz)
        assert np.allclose(pos, np.diag([1.0, 0.0]))
        assert np.allclose(neg, np.diag([0.0, 1.0]))
        pos, neg = positive_negative_split(-sz)
        assert np.allclose(pos, np.diag([0.0, 1.0]))
        assert np.allclose(neg, np.diag([1.0, 0.0]))

    def test_traceless_random(self, rng):
        for _ in range(15):
            a = random_hermitian(rng, 3)
            a -= np.trace(a) / 3 * np.eye(3)
            pos, neg = positive_negative_split(a)
            assert np.linalg.norm(a - (pos - neg)) <= 1e-12
            assert abs(np.trace(pos) - np.trace(neg)) <= 1e-12
            assert np.linalg.eigvalsh(pos).min() >= -1e-12
            assert np.linalg.eigvalsh(neg).min() >= -1e-12
            assert abs(np.trace(pos @ neg)) <= 1e-12

    def test_rejects_non_hermitian(self, rng):
        with pytest.raises(ValueError):
            positive_negative_split(random_complex(rng, (3, 3)))


class TestLadderOperators:
    def test_single_mode_matrix(self):
        a = truncated_annihilator(1, 1, 2)
        expected = np.zeros((3, 3))
        expected[0, 1] = 1.0
        expected[1, 2] = np.sqrt(2.0)
        assert np.allclose(a, expected)

    def test_cross_mode_commutator_vanishes(self):
        cutoff = 3
        a1 = truncated_annihilator(1, 2, cutoff)
        a2 = truncated_annihilator(2, 2, cutoff)
        comm = a1 @ a2.conj().T - a2.conj().T @ a1
        # Restrict to states with total number < cutoff, where the
        # truncation cannot be felt.
        basis = fock_basis(2, cutoff)
        keep = np.array([sum(occ) < cutoff for occ in basis])
        assert np.linalg.norm(comm[np.ix_(keep, keep)]) <= 1e-12

    def test_total_number_diagonal(self):
        # Independent oracle: enumerate the basis directly and compare the
        # number operator against the occupation sums.
        cutoff = 3
        a1 = truncated_annihilator(1, 2, cutoff)
        a2 = truncated_annihilator(2, 2, cutoff)
        total = a1.conj().T @ a1 + a2.conj().T @ a2
        expected = np.diag([float(sum(occ)) for occ in fock_basis(2, cutoff)])
        assert np.allclose(total, expected, atol=1e-13)

    def test_same_mode_commutator(self):
        cutoff = 4
        for mode in (1, 2):
            a = truncated_annihilator(mode, 2, cutoff)
            comm = a @ a.conj().T - a.conj().T @ a
            basis = fock_basis(2, cutoff)
            keep = np.array([sum(occ) <= cutoff - 1 for occ in basis])
            resid = comm[np.ix_(keep, keep)] - np.eye(int(keep.sum()))
            assert np.linalg.norm(resid) <= 1e-12

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            truncated_annihilator(3, 2, 2)


class TestNumberProjector:
    def test_ranks(self):
        assert np.trace(fixed_total_number_projector(2, 1, 1)).real == pytest.approx(2.0)
        assert np.trace(fixed_total_number_projector(2, 2, 2)).real == pytest.approx(3.0)

    def test_idempotence(self, rng):
        for _ in range(5):
            modes = int(rng.integers(1, 4))
            cutoff = int(rng.integers(1, 5))
            total = int(rng.integers(0, cutoff + 1))
            proj = fixed_total_number_projector(modes, total, cutoff)
            assert np.linalg.norm(proj @ proj - proj) <= 1e-14

    def test_rejects_above_cutoff(self):
        with pytest.raises(ValueError):
            fixed_total_number_projector(2, 3, 2)
