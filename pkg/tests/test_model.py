import numpy as np
import pytest

from qfibound.model import (
    MarkovModel,
    canonicalize,
    liouvillian_apply,
    restrict,
    sectorize,
)
from qfibound.operators import fock_basis, hilbert_schmidt_inner, truncated_annihilator

from conftest import random_complex, random_hermitian


def qubit_model(ham, ops, omega0=0.0):
    return MarkovModel(dim=2, hamiltonian=ham, noise_ops=tuple(ops), omega0=omega0)


def two_mode_loss_model(n_atoms, g1=1.0, g2=1.0):
    a1 = truncated_annihilator(1, 2, n_atoms)
    a2 = truncated_annihilator(2, 2, n_atoms)
    ham = 0.5 * (a1.conj().T @ a1 - a2.conj().T @ a2)
    model = MarkovModel(dim=a1.shape[0], hamiltonian=ham,
                        noise_ops=(np.sqrt(g1) * a1, np.sqrt(g2) * a2))
    charge = a1.conj().T @ a1 + a2.conj().T @ a2
    return model, charge


class TestMarkovModel:
    def test_shape_validation(self, paulis):
        _, _, sz = paulis
        with pytest.raises(ValueError):
            MarkovModel(dim=3, hamiltonian=sz, noise_ops=())
        with pytest.raises(ValueError):
            MarkovModel(dim=2, hamiltonian=sz, noise_ops=(np.eye(3),))

    def test_hermitization_warning(self, rng, paulis):
        _, _, sz = paulis
        skew = sz + 0.1 * random_complex(rng, (2, 2))
        with pytest.warns(UserWarning):
            MarkovModel(dim=2, hamiltonian=skew, noise_ops=())


class TestCanonicalize:
    def test_already_canonical(self, paulis):
        _, _, sz = paulis
        model = qubit_model(sz / 2, [np.sqrt(0.7) * sz])
        report = canonicalize(model)
        assert not report.mixing_applied
        assert np.allclose(report.model.noise_ops[0], np.sqrt(0.7) * sz)
        assert np.linalg.norm(report.induced_hamiltonian_shift) <= 1e-14

    def test_orthogonalizes_pair(self, paulis):
        sx, sy, sz = paulis
        model = qubit_model(sz / 2, [sx, sx + sy])
        report = canonicalize(model)
        ops = report.model.noise_ops
        # Gram-matrix oracle on the output pair.
        for i, op_i in enumerate(ops):
            assert abs(np.trace(op_i)) <= 1e-10 * np.linalg.norm(op_i) * np.sqrt(2)
            for op_j in ops[i + 1:]:
                inner = hilbert_schmidt_inner(op_i, op_j)
                assert abs(inner) <= 1e-10 * np.linalg.norm(op_i) * np.linalg.norm(op_j)

    def test_trace_removal(self, paulis):
        _, _, sz = paulis
        model = qubit_model(sz / 2, [np.eye(2) + sz])
        report = canonicalize(model)
        assert len(report.model.noise_ops) == 1
        op = report.model.noise_ops[0]
        assert abs(np.trace(op)) <= 1e-12
        # The dropped identity component leaves a sigma_z direction only.
        assert np.linalg.norm(op - (op[0, 0] / sz[0, 0]) * sz) <= 1e-12

    def test_complex_trace_gives_shift(self, paulis):
        # L = i*1 + sigma_x: the induced shift is (i/2)(conj(i) sx - i sx^dag)
        # = sigma_x, worked out by hand.
        sx, _, sz = paulis
        model = qubit_model(sz / 2, [1j * np.eye(2) + sx])
        report = canonicalize(model)
        assert np.allclose(report.induced_hamiltonian_shift, sx, atol=1e-12)

    def test_dynamics_preserved(self, rng, paulis):
        sx, sy, sz = paulis
        model = qubit_model(sz / 2, [0.3 * np.eye(2) + sx, sx + (0.5 + 0.2j) * sy])
        report = canonicalize(model)
        shift = report.induced_hamiltonian_shift
        for _ in range(100):
            rho = random_hermitian(rng, 2)
            before = liouvillian_apply(model, rho, omega=0.0)
            after = liouvillian_apply(report.model, rho, omega=0.0)
            after = after - 1j * (shift @ rho - rho @ shift)
            assert np.linalg.norm(before - after) <= 1e-10 * max(1.0, np.linalg.norm(before))


class TestRestrict:
    def test_identity_projector(self, paulis):
        _, _, sz = paulis
        model = qubit_model(sz / 2, [sz])
        restricted = restrict(model, np.eye(2))
        assert restricted.dim == 2
        assert np.allclose(np.abs(np.linalg.eigvalsh(restricted.hamiltonian)),
                           np.abs(np.linalg.eigvalsh(model.hamiltonian)))

    def test_rank_one_gives_scalars(self, paulis):
        _, _, sz = paulis
        model = qubit_model(sz / 2, [sz])
        proj = np.diag([1.0, 0.0]).astype(complex)
        restricted = restrict(model, proj)
        assert restricted.dim == 1

    def test_loss_model_fixed_number(self):
        # Bare losses leave the sector (project to zero); number-conserving
        # products survive.
        n_atoms = 3
        model, charge = two_mode_loss_model(n_atoms)
        basis = fock_basis(2, n_atoms)
        proj = np.diag([1.0 if sum(occ) == n_atoms else 0.0 for occ in basis]).astype(complex)
        restricted = restrict(model, proj)
        assert restricted.dim == n_atoms + 1
        for op in restricted.noise_ops:
            assert np.linalg.norm(op) <= 1e-12
        # a1^dag a1 - a2^dag a2 survives with spectrum {-N..N step 2}/2.
        eigs = np.sort(np.linalg.eigvalsh(restricted.hamiltonian))
        assert np.allclose(eigs, np.arange(-n_atoms, n_atoms + 1, 2) / 2.0)

    def test_rejects_non_projector(self, rng):
        model, _ = two_mode_loss_model(2)
        with pytest.raises(ValueError):
            restrict(model, 0.5 * np.eye(model.dim))


class TestSectorize:
    def test_sigma_z_sectors(self, paulis):
        _, _, sz = paulis
        model = qubit_model(sz / 2, [sz])
        sectors = sectorize(model, sz)
        assert len(sectors) == 2
        assert sectors.eigenvalues == (1.0, -1.0)
        for proj in sectors.projectors:
            assert np.trace(proj).real == pytest.approx(1.0)

    def test_number_operator_grading(self):
        model, charge = two_mode_loss_model(2)
        sectors = sectorize(model, charge)
        ranks = [int(round(np.trace(p).real)) for p in sectors.projectors]
        assert ranks == [3, 2, 1]
        assert sectors.eigenvalues == (2.0, 1.0, 0.0)

    def test_identity_charge(self):
        model, _ = two_mode_loss_model(2)
        sectors = sectorize(model, np.eye(model.dim))
        assert len(sectors) == 1

    def test_completeness_and_reconstruction(self, rng):
        model, _ = two_mode_loss_model(2)
        charge = random_hermitian(rng, model.dim)
        sectors = sectorize(model, charge)
        total = sum(sectors.projectors)
        assert np.linalg.norm(total - np.eye(model.dim)) <= 1e-10
        rebuilt = sum(lam * proj for lam, proj in
                      zip(sectors.eigenvalues, sectors.projectors))
        assert np.linalg.norm(rebuilt - charge) <= 1e-10 * max(1.0, np.linalg.norm(charge))


class TestLiouvillianApply:
    def test_maximally_mixed_fixed_point(self, rng, paulis):
        _, _, sz = paulis
        model = qubit_model(random_hermitian(rng, 2), [np.sqrt(0.7) * sz])
        out = liouvillian_apply(model, np.eye(2) / 2, omega=1.3)
        assert np.linalg.norm(out) <= 1e-12

    def test_dephasing_coherence_decay(self, paulis):
        # Hand computation: for rho = |+><+| the generator gives
        # gamma (sz rho sz - rho) = [[0, -gamma], [-gamma, 0]].
        _, _, sz = paulis
        gamma = 0.7
        model = qubit_model(sz / 2, [np.sqrt(gamma) * sz])
        plus = np.ones((2, 2), dtype=complex) / 2
        out = liouvillian_apply(model, plus, omega=0.0)
        expected = np.array([[0.0, -gamma], [-gamma, 0.0]])
        assert np.allclose(out, expected, atol=1e-14)

    def test_pure_commutator_without_noise(self, rng, paulis):
        _, _, sz = paulis
        model = qubit_model(sz / 2, [])
        rho = random_hermitian(rng, 2)
        out = liouvillian_apply(model, rho, omega=2.0)
        ham = sz / 2
        assert np.allclose(out, -2.0j * (ham @ rho - rho @ ham))

    def test_trace_and_hermiticity_preservation(self, rng):
        model, _ = two_mode_loss_model(2, g1=0.8, g2=1.7)
        for _ in range(20):
            rho = random_hermitian(rng, model.dim)
            out = liouvillian_apply(model, rho, omega=0.9)
            assert abs(np.trace(out)) <= 1e-12 * max(1.0, np.linalg.norm(rho))
            assert np.linalg.norm(out - out.conj().T) <= 1e-12 * max(1.0, np.linalg.norm(out))

    def test_dimension_mismatch(self, paulis):
        _, _, sz = paulis
        model = qubit_model(sz / 2, [sz])
        with pytest.raises(ValueError):
            liouvillian_apply(model, np.eye(3))
