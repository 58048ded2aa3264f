import numpy as np
import pytest

from qfibound.model import MarkovModel, sectorize
from qfibound.operators import truncated_annihilator
from qfibound.span import build_span, check_membership, sector_check

from conftest import random_complex, random_hermitian


def qubit(ham, ops):
    return MarkovModel(dim=2, hamiltonian=ham, noise_ops=tuple(ops))


def project_residual(span, op):
    return np.linalg.norm(op - span.project(op)) / max(1.0, np.linalg.norm(op))


class TestBuildSpan:
    def test_single_pauli_noise(self, paulis):
        sx, sy, sz = paulis
        span = build_span(qubit(sz / 2, [np.sqrt(0.5) * sx]))
        # Spans exactly {1, sigma_x}: sx inside, sy and sz outside.
        assert span.rank == 2
        assert project_residual(span, sx) <= 1e-12
        assert project_residual(span, np.eye(2)) <= 1e-12
        assert project_residual(span, sy) == pytest.approx(1.0, abs=1e-9)
        assert project_residual(span, sz) == pytest.approx(1.0, abs=1e-9)

    def test_two_paulis_fill_space(self, paulis):
        sx, sy, sz = paulis
        span = build_span(qubit(sz / 2, [0.9 * sx, 0.4 * sy]))
        assert span.rank == 4

    def test_no_noise(self, paulis):
        _, _, sz = paulis
        span = build_span(qubit(sz / 2, []))
        assert span.rank == 1
        assert project_residual(span, np.eye(2)) <= 1e-12

    def test_basis_orthonormal(self, rng):
        dim = 3
        ops = [random_complex(rng, (dim, dim)) for _ in range(2)]
        ops = [op - np.trace(op) / dim * np.eye(dim) for op in ops]
        model = MarkovModel(dim=dim, hamiltonian=random_hermitian(rng, dim),
                            noise_ops=tuple(ops))
        span = build_span(model)
        for i, bi in enumerate(span.orthonormal_basis):
            for j, bj in enumerate(span.orthonormal_basis):
                inner = np.real(np.sum(np.conj(bi) * bj))
                assert inner == pytest.approx(1.0 if i == j else 0.0, abs=1e-10)


class TestCheckMembership:
    def test_parallel_noise_in_span(self, paulis):
        _, _, sz = paulis
        span = build_span(qubit(sz / 2, [np.sqrt(0.5) * sz]))
        report = check_membership(sz / 2, span)
        assert report.in_span
        assert report.residual <= 1e-12

    def test_transversal_noise_not_in_span(self, paulis):
        sx, _, sz = paulis
        span = build_span(qubit(sz / 2, [np.sqrt(0.5) * sx]))
        report = check_membership(sz / 2, span)
        assert not report.in_span
        assert np.allclose(report.h_perp, sz / 2, atol=1e-12)
        assert np.linalg.norm(report.h_parallel) <= 1e-12

    def test_identity_always_in_span(self, paulis):
        sx, _, _ = paulis
        span = build_span(qubit(np.eye(2), [sx]))
        assert check_membership(np.eye(2), span).in_span

    def test_decomposition_exactness(self, rng, paulis):
        sx, _, sz = paulis
        span = build_span(qubit(sz / 2, [sx]))
        ham = random_hermitian(rng, 2)
        report = check_membership(ham, span)
        assert np.allclose(ham, report.h_parallel + report.h_perp, atol=1e-12)
        again = check_membership(report.h_parallel, span)
        assert again.residual <= 1e-10
        if np.linalg.norm(report.h_perp) > 1e-9:
            perp_report = check_membership(report.h_perp, span)
            assert np.linalg.norm(perp_report.h_parallel) <= 1e-9


class TestSpanInvariants:
    def test_unitary_remix_invariance(self, rng, paulis):
        sx, sy, sz = paulis
        ops = [0.8 * sx, 0.5 * sy + 0.1 * sz]
        model = qubit(sz / 2, ops)
        span = build_span(model)
        z = random_complex(rng, (2, 2))
        u, _ = np.linalg.qr(z)
        mixed = [sum(u[i, j] * ops[j] for j in range(2)) for i in range(2)]
        span_mixed = build_span(qubit(sz / 2, mixed))
        for _ in range(10):
            probe = random_hermitian(rng, 2)
            r1 = check_membership(probe, span)
            r2 = check_membership(probe, span_mixed)
            assert r1.in_span == r2.in_span
            assert r1.residual == pytest.approx(r2.residual, abs=1e-9)
            assert np.allclose(span.project(probe), span_mixed.project(probe), atol=1e-9)

    def test_monotonicity_under_added_noise(self, rng, paulis):
        sx, sy, sz = paulis
        base = qubit(sz / 2 + 0.3 * sx, [sx])
        bigger = qubit(sz / 2 + 0.3 * sx, [sx, 0.7 * sy])
        span_small = build_span(base)
        span_big = build_span(bigger)
        for _ in range(10):
            probe = random_hermitian(rng, 2)
            small = check_membership(probe, span_small).residual
            big = check_membership(probe, span_big).residual
            assert big <= small + 1e-12

    def test_qubit_single_noise_theorem(self, rng, paulis):
        # For one canonical (traceless) qubit noise operator, the verdict
        # is "outside the span" exactly when L is a global phase times a
        # Hermitian matrix whose direction is not the Hamiltonian's
        # traceless direction.
        sx, sy, sz = paulis
        basis = [sx, sy, sz]
        for _ in range(60):
            coeff = random_complex(rng, 3)
            noise = sum(c * p for c, p in zip(coeff, basis))
            ham = random_hermitian(rng, 2)
            model = qubit(ham, [noise])
            verdict = check_membership(ham, build_span(model)).in_span

            herm = 0.5 * (noise + noise.conj().T)
            anti = 0.5j * (noise - noise.conj().T)
            stack = np.array([[herm[0, 0].real, herm[0, 1].real, herm[0, 1].imag],
                              [anti[0, 0].real, anti[0, 1].real, anti[0, 1].imag]])
            rank = np.linalg.matrix_rank(stack, tol=1e-10)
            proportional_to_hermitian = rank <= 1
            if proportional_to_hermitian:
                direction = herm if np.linalg.norm(herm) > np.linalg.norm(anti) else anti
                ham_traceless = ham - np.trace(ham) / 2 * np.eye(2)
                pair = np.array([
                    [direction[0, 0].real, direction[0, 1].real, direction[0, 1].imag],
                    [ham_traceless[0, 0].real, ham_traceless[0, 1].real,
                     ham_traceless[0, 1].imag],
                ])
                expected = np.linalg.matrix_rank(pair, tol=1e-10) <= 1
            else:
                expected = True
            assert verdict == expected


class TestSectorCheck:
    def test_trivial_sector_reduces_to_plain_check(self, paulis):
        sx, _, sz = paulis
        model = qubit(sz / 2, [sx])
        sectors = sectorize(model, np.eye(2))
        reports = sector_check(model, sectors)
        plain = check_membership(sz / 2, build_span(model))
        assert len(reports) == 1
        assert reports[0].in_span == plain.in_span
        assert reports[0].residual == pytest.approx(plain.residual, abs=1e-12)

    def _loss_model(self, n_atoms, order):
        a1 = truncated_annihilator(1, 2, n_atoms)
        a2 = truncated_annihilator(2, 2, n_atoms)
        if order == 1:
            ham = 0.5 * (a1.conj().T @ a1 - a2.conj().T @ a2)
        else:
            ham = 0.25 * (a1.conj().T @ a1.conj().T @ a1 @ a1
                          + a2.conj().T @ a2.conj().T @ a2 @ a2
                          - 2 * a1.conj().T @ a2.conj().T @ a1 @ a2)
        model = MarkovModel(dim=a1.shape[0], hamiltonian=ham, noise_ops=(a1, a2))
        sectors = sectorize(model, a1.conj().T @ a1 + a2.conj().T @ a2)
        return model, sectors

    def test_linear_hamiltonian_in_sector_span(self):
        model, sectors = self._loss_model(4, order=1)
        reports = sector_check(model, sectors)
        assert all(r.in_span for r in reports)

    def test_nonlinear_hamiltonian_outside_sector_span(self):
        # With one-body losses only, the number-difference products are
        # linear in the occupation, so the quadratic Hamiltonian block of
        # the 4-atom sector cannot be reached.
        model, sectors = self._loss_model(4, order=2)
        reports = sector_check(model, sectors)
        top = sectors.sector_index(4)
        assert not reports[top].in_span
