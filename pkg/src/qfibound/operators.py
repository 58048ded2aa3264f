"""Dense complex-matrix kernel: Hermitian algebra, spectral splits, and
bosonic ladder operators on truncated Fock spaces.

All functions are pure and operate on plain ``numpy`` arrays of complex
dtype.  Everything here targets desk-scale dimensions (a few hundred at
most); dense eigensolvers are used throughout.
"""

from __future__ import annotations

import itertools
import warnings

import numpy as np

__all__ = [
    "asmatrix",
    "dagger",
    "is_hermitian",
    "hermitize",
    "herm_anti_split",
    "spectral_norm",
    "frobenius_norm",
    "hilbert_schmidt_inner",
    "positive_negative_split",
    "fock_basis",
    "truncated_annihilator",
    "fixed_total_number_projector",
]

#: Relative Hermiticity tolerance used when symmetrizing on ingestion.
HERMITICITY_WARN_TOL = 1e-9


def asmatrix(a) -> np.ndarray:
    """Coerce input to a 2-d complex ndarray and validate finiteness."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    """Check ||A - A^dag||_F <= tol * max(1, ||A||_F)."""
    a = np.asarray(a)
    return np.linalg.norm(a - dagger(a)) <= tol * max(1.0, np.linalg.norm(a))


def hermitize(a, warn: bool = True) -> np.ndarray:
    """Symmetrize A -> (A + A^dag)/2, warning if the correction is large.

    Ingestion helper: matrices that are supposed to be Hermitian are passed
    through this so downstream eigensolvers can rely on exact symmetry.
    """
    a = asmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("hermitize requires a square matrix")
    h = 0.5 * (a + dagger(a))
    if warn:
        corr = np.linalg.norm(a - h)
        if corr > HERMITICITY_WARN_TOL * max(1.0, np.linalg.norm(a)):
            warnings.warn(
                f"input symmetrized by a relative correction {corr:.3e}; "
                "matrix was not Hermitian to working precision",
                stacklevel=2,
            )
    return h


def herm_anti_split(a) -> tuple[np.ndarray, np.ndarray]:
    """Split a square matrix into Hermitian parts (A^H, i*A^AH).

    A^H = (A + A^dag)/2 and A^AH = (A - A^dag)/2, so that
    A = A^H + (-i) * (i A^AH).  Both returned matrices are Hermitian.
    """
    a = asmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("herm_anti_split requires a square matrix")
    herm = 0.5 * (a + dagger(a))
    anti = 0.5 * (a - dagger(a))
    return herm, 1j * anti


def spectral_norm(a) -> float:
    """Largest singular value; for Hermitian input this is max |eigenvalue|."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, ord=2))


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def hilbert_schmidt_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(A^dag B)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a.conj() * b))


def positive_negative_split(a) -> tuple[np.ndarray, np.ndarray]:
    """Decompose a Hermitian A = P - Q with P, Q >= 0 and P Q = 0.

    P collects the positive spectral part, Q the (sign-flipped) negative
    part.  If A is traceless then Tr P = Tr Q.
    """
    a = asmatrix(a)
    if not is_hermitian(a, tol=1e-10):
        raise ValueError("positive_negative_split requires a Hermitian matrix")
    w, v = np.linalg.eigh(hermitize(a, warn=False))
    pos = w > 0.0
    neg = w < 0.0
    p = (v[:, pos] * w[pos]) @ dagger(v[:, pos])
    q = (v[:, neg] * (-w[neg])) @ dagger(v[:, neg])
    return hermitize(p, warn=False), hermitize(q, warn=False)


def fock_basis(num_modes: int, max_total_particles: int) -> list[tuple[int, ...]]:
    """Occupation tuples with total particle number <= cutoff.

    Ordering is lexicographic by occupation tuple, e.g. for two modes and
    cutoff 2: (0,0), (0,1), (0,2), (1,0), (1,1), (2,0).  The ordering is
    fixed so that matrices built on this basis are reproducible.
    """
    if num_modes < 1:
        raise ValueError("num_modes must be >= 1")
    if max_total_particles < 1:
        raise ValueError("max_total_particles must be >= 1")
    return [
        occ
        for occ in itertools.product(range(max_total_particles + 1), repeat=num_modes)
        if sum(occ) <= max_total_particles
    ]


def truncated_annihilator(mode_index: int, num_modes: int, max_total_particles: int) -> np.ndarray:
    """Annihilation operator a_i on the total-number-truncated Fock basis.

    Satisfies a_i |..., n_i, ...> = sqrt(n_i) |..., n_i - 1, ...>.
    ``mode_index`` is 1-based.
    """
    if not 1 <= mode_index <= num_modes:
        raise ValueError(f"mode_index {mode_index} out of range 1..{num_modes}")
    basis = fock_basis(num_modes, max_total_particles)
    index = {occ: k for k, occ in enumerate(basis)}
    dim = len(basis)
    a = np.zeros((dim, dim), dtype=complex)
    i = mode_index - 1
    for col, occ in enumerate(basis):
        if occ[i] == 0:
            continue
        lowered = occ[:i] + (occ[i] - 1,) + occ[i + 1:]
        a[index[lowered], col] = np.sqrt(occ[i])
    return a


def fixed_total_number_projector(num_modes: int, total: int, cutoff: int) -> np.ndarray:
    """Orthogonal projector onto occupation tuples summing to exactly ``total``."""
    if total > cutoff:
        raise ValueError(f"total particle number {total} exceeds cutoff {cutoff}")
    basis = fock_basis(num_modes, cutoff)
    diag = np.array([1.0 if sum(occ) == total else 0.0 for occ in basis])
    return np.diag(diag).astype(complex)
