"""The noise-operator span and the linear-time-scaling criterion.

For a GKLS model with noise operators {L_j}, build the real span

    S = span_R { 1, L_j^H, i L_j^AH, (L_j^dag L_j')^H, i (L_j'^dag L_j)^AH }

over all ordered pairs (j, j').  Membership of the Hamiltonian in S decides
the fundamental time scaling of the quantum Fisher information: H in S
forces an at-most-linear growth with the total probing time, while H not
in S opens the door to quadratic growth via error-correction protocols.

Hermitian matrices are treated as vectors of the d^2-dimensional REAL
vector space they form; orthonormalization and projections are real-linear
throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import MarkovModel, SectorDecomposition, projector_range_basis, warn_if_not_canonical
from .operators import dagger, herm_anti_split, hermitize

__all__ = [
    "NoiseSpan",
    "SpanReport",
    "build_span",
    "check_membership",
    "sector_check",
]

#: Relative singular-value threshold for rank decisions during orthonormalization.
RANK_TOL = 1e-10
#: Default membership tolerance (deliberately looser than the rank threshold).
MEMBERSHIP_TOL = 1e-9


def hermitian_to_real_vector(a: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian matrix.

    Coordinates: the real diagonal, then sqrt(2) * (real, imag) of the
    strict upper triangle.  The Euclidean norm of the vector equals the
    Frobenius norm of the matrix.
    """
    d = a.shape[0]
    iu = np.triu_indices(d, k=1)
    upper = a[iu]
    return np.concatenate([
        np.real(np.diag(a)),
        np.sqrt(2.0) * np.real(upper),
        np.sqrt(2.0) * np.imag(upper),
    ])


def real_vector_to_hermitian(vec: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`hermitian_to_real_vector`."""
    m = np.zeros((dim, dim), dtype=complex)
    np.fill_diagonal(m, vec[:dim])
    iu = np.triu_indices(dim, k=1)
    n_off = iu[0].size
    upper = (vec[dim:dim + n_off] + 1j * vec[dim + n_off:dim + 2 * n_off]) / np.sqrt(2.0)
    m[iu] = upper
    m[(iu[1], iu[0])] = np.conj(upper)
    return m


@dataclass(frozen=True)
class NoiseSpan:
    """Generators of S and a real-orthonormal Hermitian basis of their span."""

    generators: tuple[np.ndarray, ...]
    orthonormal_basis: tuple[np.ndarray, ...]
    dim: int

    @property
    def rank(self) -> int:
        return len(self.orthonormal_basis)

    def project(self, a: np.ndarray) -> np.ndarray:
        """Real-orthogonal projection of a Hermitian matrix onto the span."""
        out = np.zeros_like(a, dtype=complex)
        for b in self.orthonormal_basis:
            coeff = np.real(np.sum(np.conj(b) * a))  # real HS inner product
            out += coeff * b
        return out


@dataclass(frozen=True)
class SpanReport:
    """Outcome of a membership check H in S.

    ``residual`` is ||H_perp||_F / max(1, ||H||_F).  ``marginal`` flags
    verdicts within a factor 10 of the tolerance; the classification stays
    binary but such models deserve a second look.
    """

    in_span: bool
    residual: float
    h_parallel: np.ndarray
    h_perp: np.ndarray
    tolerance_used: float
    marginal: bool = False


def _pair_generators(ops: list[np.ndarray], dim: int) -> list[np.ndarray]:
    """Hermitian generators {1, L^H, iL^AH, (L^dag L')^H, i(L'^dag L)^AH}."""
    gens = [np.eye(dim, dtype=complex)]
    for op in ops:
        h, ia = herm_anti_split(op)
        gens.append(h)
        gens.append(ia)
    for a in ops:
        for b in ops:
            h, ia = herm_anti_split(dagger(a) @ b)
            gens.append(h)
            gens.append(ia)
    return gens


def _orthonormalize(generators: list[np.ndarray], dim: int) -> tuple[np.ndarray, ...]:
    """Real-orthonormal Hermitian basis of the span of the generators."""
    rows = np.array([hermitian_to_real_vector(g) for g in generators])
    scale = np.max(np.linalg.norm(rows, axis=1)) if rows.size else 0.0
    if scale == 0.0:
        return ()
    u, s, vt = np.linalg.svd(rows, full_matrices=False)
    keep = s > RANK_TOL * s[0]
    return tuple(real_vector_to_hermitian(v, dim) for v in vt[keep])


def build_span(model: MarkovModel) -> NoiseSpan:
    """Construct S from a model's noise operators.

    The model should be in canonical form (a warning is emitted otherwise;
    the span itself is insensitive to canonicalization since unitary
    remixing and trace shifts leave span{generators} unchanged, but the
    convention keeps reports comparable).
    """
    warn_if_not_canonical(model)
    gens = _pair_generators(list(model.noise_ops), model.dim)
    basis = _orthonormalize(gens, model.dim)
    # Sanity: every generator must project back onto itself.
    span = NoiseSpan(generators=tuple(gens), orthonormal_basis=basis, dim=model.dim)
    for g in gens:
        ng = np.linalg.norm(g)
        if ng > 0 and np.linalg.norm(g - span.project(g)) > 1e-9 * ng:
            warnings.warn("span basis fails to reproduce a generator; "
                          "conditioning of the noise operators is suspect", stacklevel=2)
    return span


def check_membership(hamiltonian: np.ndarray, span: NoiseSpan,
                     tol: float = MEMBERSHIP_TOL) -> SpanReport:
    """Decide H in S and return the parallel/perpendicular decomposition.

    H_parallel is the real-orthogonal projection of H onto the span,
    H_perp = H - H_parallel, and the verdict is residual <= tol with
    residual = ||H_perp||_F / max(1, ||H||_F).
    """
    h = hermitize(np.asarray(hamiltonian, dtype=complex))
    if h.shape != (span.dim, span.dim):
        raise ValueError(f"Hamiltonian dim {h.shape} does not match span dim {span.dim}")
    h_par = hermitize(span.project(h), warn=False)
    h_perp = h - h_par
    residual = float(np.linalg.norm(h_perp) / max(1.0, np.linalg.norm(h)))
    in_span = residual <= tol
    marginal = not in_span and residual <= 10.0 * tol or in_span and residual >= 0.1 * tol
    return SpanReport(
        in_span=in_span,
        residual=residual,
        h_parallel=h_par,
        h_perp=h_perp,
        tolerance_used=tol,
        marginal=bool(marginal),
    )


def _sector_generators(model: MarkovModel, sectors: SectorDecomposition,
                       k: int) -> list[np.ndarray]:
    """Generators of the sector-k span, expressed inside the sector.

    The generating set is {P_k, (P_k L_j P_k)^H, i(P_k L_j P_k)^AH,
    (P_k L_j^dag P_l L_i P_k)^H, i(P_k L_j^dag P_l L_i P_k)^AH} over all
    l, i, j; everything is compressed with the sector isometry V_k.
    """
    vk = projector_range_basis(sectors.projectors[k])
    dk = vk.shape[1]
    gens = [np.eye(dk, dtype=complex)]
    inside = [dagger(vk) @ op @ vk for op in model.noise_ops]
    for op in inside:
        h, ia = herm_anti_split(op)
        gens.append(h)
        gens.append(ia)
    for proj in sectors.projectors:
        vl = projector_range_basis(proj)
        hops = [dagger(vl) @ op @ vk for op in model.noise_ops]  # P_l L_i P_k blocks
        for a in hops:
            for b in hops:
                h, ia = herm_anti_split(dagger(a) @ b)
                gens.append(h)
                gens.append(ia)
    return gens


def sector_check(model: MarkovModel, sectors: SectorDecomposition,
                 tol: float = MEMBERSHIP_TOL) -> list[SpanReport]:
    """Blockwise span condition under a superselection rule.

    For each sector k, checks P_k H P_k against the sector-graded span
    built from the projected noise-operator products.  The overall verdict
    (linear scaling applies) is the conjunction over sectors.
    """
    reports = []
    for k in range(len(sectors)):
        vk = projector_range_basis(sectors.projectors[k])
        dk = vk.shape[1]
        gens = _sector_generators(model, sectors, k)
        basis = _orthonormalize(gens, dk)
        span_k = NoiseSpan(generators=tuple(gens), orthonormal_basis=basis, dim=dk)
        hk = hermitize(dagger(vk) @ model.hamiltonian @ vk, warn=False)
        reports.append(check_membership(hk, span_k, tol=tol))
    return reports
