"""Master-equation models in GKLS (Lindblad) form and their normalizations.

A model is the data (H, {L_j}, omega0) of

    drho/dt = -i*omega [H, rho] + sum_j ( L_j rho L_j^dag
              - 1/2 {L_j^dag L_j, rho} ),

where omega is the frequency-like parameter to be estimated and L_j are
the noise operators.  This module provides the canonical form (traceless,
mutually orthogonal noise operators), restriction to an invariant
subspace, superselection-sector decompositions, and direct application of
the generator.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .operators import (
    asmatrix,
    dagger,
    frobenius_norm,
    hermitize,
    hilbert_schmidt_inner,
    spectral_norm,
)

__all__ = [
    "MarkovModel",
    "SectorDecomposition",
    "CanonicalizationReport",
    "canonicalize",
    "restrict",
    "sectorize",
    "liouvillian_apply",
]


@dataclass(frozen=True)
class MarkovModel:
    """Hamiltonian, noise operators and reference frequency of a GKLS model.

    ``hamiltonian`` carries units of angular frequency per unit of the
    estimated parameter, noise operators carry sqrt(1/time).  The noise
    list may be empty (decoherence-free evolution).
    """

    dim: int
    hamiltonian: np.ndarray
    noise_ops: tuple[np.ndarray, ...]
    omega0: float = 0.0
    label: str = ""

    def __post_init__(self):
        h = hermitize(asmatrix(self.hamiltonian))
        if h.shape != (self.dim, self.dim):
            raise ValueError(f"hamiltonian shape {h.shape} does not match dim {self.dim}")
        ops = []
        for k, op in enumerate(self.noise_ops):
            m = asmatrix(op)
            if m.shape != (self.dim, self.dim):
                raise ValueError(f"noise op {k} has shape {m.shape}, expected {(self.dim, self.dim)}")
            ops.append(m)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "noise_ops", tuple(ops))

    @property
    def num_noise_ops(self) -> int:
        return len(self.noise_ops)

    def noise_grams(self) -> tuple[np.ndarray, ...]:
        """Cached products L_j^dag L_j (the integrator hot path)."""
        cache = getattr(self, "_grams", None)
        if cache is None:
            cache = tuple(dagger(op) @ op for op in self.noise_ops)
            object.__setattr__(self, "_grams", cache)
        return cache

    def with_noise_ops(self, ops) -> "MarkovModel":
        return replace(self, noise_ops=tuple(np.asarray(o, dtype=complex) for o in ops))


@dataclass(frozen=True)
class SectorDecomposition:
    """Orthogonal projectors {P_k} onto superselection sectors.

    The projectors are mutually orthogonal and resolve the identity.
    ``eigenvalues`` records the conserved-charge eigenvalue of each sector
    (descending order).
    """

    projectors: tuple[np.ndarray, ...]
    eigenvalues: tuple[float, ...] = field(default=())

    def __post_init__(self):
        projs = tuple(hermitize(asmatrix(p), warn=False) for p in self.projectors)
        object.__setattr__(self, "projectors", projs)
        dim = projs[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for i, p in enumerate(projs):
            for j, q in enumerate(projs):
                prod = p @ q
                ref = p if i == j else np.zeros_like(p)
                if np.linalg.norm(prod - ref) > 1e-10 * dim:
                    raise ValueError(f"projectors {i},{j} are not orthogonal/idempotent")
            total += p
        if np.linalg.norm(total - np.eye(dim)) > 1e-10 * dim:
            raise ValueError("sector projectors do not resolve the identity")

    def __len__(self) -> int:
        return len(self.projectors)

    def sector_index(self, eigenvalue: float, tol: float = 1e-6) -> int:
        """Index of the sector whose charge eigenvalue matches ``eigenvalue``."""
        for k, lam in enumerate(self.eigenvalues):
            if abs(lam - eigenvalue) <= tol:
                return k
        raise KeyError(f"no sector with charge eigenvalue {eigenvalue}")


@dataclass(frozen=True)
class CanonicalizationReport:
    """Result of putting a model into canonical form.

    ``model`` has traceless, Hilbert-Schmidt-orthogonal noise operators
    generating the same dissipator.  ``induced_hamiltonian_shift`` is the
    Hamiltonian term produced by the trace subtraction; it is reported
    separately and deliberately NOT folded into the model Hamiltonian
    (it can be compensated by control operations, and the bound solver
    expects the bare H).
    """

    model: MarkovModel
    induced_hamiltonian_shift: np.ndarray
    mixing_applied: bool
    dropped_ranks: int = 0


def canonicalize(model: MarkovModel, null_tol: float = 1e-12) -> CanonicalizationReport:
    """Return an equivalent model with traceless, orthogonal noise operators.

    Steps: (i) subtract the trace part lambda_j = Tr(L_j)/dim from each
    operator, accumulating the induced Hamiltonian shift
    sum_j (i/2)(lambda_j^* Lbar_j - lambda_j Lbar_j^dag); (ii) diagonalize
    the Gram matrix G_kj = Tr(Lbar_k^dag Lbar_j) and remix the operators by
    the unitary of eigenvectors, which preserves the dissipator exactly;
    (iii) drop operators whose Gram eigenvalue is below
    ``null_tol * max(eigenvalue)`` (null directions).
    """
    d = model.dim
    if model.num_noise_ops == 0:
        return CanonicalizationReport(
            model=model,
            induced_hamiltonian_shift=np.zeros((d, d), dtype=complex),
            mixing_applied=False,
        )

    shift = np.zeros((d, d), dtype=complex)
    bar_ops = []
    for op in model.noise_ops:
        lam = np.trace(op) / d
        bar = op - lam * np.eye(d)
        shift += 0.5j * (np.conj(lam) * bar - lam * dagger(bar))
        bar_ops.append(bar)
    shift = hermitize(shift, warn=False)

    j = len(bar_ops)
    gram = np.empty((j, j), dtype=complex)
    for a in range(j):
        for b in range(j):
            gram[a, b] = hilbert_schmidt_inner(bar_ops[a], bar_ops[b])
    gram = 0.5 * (gram + dagger(gram))

    already_diag = np.linalg.norm(gram - np.diag(np.diag(gram))) <= 1e-14 * max(
        1.0, np.linalg.norm(gram)
    )
    traces_were_zero = all(abs(np.trace(op)) <= 1e-14 * max(1.0, frobenius_norm(op))
                           for op in model.noise_ops)
    if already_diag and traces_were_zero:
        # Keep the operators verbatim (loss models etc. stay interpretable).
        kept = [op for op, w in zip(bar_ops, np.real(np.diag(gram)))
                if w > null_tol * max(np.max(np.real(np.diag(gram))), 1e-300)]
        return CanonicalizationReport(
            model=model.with_noise_ops(kept),
            induced_hamiltonian_shift=shift,
            mixing_applied=False,
            dropped_ranks=j - len(kept),
        )

    w, u = np.linalg.eigh(gram)
    # Descending Gram weight for a deterministic ordering.
    order = np.argsort(w)[::-1]
    w = w[order]
    u = u[:, order]
    new_ops = []
    dropped = 0
    wmax = max(float(w[0]), 0.0)
    stack = np.stack(bar_ops)  # (j, d, d)
    for i in range(j):
        if w[i] <= null_tol * max(wmax, 1e-300):
            dropped += 1
            continue
        # Mixing by the unitary with columns of u keeps the dissipator intact.
        new_ops.append(np.tensordot(u[:, i], stack, axes=(0, 0)))
    return CanonicalizationReport(
        model=model.with_noise_ops(new_ops),
        induced_hamiltonian_shift=shift,
        mixing_applied=True,
        dropped_ranks=dropped,
    )


def projector_range_basis(p: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the range of a Hermitian projector."""
    p = hermitize(asmatrix(p), warn=False)
    residual = np.linalg.norm(p @ p - p)
    if residual > tol * max(1.0, np.linalg.norm(p)):
        raise ValueError(f"matrix is not an orthogonal projector (idempotence residual {residual:.2e})")
    w, v = np.linalg.eigh(p)
    return v[:, w > 0.5]


def restrict(model: MarkovModel, projector: np.ndarray) -> MarkovModel:
    """Compress a model onto the range of a projector: X -> V^dag X V.

    Only meaningful when the dynamics does not leave the subspace; the
    caller is responsible for that physical judgement.
    """
    v = projector_range_basis(projector)
    h = dagger(v) @ model.hamiltonian @ v
    ops = tuple(dagger(v) @ op @ v for op in model.noise_ops)
    return MarkovModel(
        dim=v.shape[1],
        hamiltonian=hermitize(h, warn=False),
        noise_ops=ops,
        omega0=model.omega0,
        label=f"{model.label}|restricted" if model.label else "restricted",
    )


def sectorize(model: MarkovModel, charge: np.ndarray) -> SectorDecomposition:
    """Projectors onto eigenspaces of a conserved charge.

    Eigenvalues equal within ``1e-8 * ||charge||`` are grouped into one
    sector; sectors are ordered by descending eigenvalue.
    """
    charge = hermitize(asmatrix(charge))
    if charge.shape != (model.dim, model.dim):
        raise ValueError("charge dimension does not match the model")
    w, v = np.linalg.eigh(charge)
    tol = 1e-8 * max(spectral_norm(charge), 1.0e-300)
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    projectors = []
    eigenvalues = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or abs(w[i] - w[start]) > tol:
            block = v[:, start:i]
            projectors.append(block @ dagger(block))
            eigenvalues.append(float(np.mean(w[start:i])))
            start = i
    return SectorDecomposition(projectors=tuple(projectors), eigenvalues=tuple(eigenvalues))


def liouvillian_apply(model: MarkovModel, rho: np.ndarray, omega: float | None = None) -> np.ndarray:
    """Apply the GKLS generator at frequency ``omega`` (default omega0).

    Returns -i*omega [H, rho] + sum_j (L_j rho L_j^dag
    - 1/2 {L_j^dag L_j, rho}).  Trace-free and Hermiticity-preserving.
    """
    rho = asmatrix(rho)
    if rho.shape != (model.dim, model.dim):
        raise ValueError(f"state shape {rho.shape} does not match model dim {model.dim}")
    if omega is None:
        omega = model.omega0
    h = model.hamiltonian
    out = -1j * omega * (h @ rho - rho @ h)
    for op, gram in zip(model.noise_ops, model.noise_grams()):
        out += (op @ rho) @ dagger(op) - 0.5 * (gram @ rho + rho @ gram)
    return out


def warn_if_not_canonical(model: MarkovModel, tol: float = 1e-10) -> bool:
    """Emit a warning when noise operators are not in canonical form."""
    ok = True
    for a, op_a in enumerate(model.noise_ops):
        na = frobenius_norm(op_a)
        if abs(np.trace(op_a)) > tol * np.sqrt(model.dim) * max(na, 1e-300):
            ok = False
        for op_b in model.noise_ops[a + 1:]:
            nb = frobenius_norm(op_b)
            if abs(hilbert_schmidt_inner(op_a, op_b)) > tol * max(na * nb, 1e-300):
                ok = False
    if not ok:
        warnings.warn(
            "model noise operators are not in canonical (traceless, orthogonal) "
            "form; results are still valid but consider canonicalize() first",
            stacklevel=3,
        )
    return ok
