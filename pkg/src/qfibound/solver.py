"""Minimal-noise-coefficient solver for the linear-time QFI bound.

For a model in GKLS form, the short-time Kraus expansion has one operator
close to the identity and one operator L_j*sqrt(dt) per noise channel.
Re-mixing Kraus representations with a Hermitian generator h (blocks
h00, hvec, hmat) produces the two leading-order coefficient operators

    beta  = H + h00*1 + hvec^dag L + L^dag hvec + L^dag hmat L
    alpha = M^dag M,   M = hvec (x) 1 + hmat L   (stacked row blocks)

The tightest linear-in-T bound on the quantum Fisher information is

    F_Q <= 4 * T * min ||alpha||   subject to   beta = 0,

a convex program: beta = 0 is linear in h, and ||alpha|| = sigma_max(M)^2
with M affine in h.  The minimization runs on the linear matrix inequality

    [[lam*1, M^dag], [M, lam*1]] >= 0   <=>   sigma_max(M) <= lam,

through two independent routes that are cross-checked in the test suite:

  * ``interior`` (default): an interior-point iteration on the log-det
    barrier of the LMI, Newton steps with exact Hessian;
  * ``bisection``: bisection on the bound value with a feasibility oracle
    that minimizes the smoothed largest eigenvalue (log-sum-exp over the
    spectrum, temperature continuation, deterministic zero start).

Superselection sectors and fixed-particle-number constraints enter in two
places.  First, the h00 block becomes one real coefficient per sector, so
the identity term generalizes to an arbitrary real function of the
conserved charge; this is exactly the extra freedom a fixed-number
subspace provides (on the number sector, particle-number operators and
the identity are linearly dependent), and it recovers the one-parameter
families familiar from lossy-interferometer analyses without any separate
knob.  Second, with a designated physical sector the operator norm is
evaluated on that sector only, ||M P||^2.  The constraint beta = 0 is
always imposed as a full-space operator identity, which keeps the bound
valid without further assumptions about how lost particles are replaced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize

from .model import MarkovModel, SectorDecomposition, projector_range_basis
from .operators import dagger, hermitize, spectral_norm
from .span import hermitian_to_real_vector

__all__ = [
    "HCoefficients",
    "BoundResult",
    "beta_coefficient",
    "alpha_coefficient",
    "solve_bound",
    "bound_qfi",
    "state_dependent_bound",
]


# ---------------------------------------------------------------------------
# Kraus-mixing coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HCoefficients:
    """The free mixing parameters entering the coefficient operators.

    ``h00`` is a real scalar, or one real coefficient per sector when a
    sector decomposition is in play (the identity term then reads
    sum_k h00[k] P_k).  ``hvec`` is a complex vector of length J and
    ``hmat`` a Hermitian J x J matrix, J the number of noise operators.
    """

    h00: np.ndarray
    hvec: np.ndarray
    hmat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h00", np.atleast_1d(np.asarray(self.h00, dtype=float)))
        object.__setattr__(self, "hvec", np.asarray(self.hvec, dtype=complex))
        object.__setattr__(self, "hmat", np.asarray(self.hmat, dtype=complex))
        hm = self.hmat
        if hm.ndim != 2:
            raise ValueError("hmat must be a matrix")
        if np.linalg.norm(hm - dagger(hm)) > 1e-12 * max(1.0, np.linalg.norm(hm)):
            raise ValueError("hmat must be Hermitian")

    @staticmethod
    def zero(num_noise: int, num_sectors: int = 1) -> "HCoefficients":
        return HCoefficients(
            np.zeros(num_sectors),
            np.zeros(num_noise),
            np.zeros((num_noise, num_noise)),
        )


def _h00_operator(h00: np.ndarray, dim: int,
                  sectors: SectorDecomposition | None) -> np.ndarray:
    h00 = np.atleast_1d(h00)
    if sectors is None:
        if h00.size != 1:
            raise ValueError("per-sector h00 requires a sector decomposition")
        return float(h00[0]) * np.eye(dim)
    if h00.size != len(sectors):
        raise ValueError(f"h00 has {h00.size} entries for {len(sectors)} sectors")
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, proj in zip(h00, sectors.projectors):
        out += float(coeff) * proj
    return out


def beta_coefficient(model: MarkovModel, h: HCoefficients,
                     sectors: SectorDecomposition | None = None) -> np.ndarray:
    """Leading-order drift coefficient as a matrix.

    beta = H + h00-term + sum_j (conj(hvec_j) L_j + hvec_j L_j^dag)
    + sum_ij hmat_ij L_i^dag L_j, with the h00 term equal to
    sum_k h00[k] P_k when sectors are given.
    """
    out = model.hamiltonian + _h00_operator(h.h00, model.dim, sectors)
    for j, op in enumerate(model.noise_ops):
        out = out + np.conj(h.hvec[j]) * op + h.hvec[j] * dagger(op)
    for i, op_i in enumerate(model.noise_ops):
        for j, op_j in enumerate(model.noise_ops):
            if h.hmat[i, j] != 0:
                out = out + h.hmat[i, j] * (dagger(op_i) @ op_j)
    return hermitize(out, warn=False)


def alpha_coefficient(model: MarkovModel, h: HCoefficients,
                      sectors: SectorDecomposition | None = None) -> np.ndarray:
    """Leading-order information-rate coefficient alpha = M^dag M.

    M stacks one row block per noise index: row_j = hvec_j * 1
    + sum_i hmat_ji L_i.  Positive semi-definite by construction; h00 does
    not enter.
    """
    del sectors  # the h00 block does not contribute to alpha
    dim = model.dim
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(model.num_noise_ops):
        row = h.hvec[j] * np.eye(dim, dtype=complex)
        for i, op in enumerate(model.noise_ops):
            if h.hmat[j, i] != 0:
                row = row + h.hmat[j, i] * op
        out += dagger(row) @ row
    return hermitize(out, warn=False)


# ---------------------------------------------------------------------------
# Assembly of the convex program
# ---------------------------------------------------------------------------

@dataclass
class _Param:
    kind: str          # "h00" | "hvec_re" | "hvec_im" | "hmat_d" | "hmat_re" | "hmat_im"
    a: int = -1        # noise indices (or sector index for h00)
    b: int = -1


@dataclass
class _Problem:
    """Reduced data of the convex program."""

    params: list[_Param]
    constraint: np.ndarray          # real (d^2) x n, columns = vecH(beta contribution)
    rhs: np.ndarray
    m_maps: list[np.ndarray]        # per-param M contribution, compressed rows
    m_rows: int
    norm_dim: int                   # columns of M after the sector compression
    pruned: int


def _assemble(model: MarkovModel, sectors: SectorDecomposition | None,
              physical_sector: int | None) -> _Problem:
    """Build the constraint matrix and the affine map h -> M.

    The constraint columns are the beta contributions of unit coordinate
    vectors (shared with :func:`beta_coefficient`, so the two cannot
    drift apart).  M rows are compressed onto an orthonormal basis of
    span{V, L_1 V, ..., L_J V} with V the physical-sector isometry; this
    changes nothing about singular values and keeps the LMI small.
    """
    dim = model.dim
    ops = list(model.noise_ops)
    n_ops = len(ops)
    zero_h = HCoefficients.zero(n_ops, 1 if sectors is None else len(sectors))

    params: list[_Param] = []
    n_sec = 1 if sectors is None else len(sectors)
    for k in range(n_sec):
        params.append(_Param("h00", a=k))
    for j in range(n_ops):
        params.append(_Param("hvec_re", a=j))
        params.append(_Param("hvec_im", a=j))
    for a in range(n_ops):
        params.append(_Param("hmat_d", a=a, b=a))
        for b in range(a + 1, n_ops):
            params.append(_Param("hmat_re", a=a, b=b))
            params.append(_Param("hmat_im", a=a, b=b))

    def unit_coeff(p: _Param) -> HCoefficients:
        h00 = np.zeros(n_sec)
        hvec = np.zeros(n_ops, dtype=complex)
        hmat = np.zeros((n_ops, n_ops), dtype=complex)
        if p.kind == "h00":
            h00[p.a] = 1.0
        elif p.kind == "hvec_re":
            hvec[p.a] = 1.0
        elif p.kind == "hvec_im":
            hvec[p.a] = 1.0j
        elif p.kind == "hmat_d":
            hmat[p.a, p.a] = 1.0
        elif p.kind == "hmat_re":
            hmat[p.a, p.b] = 1.0
            hmat[p.b, p.a] = 1.0
        elif p.kind == "hmat_im":
            hmat[p.a, p.b] = 1.0j
            hmat[p.b, p.a] = -1.0j
        return HCoefficients(h00, hvec, hmat)

    h_free = model.hamiltonian
    zero_model = MarkovModel(dim=dim, hamiltonian=np.zeros((dim, dim)),
                             noise_ops=tuple(ops), omega0=model.omega0)

    cols = [hermitian_to_real_vector(beta_coefficient(zero_model, unit_coeff(p), sectors))
            for p in params]
    constraint = np.column_stack(cols) if cols else np.zeros((dim * dim, 0))
    rhs = -hermitian_to_real_vector(hermitize(h_free, warn=False))

    # Columns that neither constrain beta nor move M belong to degenerate
    # noise operators; drop them to keep the system well conditioned.
    pruned = 0
    degenerate = [j for j, op in enumerate(ops) if np.linalg.norm(op) <= 1e-14]
    if degenerate:
        kept = [i for i, p in enumerate(params)
                if p.kind == "h00" or (p.a not in degenerate and p.b not in degenerate)]
        pruned = len(params) - len(kept)
        params = [params[i] for i in kept]
        constraint = constraint[:, kept]

    # Physical-sector isometry for the norm evaluation.
    if physical_sector is not None:
        v = projector_range_basis(sectors.projectors[physical_sector])
    else:
        v = np.eye(dim, dtype=complex)
    norm_dim = v.shape[1]

    # Row compression: all rows of M V live in span{V, L_i V}.
    stack = np.hstack([v] + [op @ v for op in ops]) if n_ops else v
    u_c, s_c, _ = np.linalg.svd(stack, full_matrices=False)
    q = u_c[:, s_c > 1e-13 * max(1.0, s_c[0] if s_c.size else 0.0)]
    red = q.shape[1]

    qv = dagger(q) @ v                      # compressed identity block
    q_ops = [dagger(q) @ (op @ v) for op in ops]
    m_rows = n_ops * red

    def m_contrib(p: _Param) -> np.ndarray:
        out = np.zeros((m_rows, norm_dim), dtype=complex)
        if p.kind == "h00":
            return out
        if p.kind in ("hvec_re", "hvec_im"):
            block = slice(p.a * red, (p.a + 1) * red)
            out[block] = (1.0 if p.kind == "hvec_re" else 1.0j) * qv
            return out
        # hmat parameter (a, b): enters row a with L_b and row b with the
        # conjugate coefficient times L_a.
        block_a = slice(p.a * red, (p.a + 1) * red)
        block_b = slice(p.b * red, (p.b + 1) * red)
        if p.kind == "hmat_d":
            out[block_a] = q_ops[p.a]
        elif p.kind == "hmat_re":
            out[block_a] += q_ops[p.b]
            out[block_b] += q_ops[p.a]
        elif p.kind == "hmat_im":
            out[block_a] += 1.0j * q_ops[p.b]
            out[block_b] += -1.0j * q_ops[p.a]
        return out

    m_maps = [m_contrib(p) for p in params]
    return _Problem(
        params=params,
        constraint=constraint,
        rhs=rhs,
        m_maps=m_maps,
        m_rows=m_rows,
        norm_dim=norm_dim,
        pruned=pruned,
    )


def _particular_and_nullspace(prob: _Problem):
    """Least-squares particular solution and nullspace of beta = 0."""
    c = prob.constraint
    if c.shape[1] == 0:
        return np.zeros(0), np.zeros((0, 0)), float(np.linalg.norm(prob.rhs))
    x_p, *_ = np.linalg.lstsq(c, prob.rhs, rcond=None)
    residual = float(np.linalg.norm(c @ x_p - prob.rhs))
    # Economy SVD gives the complete right factor whenever rows >= cols;
    # the full version is needed (and cheap) only for wide systems.
    _, sv, vt = np.linalg.svd(c, full_matrices=c.shape[0] < c.shape[1])
    rank = int(np.sum(sv > 1e-12 * (sv[0] if sv.size else 1.0)))
    null = vt[rank:].T
    return x_p, null, residual


def _family(prob: _Problem, x_p: np.ndarray, null: np.ndarray):
    """Affine family M(theta) = m0 + sum_k theta_k mk."""
    m0 = np.zeros((prob.m_rows, prob.norm_dim), dtype=complex)
    for coeff, mp in zip(x_p, prob.m_maps):
        if coeff != 0.0:
            m0 += coeff * mp
    mks = []
    for k in range(null.shape[1]):
        mk = np.zeros((prob.m_rows, prob.norm_dim), dtype=complex)
        for coeff, mp in zip(null[:, k], prob.m_maps):
            if coeff != 0.0:
                mk += coeff * mp
        mks.append(mk)
    return m0, mks


# ---------------------------------------------------------------------------
# Spectral-norm minimization over the affine family
# ---------------------------------------------------------------------------

def _sigma_max(m: np.ndarray) -> float:
    return 0.0 if m.size == 0 else float(np.linalg.norm(m, ord=2))


def _minimize_interior(m0: np.ndarray, mks: list[np.ndarray], rel_tol: float):
    """Interior-point minimization of sigma_max(M(theta)).

    Works on the LMI A(theta, lam) = [[lam*1, M^dag], [M, lam*1]] >= 0 with
    the barrier eta*lam - log det A, exact Newton steps, and geometric
    barrier updates until the duality gap (size of A)/eta falls below
    ``rel_tol`` times the current value.
    """
    n_theta = len(mks)
    rows, cols = m0.shape
    q = rows + cols
    scale = max(_sigma_max(m0), max((np.linalg.norm(mk) for mk in mks), default=0.0), 1e-300)

    m0s = m0 / scale
    mks_s = [mk / scale for mk in mks]

    def build_a(theta, lam):
        m = m0s.copy()
        for t, mk in zip(theta, mks_s):
            m += t * mk
        a = np.zeros((q, q), dtype=complex)
        a[:cols, :cols] = lam * np.eye(cols)
        a[cols:, cols:] = lam * np.eye(rows)
        a[cols:, :cols] = m
        a[:cols, cols:] = dagger(m)
        return a, m

    derivs = []
    for mk in mks_s:
        d = np.zeros((q, q), dtype=complex)
        d[cols:, :cols] = mk
        d[:cols, cols:] = dagger(mk)
        derivs.append(d)
    derivs.append(np.eye(q, dtype=complex))  # d/d lam

    theta = np.zeros(n_theta)
    lam = 1.5 * _sigma_max(m0s) + 0.5
    eta = 1.0
    newton_total = 0
    target_gap = max(rel_tol, 1e-12)

    while True:
        for _ in range(80):
            a, _ = build_a(theta, lam)
            w = np.linalg.inv(a)
            sd = [w @ d for d in derivs]
            grad = np.array([-np.real(np.trace(s)) for s in sd])
            grad[-1] += eta
            hess = np.empty((n_theta + 1, n_theta + 1))
            for i in range(n_theta + 1):
                for j in range(i, n_theta + 1):
                    hess[i, j] = hess[j, i] = np.real(np.sum(sd[i] * sd[j].T))
            hess[np.diag_indices_from(hess)] += 1e-13 * (1.0 + np.trace(hess) / (n_theta + 1))
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                step = -grad
            decrement = float(-grad @ step)
            newton_total += 1
            if decrement <= 1e-13:
                break
            stepsize = 1.0
            f0 = eta * lam - 2.0 * np.sum(np.log(np.abs(np.diag(np.linalg.cholesky(a)))))
            for _ in range(60):
                th_new = theta + stepsize * step[:-1]
                lam_new = lam + stepsize * step[-1]
                a_new, _ = build_a(th_new, lam_new)
                try:
                    chol = np.linalg.cholesky(a_new)
                except np.linalg.LinAlgError:
                    stepsize *= 0.5
                    continue
                f_new = eta * lam_new - 2.0 * np.sum(np.log(np.abs(np.diag(chol))))
                if f_new <= f0 - 0.25 * stepsize * decrement:
                    break
                stepsize *= 0.5
            else:
                break
            theta = theta + stepsize * step[:-1]
            lam = lam + stepsize * step[-1]
        gap = q / eta
        if gap <= target_gap * max(lam, 1e-6):
            break
        eta *= 25.0
        if eta > 1e16:
            break

    _, m_final = build_a(theta, lam)
    value = _sigma_max(m_final) * scale
    return value, theta, newton_total


def _smoothed_min_sigma(m0: np.ndarray, mks: list[np.ndarray], scale: float):
    """Deterministic smoothed minimization of sigma_max(M(theta)).

    Minimizes tau * logsumexp(eig(Hemb)/tau) for the symmetric embedding
    Hemb = [[0, M^dag], [M, 0]] with a decreasing-temperature schedule,
    starting from theta = 0.  Returns the exact sigma_max at the final
    iterate (smoothing only overestimates, so this is a feasible value).
    """
    n_theta = len(mks)
    rows, cols = m0.shape
    q = rows + cols
    if n_theta == 0:
        return _sigma_max(m0), np.zeros(0)

    def embed(m):
        h = np.zeros((q, q), dtype=complex)
        h[cols:, :cols] = m
        h[:cols, cols:] = dagger(m)
        return h

    def m_of(theta):
        m = m0.copy()
        for t, mk in zip(theta, mks):
            m += t * mk
        return m

    def objective(theta, tau):
        m = m_of(theta)
        w, v = np.linalg.eigh(embed(m))
        z = w / tau
        zmax = z.max()
        expz = np.exp(z - zmax)
        val = tau * (zmax + np.log(np.sum(expz)))
        weights = expz / np.sum(expz)
        grad = np.empty(n_theta)
        x = v[:cols, :]
        y = v[cols:, :]
        for k, mk in enumerate(mks):
            per_eig = 2.0 * np.real(np.einsum("ij,ij->j", np.conj(y), mk @ x))
            grad[k] = float(weights @ per_eig)
        return val, grad

    theta = np.zeros(n_theta)
    for tau in scale * np.array([1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 3e-8]):
        res = minimize(
            objective, theta, args=(tau,), jac=True, method="L-BFGS-B",
            options={"maxiter": 500, "ftol": 1e-18, "gtol": 1e-14 * scale},
        )
        theta = res.x
    return _sigma_max(m_of(theta)), theta


def _minimize_bisection(m0: np.ndarray, mks: list[np.ndarray], tol: float):
    """Bisection on the bound value with a smoothed feasibility oracle.

    Bracket: [0, ||alpha(h_particular)||].  At each trial value the oracle
    asks whether some theta brings the minimal eigenvalue of
    A(theta, lam) = [[lam*1, M^dag], [M, lam*1]] above -1e-10, which for
    this family reduces to sigma_max(M(theta)) <= lam + 1e-10.  The oracle
    minimizes the log-sum-exp-smoothed top eigenvalue from a deterministic
    zero start; being deterministic its output is lam-independent, so it
    is evaluated once and cached for every bisection step.  Termination:
    bracket width <= tol * max(1, upper).
    """
    hi = _sigma_max(m0) ** 2
    if hi == 0.0 or not mks:
        return hi, np.zeros(len(mks)), 0
    scale = max(np.sqrt(hi), 1e-300)
    sig_min, theta_min = _smoothed_min_sigma(m0, mks, scale)
    lo = 0.0
    iters = 0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        lam = np.sqrt(mid)
        feasible = lam - sig_min >= -1e-10 * max(1.0, scale)
        iters += 1
        if feasible:
            hi = mid
        else:
            lo = mid
        if iters > 200:
            break
    return hi, theta_min, iters


# ---------------------------------------------------------------------------
# Public solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundResult:
    """Solution of min ||alpha|| subject to beta = 0.

    ``qfi_coefficient`` is exactly 4 * alpha_norm; the bound on the
    quantum Fisher information after total probing time T is
    qfi_coefficient * T.  ``status`` is one of optimal, infeasible,
    max_iterations.
    """

    alpha_norm: float
    qfi_coefficient: float
    optimizer: HCoefficients | None
    beta_residual: float
    status: str
    diagnostics: dict = field(default_factory=dict)


def _pack_coefficients(prob: _Problem, x: np.ndarray, n_ops: int, n_sec: int) -> HCoefficients:
    h00 = np.zeros(n_sec)
    hvec = np.zeros(n_ops, dtype=complex)
    hmat = np.zeros((n_ops, n_ops), dtype=complex)
    for p, val in zip(prob.params, x):
        if p.kind == "h00":
            h00[p.a] += val
        elif p.kind == "hvec_re":
            hvec[p.a] += val
        elif p.kind == "hvec_im":
            hvec[p.a] += 1j * val
        elif p.kind == "hmat_d":
            hmat[p.a, p.a] += val
        elif p.kind == "hmat_re":
            hmat[p.a, p.b] += val
            hmat[p.b, p.a] += val
        elif p.kind == "hmat_im":
            hmat[p.a, p.b] += 1j * val
            hmat[p.b, p.a] += -1j * val
    return HCoefficients(h00 if n_sec > 1 else h00[:1], hvec, hmat)


def solve_bound(model: MarkovModel,
                sectors: SectorDecomposition | None = None,
                physical_sector: int | None = None,
                tol: float = 1e-8,
                method: str = "interior") -> BoundResult:
    """Minimize ||alpha|| over all mixing coefficients with beta = 0.

    ``sectors`` widens the h00 block to one coefficient per sector of a
    conserved charge; ``physical_sector`` restricts the norm evaluation to
    that sector (fixed-particle-number bounds).  The constraint beta = 0
    is an operator identity on the full space.  The QFI bound after total
    time T is 4 * alpha_norm * T.

    Status ``infeasible`` means the Hamiltonian lies outside the span of
    the noise operators and their pairwise products (plus the sector
    projectors): no linear-in-T bound exists, and quadratic time scaling
    is the candidate behaviour.
    """
    if physical_sector is not None and sectors is None:
        raise ValueError("physical_sector requires a sector decomposition")
    if method not in ("interior", "bisection"):
        raise ValueError(f"unknown method {method!r}")

    n_sec = 1 if sectors is None else len(sectors)
    prob = _assemble(model, sectors, physical_sector)
    x_p, null, residual = _particular_and_nullspace(prob)

    h_scale = max(1.0, spectral_norm(model.hamiltonian))
    feas_tol = 1e-8 * h_scale
    diagnostics: dict = {"pruned_columns": prob.pruned, "method": method,
                         "constraint_residual": residual}

    if residual > feas_tol:
        return BoundResult(
            alpha_norm=math.inf,
            qfi_coefficient=math.inf,
            optimizer=None,
            beta_residual=residual,
            status="infeasible",
            diagnostics=diagnostics,
        )

    m0, mks = _family(prob, x_p, null)
    keep = [k for k, mk in enumerate(mks) if np.linalg.norm(mk) > 1e-14]
    mks_eff = [mks[k] for k in keep]
    diagnostics["nullspace_dim"] = len(mks_eff)

    if prob.m_rows == 0 or (_sigma_max(m0) == 0.0 and not mks_eff):
        value, theta = 0.0, np.zeros(len(mks_eff))
    elif not mks_eff:
        value, theta = _sigma_max(m0) ** 2, np.zeros(0)
    elif method == "interior":
        sig, theta, iters = _minimize_interior(m0, mks_eff, rel_tol=min(tol, 1e-10))
        diagnostics["solver_iterations"] = iters
        value = sig ** 2
    else:
        value, theta, iters = _minimize_bisection(m0, mks_eff, tol=tol)
        diagnostics["solver_iterations"] = iters

    x_full = x_p.copy()
    for k_eff, k_orig in enumerate(keep):
        x_full = x_full + theta[k_eff] * null[:, k_orig]
    optimizer = _pack_coefficients(prob, x_full, model.num_noise_ops, n_sec)

    return BoundResult(
        alpha_norm=float(value),
        qfi_coefficient=4.0 * float(value),
        optimizer=optimizer,
        beta_residual=float(residual),
        status="optimal",
        diagnostics=diagnostics,
    )


def bound_qfi(result: BoundResult, total_time: float) -> float:
    """Evaluate the linear bound 4 * ||alpha|| * T for an optimal result."""
    if result.status != "optimal":
        raise ValueError(f"bound not available for status {result.status!r}")
    if total_time <= 0:
        raise ValueError("total time must be positive")
    return result.qfi_coefficient * total_time


def state_dependent_bound(model: MarkovModel,
                          trajectory: list[tuple[float, np.ndarray]],
                          sectors: SectorDecomposition | None = None) -> float:
    """State-resolved bound 4 * integral of min Tr(alpha rho_t) dt.

    Requires knowledge of the state trajectory under the protocol.  At each
    time sample the quadratic Tr(M^dag M rho) is minimized over the
    constraint nullspace (an equality-constrained least-squares problem in
    the real coordinates of h), and the samples are combined with the
    trapezoid rule.  Never exceeds 4 * ||alpha*|| * T, and often much
    tighter when the state decays.
    """
    if len(trajectory) == 0:
        raise ValueError("empty trajectory")
    times = np.array([t for t, _ in trajectory], dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("trajectory times must be strictly increasing")
    if times[0] < 0:
        raise ValueError("trajectory must start at time >= 0")
    states = []
    for _, rho in trajectory:
        rho = np.asarray(rho, dtype=complex)
        w = np.linalg.eigvalsh(hermitize(rho, warn=False))
        if w.min() < -1e-9:
            raise ValueError(f"state not positive semi-definite (min eigenvalue {w.min():.2e})")
        states.append(rho)
    if len(trajectory) == 1:
        return 0.0

    prob = _assemble(model, sectors, physical_sector=None)
    x_p, null, residual = _particular_and_nullspace(prob)
    h_scale = max(1.0, spectral_norm(model.hamiltonian))
    if residual > 1e-8 * h_scale:
        raise ValueError("beta = 0 is infeasible; no linear bound exists for this model")
    m0, mks = _family(prob, x_p, null)
    mks = [mk for mk in mks if np.linalg.norm(mk) > 1e-14]

    integrand = np.zeros(len(times))
    if m0.size == 0:
        return 0.0
    for idx, rho in enumerate(states):
        w, v = np.linalg.eigh(hermitize(rho, warn=False))
        w = np.clip(w, 0.0, None)
        sqrt_rho = (v * np.sqrt(w)) @ dagger(v)
        y0 = (m0 @ sqrt_rho).ravel()
        if mks:
            g = np.column_stack([(mk @ sqrt_rho).ravel() for mk in mks])
            g_ri = np.vstack([np.real(g), np.imag(g)])
            y_ri = np.concatenate([np.real(y0), np.imag(y0)])
            theta, *_ = np.linalg.lstsq(g_ri, -y_ri, rcond=None)
            resid = y_ri + g_ri @ theta
            integrand[idx] = float(resid @ resid)
        else:
            integrand[idx] = float(np.real(np.vdot(y0, y0)))
    return 4.0 * float(trapezoid(integrand, times))
