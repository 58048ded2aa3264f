"""Reference models: qubit benchmarks and two-mode lossy interferometers.

The two-mode builders cover linear (particle-number difference) and
nonlinear (normal-ordered squared difference) phase Hamiltonians with
one-body losses L_i = sqrt(gamma_i) a_i and two-body losses
L_ij = sqrt(gamma_ij) a_i a_j on a total-number-truncated Fock space.
Fixed-atom-number analysis uses the total-number sector decomposition
with the N-particle block as the physical sector.

Closed-form bound coefficients carried here:

  * linear, one-body losses:  4 N / (sqrt(gamma_1) + sqrt(gamma_2))^2;
  * nonlinear, two-body losses at gamma_11 = gamma_22 (lam = 2
    gamma_11/gamma_12):  (N^2/gamma_12) * 2(1-1/N)/(1+sqrt(lam))^2 for
    lam >= 1 - 2/N, else (N^2/gamma_12) / (1 + lam N/(N-2));
  * asymmetric two-body rates: the scalar elimination xi = (A-B)/(A+B)
    followed by a one-dimensional maximization over the mode-imbalance
    fraction x, done by golden-section search.

The asymmetric maximization treats x as continuous, which is the
customary large-N reading; at small N it can exceed the exact
discrete-spectrum optimum returned by the solver by a relative margin of
order 1/N^2, so the solver value is the authoritative bound and the
closed form an analytic reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MarkovModel, SectorDecomposition, sectorize
from .operators import dagger, truncated_annihilator

__all__ = [
    "LossyInterferometerParams",
    "ZooEntry",
    "lossy_interferometer_model",
    "closed_form_linear_bound",
    "closed_form_nonlinear_bound",
    "replenished_vs_decaying_bounds",
    "standard_zoo",
]


@dataclass(frozen=True)
class LossyInterferometerParams:
    """Atom number, loss rates and Hamiltonian order of a two-mode model."""

    N: int
    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma11: float = 0.0
    gamma22: float = 0.0
    gamma12: float = 0.0
    k: int = 1
    cutoff: int | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("need at least one atom")
        if self.k not in (1, 2):
            raise ValueError("Hamiltonian order k must be 1 or 2")
        rates = (self.gamma1, self.gamma2, self.gamma11, self.gamma22, self.gamma12)
        if any(g < 0 for g in rates):
            raise ValueError("loss rates must be nonnegative")
        if self.cutoff is not None and self.cutoff < self.N:
            raise ValueError("Fock cutoff must be at least the atom number")


def lossy_interferometer_model(
    params: LossyInterferometerParams,
) -> tuple[MarkovModel, SectorDecomposition, int]:
    """Two-mode lossy interferometer on a truncated Fock space.

    Returns the model, the total-number sector decomposition, and the
    index of the N-atom physical sector.  Zero-rate loss channels are
    omitted.  The nonlinear Hamiltonian is the normal-ordered square
    (a1d a1d a1 a1 + a2d a2d a2 a2 - 2 a1d a2d a1 a2) / 4, which keeps
    only genuine two-particle interaction terms.
    """
    cutoff = params.N if params.cutoff is None else params.cutoff
    a1 = truncated_annihilator(1, 2, cutoff)
    a2 = truncated_annihilator(2, 2, cutoff)
    n1 = dagger(a1) @ a1
    n2 = dagger(a2) @ a2
    if params.k == 1:
        ham = 0.5 * (n1 - n2)
    else:
        ham = 0.25 * (dagger(a1) @ dagger(a1) @ a1 @ a1
                      + dagger(a2) @ dagger(a2) @ a2 @ a2
                      - 2.0 * dagger(a1) @ dagger(a2) @ a1 @ a2)
    noise = []
    for rate, op in [
        (params.gamma1, a1),
        (params.gamma2, a2),
        (params.gamma11, a1 @ a1),
        (params.gamma22, a2 @ a2),
        (params.gamma12, a1 @ a2),
    ]:
        if rate > 0:
            noise.append(np.sqrt(rate) * op)
    label = f"lossy-interferometer(N={params.N}, k={params.k})"
    model = MarkovModel(dim=a1.shape[0], hamiltonian=ham, noise_ops=tuple(noise),
                        label=label)
    sectors = sectorize(model, n1 + n2)
    return model, sectors, sectors.sector_index(params.N)


def closed_form_linear_bound(N: int, gamma1: float, gamma2: float) -> float:
    """QFI-per-time coefficient 4N/(sqrt(gamma1)+sqrt(gamma2))^2.

    Valid for the linear Hamiltonian with one-body losses on both arms.
    Vanishing rates make the linear bound diverge (the model then has a
    decoherence-free direction and quadratic time scaling is possible),
    which is reported as an error rather than a number.
    """
    if gamma1 <= 0 or gamma2 <= 0:
        raise ValueError(
            "the linear-scaling coefficient diverges for vanishing loss rates; "
            "a decoherence-free direction opens up and no linear bound applies"
        )
    return 4.0 * N / (np.sqrt(gamma1) + np.sqrt(gamma2)) ** 2


def _nonlinear_objective(x: float, N: int, gamma11: float, gamma22: float,
                         gamma12: float) -> float:
    """Per-time bound value at mode imbalance x after the xi elimination.

    With A = n(n-1)/g11 + (N-n)(N-n-1)/g22 and B = 4n(N-n)/g12, the
    optimal xi = (A-B)/(A+B) turns the minimax into A B/(A+B), written
    here in the x = n/N variable.
    """
    t_neutral = 1.0 / (4.0 * x * (1.0 - x))
    denom = (gamma12 / gamma11) * x * (x - 1.0 / N) \
        + (gamma12 / gamma22) * (1.0 - x) * (1.0 - x - 1.0 / N)
    return (N ** 2 / gamma12) / (t_neutral + 1.0 / denom)


def _golden_max(f, lo: float, hi: float, xtol: float) -> float:
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return max(fc, fd)


def closed_form_nonlinear_bound(N: int, gamma11: float, gamma22: float,
                                gamma12: float, xtol: float = 1e-10) -> float:
    """QFI-per-time coefficient for the nonlinear two-body-loss model.

    Symmetric rates use the finite-N closed form in lam = 2
    gamma11/gamma12; otherwise the scalar parameter is eliminated
    analytically and the remaining one-dimensional maximization over the
    imbalance fraction runs by golden-section search (bracketed by a
    coarse scan, endpoints checked explicitly; both endpoints give zero).
    """
    if gamma12 <= 0:
        raise ValueError("the cross two-body rate gamma12 must be positive")
    if gamma11 <= 0 or gamma22 <= 0:
        raise ValueError("two-body rates must be positive for this bound")
    if N < 2:
        raise ValueError("the nonlinear bound needs at least two atoms")
    if abs(gamma11 - gamma22) <= 1e-14 * max(gamma11, gamma22):
        lam = 2.0 * gamma11 / gamma12
        if lam >= 1.0 - 2.0 / N:
            return (N ** 2 / gamma12) * 2.0 * (1.0 - 1.0 / N) / (1.0 + np.sqrt(lam)) ** 2
        return (N ** 2 / gamma12) / (1.0 + lam * N / (N - 2))

    def f(x):
        return _nonlinear_objective(x, N, gamma11, gamma22, gamma12)

    eps = 1e-9
    xs = np.linspace(eps, 1.0 - eps, 2001)
    vals = np.array([f(x) for x in xs])
    best = int(np.argmax(vals))
    lo = xs[max(0, best - 1)]
    hi = xs[min(len(xs) - 1, best + 1)]
    peak = _golden_max(f, lo, hi, xtol)
    # Endpoint checks: the neutral term diverges there, so both limits
    # give zero, but evaluate anyway in case of pathological rates.
    return max(peak, f(eps), f(1.0 - eps))


def replenished_vs_decaying_bounds(N: int, gamma: float,
                                   total_time: float) -> tuple[float, float]:
    """Fixed-number versus unreplenished bounds for symmetric one-body loss.

    Replenished atoms keep the linear coefficient at N/gamma, giving
    N T / gamma; without replenishment the mean atom number decays
    exponentially and the state-resolved integral gives
    (N/gamma^2)(1 - exp(-gamma T)), which is always the tighter of the
    two.
    """
    if gamma <= 0 or total_time <= 0:
        raise ValueError("rate and time must be positive")
    replenished = N * total_time / gamma
    decaying = (N / gamma ** 2) * (1.0 - np.exp(-gamma * total_time))
    return replenished, decaying


@dataclass(frozen=True)
class ZooEntry:
    """A named reference model with its expected classification."""

    name: str
    model: MarkovModel
    sectors: SectorDecomposition | None
    physical_sector: int | None
    in_span: bool
    expected_coefficient: float | None   # known closed form, if any


def standard_zoo() -> list[ZooEntry]:
    """The reference battery used across the verification suite."""
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

    entries = [
        ZooEntry(
            name="qubit-dephasing",
            model=MarkovModel(2, sz / 2, (sz.copy(),), label="qubit-dephasing"),
            sectors=None, physical_sector=None,
            in_span=True, expected_coefficient=0.25,
        ),
        ZooEntry(
            name="qubit-amplitude-damping",
            model=MarkovModel(2, sz / 2, (lower.copy(),), label="qubit-amplitude-damping"),
            sectors=None, physical_sector=None,
            in_span=True, expected_coefficient=None,
        ),
        ZooEntry(
            name="qubit-two-axis",
            model=MarkovModel(2, sz / 2, (np.sqrt(0.8) * sx, np.sqrt(0.6) * sy),
                              label="qubit-two-axis"),
            sectors=None, physical_sector=None,
            in_span=True, expected_coefficient=None,
        ),
        ZooEntry(
            name="qubit-transversal",
            model=MarkovModel(2, sz / 2, (sx.copy(),), label="qubit-transversal"),
            sectors=None, physical_sector=None,
            in_span=False, expected_coefficient=None,
        ),
    ]
    for (n_atoms, g1, g2) in [(2, 1.0, 1.0), (3, 1.0, 2.0)]:
        model, sectors, phys = lossy_interferometer_model(
            LossyInterferometerParams(N=n_atoms, gamma1=g1, gamma2=g2, k=1))
        entries.append(ZooEntry(
            name=f"lossy-linear-N{n_atoms}",
            model=model, sectors=sectors, physical_sector=phys,
            in_span=True,
            expected_coefficient=closed_form_linear_bound(n_atoms, g1, g2),
        ))
    model, sectors, phys = lossy_interferometer_model(
        LossyInterferometerParams(N=2, gamma11=0.5, gamma22=0.5, gamma12=1.0, k=2))
    entries.append(ZooEntry(
        name="lossy-nonlinear-N2",
        model=model, sectors=sectors, physical_sector=phys,
        in_span=True,
        expected_coefficient=closed_form_nonlinear_bound(2, 0.5, 0.5, 1.0),
    ))
    return entries
