"""Many-body scaling analysis via elementary few-particle subchannels.

A system of N atoms with a k-body Hamiltonian and l-body noise can be
represented, to linear order in time, as a sequence of elementary
subchannels acting on n >= max(k, l) particles each.  The bookkeeping
multiplicity

    chi(N, n, m) = C(N, n) * C(n, m) / C(N, m)

counts how often an m-local operator is applied across the C(N, n)
subchannels, so the noise rate rescales as gamma / chi_l and the
frequency as omega / chi_k.  When the subchannel satisfies the span
condition, the whole-system QFI obeys

    F_Q <= 4 * T * ||alpha|| * C(N, n) * chi_l / chi_k^2  ~  T * N^(2k - l),

with ||alpha|| the subchannel solver value at unit scaling.  All binomial
ratios are kept as exact big-integer rationals; floating-point binomials
misbehave long before N ~ 100.

For Pauli-Z string models the span membership reduces to exact
combinatorics of operator supports: products of two weight-l strings give
strings supported on symmetric differences, so a weight-k string is
reachable iff k = l, or k is even, k <= 2l and n >= l + k/2.  The support
enumeration is authoritative; the closed rule is cross-checked against it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .model import MarkovModel
from .solver import solve_bound
from .span import build_span, check_membership

__all__ = [
    "LocalModel",
    "SubchannelSpec",
    "ScalingResult",
    "chi",
    "build_subchannel",
    "zstring_span_check",
    "scaling_bound",
]

#: Dense-representation ceiling for subchannel construction (2^n matrices).
MAX_SUBCHANNEL_SITES = 10

_PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class LocalModel:
    """N-particle dynamics with k-body Hamiltonian and l-body noise.

    ``hamiltonian_kind`` and ``noise_kind`` are either "z_string" (tensor
    products of Pauli Z over every k- resp. l-subset) or "custom", in
    which case ``hamiltonian_local`` (2^k square) and ``noise_local``
    (list of 2^l squares) supply the operator acting on each subset.
    """

    N: int
    k: int
    l: int
    gamma: float
    hamiltonian_kind: str = "z_string"
    noise_kind: str = "z_string"
    hamiltonian_local: np.ndarray | None = None
    noise_local: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        if not (1 <= self.k <= self.N and 1 <= self.l <= self.N):
            raise ValueError("locality orders must satisfy 1 <= k, l <= N")
        if self.gamma <= 0:
            raise ValueError("noise rate must be positive")
        for kind in (self.hamiltonian_kind, self.noise_kind):
            if kind not in ("z_string", "custom"):
                raise ValueError(f"unknown operator kind {kind!r}")
        if self.hamiltonian_kind == "custom" and self.hamiltonian_local is None:
            raise ValueError("custom Hamiltonian kind requires hamiltonian_local")
        if self.noise_kind == "custom" and self.noise_local is None:
            raise ValueError("custom noise kind requires noise_local")


@dataclass(frozen=True)
class SubchannelSpec:
    """Elementary n-particle block with its exact rescaling factors."""

    n: int
    chi_l: Fraction
    chi_k: Fraction
    gamma_prime: float
    omega_scale: float
    model: MarkovModel
    subchannel_count: int


@dataclass(frozen=True)
class ScalingResult:
    """Whole-system scaling assembled from one subchannel solve."""

    status: str                  # "linear" | "T2-candidate"
    coefficient: float | None    # 4 ||alpha|| C(N,n) chi_l / chi_k^2
    exponent: int                # 2k - l
    alpha_norm: float | None
    chi_l: Fraction
    chi_k: Fraction
    subchannel_count: int
    n: int


def chi(total: int, group: int, local: int) -> Fraction:
    """Exact multiplicity ratio C(N, n) * C(n, m) / C(N, m)."""
    if not 0 <= local <= group <= total:
        raise ValueError(f"need local <= group <= total, got ({total}, {group}, {local})")
    return Fraction(comb(total, group) * comb(group, local), comb(total, local))


def _place_operator(op_local: np.ndarray, sites: tuple[int, ...], n: int) -> np.ndarray:
    """Embed an operator on ``sites`` (ascending) into an n-qubit register."""
    m = len(sites)
    full = np.kron(op_local, np.eye(2 ** (n - m), dtype=complex))
    # Permute tensor factors so the operator lands on the requested sites.
    perm = list(sites) + [s for s in range(n) if s not in sites]
    inv = np.argsort(perm)
    tensor = full.reshape([2] * (2 * n))
    tensor = np.transpose(tensor, list(inv) + [n + i for i in inv])
    return tensor.reshape(2 ** n, 2 ** n)


def _z_string(sites: tuple[int, ...], n: int) -> np.ndarray:
    op = np.array([[1.0 + 0j]])
    for _ in sites:
        op = np.kron(op, _PAULI_Z)
    return _place_operator(op, sites, n)


def build_subchannel(local: LocalModel, n: int) -> SubchannelSpec:
    """Assemble the n-particle subchannel with rescaled rates.

    The Hamiltonian sums the k-local term over all k-subsets of the n
    sites, scaled by 1/chi_k; each l-subset contributes noise operators
    scaled by sqrt(gamma / chi_l).
    """
    if n < max(local.k, local.l):
        raise ValueError("subchannel must host both operator localities")
    if n > MAX_SUBCHANNEL_SITES:
        raise ValueError(f"n = {n} exceeds the dense-representation ceiling "
                         f"{MAX_SUBCHANNEL_SITES}")
    if n > local.N:
        raise ValueError("subchannel cannot exceed the system size")
    chi_l = chi(local.N, n, local.l)
    chi_k = chi(local.N, n, local.k)
    gamma_prime = local.gamma / float(chi_l)
    omega_scale = 1.0 / float(chi_k)

    dim = 2 ** n
    ham = np.zeros((dim, dim), dtype=complex)
    for sites in itertools.combinations(range(n), local.k):
        if local.hamiltonian_kind == "z_string":
            ham += _z_string(sites, n)
        else:
            ham += _place_operator(np.asarray(local.hamiltonian_local, dtype=complex),
                                   sites, n)
    ham *= omega_scale

    noise = []
    for sites in itertools.combinations(range(n), local.l):
        if local.noise_kind == "z_string":
            noise.append(np.sqrt(gamma_prime) * _z_string(sites, n))
        else:
            for op in local.noise_local:
                noise.append(np.sqrt(gamma_prime)
                             * _place_operator(np.asarray(op, dtype=complex), sites, n))

    model = MarkovModel(
        dim=dim,
        hamiltonian=ham,
        noise_ops=tuple(noise),
        label=f"subchannel(n={n}, k={local.k}, l={local.l})",
    )
    return SubchannelSpec(
        n=n,
        chi_l=chi_l,
        chi_k=chi_k,
        gamma_prime=gamma_prime,
        omega_scale=omega_scale,
        model=model,
        subchannel_count=comb(local.N, n),
    )


def _achievable_supports(l: int, n: int) -> set[frozenset[int]]:
    """Supports of Z-strings reachable from weight-l generators.

    Generators contribute their own supports; pairwise products contribute
    symmetric differences (Z^2 = 1 on the overlap).  The empty support
    (identity) is always present.
    """
    subsets = [frozenset(c) for c in itertools.combinations(range(n), l)]
    reachable: set[frozenset[int]] = {frozenset()}
    reachable.update(subsets)
    for a in subsets:
        for b in subsets:
            reachable.add(a ^ b)
    return reachable


def zstring_span_check(k: int, l: int, n: int) -> bool:
    """Exact combinatorial span membership for Z-string models.

    Decides whether the weight-k Z-string on a fixed set of k sites lies
    in the span generated by weight-l Z-strings and their pairwise
    products over n sites.  Distinct supports are linearly independent,
    so membership is pure support bookkeeping.  The explicit enumeration
    is authoritative and is cross-checked against the closed rule
    k = l or (k even and k <= 2l and n >= l + k/2).
    """
    if max(k, l) > n:
        raise ValueError("operators must fit into the subchannel")
    target = frozenset(range(k))
    enumerated = target in _achievable_supports(l, n)
    closed = (k == l) or (k % 2 == 0 and k <= 2 * l and n >= l + k // 2)
    if enumerated != closed:
        raise AssertionError(
            f"support enumeration ({enumerated}) disagrees with the closed rule "
            f"({closed}) at (k, l, n) = ({k}, {l}, {n})"
        )
    return enumerated


def scaling_bound(local: LocalModel, n: int) -> ScalingResult:
    """Whole-system QFI scaling from one subchannel solve.

    Runs the bound solver on the unscaled subchannel (rates as given, no
    chi rescaling) and assembles the coefficient
    4 * ||alpha|| * C(N, n) * chi_l / chi_k^2 with exact rational
    weights; the reported exponent 2k - l is the leading power of N.
    When the subchannel span condition fails, returns status
    "T2-candidate" with no coefficient.
    """
    chi_l = chi(local.N, n, local.l)
    chi_k = chi(local.N, n, local.k)
    count = comb(local.N, n)
    exponent = 2 * local.k - local.l

    # Reference subchannel at unit scaling for the span check and solve.
    unscaled = LocalModel(
        N=n, k=local.k, l=local.l, gamma=local.gamma,
        hamiltonian_kind=local.hamiltonian_kind, noise_kind=local.noise_kind,
        hamiltonian_local=local.hamiltonian_local, noise_local=local.noise_local,
    )
    spec = build_subchannel(unscaled, n)

    if local.hamiltonian_kind == "z_string" and local.noise_kind == "z_string":
        in_span = zstring_span_check(local.k, local.l, n)
    else:
        report = check_membership(spec.model.hamiltonian, build_span(spec.model))
        in_span = report.in_span
    if not in_span:
        return ScalingResult(
            status="T2-candidate", coefficient=None, exponent=exponent,
            alpha_norm=None, chi_l=chi_l, chi_k=chi_k,
            subchannel_count=count, n=n,
        )

    result = solve_bound(spec.model)
    if result.status != "optimal":
        return ScalingResult(
            status="T2-candidate", coefficient=None, exponent=exponent,
            alpha_norm=None, chi_l=chi_l, chi_k=chi_k,
            subchannel_count=count, n=n,
        )
    weight = Fraction(count, 1) * chi_l / (chi_k * chi_k)
    coefficient = 4.0 * result.alpha_norm * float(weight)
    return ScalingResult(
        status="linear", coefficient=coefficient, exponent=exponent,
        alpha_norm=result.alpha_norm, chi_l=chi_l, chi_k=chi_k,
        subchannel_count=count, n=n,
    )
