"""Two-qubit entanglement measures and the product-state overlap ``Pmax``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .channels import SAME_AXIS, W_CHANNEL, NoiseSpec, analytic_channel, normalize_kind
from .qstate import (
    SIGMA_Y,
    as_density,
    as_pure_state,
    hermitian_eigensystem,
    partial_trace,
    partial_transpose,
    to_magic_basis,
)

ZERO_CLAMP = 1e-12
PPT_ATOL = 1e-10
# eigenvalues of rho below this are treated as exact zeros
RANK_CUTOFF = 1e-13

SPIN_FLIP = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class EntanglementReport:
    concurrence: float
    eof: float
    groverian: float
    ppt_min_eig: float
    pmax: float | None = None

    def as_dict(self) -> dict:
        d = asdict(self)
        if d["pmax"] is None:
            del d["pmax"]
        return d


def concurrence_pure(psi) -> float:
    """``|sum_i alpha_i^2|`` over the magic-basis coordinates of ``psi``."""
    psi = as_pure_state(psi, n_qubits=2)
    alpha = to_magic_basis(psi)
    return float(abs(np.sum(alpha * alpha)))


def spin_flip(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return SPIN_FLIP @ rho.conj() @ SPIN_FLIP


def subnormalized_eigenvectors(rho) -> np.ndarray:
    """Columns ``sqrt(p_i)|phi_i>`` for the nonzero eigenpairs of ``rho``."""
    w, v = hermitian_eigensystem(rho)
    keep = w > RANK_CUTOFF
    return v[:, keep] * np.sqrt(w[keep])


def preconcurrence_matrix(vectors) -> np.ndarray:
    """Symmetric matrix ``tau_ij = <v_i| (sigma_y x sigma_y) |v_j^*>``."""
    vectors = np.asarray(vectors, dtype=complex)
    return vectors.conj().T @ SPIN_FLIP @ vectors.conj()


def wootters_lambdas(rho) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho * spin_flip(rho)``, descending, padded to 4.

    Obtained as the singular values of the preconcurrence matrix of the
    subnormalized eigenvectors, which keeps exact zeros of rank-deficient
    states at round-off level instead of ``sqrt(round-off)``.
    """
    vecs = subnormalized_eigenvectors(rho)
    lam = np.zeros(4)
    if vecs.shape[1]:
        s = np.linalg.svd(preconcurrence_matrix(vecs), compute_uv=False)
        lam[: s.size] = s
    return np.sort(lam)[::-1]


def concurrence_mixed(rho) -> float:
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``."""
    rho = as_density(rho, n_qubits=2)
    lam = wootters_lambdas(rho)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    if c <= ZERO_CLAMP:
        return 0.0
    # the measures built on C have infinite slope at C = 1, so snap round-off there too
    if c >= 1.0 - ZERO_CLAMP:
        return 1.0
    return float(c)


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def _check_concurrence(c: float) -> float:
    c = float(c)
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"concurrence must lie in [0, 1], got {c!r}")
    return c


def eof_from_concurrence(c: float) -> float:
    c = _check_concurrence(c)
    return binary_entropy((1 + math.sqrt(1 - c * c)) / 2)


def groverian_from_concurrence(c: float) -> float:
    c = _check_concurrence(c)
    return math.sqrt(max(0.0, 1 - math.sqrt(1 - c * c))) / math.sqrt(2)


def pmax_pure_2qubit(psi) -> float:
    """``(1 + sqrt(1 - 4 det rho_A)) / 2`` for a two-qubit pure state.

    ``1 - 4 det rho_A`` is evaluated as ``(a - d)^2 + 4|b|^2`` from the
    entries of the unit-trace ``rho_A``, which avoids the cancellation near
    maximal entanglement.
    """
    psi = as_pure_state(psi, n_qubits=2)
    rho_a = partial_trace(np.outer(psi, psi.conj()), keep=[0])
    disc = (rho_a[0, 0].real - rho_a[1, 1].real) ** 2 + 4 * abs(rho_a[0, 1]) ** 2
    return 0.5 * (1 + math.sqrt(min(1.0, disc)))


def _contract_except(t: np.ndarray, qs: list[np.ndarray], k: int) -> np.ndarray:
    """Batched ``<q_j| psi`` over every qubit ``j != k``; rows index restarts."""
    n = t.ndim
    letters = "abcdefgh"[:n]
    operands, subs = [t], [letters]
    for j in range(n):
        if j != k:
            operands.append(qs[j].conj())
            subs.append("r" + letters[j])
    return np.einsum(",".join(subs) + "->r" + letters[k], *operands)


def pmax_numeric(psi, restarts: int = 32, seed: int = 0, max_sweeps: int = 10_000, tol: float = 1e-12) -> float:
    """Maximal squared overlap of ``psi`` with a product state.

    Alternating maximization: with all other qubits fixed, the optimal single
    qubit is the normalized partial contraction of ``psi``, so every update is
    exact.  Restart ``r`` draws its starting product state from
    ``default_rng([seed, r])`` and stops once its per-sweep gain drops below
    ``tol``.  Restarts run side by side but never interact, so the result
    does not depend on scheduling and can only grow with ``restarts``.
    """
    psi = as_pure_state(psi)
    n = int(round(math.log2(psi.size)))
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    if n == 1:
        return 1.0
    t = psi.reshape((2,) * n)
    qs = [np.empty((restarts, 2), dtype=complex) for _ in range(n)]
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        for k in range(n):
            q = rng.normal(size=2) + 1j * rng.normal(size=2)
            qs[k][r] = q / np.linalg.norm(q)
    best = np.zeros(restarts)
    active = np.ones(restarts, dtype=bool)
    for _ in range(max_sweeps):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        sub = [q[idx] for q in qs]
        for k in range(n):
            phi = _contract_except(t, sub, k)
            norm = np.linalg.norm(phi, axis=1)
            sub[k] = phi / np.where(norm > 0, norm, 1.0)[:, None]
        for k in range(n):
            qs[k][idx] = sub[k]
        val = norm**2
        active[idx] = (val - best[idx] >= tol) & (norm > 0)
        best[idx] = np.maximum(best[idx], val)
    return float(min(best.max(), 1.0))


def ppt_min_eigenvalue(rho) -> float:
    """Smallest eigenvalue of the partial transpose (negative iff entangled)."""
    rho = as_density(rho, n_qubits=2)
    w, _ = hermitian_eigensystem(partial_transpose(rho, 1))
    return float(w[-1])


def is_ppt(rho, atol: float = PPT_ATOL) -> bool:
    return ppt_min_eigenvalue(rho) >= -atol


def entanglement_report(state) -> EntanglementReport:
    """Measures for a two-qubit state vector (includes ``pmax``) or density operator."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        psi = as_pure_state(state, n_qubits=2)
        rho = np.outer(psi, psi.conj())
        c = concurrence_pure(psi)
        pmax = pmax_pure_2qubit(psi)
    else:
        rho = as_density(state, n_qubits=2)
        c = concurrence_mixed(rho)
        pmax = None
    c = min(1.0, max(0.0, c))
    if c <= ZERO_CLAMP:
        c = 0.0
    elif c >= 1.0 - ZERO_CLAMP:
        c = 1.0
    return EntanglementReport(
        concurrence=c,
        eof=eof_from_concurrence(c),
        groverian=groverian_from_concurrence(c),
        ppt_min_eig=ppt_min_eigenvalue(rho),
        pmax=pmax,
    )


def separability_threshold_kt(kind: str, xtol: float = 1e-12) -> float:
    """Smallest ``kappa_t`` at which the numerically computed concurrence vanishes.

    Bisection on ``concurrence_mixed(analytic_channel(...))``; same-axis
    channels stay entangled for all finite ``kappa_t`` and return ``math.inf``.
    """
    kind = normalize_kind(kind)
    if kind in SAME_AXIS:
        return math.inf
    if kind == W_CHANNEL:
        raise ValueError("no two-qubit concurrence is defined for the W channel")

    def entangled(kt):
        return concurrence_mixed(analytic_channel(NoiseSpec(kind, kt))) > 0.0

    lo, hi = 0.0, 1.0
    while entangled(hi):
        hi *= 2
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
