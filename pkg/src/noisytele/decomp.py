"""Pure-state decompositions of the noisy EPR resources.

``optimal_ensemble`` and ``separable_ensemble`` build the closed-form
ensembles for the named channels; ``wootters_decomposition`` builds an
optimal (equal-concurrence) ensemble for any two-qubit density operator.
All states are handled in magic-basis coordinates internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    DIFFERENT_AXIS,
    ISOTROPIC,
    SAME_AXIS,
    NoiseSpec,
    channel_coefficients,
)
from .entanglement import (
    ZERO_CLAMP,
    concurrence_pure,
    preconcurrence_matrix,
    subnormalized_eigenvectors,
)
from .qstate import MAGIC_BASIS, as_density, hermitian_eigensystem

MU_STAR = math.log(3) / 8
NU_STAR = math.log(1 + math.sqrt(2)) / 2
REGIME_SLACK = 1e-12

# rows are the sign patterns used to mix four vectors into zero-concurrence members
SIGN_PATTERNS = np.array(
    [
        [1, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
    ],
    dtype=float,
)

# magic-basis index hit by the Pauli flip on either qubit
_FLIP_INDEX = {"z": 1, "x": 2, "y": 3}


class OutOfDomainError(ValueError):
    """Raised when a construction is requested outside its validity regime."""


@dataclass(frozen=True)
class Ensemble:
    """Weighted pure states; ``states[i]`` is a normalized 4-vector."""

    weights: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        s = np.asarray(self.states, dtype=complex).reshape(w.size, -1)
        if w.size == 0:
            raise ValueError("an ensemble needs at least one member")
        if np.any(w <= 0) or np.any(w > 1 + 1e-12):
            raise ValueError("weights must lie in (0, 1]")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
        norms = np.sum(np.abs(s) ** 2, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("ensemble states must be normalized")
        w.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", s)

    @classmethod
    def from_vectors(cls, vectors, drop_below: float = 1e-15) -> "Ensemble":
        """Build from unnormalized vectors: weight is the squared norm.

        Members are sorted by descending weight, ties broken by the real parts
        of the amplitudes.
        """
        members = []
        for v in np.asarray(vectors, dtype=complex):
            p = float(np.vdot(v, v).real)
            if p > drop_below:
                members.append((p, v / math.sqrt(p)))
        members.sort(key=lambda m: (-round(m[0], 12), tuple(np.round(m[1].real, 12))))
        return cls(np.array([m[0] for m in members]), np.array([m[1] for m in members]))

    def __len__(self) -> int:
        return self.weights.size

    def __iter__(self):
        return iter(zip(self.weights, self.states))

    def density(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.weights, self.states, self.states.conj())

    def concurrences(self) -> list[float]:
        return [concurrence_pure(s) for s in self.states]

    def mean_concurrence(self) -> float:
        return float(np.dot(self.weights, self.concurrences()))


@dataclass(frozen=True)
class PhaseSolution:
    theta: tuple[float, float, float, float]
    residual: float


@dataclass(frozen=True)
class EnsembleCoefficients:
    lambda1: float
    lambda2: float
    omega_plus: float
    omega_minus: float


def ensemble_coefficients(kappa_t: float) -> EnsembleCoefficients:
    co = channel_coefficients(kappa_t)
    r3 = math.sqrt(3)
    return EnsembleCoefficients(
        lambda1=(3 * co.ttau_plus - 1) / 2,
        lambda2=co.ttau_minus / 2,
        omega_plus=math.sqrt(r3 * (r3 + 1) / 6),
        omega_minus=math.sqrt(r3 * (r3 - 1) / 6),
    )


def _from_magic(rows) -> np.ndarray:
    return np.asarray(rows, dtype=complex) @ MAGIC_BASIS.T


def _different_axis_slots(kind: str) -> tuple[int, int, int]:
    """Magic indices playing the roles of e2, e3, e4 in the xz construction.

    The two single-flip indices carry weight nu+ nu-, the index of the third
    Pauli carries nu-^2.
    """
    a, b = _FLIP_INDEX[kind[0]], _FLIP_INDEX[kind[1]]
    lo, hi = sorted((a, b))
    (third,) = {1, 2, 3} - {a, b}
    return lo, hi, third


def _require(cond: bool, message: str):
    if not cond:
        raise OutOfDomainError(message)


def optimal_ensemble(spec: NoiseSpec) -> Ensemble:
    """Closed-form optimal ensemble of an entangled noisy EPR resource."""
    kt = spec.kappa_t
    co = channel_coefficients(kt)
    if spec.kind in SAME_AXIS:
        k = _FLIP_INDEX[spec.kind]
        rows = np.zeros((2, 4), dtype=complex)
        rows[:, 0] = math.sqrt(co.tau_plus)
        rows[0, k] = 1j * math.sqrt(co.tau_minus)
        rows[1, k] = -1j * math.sqrt(co.tau_minus)
        return _weighted(rows, [0.5, 0.5])

    if spec.kind == ISOTROPIC:
        _require(
            kt <= MU_STAR + REGIME_SLACK,
            f"isotropic resource is separable for kappa_t >= mu* = {MU_STAR:.6f}",
        )
        ec = ensemble_coefficients(kt)
        l1 = math.sqrt(ec.lambda1)
        l2 = ec.lambda2
        rows = np.array(
            [
                [l1, -1j * math.sqrt(3 * l2), 0, 0],
                [l1, 1j * math.sqrt(l2 / 3), -2j * math.sqrt(2 * l2 / 3), 0],
                [l1, 1j * math.sqrt(l2 / 3), 1j * math.sqrt(2 * l2 / 3), -1j * math.sqrt(2 * l2)],
                [l1, 1j * math.sqrt(l2 / 3), 1j * math.sqrt(2 * l2 / 3), 1j * math.sqrt(2 * l2)],
            ],
            dtype=complex,
        )
        return _weighted(rows, [0.25] * 4)

    if spec.kind in DIFFERENT_AXIS:
        _require(
            kt <= NU_STAR + REGIME_SLACK,
            f"different-axis resource is separable for kappa_t >= nu* = {NU_STAR:.6f}",
        )
        npl, nmi = co.nu_plus, co.nu_minus
        s2, s3, s4 = _different_axis_slots(spec.kind)
        b = npl * math.sqrt(nmi / (1 + npl))
        c = npl * math.sqrt(nmi * (1 + 2 * npl) / (1 + npl))
        d = nmi * math.sqrt(1 + 2 * npl)
        rows = np.zeros((4, 4), dtype=complex)
        rows[:, 0] = npl
        rows[0, s2] = -1j * math.sqrt(nmi * (1 + npl))
        rows[1:, s2] = 1j * b
        # c / nu+ here, not c: only then does the e1-e3 coherence cancel
        rows[1, s3] = -1j * c / npl
        rows[2:, s3] = 1j * c
        rows[2, s4] = -1j * d
        rows[3, s4] = 1j * d
        p12 = npl / (1 + 2 * npl)
        p34 = 1 / (2 * (1 + 2 * npl))
        return _weighted(rows, [p12, p12, p34, p34])

    raise ValueError(f"no two-qubit ensemble for noise kind {spec.kind!r}")


def _weighted(magic_rows, weights) -> Ensemble:
    """``rho = sum_i P_i |v_i><v_i|``; any norm left in ``v_i`` is folded into the weight."""
    states = _from_magic(magic_rows)
    vecs = np.sqrt(np.asarray(weights, dtype=float))[:, None] * states
    return Ensemble.from_vectors(vecs, drop_below=0.0)


def _close_polygon(lengths, atol: float = 1e-12) -> np.ndarray:
    """Directions ``phi`` with ``sum_k lengths[k] exp(i phi_k) = 0`` and ``phi_0 = 0``.

    Sides 2 and 3 are first merged into one side of length ``L`` chosen in
    the middle of its feasible range, which reduces the problem to two
    triangles solved by the law of cosines.
    """
    l0, l1, l2, l3 = (float(x) for x in lengths)
    lo = max(abs(l0 - l1), abs(l2 - l3))
    hi = min(l0 + l1, l2 + l3)
    scale = max(l0, l1, l2, l3, 1.0)
    if lo > hi + atol * scale:
        raise OutOfDomainError(f"no closing phases for side lengths {lengths!r}")
    L = 0.5 * (lo + hi) if lo <= hi else hi

    def angle(adj, opp, base):
        if adj == 0.0 or base == 0.0:
            return 0.0
        c = (adj * adj + base * base - opp * opp) / (2 * adj * base)
        return math.acos(min(1.0, max(-1.0, c)))

    p2 = L * np.exp(1j * angle(l0, l1, L)) if l0 > 0 else complex(l1)
    side1 = p2 - l0
    w = -p2
    side2 = l2 * np.exp(1j * (np.angle(w) + angle(l2, l3, L))) if L > 0 else complex(l2)
    side3 = w - side2
    phis = [0.0]
    for length, side in ((l1, side1), (l2, side2), (l3, side3)):
        phis.append(float(np.angle(side)) if length > 0 else 0.0)
    return np.array(phis)


def solve_phase_condition(ratio: float, others=(1.0, 1.0, 1.0)) -> PhaseSolution:
    """Phases solving ``ratio e^{2i t1} + sum_j others[j] e^{2i t_j} = 0`` with ``t1 = 0``.

    Raises ``OutOfDomainError`` when no solution exists, which for the
    noisy EPR resources means the caller is outside the separable regime.
    """
    coeffs = np.array([ratio, *others], dtype=float)
    if coeffs.shape != (4,) or np.any(coeffs < 0):
        raise ValueError("expected a nonnegative ratio and three nonnegative coefficients")
    phis = _close_polygon(coeffs)
    theta = np.mod(phis / 2, math.pi)
    residual = float(abs(np.sum(coeffs * np.exp(2j * theta))))
    return PhaseSolution(tuple(float(t) for t in theta), residual)


def _separable_amplitudes(spec: NoiseSpec):
    """Magic indices and amplitudes of the vectors ``|x_k>`` (each ``-i a_k |e_idx>``)."""
    kt = spec.kappa_t
    co = channel_coefficients(kt)
    if spec.kind == ISOTROPIC:
        _require(
            kt >= MU_STAR - REGIME_SLACK,
            f"isotropic resource is entangled for kappa_t < mu* = {MU_STAR:.6f}",
        )
        a1 = math.sqrt(max(0.0, (3 * co.ttau_plus - 1) / 2))
        a = math.sqrt(co.ttau_minus / 2)
        return (0, 1, 2, 3), (a1, a, a, a)
    if spec.kind in DIFFERENT_AXIS:
        _require(
            kt >= NU_STAR - REGIME_SLACK,
            f"different-axis resource is entangled for kappa_t < nu* = {NU_STAR:.6f}",
        )
        s2, s3, s4 = _different_axis_slots(spec.kind)
        mix = math.sqrt(co.nu_plus * co.nu_minus)
        return (0, s2, s3, s4), (co.nu_plus, mix, mix, co.nu_minus)
    raise OutOfDomainError(f"noise kind {spec.kind!r} has no separable regime at finite kappa_t")


def separable_ensemble(spec: NoiseSpec) -> Ensemble:
    """Zero-concurrence decomposition of a separable noisy EPR resource."""
    idx, amps = _separable_amplitudes(spec)
    amps = np.asarray(amps)
    sq = amps**2
    sol = solve_phase_condition(sq[0] / sq[1], (1.0, sq[2] / sq[1], sq[3] / sq[1]))
    x = np.zeros((4, 4), dtype=complex)
    for k, (i, a) in enumerate(zip(idx, amps)):
        x[k, i] = -1j * a * np.exp(1j * sol.theta[k])
    members = 0.5 * SIGN_PATTERNS @ x
    return Ensemble.from_vectors(_from_magic(members))


def takagi(a, tol: float = 1e-12):
    """Takagi factorization ``a = U diag(s) U^T`` of a complex symmetric matrix.

    Positive values come from the real symmetric embedding
    ``[[Re a, Im a], [Im a, -Re a]]``, whose eigenvector ``[x; y]`` for
    eigenvalue ``s > 0`` gives the column ``x + i y``.  Columns for zero
    values are taken from the null space of ``a`` so that degenerate zeros
    still yield a unitary ``U``.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-10:
        raise ValueError("takagi expects a symmetric matrix")
    _, svals, vh = np.linalg.svd(a)
    k = int(np.sum(svals > tol))
    emb = np.block([[a.real, a.imag], [a.imag, -a.real]])
    w, v = hermitian_eigensystem(emb)
    v = v.real
    u_pos = v[:n, :k] + 1j * v[n:, :k]
    u = np.hstack([u_pos, vh[k:].T])
    s = np.concatenate([w[:k], np.zeros(n - k)])
    return s, u


def _zero_diagonal_rotation(s: np.ndarray) -> np.ndarray:
    """Real orthogonal ``O`` with ``diag(O s O^T) = 0`` for traceless symmetric ``s``."""
    s = np.array(s, dtype=float)
    n = s.shape[0]
    o = np.eye(n)
    for i in range(n - 1):
        if abs(s[i, i]) < 1e-15:
            continue
        cand = [j for j in range(i + 1, n) if s[j, j] * s[i, i] < 0]
        if not cand:
            continue
        j = max(cand, key=lambda q: abs(s[q, q]))
        a, b, d = s[i, i], s[i, j], s[j, j]
        # new s_ii = c^2 a + 2 c s b + s^2 d = 0 with t = s/c
        t = (-b + math.sqrt(b * b - a * d)) / d
        c = 1 / math.sqrt(1 + t * t)
        sn = t * c
        r = np.eye(n)
        r[i, i], r[i, j], r[j, i], r[j, j] = c, sn, -sn, c
        s = r @ s @ r.T
        o = r @ o
    return o


def wootters_decomposition(rho) -> Ensemble:
    """Ensemble of at most four pure states, each carrying the concurrence of ``rho``."""
    rho = as_density(rho, n_qubits=2)
    v = subnormalized_eigenvectors(rho)
    tau = preconcurrence_matrix(v)
    lam, u = takagi(tau)
    x = np.zeros((4, 4), dtype=complex)
    x[:, : v.shape[1]] = v @ u
    lam4 = np.zeros(4)
    lam4[: lam.size] = lam
    conc = lam4[0] - lam4[1:].sum()

    if conc > ZERO_CLAMP:
        y = x * np.array([1, 1j, 1j, 1j])
        pre = np.diag(lam4 * np.array([1, -1, -1, -1]))
        gram = (y.conj().T @ y).real
        o = _zero_diagonal_rotation(pre - conc * gram)
        z = y @ o.T
    else:
        phis = _close_polygon(lam4, atol=1e-10)
        y = x * np.exp(-0.5j * phis)
        z = 0.5 * y @ SIGN_PATTERNS.T
    return Ensemble.from_vectors(z.T)


def verify_ensemble(ensemble: Ensemble, target) -> tuple[float, list[float]]:
    """Max-entry reconstruction residual and per-member concurrences."""
    target = np.asarray(target, dtype=complex)
    if target.shape != (ensemble.states.shape[1],) * 2:
        raise ValueError("ensemble and target dimensions differ")
    residual = float(np.max(np.abs(ensemble.density() - target)))
    return residual, ensemble.concurrences()

