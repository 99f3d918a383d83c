"""Dense state primitives for registers of one to three qubits.

Qubit 0 is the leftmost ket label and the most significant bit of the
computational-basis index, so ``|q0 q1 q2>`` sits at row ``4*q0 + 2*q1 + q2``.
Every other module relies on this ordering.
"""

from __future__ import annotations

import json
from typing import Iterable

import numpy as np

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
PSD_ATOL = 1e-10
NORM_ATOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

# columns are |e1>..|e4> written in the computational basis
MAGIC_BASIS = np.array(
    [
        [1, 1j, 0, 0],
        [0, 0, 1j, 1],
        [0, 0, 1j, -1],
        [1, -1j, 0, 0],
    ],
    dtype=complex,
) / np.sqrt(2)

BELL_00 = MAGIC_BASIS[:, 0].copy()
RHO_EPR = np.outer(BELL_00, BELL_00.conj())


def _num_qubits(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or dim > 8 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not 2, 4 or 8")
    return n


def num_qubits(array) -> int:
    """Number of qubits spanned by a state vector or square matrix."""
    return _num_qubits(np.shape(array)[0])


def as_pure_state(psi, n_qubits: int | None = None) -> np.ndarray:
    """Validate a normalized amplitude vector and return it as complex array."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("a pure state must be a 1-D amplitude vector")
    n = _num_qubits(psi.shape[0])
    if n_qubits is not None and n != n_qubits:
        raise ValueError(f"expected a {n_qubits}-qubit state, got {n} qubits")
    if not np.all(np.isfinite(psi)):
        raise ValueError("state has non-finite amplitudes")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1.0) > NORM_ATOL:
        raise ValueError(f"state is not normalized (norm^2 = {norm2!r})")
    return psi


def as_density(rho, n_qubits: int | None = None, psd_atol: float = PSD_ATOL) -> np.ndarray:
    """Validate a density operator: Hermitian, unit trace and positive semidefinite.

    Parameters
    ----------
    rho : array_like
        Square complex matrix of size 2, 4 or 8.
    n_qubits : int, optional
        Required register size.
    psd_atol : float
        Most negative eigenvalue tolerated.

    Returns
    -------
    numpy.ndarray
        The validated matrix as a complex array.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density operator must be a square matrix")
    n = _num_qubits(rho.shape[0])
    if n_qubits is not None and n != n_qubits:
        raise ValueError(f"expected a {n_qubits}-qubit operator, got {n} qubits")
    if not np.all(np.isfinite(rho)):
        raise ValueError("matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_ATOL:
        raise ValueError("matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"trace is {tr!r}, expected 1")
    min_eig = np.linalg.eigvalsh(rho)[0]
    if min_eig < -psd_atol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")
    return rho


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def kron(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def embed(op, qubit: int, n_qubits: int) -> np.ndarray:
    """Single-qubit operator acting on ``qubit`` of an ``n_qubits`` register."""
    if not 0 <= qubit < n_qubits:
        raise ValueError(f"qubit {qubit} outside a {n_qubits}-qubit register")
    return kron(*[op if k == qubit else IDENTITY_2 for k in range(n_qubits)])


def partial_trace(rho, keep: Iterable[int]) -> np.ndarray:
    """Reduced density operator on the qubits listed in ``keep``.

    Kept qubits stay in ascending index order.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("partial_trace expects a square matrix")
    n = _num_qubits(rho.shape[0])
    keep = [int(k) for k in keep]
    if len(set(keep)) != len(keep):
        raise ValueError("keep lists a qubit more than once")
    keep = sorted(keep)
    if not keep or len(keep) == n:
        raise ValueError("keep must be a nonempty proper subset of the qubits")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"qubit index out of range for a {n}-qubit register")
    t = rho.reshape((2,) * (2 * n))
    remaining = n
    for q in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=q, axis2=q + remaining)
        remaining -= 1
    d = 2 ** len(keep)
    return t.reshape(d, d)


def partial_transpose(rho, subsystem: int) -> np.ndarray:
    """Transpose a two-qubit operator on one of its qubits (0 or 1)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("partial_transpose is defined for two-qubit operators only")
    if subsystem not in (0, 1):
        raise ValueError("subsystem must be 0 or 1")
    t = rho.reshape(2, 2, 2, 2)
    if subsystem == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(4, 4)


def to_magic_basis(psi) -> np.ndarray:
    """Coordinates ``alpha_i = <e_i|psi>`` of a two-qubit vector in the magic basis."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise ValueError("to_magic_basis expects a two-qubit state vector")
    return MAGIC_BASIS.conj().T @ psi


def from_magic_basis(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != (4,):
        raise ValueError("expected four magic-basis coefficients")
    return MAGIC_BASIS @ alpha


def hermitian_eigensystem(m, tol: float = 1e-13, max_sweeps: int = 60):
    """Eigen-decomposition of a small Hermitian matrix by cyclic complex Jacobi.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order and eigenvectors as orthonormal columns.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if np.max(np.abs(a - a.conj().T), initial=0.0) > 1e-10:
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J = [[c, s*phase], [-s*conj(phase), c]] restricted to (p, q)
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * np.conj(phase) * cq
                a[:, q] = s * phase * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * phase * rq
                a[q, :] = s * np.conj(phase) * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(phase) * vq
                v[:, q] = s * phase * vp + c * vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.diag(a).real
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def fidelity_pure(psi, rho) -> float:
    """Overlap ``<psi|rho|psi>`` of a pure state with a density operator."""
    psi = np.asarray(psi, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError("state and operator dimensions differ")
    val = np.vdot(psi, rho @ psi)
    return float(min(1.0, max(0.0, val.real)))


def random_pure_state(rng: np.random.Generator, n_qubits: int = 2) -> np.ndarray:
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


def random_density(rng: np.random.Generator, n_qubits: int = 2, rank: int | None = None) -> np.ndarray:
    """Random density operator from a complex Ginibre matrix of the given rank."""
    d = 2**n_qubits
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def matrix_to_json(m) -> str:
    m = np.asarray(m, dtype=complex)
    payload = {
        "dim": int(m.shape[0]),
        "re": [[float(x) for x in row] for row in m.real],
        "im": [[float(x) for x in row] for row in m.imag],
    }
    return json.dumps(payload)


def matrix_from_json(text: str) -> np.ndarray:
    payload = json.loads(text)
    dim = int(payload["dim"])
    re = np.asarray(payload["re"], dtype=float)
    im = np.asarray(payload["im"], dtype=float)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError("matrix JSON shape does not match 'dim'")
    return re + 1j * im
