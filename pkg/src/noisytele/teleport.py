"""Standard one-qubit teleportation through a (possibly mixed) two-qubit resource.

Register layout during the protocol: qubit 0 carries the input, qubit 1 is
Alice's half of the resource and qubit 2 is Bob's half.  Alice applies
CNOT(0 -> 1), then H on qubit 0, and measures both.  Bob applies X when the
qubit-1 meter reads 1 and then Z when the qubit-0 meter reads 1.  Outcomes
are summed with their Born weights, so the result is the deterministic
output state rather than a sampled one.
"""

from __future__ import annotations

import math

import numpy as np

from .channels import (
    DIFFERENT_AXIS,
    ISOTROPIC,
    SAME_AXIS,
    W_CHANNEL,
    NoiseSpec,
    analytic_channel,
    normalize_kind,
)
from .qstate import (
    HADAMARD,
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Z,
    as_density,
    as_pure_state,
    embed,
    fidelity_pure,
    kron,
)

CLASSICAL_FIDELITY = 2.0 / 3.0

_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)
_CNOT_01 = kron(_P0, IDENTITY_2, IDENTITY_2) + kron(_P1, SIGMA_X, IDENTITY_2)
_BELL_UNITARY = embed(HADAMARD, 0, 3) @ _CNOT_01


def _branch_maps():
    """Kraus operators ``Z^m0 X^m1 (<m0 m1| x I)`` for the four outcomes."""
    out = []
    for m0 in (0, 1):
        for m1 in (0, 1):
            bra = np.zeros((1, 4), dtype=complex)
            bra[0, 2 * m0 + m1] = 1.0
            correction = np.linalg.matrix_power(SIGMA_Z, m0) @ np.linalg.matrix_power(SIGMA_X, m1)
            out.append(correction @ np.kron(bra, IDENTITY_2) @ _BELL_UNITARY)
    return out


_KRAUS = _branch_maps()


def _teleport_operator(resource: np.ndarray, rho_in: np.ndarray) -> np.ndarray:
    """Teleportation map applied to an arbitrary 2x2 operator (linear, unvalidated)."""
    joint = np.kron(rho_in, resource)
    out = np.zeros((2, 2), dtype=complex)
    for k in _KRAUS:
        out += k @ joint @ k.conj().T
    return out


def input_state(theta: float, phi: float) -> np.ndarray:
    """``cos(theta/2) e^{i phi/2}|0> + sin(theta/2) e^{-i phi/2}|1>``."""
    theta = float(theta)
    phi = float(phi)
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    if not 0.0 <= phi < 2 * math.pi:
        raise ValueError("phi must lie in [0, 2 pi)")
    return np.array(
        [math.cos(theta / 2) * np.exp(0.5j * phi), math.sin(theta / 2) * np.exp(-0.5j * phi)],
        dtype=complex,
    )


def teleport_output(resource, psi_in) -> np.ndarray:
    """Bob's state after teleporting ``psi_in`` through ``resource``."""
    resource = as_density(resource, n_qubits=2)
    psi_in = as_pure_state(psi_in, n_qubits=1)
    out = _teleport_operator(resource, np.outer(psi_in, psi_in.conj()))
    return 0.5 * (out + out.conj().T)


def teleport_channel(resource) -> np.ndarray:
    """Images of the operator basis ``|i><j|`` under the teleportation map.

    ``T[i, j]`` is the 2x2 output for input ``|i><j|``; any input
    ``rho_in`` maps to ``sum_ij rho_in[i, j] * T[i, j]``.
    """
    resource = as_density(resource, n_qubits=2)
    t = np.empty((2, 2, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1.0
            t[i, j] = _teleport_operator(resource, e)
    return t


def fidelity_at(resource, theta: float, phi: float) -> float:
    psi = input_state(theta, phi)
    return fidelity_pure(psi, teleport_output(resource, psi))


def quadrature_grid(n_theta: int = 64, n_phi: int = 64):
    """Nodes and weights for sphere averages.

    Gauss-Legendre in ``u = cos(theta)`` and the periodic trapezoid rule in
    ``phi``.  Weights sum to one.
    """
    if n_theta < 8 or n_phi < 8:
        raise ValueError("quadrature needs at least 8 nodes per direction")
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(u)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    weights = np.outer(wu / 2.0, np.full(n_phi, 1.0 / n_phi))
    return theta, phi, weights


def fidelity_surface(resource, theta, phi) -> np.ndarray:
    """``F(theta, phi)`` on the tensor grid ``theta x phi``."""
    t = teleport_channel(resource)
    th, ph = np.meshgrid(np.asarray(theta, float), np.asarray(phi, float), indexing="ij")
    psi = np.stack(
        [np.cos(th / 2) * np.exp(0.5j * ph), np.sin(th / 2) * np.exp(-0.5j * ph)],
        axis=-1,
    )
    # rho_out = sum_ij psi_i conj(psi_j) T[i, j];  F = <psi|rho_out|psi>
    f = np.einsum("...i,...j,ijab,...a,...b->...", psi, psi.conj(), t, psi.conj(), psi)
    return f.real


def average_fidelity(resource, n_theta: int = 64, n_phi: int = 64) -> float:
    """Sphere average of the teleportation fidelity by product quadrature."""
    theta, phi, weights = quadrature_grid(n_theta, n_phi)
    f = fidelity_surface(resource, theta, phi)
    return float(np.sum(weights * f))


def average_fidelity_closed_form(spec: NoiseSpec) -> float:
    kt = spec.kappa_t
    e2 = math.exp(-2 * kt)
    e4 = math.exp(-4 * kt)
    if spec.kind in SAME_AXIS:
        return 2.0 / 3.0 + e4 / 3.0
    if spec.kind == ISOTROPIC:
        return 0.5 + 0.5 * math.exp(-8 * kt)
    if spec.kind in DIFFERENT_AXIS:
        return (3 + 2 * e2 + e4) / 6.0
    return (14 + 3 * e2 + 2 * e4 + 5 * math.exp(-6 * kt)) / 24.0


def classical_threshold_kt(kind: str, xtol: float = 1e-12) -> float:
    """Smallest ``kappa_t`` at which the closed-form average fidelity reaches 2/3.

    Same-axis channels never reach it and return ``math.inf``.
    """
    kind = normalize_kind(kind)
    if kind in SAME_AXIS:
        return math.inf

    def excess(kt):
        return average_fidelity_closed_form(NoiseSpec(kind, kt)) - CLASSICAL_FIDELITY

    lo, hi = 0.0, 1.0
    while excess(hi) > 0:
        hi *= 2
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fidelity_curve(kind: str, kappa_ts, resource_fn=None, n_theta: int = 64, n_phi: int = 64) -> np.ndarray:
    """Rows of ``(kappa_t, average fidelity)``.

    The W channel has no simulated protocol, so its rows use the closed form.
    ``resource_fn`` maps a ``NoiseSpec`` to a resource; it defaults to the
    closed-form channel.
    """
    kind = normalize_kind(kind)
    resource_fn = resource_fn or analytic_channel
    rows = []
    for kt in kappa_ts:
        spec = NoiseSpec(kind, kt)
        if kind == W_CHANNEL:
            f = average_fidelity_closed_form(spec)
        else:
            f = average_fidelity(resource_fn(spec), n_theta, n_phi)
        rows.append((spec.kappa_t, f))
    return np.array(rows, dtype=float).reshape(-1, 2)
