"""Noisy EPR and W resources: closed forms and Lindblad integration.

Every channel is parametrised by the dimensionless product ``kappa_t``.  The
jump operators are Pauli matrices acting with unit rate, so the integrator
runs in the variable ``s = kappa * t`` directly.

Kinds
-----
``x``, ``y``, ``z``
    same-axis noise on both EPR qubits.
``iso``
    isotropic noise, all three Paulis on both EPR qubits.
``xz``, ``xy``, ``yz``, ``zx``, ``zy``, ``yx``
    different-axis noise; the first letter acts on Alice's half of the EPR
    pair and the second on Bob's.
``w``
    x-noise on all three qubits of the W resource.

Reversing a different-axis pair gives the same resource (``zx == xz``, etc.).
The ``yz`` resource carries a minus sign on its ``|01><10|`` coherence, so it
is *not* entrywise equal to ``xz``; both share the same spectrum, fidelity and
concurrence.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .qstate import PAULI, RHO_EPR, embed, projector

SAME_AXIS = ("x", "y", "z")
ISOTROPIC = "iso"
DIFFERENT_AXIS = ("xz", "xy", "yz", "zx", "zy", "yx")
W_CHANNEL = "w"
EPR_KINDS = SAME_AXIS + (ISOTROPIC,) + DIFFERENT_AXIS
ALL_KINDS = EPR_KINDS + (W_CHANNEL,)

_ALIASES = {
    "i": ISOTROPIC,
    "isotropic": ISOTROPIC,
    "w-x": W_CHANNEL,
    "wx": W_CHANNEL,
}

DEFAULT_STEPS_PER_UNIT = 10_000

W_STATE = np.array([0, np.sqrt(2), 1, 0, 1, 0, 0, 0], dtype=complex) / 2


def normalize_kind(kind: str) -> str:
    """Canonical channel name; raises ``ValueError`` for unknown kinds."""
    k = str(kind).strip().lower()
    k = _ALIASES.get(k, k)
    if k not in ALL_KINDS:
        raise ValueError(f"unknown noise kind {kind!r}; expected one of {', '.join(ALL_KINDS)}")
    return k


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    kappa_t: float

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        kt = float(self.kappa_t)
        if not kt >= 0.0:
            raise ValueError(f"kappa_t must be nonnegative, got {self.kappa_t!r}")
        object.__setattr__(self, "kappa_t", kt)

    @property
    def n_qubits(self) -> int:
        return 3 if self.kind == W_CHANNEL else 2


@dataclass(frozen=True)
class ChannelCoefficients:
    tau_plus: float
    tau_minus: float
    nu_plus: float
    nu_minus: float
    ttau_plus: float
    ttau_minus: float
    w_alpha: tuple[float, float, float, float]
    w_beta_plus: float
    w_beta_minus: float


def channel_coefficients(kappa_t: float) -> ChannelCoefficients:
    """All exponential coefficient families evaluated at one ``kappa_t``."""
    kappa_t = float(kappa_t)
    if not kappa_t >= 0.0:
        raise ValueError("kappa_t must be nonnegative")
    e2 = math.exp(-2.0 * kappa_t)
    e4 = math.exp(-4.0 * kappa_t)
    e6 = math.exp(-6.0 * kappa_t)
    e8 = math.exp(-8.0 * kappa_t)
    return ChannelCoefficients(
        tau_plus=(1 + e4) / 2,
        tau_minus=(1 - e4) / 2,
        nu_plus=(1 + e2) / 2,
        nu_minus=(1 - e2) / 2,
        ttau_plus=(1 + e8) / 2,
        ttau_minus=(1 - e8) / 2,
        w_alpha=(
            1 + e2 + e4 + e6,
            1 + e2 - e4 - e6,
            1 - e2 - e4 + e6,
            1 - e2 + e4 - e6,
        ),
        w_beta_plus=1 + e6,
        w_beta_minus=1 - e6,
    )


def _epr_block(diag, outer, inner) -> np.ndarray:
    """(1/2) * matrix with diagonal ``diag`` and X-shaped coherences."""
    a, b, c, d = diag
    m = np.array(
        [
            [a, 0, 0, outer],
            [0, b, inner, 0],
            [0, inner, c, 0],
            [outer, 0, 0, d],
        ],
        dtype=complex,
    )
    return m / 2


def _w_matrix(co: ChannelCoefficients) -> np.ndarray:
    a1, a2, a3, a4 = co.w_alpha
    bp, bm = co.w_beta_plus, co.w_beta_minus
    r = math.sqrt(2)
    m = np.array(
        [
            [2 * a2, 0, 0, r * a2, 0, r * a2, a2, 0],
            [0, 2 * a1, r * a1, 0, r * a1, 0, 0, a3],
            [0, r * a1, 2 * bp, 0, a1, 0, 0, r * a3],
            [r * a2, 0, 0, 2 * bm, 0, a4, r * a4, 0],
            [0, r * a1, a1, 0, 2 * bp, 0, 0, r * a3],
            [r * a2, 0, 0, a4, 0, 2 * bm, r * a4, 0],
            [a2, 0, 0, r * a4, 0, r * a4, 2 * a4, 0],
            [0, a3, r * a3, 0, r * a3, 0, 0, 2 * a3],
        ],
        dtype=complex,
    )
    return m / 16


def analytic_channel(spec: NoiseSpec) -> np.ndarray:
    """Closed-form noisy resource for ``spec`` (4x4, or 8x8 for the W channel)."""
    co = channel_coefficients(spec.kappa_t)
    kind = spec.kind
    e2 = math.exp(-2.0 * spec.kappa_t)
    e4 = math.exp(-4.0 * spec.kappa_t)
    tp, tm = co.tau_plus, co.tau_minus
    npl, nmi = co.nu_plus, co.nu_minus

    if kind == "x":
        return _epr_block((tp, tm, tm, tp), tp, tm)
    if kind == "y":
        return _epr_block((tp, tm, tm, tp), tp, -tm)
    if kind == "z":
        return _epr_block((1, 0, 0, 1), e4, 0)
    if kind == ISOTROPIC:
        ttp, ttm = co.ttau_plus, co.ttau_minus
        return _epr_block((ttp, ttm, ttm, ttp), 2 * ttp - 1, 0)
    if kind in ("xz", "zx"):
        return _epr_block((npl, nmi, nmi, npl), e2 * npl, e2 * nmi)
    if kind in ("yz", "zy"):
        return _epr_block((npl, nmi, nmi, npl), e2 * npl, -e2 * nmi)
    if kind in ("xy", "yx"):
        return _epr_block((tp, tm, tm, tp), e2, 0)
    return _w_matrix(co)


def initial_state(kind: str) -> np.ndarray:
    """Noise-free resource: the EPR projector, or the W projector for ``w``."""
    kind = normalize_kind(kind)
    if kind == W_CHANNEL:
        return projector(W_STATE)
    return RHO_EPR.copy()


def lindblad_operators(kind: str) -> list[np.ndarray]:
    """Jump operators (unit rate) on the resource register for a channel kind."""
    kind = normalize_kind(kind)
    if kind in SAME_AXIS:
        p = PAULI[kind]
        return [embed(p, 0, 2), embed(p, 1, 2)]
    if kind == ISOTROPIC:
        return [embed(PAULI[a], q, 2) for q in (0, 1) for a in "xyz"]
    if kind in DIFFERENT_AXIS:
        return [embed(PAULI[kind[0]], 0, 2), embed(PAULI[kind[1]], 1, 2)]
    return [embed(PAULI["x"], q, 3) for q in range(3)]


def lindblad_rhs(sigma: np.ndarray, ops) -> np.ndarray:
    out = np.zeros_like(sigma)
    for L in ops:
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ sigma @ Ld - 0.5 * (LdL @ sigma + sigma @ LdL)
    return out


def liouvillian(ops) -> np.ndarray:
    """Superoperator of ``lindblad_rhs`` acting on row-major ``vec(sigma)``.

    Uses ``vec(A sigma B) = (A kron B^T) vec(sigma)``.
    """
    dim = ops[0].shape[0]
    eye = np.eye(dim)
    sup = np.zeros((dim * dim, dim * dim), dtype=complex)
    for L in ops:
        LdL = L.conj().T @ L
        sup += np.kron(L, L.conj()) - 0.5 * np.kron(LdL, eye) - 0.5 * np.kron(eye, LdL.T)
    return sup


def _rk4(rho0: np.ndarray, ops, kappa_t: float, steps: int) -> np.ndarray:
    dim = rho0.shape[0]
    sup = liouvillian(ops)
    h = kappa_t / steps
    v = np.array(rho0, dtype=complex).reshape(-1)
    for _ in range(steps):
        k1 = sup @ v
        k2 = sup @ (v + 0.5 * h * k1)
        k3 = sup @ (v + 0.5 * h * k2)
        k4 = sup @ (v + h * k3)
        sigma = (v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)).reshape(dim, dim)
        v = (0.5 * (sigma + sigma.conj().T)).reshape(-1)
    return v.reshape(dim, dim)


class IntegrationWarning(UserWarning):
    pass


def lindblad_evolve(
    rho0,
    noise_kind: str,
    kappa_t: float,
    steps: int | None = None,
    *,
    return_error: bool = False,
    tol: float = 1e-8,
):
    """Integrate the Lindblad equation with H_S = 0 by fixed-step RK4.

    Parameters
    ----------
    rho0 : array_like
        Initial density operator on the channel register.
    noise_kind : str
        Channel kind, selects the jump operators.
    kappa_t : float
        Final value of the dimensionless time.
    steps : int, optional
        Number of RK4 steps; defaults to 10^4 per unit ``kappa_t``.
    return_error : bool
        Also return a step-halving (Richardson) estimate of the max-entry
        error.  An estimate above ``tol`` raises an ``IntegrationWarning``.

    Returns
    -------
    numpy.ndarray or (numpy.ndarray, float)
    """
    ops = lindblad_operators(noise_kind)
    rho0 = np.asarray(rho0, dtype=complex)
    dim = ops[0].shape[0]
    if rho0.shape != (dim, dim):
        raise ValueError(f"initial state must be {dim}x{dim} for noise kind {noise_kind!r}")
    kappa_t = float(kappa_t)
    if kappa_t < 0:
        raise ValueError("kappa_t must be nonnegative")
    if steps is None:
        steps = max(1, math.ceil(DEFAULT_STEPS_PER_UNIT * kappa_t))
    if steps < 1:
        raise ValueError("steps must be at least 1")

    if kappa_t == 0.0:
        return (rho0.copy(), 0.0) if return_error else rho0.copy()

    rho = _rk4(rho0, ops, kappa_t, steps)
    if not return_error:
        return rho
    if steps >= 2:
        coarse = _rk4(rho0, ops, kappa_t, steps // 2)
        # error of the fine solution for a 4th-order method with step ratio r
        r = (steps / (steps // 2)) ** 4
        err = float(np.max(np.abs(rho - coarse))) / (r - 1)
    else:
        finer = _rk4(rho0, ops, kappa_t, 2)
        err = float(np.max(np.abs(rho - finer))) * 16 / 15
    if err > tol:
        warnings.warn(
            f"estimated integration error {err:.2e} exceeds {tol:.0e}; increase steps",
            IntegrationWarning,
            stacklevel=2,
        )
    return rho, err


def integrated_channel(spec: NoiseSpec, steps: int | None = None) -> np.ndarray:
    """Noisy resource for ``spec`` obtained by integrating from the clean state."""
    return lindblad_evolve(initial_state(spec.kind), spec.kind, spec.kappa_t, steps)
