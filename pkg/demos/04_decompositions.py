"""Pure-state ensembles behind the mixed-state concurrence."""

import numpy as np

from noisytele.channels import NoiseSpec, analytic_channel
from noisytele.decomp import (
    MU_STAR,
    NU_STAR,
    OutOfDomainError,
    optimal_ensemble,
    separable_ensemble,
    solve_phase_condition,
    verify_ensemble,
    wootters_decomposition,
)
from noisytele.entanglement import concurrence_mixed
from noisytele.qstate import random_density, to_magic_basis

np.set_printoptions(precision=5, suppress=True)


def show(label, ens, rho):
    residual, concs = verify_ensemble(ens, rho)
    print(f"{label}: residual {residual:.1e}, C(rho) = {concurrence_mixed(rho):.6f}")
    for w, s, c in zip(ens.weights, ens.states, concs):
        print(f"   p = {w:.5f}  C = {c:.6f}  magic coords {to_magic_basis(s)}")


# closed-form optimal ensembles in the entangled regime
for kind, kt in (("x", 0.25), ("iso", 0.1), ("xz", 0.2)):
    spec = NoiseSpec(kind, kt)
    show(f"optimal {kind} at kt = {kt}", optimal_ensemble(spec), analytic_channel(spec))

# past the threshold the same resource splits into product states
spec = NoiseSpec("iso", MU_STAR)
print("\nphases at the isotropic threshold:", np.round(solve_phase_condition(3.0).theta, 12))
show("separable iso at mu*", separable_ensemble(spec), analytic_channel(spec))
spec = NoiseSpec("xz", 0.6)
show("separable xz at kt = 0.6", separable_ensemble(spec), analytic_channel(spec))

try:
    optimal_ensemble(NoiseSpec("xz", NU_STAR + 0.1))
except OutOfDomainError as exc:
    print("\nout of domain:", exc)

# the general construction works for any two-qubit state
rho = random_density(np.random.default_rng(3), 2)
show("\nWootters ensemble of a random state", wootters_decomposition(rho), rho)
