"""Concurrence, entanglement of formation and the Groverian measure along kt."""

import numpy as np

from noisytele.channels import W_STATE, NoiseSpec, analytic_channel
from noisytele.entanglement import (
    concurrence_mixed,
    entanglement_report,
    pmax_numeric,
    separability_threshold_kt,
)
from noisytele.teleport import average_fidelity_closed_form

print(" kind    kt       F        C        E        G      min PT eig")
for kind in ("x", "iso", "xz"):
    for kt in (0.0, 0.1, 0.2, 0.5):
        spec = NoiseSpec(kind, kt)
        rep = entanglement_report(analytic_channel(spec))
        f = average_fidelity_closed_form(spec)
        print(
            f" {kind:>4} {kt:5.2f}  {f:.5f}  {rep.concurrence:.5f}  {rep.eof:.5f}"
            f"  {rep.groverian:.5f}  {rep.ppt_min_eig:+.5f}"
        )

# entanglement disappears exactly where the fidelity reaches 2/3
for kind in ("iso", "xz"):
    kt0 = separability_threshold_kt(kind)
    f0 = average_fidelity_closed_form(NoiseSpec(kind, kt0))
    print(f"\n{kind}: concurrence vanishes at kt = {kt0:.9f}, where F = {f0:.9f}")

# just inside and just outside the isotropic threshold
kt0 = separability_threshold_kt("iso")
for kt in (kt0 - 1e-4, kt0 + 1e-4):
    print(f"  C(iso, {kt:.6f}) = {concurrence_mixed(analytic_channel(NoiseSpec('iso', kt))):.3e}")

# pure-state report includes Pmax, the best overlap with a product state
print("\nBell state:", entanglement_report(np.array([1, 0, 0, 1]) / np.sqrt(2)).as_dict())

# three qubits: alternating maximization over product states
print("W resource, Pmax =", round(pmax_numeric(W_STATE), 8))
