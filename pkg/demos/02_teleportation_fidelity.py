"""Average teleportation fidelity through each noisy resource."""

import math

import numpy as np

from noisytele.channels import NoiseSpec, analytic_channel
from noisytele.qstate import RHO_EPR
from noisytele.teleport import (
    average_fidelity,
    average_fidelity_closed_form,
    classical_threshold_kt,
    fidelity_at,
    input_state,
    teleport_output,
)

# a clean EPR pair teleports any input perfectly
psi = input_state(1.1, 4.0)
print("clean resource, fidelity:", round(fidelity_at(RHO_EPR, 1.1, 4.0), 15))

# z-noise leaves the poles untouched and dephases the equator
rho_z = analytic_channel(NoiseSpec("z", 0.3))
print("z noise, pole:", round(fidelity_at(rho_z, 0.0, 0.0), 12), " equator:", round(fidelity_at(rho_z, math.pi / 2, 0.0), 6))

# sphere average by Gauss-Legendre x trapezoid quadrature, next to the closed forms
print("\n kind    kt   quadrature      closed form")
for kind in ("x", "iso", "xz"):
    for kt in (0.1, 0.5):
        spec = NoiseSpec(kind, kt)
        q = average_fidelity(analytic_channel(spec))
        print(f" {kind:>4} {kt:5.2f}  {q:.12f}  {average_fidelity_closed_form(spec):.12f}")

# where each channel drops to the classical 2/3
print("\nclassical-fidelity crossings")
for kind in ("x", "iso", "xz", "w"):
    print(f"  {kind:>3}: kt = {classical_threshold_kt(kind):.9f}")
print("  ln(3)/8 =", round(math.log(3) / 8, 9), "  ln(1+sqrt2)/2 =", round(math.log(1 + math.sqrt(2)) / 2, 9))

# a maximally mixed resource carries nothing
print("\nI/4 resource output:\n", np.round(teleport_output(np.eye(4) / 4, psi).real, 12))
