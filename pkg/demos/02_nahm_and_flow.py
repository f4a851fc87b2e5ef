"""
Nahm data for charges one and two, and the scattering flow that turns
Nahm data into a pair (B, W).

Run with ``python3 demos/02_nahm_and_flow.py``.
"""

import numpy as np

from nahmrat import (
    builtin_k1,
    builtin_k2,
    donaldson_flow,
    extract_map,
    indicial_exponent,
    jacobi_elliptic,
    nahm_residual,
    residue_fit,
    su2_residues,
)

## Residues at the poles are spin matrices
for k in (2, 3, 4):
    r = su2_residues(k)
    print(f"k={k}: spectrum of -i t3 =", np.round(r.spectrum(), 12))

## The Jacobi functions behind the charge-two solution
u = np.linspace(0, 4, 5)
sn, cn, dn = jacobi_elliptic(u, 0.6)
print("sn^2 + cn^2 - 1 =", np.max(np.abs(sn**2 + cn**2 - 1)))

## Charge two: check the equations and both pole residues
data = builtin_k2(0.3)
grid = np.linspace(-0.95, 0.95, 1001)
print("residual on [-0.95, 0.95]:", nahm_residual(data, grid))
# near the poles the terms are large; the relative residual stays small
close = np.linspace(-0.999, 0.999, 1001)
print("relative residual on [-0.999, 0.999]:", nahm_residual(data, close, relative=True))
for end in (-1, 1):
    fit = residue_fit(data, end)
    print(f"s={end:+d}: spectrum {np.round(fit.spectrum, 9)}, irreducible={fit.irreducible}")

## Charge one: constant data, and the flow has a closed form
c = (0.4, -1.0, 0.6)
res = donaldson_flow(builtin_k1(c))
print("B =", res.B[0, 0], " expected", (1j * c[0] - c[1]) / 2)
print("W =", res.W[0], " expected", np.exp(-c[2] / 2))
print("map:", extract_map(res))

## Charge two: the start exponent is 1/4, and A0 blows up at s=+1
print("indicial exponent:", indicial_exponent(data))
res = donaldson_flow(data)
print("divergence flag:", res.endpoint_divergence_flag)
print(res.diagnostics)
