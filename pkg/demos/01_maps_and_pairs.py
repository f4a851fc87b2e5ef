"""
Rational maps, the pairs (B, W) that realize them, and the O(k) freedom
in choosing a pair.

Run with ``python3 demos/01_maps_and_pairs.py``.
"""

import numpy as np

from nahmrat import (
    BWPair,
    PartialFractions,
    act_orthogonal,
    cyclicity,
    from_partial_fractions,
    is_cyclic,
    lift_distinct,
    poles_and_residues,
    project,
    random_orthogonal,
    relate,
)

rng = np.random.default_rng(1)

## A degree-3 based map, given by its poles and residues
pf = PartialFractions([1.0, -0.5 + 1j, -0.5 - 1j], [2.0, -1.0 + 0.5j, 0.3j])
f = from_partial_fractions(pf)
print("numerator   ", np.round(f.numerator.coefficients, 6))
print("denominator ", np.round(f.denominator.coefficients, 6))

# and back again
back = poles_and_residues(f)
print("recovered poles   ", np.round(back.poles, 12))
print("recovered residues", np.round(back.residues, 12))

## Lift: diagonal B carries the poles, W_i^2 the residues
P = lift_distinct(f)
print("W =", np.round(P.W, 6))
print("W^2 =", np.round(P.W**2, 6))
print("project(lift f) agrees with f:", project(P).allclose(f, 1e-12))

## Any orthogonal change of frame gives another pair over the same map
Q = random_orthogonal(3, rng)
P2 = act_orthogonal(Q, P)
print("B after Q is no longer diagonal:\n", np.round(P2.B, 3))
print("same map:", project(P2).allclose(f, 1e-10))

## Among diagonal pairs, the freedom shrinks to signed permutations
flip = BWPair(np.diag(np.diag(P.B)[[2, 0, 1]]), (P.W * [1, -1, 1])[[2, 0, 1]])
g = relate(P, flip)
print("relating element:", g, g.to_json())

## Cyclicity is the Vandermonde determinant for a diagonal pair
b = np.diag(P.B)
vdm = np.prod(P.W) * np.prod([b[j] - b[i] for i in range(3) for j in range(i + 1, 3)])
print("det K =", np.round(cyclicity(P), 10), " Vandermonde =", np.round(vdm, 10))

# kill one component of W and the map loses a pole
W = P.W.copy()
W[1] = 0
cut = BWPair(P.B, W)
g_cut = project(cut)
print("cyclic:", is_cyclic(cut), " degree drop:", g_cut.degree_drop, " new k:", g_cut.k)
