"""
Carrying the diagonal lift around loops of pole configurations.

Braiding two poles swaps the corresponding entries of (B, W); winding a
residue once around zero flips the sign of one square root.

Run with ``python3 demos/03_monodromy.py``.
"""

import numpy as np

from nahmrat import (
    braid_loop,
    compose,
    continue_loop,
    expected_image,
    sigma,
    wind,
    wind_loop,
    word_loop,
)
from nahmrat.monodromy import roots_of_unity_base

base = roots_of_unity_base(3)
print("base poles:", np.round(base.poles, 6))

## The two kinds of generator
g, trace = continue_loop(wind_loop(2, base))
print("wind_2   ->", g, f"({trace.steps} steps)")
g, trace = continue_loop(braid_loop(1, base))
print("sigma_1  ->", g, f"({trace.steps} steps, {trace.refinements} refinements)")

## Words: the braid relation and the homomorphism
lhs = continue_loop(word_loop([sigma(1), sigma(2), sigma(1)], base))[0]
rhs = continue_loop(word_loop([sigma(2), sigma(1), sigma(2)], base))[0]
print("s1 s2 s1 =", lhs, "  s2 s1 s2 =", rhs)

w1 = [sigma(1), wind(3)]
w2 = [wind(1), sigma(2, inverse=True)]
m1 = continue_loop(word_loop(w1, base))[0]
m2 = continue_loop(word_loop(w2, base))[0]
m12 = continue_loop(word_loop(w1 + w2, base))[0]
print("M(w1 w2) =", m12, " compose(M(w1), M(w2)) =", compose(m1, m2))
print("natural image:", expected_image(w1 + w2, 3))

## The trace records every accepted step
_, trace = continue_loop(word_loop([sigma(1)], base, samples=8))
print(trace.header())
for row in list(trace.rows())[:3]:
    print(np.round(row, 4))
