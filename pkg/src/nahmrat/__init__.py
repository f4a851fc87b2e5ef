"""Nahm data, Donaldson pairs and based rational maps.

Submodules: ``ratmaps`` (based rational maps), ``bwpairs`` (pairs (B, W)
and the O(k) bundle), ``nahm`` (Nahm data), ``elliptic`` (Jacobi
functions), ``flow`` (scattering flow to (B, W)), ``monodromy`` (signed
permutations and loop continuation), ``io`` (JSON formats), ``cli``.
"""

from .bwpairs import (
    BWPair,
    act_orthogonal,
    cyclicity,
    is_cyclic,
    lift_distinct,
    project,
    random_orthogonal,
    relate,
)
from .elliptic import ellipk, jacobi_elliptic
from .flow import combine, donaldson_flow, extract_map, indicial_exponent
from .monodromy import (
    LoopSpec,
    SignedPermutation,
    braid_loop,
    compose,
    continue_loop,
    expected_image,
    invert,
    sigma,
    wind,
    wind_loop,
    word_loop,
)
from .nahm import NahmData, SU2Residues, builtin_k1, builtin_k2, nahm_residual, residue_fit, su2_residues
from .ratmaps import (
    PartialFractions,
    Polynomial,
    RationalMap,
    evaluate,
    from_partial_fractions,
    is_in_rat0,
    make_rational_map,
    poles_and_residues,
)

__version__ = "0.1.0"
