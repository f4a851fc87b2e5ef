"""JSON documents for maps, pairs, Nahm data and loops.

Every complex scalar is a two-element ``[re, im]`` array; plain real
numbers are accepted on input.
"""

from __future__ import annotations

import json

import numpy as np

from .bwpairs import BWPair
from .errors import FormatError
from .monodromy import Generator, LoopSpec, keyframe_loop, word_loop
from .nahm import NahmData, SU2Residues, tabulated
from .ratmaps import DEFAULT_DELTA, PartialFractions, RationalMap, from_partial_fractions, make_rational_map


def encode_complex(z) -> list:
    z = complex(z)
    # + 0.0 folds negative zero
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def decode_complex(x) -> complex:
    if isinstance(x, bool):
        raise FormatError(f"expected a number or [re, im], got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise FormatError(f"expected a number or [re, im], got {x!r}")


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.ravel(v)]


def decode_vector(x) -> np.ndarray:
    if not isinstance(x, list):
        raise FormatError(f"expected a list of complex numbers, got {type(x).__name__}")
    return np.array([decode_complex(z) for z in x], dtype=complex)


def encode_matrix(M) -> list:
    return [encode_vector(row) for row in np.atleast_2d(M)]


def decode_matrix(x) -> np.ndarray:
    if not isinstance(x, list) or not all(isinstance(r, list) for r in x):
        raise FormatError("expected a matrix as a list of rows")
    rows = [decode_vector(r) for r in x]
    if len({r.size for r in rows}) > 1:
        raise FormatError("matrix rows have different lengths")
    return np.array(rows, dtype=complex).reshape(len(rows), -1)


def _require(doc, *keys):
    if not isinstance(doc, dict):
        raise FormatError(f"expected a JSON object, got {type(doc).__name__}")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise FormatError(f"missing key(s): {', '.join(missing)}")


def _check_k(doc, k):
    if "k" in doc and doc["k"] != k:
        raise FormatError(f"declared k={doc['k']} but the data has size {k}")


# maps


def map_to_json(f: RationalMap) -> dict:
    doc = {
        "k": f.k,
        "numerator": encode_vector(f.numerator.coefficients),
        "denominator": encode_vector(f.denominator.coefficients),
    }
    if f.degree_drop:
        doc["degree_drop"] = f.degree_drop
    return doc


def partial_fractions_to_json(pf: PartialFractions) -> dict:
    return {"poles": encode_vector(pf.poles), "residues": encode_vector(pf.residues)}


def partial_fractions_from_json(doc, delta: float = DEFAULT_DELTA) -> PartialFractions:
    _require(doc, "poles", "residues")
    pf = PartialFractions(decode_vector(doc["poles"]), decode_vector(doc["residues"]), delta=delta)
    _check_k(doc, pf.k)
    return pf


def map_from_json(doc, delta: float = DEFAULT_DELTA) -> RationalMap:
    """Either coefficient form or pole/residue form."""
    if isinstance(doc, dict) and "poles" in doc:
        return from_partial_fractions(partial_fractions_from_json(doc, delta))
    _require(doc, "numerator", "denominator")
    f = make_rational_map(decode_vector(doc["numerator"]), decode_vector(doc["denominator"]))
    _check_k(doc, f.k)
    return f


# pairs


def pair_to_json(pair: BWPair) -> dict:
    return {"k": pair.k, "B": encode_matrix(pair.B), "W": encode_vector(pair.W)}


def pair_from_json(doc) -> BWPair:
    _require(doc, "B", "W")
    B, W = decode_matrix(doc["B"]), decode_vector(doc["W"])
    if B.shape != (W.size, W.size):
        raise FormatError(f"B has shape {B.shape} but W has {W.size} entries")
    _check_k(doc, W.size)
    return BWPair(B, W)


# Nahm data


def residues_to_json(res: SU2Residues) -> dict:
    return {
        "t1": encode_matrix(res.t1),
        "t2": encode_matrix(res.t2),
        "t3": encode_matrix(res.t3),
        "v": encode_vector(res.v),
    }


def residues_from_json(doc) -> SU2Residues:
    _require(doc, "t1", "t2", "t3", "v")
    res = SU2Residues(
        np.array([decode_matrix(doc[key]) for key in ("t1", "t2", "t3")]),
        decode_vector(doc["v"]),
    )
    res.check()
    return res


def nahm_to_json(data: NahmData, s_values) -> dict:
    """Tabulate ``data`` at ``s_values`` in the tabulated Nahm format."""
    T = data(np.asarray(s_values, dtype=float))
    return {
        "k": data.k,
        "samples": [
            {"s": float(s), "T1": encode_matrix(Ts[0]), "T2": encode_matrix(Ts[1]), "T3": encode_matrix(Ts[2])}
            for s, Ts in zip(s_values, T)
        ],
        "residue_minus": residues_to_json(data.residue_minus),
        "residue_plus": None if data.residue_plus is None else residues_to_json(data.residue_plus),
    }


def nahm_from_json(doc) -> NahmData:
    _require(doc, "k", "samples", "residue_minus")
    samples = doc["samples"]
    if not isinstance(samples, list) or not samples:
        raise FormatError("samples must be a non-empty list")
    s = []
    T = []
    for item in samples:
        _require(item, "s", "T1", "T2", "T3")
        s.append(float(item["s"]))
        T.append([decode_matrix(item[key]) for key in ("T1", "T2", "T3")])
    minus = residues_from_json(doc["residue_minus"])
    plus = doc.get("residue_plus")
    plus = None if plus is None else residues_from_json(plus)
    data = tabulated(s, np.array(T), minus, plus)
    _check_k(doc, data.k)
    return data


# loops


def _generator_from_json(item) -> Generator:
    _require(item, "gen")
    gen = item["gen"]
    if gen == "braid":
        _require(item, "j")
        index = item["j"]
    elif gen == "wind":
        _require(item, "i")
        index = item["i"]
    else:
        raise FormatError(f"unknown generator {gen!r}")
    if not isinstance(index, int) or isinstance(index, bool):
        raise FormatError("generator index must be an integer")
    return Generator(gen, index, bool(item.get("inverse", False)))


def generator_to_json(g: Generator) -> dict:
    key = "j" if g.gen == "braid" else "i"
    return {"gen": g.gen, key: g.index, "inverse": g.inverse}


def loop_to_json(loop: LoopSpec, samples: int | None = None) -> dict:
    """Word loops only; keyframe loops have no generator word."""
    per_gen = samples or max(1, loop.samples // max(1, len(loop.word)))
    return {
        "k": loop.k,
        "base": partial_fractions_to_json(loop.base),
        "word": [generator_to_json(g) for g in loop.word],
        "samples": per_gen,
    }


def loop_from_json(doc, delta: float = DEFAULT_DELTA) -> LoopSpec:
    if not isinstance(doc, dict):
        raise FormatError("loop document must be an object")
    samples = doc.get("samples", 64)
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
        raise FormatError("samples must be a positive integer")
    if "keyframes" in doc:
        frames = [partial_fractions_from_json(f, delta) for f in doc["keyframes"]]
        loop = keyframe_loop(frames, samples)
    else:
        _require(doc, "base", "word")
        base = partial_fractions_from_json(doc["base"], delta)
        if not isinstance(doc["word"], list):
            raise FormatError("word must be a list of generators")
        word = [_generator_from_json(item) for item in doc["word"]]
        try:
            loop = word_loop(word, base, samples)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    _check_k(doc, loop.k)
    return loop


def dumps(doc) -> str:
    """Deterministic serialization; floats use the shortest exact repr."""
    return json.dumps(doc, sort_keys=True, allow_nan=False)
