"""Signed permutations and monodromy of the diagonal lift around loops.

A loop in Rat0_k is a closed path of pole/residue configurations. Along the
path the diagonal pair ``(diag(b_i), sqrt(r_i))`` is continued, with each
square root kept continuous, and the end pair is compared with the start
pair. The result is the signed permutation ``g`` with ``g . start = end``.

Conventions
-----------
* ``SignedPermutation(perm, signs)`` has matrix ``P[perm[i], i] = signs[i]``
  and acts on pairs by ``(P B P^t, P W)``, so ``(g W)[perm[i]] = signs[i] W[i]``.
* ``compose(g, h)`` is the matrix product ``g @ h``.
* For a concatenated loop (``w1`` first, then ``w2``) the monodromy is
  ``compose(mono(w1), mono(w2))``: continuing from ``g1 . L`` along ``w2``
  ends at ``g1 . g2 . L`` because the group action commutes with
  continuation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bwpairs import BWPair, principal_sqrt, relate
from .errors import (
    CollisionRisk,
    InvalidLoop,
    RefinementExhausted,
    SizeMismatch,
)
from .ratmaps import DEFAULT_DELTA, RESIDUE_TOL, PartialFractions, min_separation, pole_threshold

MAX_REFINEMENT = 20
DEFAULT_SAMPLES = 64
#: braid circles must clear other poles by this multiple of the pole margin
COLLISION_FACTOR = 2.0


@dataclass(frozen=True)
class SignedPermutation:
    """Element of the hyperoctahedral group, 0-based ``perm``."""

    perm: tuple
    signs: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        signs = tuple(int(s) for s in self.signs)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"{perm} is not a permutation")
        if len(signs) != len(perm) or any(s not in (1, -1) for s in signs):
            raise ValueError(f"signs {signs} must be +-1, one per entry")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def identity(cls, k: int) -> SignedPermutation:
        return cls(tuple(range(k)), (1,) * k)

    @classmethod
    def transposition(cls, k: int, j: int) -> SignedPermutation:
        """Swap of the 0-based positions ``j`` and ``j + 1``."""
        perm = list(range(k))
        perm[j], perm[j + 1] = perm[j + 1], perm[j]
        return cls(tuple(perm), (1,) * k)

    @classmethod
    def flip(cls, k: int, i: int) -> SignedPermutation:
        signs = [1] * k
        signs[i] = -1
        return cls(tuple(range(k)), tuple(signs))

    @classmethod
    def from_matrix(cls, M) -> SignedPermutation:
        M = np.asarray(M)
        k = M.shape[0]
        rows = np.argmax(np.abs(M), axis=0)
        signs = np.sign(M[rows, np.arange(k)].real).astype(int)
        g = cls(tuple(rows.tolist()), tuple(signs.tolist()))
        if not np.array_equal(g.matrix(), M):
            raise ValueError("not a signed permutation matrix")
        return g

    @property
    def k(self) -> int:
        return len(self.perm)

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.k, self.k))
        P[list(self.perm), list(range(self.k))] = self.signs
        return P

    def underlying(self) -> tuple:
        """Image in the symmetric group."""
        return self.perm

    def act(self, pair: BWPair) -> BWPair:
        P = self.matrix()
        return BWPair(P @ pair.B @ P.T, P @ pair.W)

    def __matmul__(self, other: SignedPermutation) -> SignedPermutation:
        return compose(self, other)

    def to_json(self) -> dict:
        return {"pi": [p + 1 for p in self.perm], "signs": list(self.signs)}

    def __str__(self):
        body = ", ".join(
            f"{i + 1}->{'-' if s < 0 else '+'}{p + 1}" for i, (p, s) in enumerate(zip(self.perm, self.signs))
        )
        return f"<{body}>"


def compose(g: SignedPermutation, h: SignedPermutation) -> SignedPermutation:
    """Matrix product ``g @ h`` (``h`` acts first)."""
    if g.k != h.k:
        raise SizeMismatch(f"cannot compose elements of sizes {g.k} and {h.k}")
    perm = tuple(g.perm[h.perm[i]] for i in range(g.k))
    signs = tuple(g.signs[h.perm[i]] * h.signs[i] for i in range(g.k))
    return SignedPermutation(perm, signs)


def invert(g: SignedPermutation) -> SignedPermutation:
    perm = [0] * g.k
    signs = [1] * g.k
    for i, (p, s) in enumerate(zip(g.perm, g.signs)):
        perm[p] = i
        signs[p] = s
    return SignedPermutation(tuple(perm), tuple(signs))


# -- loops -------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """``braid`` (half-twist of base positions j, j+1) or ``wind`` (residue i).

    Indices are 1-based as in the JSON loop format.
    """

    gen: str
    index: int
    inverse: bool = False

    def __post_init__(self):
        if self.gen not in ("braid", "wind"):
            raise ValueError(f"unknown generator {self.gen!r}")

    def inv(self) -> Generator:
        return Generator(self.gen, self.index, not self.inverse)

    def __str__(self):
        name = f"s{self.index}" if self.gen == "braid" else f"w{self.index}"
        return name + ("^-1" if self.inverse else "")


def sigma(j: int, inverse: bool = False) -> Generator:
    return Generator("braid", j, inverse)


def wind(i: int, inverse: bool = False) -> Generator:
    return Generator("wind", i, inverse)


Path = Callable[[float], "tuple[np.ndarray, np.ndarray]"]


@dataclass(frozen=True, eq=False)
class LoopSpec:
    """Closed path ``t -> (poles, residues)`` on ``[0, 1]`` based at ``base``.

    ``samples`` is the minimum number of continuation steps; the continuation
    refines further where needed.
    """

    base: PartialFractions
    kind: str
    path: Path
    samples: int = DEFAULT_SAMPLES
    word: tuple = ()
    delta: float = field(default=DEFAULT_DELTA, repr=False)

    @property
    def k(self) -> int:
        return self.base.k

    def at(self, t: float):
        return self.path(float(t))

    def reversed(self) -> LoopSpec:
        path = self.path
        word = tuple(g.inv() for g in reversed(self.word))
        # the end of the loop lists the base poles in permuted order; index
        # the reversed path so it starts in base order
        end = np.asarray(path(1.0)[0], dtype=complex)
        idx = np.argmin(np.abs(self.base.poles[:, None] - end[None, :]), axis=1)

        def rev(t):
            b, r = path(1.0 - t)
            return b[idx], r[idx]

        return LoopSpec(self.base, self.kind, rev, self.samples, word, self.delta)

    def with_samples(self, samples: int) -> LoopSpec:
        return LoopSpec(self.base, self.kind, self.path, samples, self.word, self.delta)

    def validate(self, n: int | None = None) -> None:
        """Check sampled configurations lie in Rat0_k and the loop closes."""
        n = n or 4 * self.samples
        for t in np.linspace(0, 1, n + 1):
            _check_config(*self.at(t), self.delta, t)
        if not same_configuration(self.at(1.0), (self.base.poles, self.base.residues), self.delta):
            raise InvalidLoop("loop does not return to its base configuration")
        if not same_configuration(self.at(0.0), (self.base.poles, self.base.residues), self.delta):
            raise InvalidLoop("loop does not start at its base configuration")


def _check_config(poles, residues, delta, t):
    """InvalidLoop unless the configuration lies in Rat0_k."""
    b = np.asarray(poles, dtype=complex)
    d = np.abs(b[:, None] - b[None, :])
    thr = delta * max(float(d.max()), 1.0)
    np.fill_diagonal(d, np.inf)
    if b.size > 1 and d.min() <= thr:
        raise InvalidLoop(f"configuration at t={t:.6g} leaves Rat0_k: poles closer than {thr:.3g}")
    if np.any(np.abs(residues) <= RESIDUE_TOL):
        raise InvalidLoop(f"configuration at t={t:.6g} leaves Rat0_k: a residue vanishes")


def same_configuration(c1, c2, delta: float = DEFAULT_DELTA, tol: float = 1e-8) -> bool:
    """Equal as unordered sets of (pole, residue) pairs."""
    b1, r1 = (np.asarray(x, dtype=complex) for x in c1)
    b2, r2 = (np.asarray(x, dtype=complex) for x in c2)
    if b1.size != b2.size:
        return False
    thr = max(pole_threshold(b1, delta), delta)
    dist = np.abs(b1[:, None] - b2[None, :])
    match = np.argmin(dist, axis=1)
    if len(set(match.tolist())) != b1.size:
        return False
    if np.any(dist[np.arange(b1.size), match] > thr):
        return False
    rscale = max(1.0, np.max(np.abs(r1)))
    return bool(np.all(np.abs(r1 - r2[match]) <= tol * rscale))


def _generator_path(g: Generator, base: PartialFractions, delta: float) -> Path:
    b0, r0 = base.poles, base.residues
    k = base.k
    if g.gen == "braid":
        j = g.index - 1
        if not 0 <= j < k - 1:
            raise ValueError(f"braid generator index {g.index} outside 1..{k - 1}")
        a, c = b0[j], b0[j + 1]
        mid, rad = 0.5 * (a + c), 0.5 * abs(c - a)
        margin = COLLISION_FACTOR * max(pole_threshold(b0, delta), delta)
        if abs(c - a) <= margin:
            raise CollisionRisk(f"poles {j + 1} and {j + 2} are only {abs(c - a):.3g} apart")
        others = np.delete(b0, [j, j + 1])
        if others.size:
            clearance = np.min(np.abs(np.abs(others - mid) - rad))
            if clearance <= margin:
                raise CollisionRisk(
                    f"half-turn of poles {j + 1}, {j + 2} passes within {clearance:.3g} of another pole"
                )
        rs = max(1.0, abs(r0[j]))
        if abs(r0[j] - r0[j + 1]) > 1e-8 * rs:
            raise InvalidLoop(
                f"braid generator {g.index} carries residues with their poles; "
                f"residues {r0[j]} and {r0[j + 1]} differ so the path would not close"
            )
        direction = -1.0 if g.inverse else 1.0

        def path(t):
            rot = np.exp(1j * np.pi * direction * t)
            b = b0.copy()
            b[j] = mid + (a - mid) * rot
            b[j + 1] = mid + (c - mid) * rot
            return b, r0.copy()

        return path

    i = g.index - 1
    if not 0 <= i < k:
        raise ValueError(f"wind generator index {g.index} outside 1..{k}")
    direction = -1.0 if g.inverse else 1.0

    def path(t):
        r = r0.copy()
        r[i] = r0[i] * np.exp(2j * np.pi * direction * t)
        return b0.copy(), r

    return path


def word_loop(word: Sequence[Generator], base: PartialFractions, samples: int = DEFAULT_SAMPLES) -> LoopSpec:
    """Concatenation of generator loops; ``samples`` steps per generator."""
    word = tuple(word)
    delta = base.delta
    pieces = [_generator_path(g, base, delta) for g in word]
    n = len(pieces)

    if n == 0:
        def path(t):
            return base.poles.copy(), base.residues.copy()
        return LoopSpec(base, "constant", path, samples, (), delta)

    def path(t):
        x = min(max(t, 0.0), 1.0) * n
        idx = min(int(np.floor(x)), n - 1)
        return pieces[idx](x - idx)

    kind = "word" if n > 1 else word[0].gen
    return LoopSpec(base, kind, path, samples * n, word, delta)


def braid_loop(j: int, base: PartialFractions, samples: int = DEFAULT_SAMPLES, inverse: bool = False) -> LoopSpec:
    """Counterclockwise half-turn of poles ``j, j+1`` (1-based) about their midpoint."""
    return word_loop([sigma(j, inverse)], base, samples)


def wind_loop(i: int, base: PartialFractions, samples: int = DEFAULT_SAMPLES, inverse: bool = False) -> LoopSpec:
    """Residue ``i`` (1-based) runs once around ``r_i exp(2 pi i t)``."""
    return word_loop([wind(i, inverse)], base, samples)


def keyframe_loop(frames: Sequence[PartialFractions], samples: int = DEFAULT_SAMPLES) -> LoopSpec:
    """Piecewise-linear path through ``frames``, index by index.

    The last frame must equal the first as an unordered configuration.
    """
    frames = list(frames)
    if len(frames) < 2:
        raise InvalidLoop("need at least two keyframes")
    base = frames[0]
    if any(f.k != base.k for f in frames):
        raise InvalidLoop("keyframes must all have the same k")
    if not same_configuration((frames[-1].poles, frames[-1].residues), (base.poles, base.residues), base.delta):
        raise InvalidLoop("last keyframe must equal the first as a set")
    n = len(frames) - 1

    def path(t):
        x = min(max(t, 0.0), 1.0) * n
        idx = min(int(np.floor(x)), n - 1)
        w = x - idx
        f0, f1 = frames[idx], frames[idx + 1]
        return (1 - w) * f0.poles + w * f1.poles, (1 - w) * f0.residues + w * f1.residues

    return LoopSpec(base, "keyframes", path, samples * n, (), base.delta)


def concat(first: LoopSpec, second: LoopSpec) -> LoopSpec:
    """``first`` then ``second``; both must share a base configuration."""
    if not same_configuration(
        (first.base.poles, first.base.residues), (second.base.poles, second.base.residues), first.delta
    ):
        raise InvalidLoop("loops have different base configurations")
    p1, p2 = first.path, second.path

    def path(t):
        return p1(2 * t) if t < 0.5 else p2(2 * t - 1)

    return LoopSpec(first.base, "word", path, first.samples + second.samples, first.word + second.word, first.delta)


# -- continuation ------------------------------------------------------------


@dataclass(eq=False)
class ContinuationTrace:
    """Accepted steps of a continuation, in tracking order."""

    t: list = field(default_factory=list)
    poles: list = field(default_factory=list)
    W: list = field(default_factory=list)
    assignments: list = field(default_factory=list)
    branches: list = field(default_factory=list)
    refinements: int = 0
    result: SignedPermutation | None = None

    @property
    def steps(self) -> int:
        return len(self.t) - 1

    def rows(self):
        """CSV rows: t, then re/im of each pole, then re/im of each W."""
        for t, b, w in zip(self.t, self.poles, self.W):
            row = [t]
            for z in b:
                row += [z.real, z.imag]
            for z in w:
                row += [z.real, z.imag]
            yield row

    def header(self):
        k = len(self.poles[0]) if self.poles else 0
        cols = ["t"]
        cols += [f"b{i + 1}_{part}" for i in range(k) for part in ("re", "im")]
        cols += [f"W{i + 1}_{part}" for i in range(k) for part in ("re", "im")]
        return cols


def _try_step(b, W, poles, residues):
    """Match tracked poles to a new sample; None if the step is too long."""
    sep = min_separation(b)
    dist = np.abs(b[:, None] - poles[None, :])
    match = np.argmin(dist, axis=1)
    moved = dist[np.arange(b.size), match]
    if len(set(match.tolist())) != b.size or np.any(moved >= 0.5 * sep):
        return None
    root = principal_sqrt(residues[match])
    branch = np.where(np.abs(root - W) <= np.abs(root + W), 1, -1)
    W_new = branch * root
    # the other root must be clearly further away than the chosen one
    if np.any(np.abs(W_new - W) >= 0.5 * np.abs(W_new)):
        return None
    return poles[match], W_new, match, branch


def _sample(loop: LoopSpec, t: float):
    poles, residues = loop.at(t)
    _check_config(poles, residues, loop.delta, t)
    return np.asarray(poles, dtype=complex), np.asarray(residues, dtype=complex)


def _checked_step(loop: LoopSpec, b, W, t: float, dt: float):
    """One step, accepted only if two half steps land on the same lift.

    Endpoint tests alone cannot see a step that skips a whole half-turn or
    winding, since the configuration then returns to the same set.
    """
    end = _sample(loop, t + dt)
    full = _try_step(b, W, *end)
    if full is None:
        return None
    half = _try_step(b, W, *_sample(loop, t + dt / 2))
    if half is None:
        return None
    second = _try_step(half[0], half[1], *end)
    if second is None:
        return None
    if not (np.array_equal(full[0], second[0]) and np.array_equal(full[1], second[1])):
        return None
    return full


def continue_loop(loop: LoopSpec, max_refinement: int = MAX_REFINEMENT):
    """Continue the diagonal lift around ``loop``.

    Returns ``(g, trace)`` with ``g . (lift at t=0) = (lift at t=1)``.
    """
    b0, r0 = loop.at(0.0)
    _check_config(b0, r0, loop.delta, 0.0)
    b = np.asarray(b0, dtype=complex)
    W = principal_sqrt(r0)
    start = BWPair(np.diag(b), W)

    trace = ContinuationTrace()
    trace.t.append(0.0)
    trace.poles.append(b.copy())
    trace.W.append(W.copy())
    trace.assignments.append(np.arange(b.size))
    trace.branches.append(np.ones(b.size, dtype=int))

    base_dt = 1.0 / max(1, int(loop.samples))
    t = 0.0
    dt = base_dt
    while t < 1.0:
        level = 0
        while True:
            dt = min(dt, 1.0 - t)
            t_new = t + dt
            step = _checked_step(loop, b, W, t, dt)
            if step is not None:
                break
            level += 1
            trace.refinements += 1
            if level > max_refinement:
                raise RefinementExhausted(f"step halving exceeded {max_refinement} levels at t={t:.6g}")
            dt /= 2
        b, W, match, branch = step
        t = t_new
        trace.t.append(t)
        trace.poles.append(b.copy())
        trace.W.append(W.copy())
        trace.assignments.append(match)
        trace.branches.append(branch)
        dt = min(base_dt, 2 * dt)

    end = BWPair(np.diag(b), W)
    try:
        g = relate(start, end, loop.delta)
    except Exception as exc:
        raise InvalidLoop(f"end of the continuation is not over the base map: {exc}") from exc
    trace.result = g
    return g, trace


def monodromy(loop: LoopSpec) -> SignedPermutation:
    return continue_loop(loop)[0]


def expected_image(word: Sequence[Generator], k: int) -> SignedPermutation:
    """Image of a generator word under the natural map onto the signed permutations.

    ``sigma_j -> (j j+1)`` with trivial signs and ``wind_i -> flip at i``,
    multiplied left to right in traversal order.
    """
    g = SignedPermutation.identity(k)
    for gen in word:
        if gen.gen == "braid":
            if not 1 <= gen.index <= k - 1:
                raise ValueError(f"braid generator {gen.index} invalid for k={k}")
            h = SignedPermutation.transposition(k, gen.index - 1)
        else:
            if not 1 <= gen.index <= k:
                raise ValueError(f"wind generator {gen.index} invalid for k={k}")
            h = SignedPermutation.flip(k, gen.index - 1)
        g = compose(g, h)
    return g


def roots_of_unity_base(k: int, residue: complex = 1.0, delta: float = DEFAULT_DELTA) -> PartialFractions:
    poles = np.exp(2j * np.pi * np.arange(k) / k)
    return PartialFractions(poles, np.full(k, residue, dtype=complex), delta=delta)
