"""Frames on the represented spaces and every frame-level computation.

A frame is a rank-indexed family of pairs (a_n, b_n): a vector in the space
and a represented functional on it.  Everything here is built from two
primitives the space descriptors provide -- a norm on each side and the
duality pairing -- so the same code runs the sequence-space, dyadic-grid and
amalgam families.

Conventions used throughout:

* Every operation takes an explicit truncation N; nothing pretends to sum an
  infinite series.
* Every stochastic operation takes a seed, and the randomness of sample k is
  derived from (seed, purpose, k), so results do not depend on evaluation
  order or on how many workers ran the loop.
* Unit-ball sample streams are keyed by the *ball* they live in, not by the
  role (primal/dual) they play.  A frame and its dual frame therefore consume
  mirrored streams, which makes the matched-budget duality comparison an
  honest like-for-like check.
* Sums of nonnegative terms go through ``math.fsum`` (exactly rounded), so
  monotonicity in N and in sample count holds as stated, not just up to
  rounding luck.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from .spaces import (
    AmalgamFunction,
    DualSeq,
    GridFunction,
    SeqVector,
    amalgam_norm,
    conjugate_exponent,
    dyadic_step_coefficients,
    embed_tilde,
    grid_lp_norm,
    linf_norm,
    lp_norm,
    pairing_phi,
    pairing_phi_pq,
    pairing_psi,
    translate,
)

__all__ = [
    "DualRepresentationError",
    "SequenceSpace",
    "DualSequenceSpace",
    "GridSpace",
    "AmalgamSpace",
    "Frame",
    "ProbeResult",
    "FrameReport",
    "ProbeConfig",
    "UnconditionalResult",
    "derive_rng",
    "ball_pair_sweep",
    "frame_pair",
    "analysis_coefficient",
    "synthesis_partial",
    "coefficient_sequence",
    "coefficient_products",
    "besselian_sum",
    "estimate_frame_constant",
    "dual_frame",
    "unconditional_probe",
    "unconditional_deviation",
    "shrinking_tail",
    "boundedly_complete_tail",
    "duality_constant_check",
    "reflexivity_probe",
    "covering_truncation",
    "frame_has_zero_elements",
]


class DualRepresentationError(ValueError):
    """Raised when a dual or bidual object has no finite representation."""


# ---------------------------------------------------------------------------
# seeded randomness
# ---------------------------------------------------------------------------


def derive_rng(seed: int, *keys) -> np.random.Generator:
    """Independent generator for one sample, derived from (seed, keys).

    The key material is hashed, so streams for different purposes or sample
    indices never collide and never depend on how many draws other streams
    made.  This is what keeps reports identical under parallel execution.
    """
    import hashlib

    h = hashlib.sha256()
    h.update(str(int(seed)).encode())
    for k in keys:
        h.update(b"\x1f")
        h.update(str(k).encode())
    entropy = int.from_bytes(h.digest()[:16], "little")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


# ---------------------------------------------------------------------------
# unit-ball samplers (shared between the spaces and their duals)
# ---------------------------------------------------------------------------

_SEQ_SAMPLE_MAX_INDEX = 24
_SEQ_SAMPLE_MAX_SUPPORT = 8
_SEQ_EXTREME_INDICES = 6
_SEQ_SIGN_PREFIX = 4
_GRID_EXTREME_ATOMS = 32
_AMALGAM_EXTREME_ATOMS_PER_CELL = 8
# The sup-norm sampler stays strictly inside the ball so random draws can
# never beat the exact extreme-point value 1 by a rounding ulp.
_SUP_BALL_RADIUS = 0.99


def _random_l1_point(rng: np.random.Generator) -> SeqVector:
    size = int(rng.integers(1, _SEQ_SAMPLE_MAX_SUPPORT + 1))
    idx = rng.choice(_SEQ_SAMPLE_MAX_INDEX, size=size, replace=False) + 1
    vals = rng.standard_normal(size)
    total = math.fsum(abs(float(v)) for v in vals)
    if total == 0.0:
        return SeqVector()
    return SeqVector(
        tuple(sorted((int(i), float(v) / total) for i, v in zip(idx, vals)))
    )


def _random_linf_point(rng: np.random.Generator) -> DualSeq:
    width = int(rng.integers(1, _SEQ_SAMPLE_MAX_INDEX + 1))
    vals = rng.uniform(-1.0, 1.0, size=width)
    tail = float(rng.uniform(-1.0, 1.0))
    peak = max(float(np.max(np.abs(vals))), abs(tail))
    if peak == 0.0:
        return DualSeq()
    scale = _SUP_BALL_RADIUS / peak
    return DualSeq(tuple(scale * float(v) for v in vals), scale * tail)


def _random_grid_point(rng: np.random.Generator, level: int, p: float) -> GridFunction:
    f = GridFunction(level, rng.standard_normal(2**level))
    nrm = grid_lp_norm(f, p)
    if nrm == 0.0:
        return GridFunction.zero(level)
    return (1.0 / nrm) * f


def _random_amalgam_point(
    rng: np.random.Generator, window: tuple[int, int], level: int, p: float, q: float
) -> AmalgamFunction:
    lo, hi = window
    cells = {
        m: GridFunction(level, rng.standard_normal(2**level))
        for m in range(lo, hi + 1)
    }
    f = AmalgamFunction(window, cells)
    nrm = amalgam_norm(f, p, q)
    if nrm == 0.0:
        return AmalgamFunction.zero(window, level)
    return (1.0 / nrm) * f


def _l1_extreme_points() -> tuple[SeqVector, ...]:
    out = []
    for k in range(1, _SEQ_EXTREME_INDICES + 1):
        out.append(SeqVector.basis(k))
        out.append(-SeqVector.basis(k))
    return tuple(out)


def _linf_extreme_points() -> tuple[DualSeq, ...]:
    # The constant-tail all-ones pattern goes first: it is the canonical
    # witness the shrinking probe wants to see checked before anything else.
    out = [DualSeq.all_ones()]
    for tail in (1.0, -1.0):
        for bits in range(2**_SEQ_SIGN_PREFIX):
            prefix = tuple(
                1.0 if bits & (1 << j) else -1.0 for j in range(_SEQ_SIGN_PREFIX)
            )
            out.append(DualSeq(prefix, tail))
    return tuple(out)


def _grid_extreme_points(level: int, p: float) -> tuple[GridFunction, ...]:
    out = []
    for n in range(1, min(2**level, _GRID_EXTREME_ATOMS) + 1):
        f = GridFunction(level, dyadic_step_coefficients(level, n))
        out.append((1.0 / grid_lp_norm(f, p)) * f)
    return tuple(out)


def _amalgam_extreme_points(
    window: tuple[int, int], level: int, p: float
) -> tuple[AmalgamFunction, ...]:
    lo, hi = window
    out = []
    for m in range(lo, hi + 1):
        for n in range(1, min(2**level, _AMALGAM_EXTREME_ATOMS_PER_CELL) + 1):
            f = GridFunction(level, dyadic_step_coefficients(level, n))
            out.append(translate(embed_tilde((1.0 / grid_lp_norm(f, p)) * f), m))
    return tuple(out)


# ---------------------------------------------------------------------------
# space descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceSpace:
    """The summable-sequence space: SeqVector elements, DualSeq functionals."""

    def describe(self) -> str:
        return "l1 sequence space"

    def contains(self, x) -> bool:
        return isinstance(x, SeqVector)

    def dual_contains(self, xstar) -> bool:
        return isinstance(xstar, DualSeq)

    def norm(self, x: SeqVector) -> float:
        return lp_norm(x, 1.0)

    def dual_norm(self, xstar: DualSeq) -> float:
        return linf_norm(xstar)

    def apply_dual(self, xstar: DualSeq, x: SeqVector) -> float:
        return pairing_psi(xstar, x)

    def zero(self) -> SeqVector:
        return SeqVector()

    def dual_zero(self) -> DualSeq:
        return DualSeq()

    def dual_space(self) -> "DualSequenceSpace":
        return DualSequenceSpace()

    @property
    def bidual_representable(self) -> bool:
        # The bidual of l1 is the dual of l-infinity, which has no finite
        # representation here; see DualSequenceSpace.dual_space.
        return False

    @property
    def ball_key(self) -> tuple:
        return ("seq-l1",)

    @property
    def dual_ball_key(self) -> tuple:
        return ("seq-linf",)

    def random_ball_point(self, rng) -> SeqVector:
        return _random_l1_point(rng)

    def random_dual_ball_point(self, rng) -> DualSeq:
        return _random_linf_point(rng)

    def extreme_ball_points(self) -> tuple[SeqVector, ...]:
        return _l1_extreme_points()

    def extreme_dual_ball_points(self) -> tuple[DualSeq, ...]:
        return _linf_extreme_points()

    def element_to_json(self, x: SeqVector):
        return x.to_json_obj()

    def element_from_json(self, obj) -> SeqVector:
        return SeqVector.from_json_obj(obj)

    def dual_element_from_json(self, obj) -> DualSeq:
        return DualSeq.from_json_obj(obj)


@dataclass(frozen=True)
class DualSequenceSpace:
    """Bounded sequences with sup norm; functionals represented by SeqVector.

    This is where the dual of the canonical sequence frame lives.  Only the
    summable part of its dual is representable, which is all the dual frame
    needs; the full dual has no finite description, so ``dual_space`` refuses.
    """

    def describe(self) -> str:
        return "bounded sequence space (sup norm)"

    def contains(self, x) -> bool:
        return isinstance(x, DualSeq)

    def dual_contains(self, xstar) -> bool:
        return isinstance(xstar, SeqVector)

    def norm(self, x: DualSeq) -> float:
        return linf_norm(x)

    def dual_norm(self, xstar: SeqVector) -> float:
        return lp_norm(xstar, 1.0)

    def apply_dual(self, xstar: SeqVector, x: DualSeq) -> float:
        return pairing_psi(x, xstar)

    def zero(self) -> DualSeq:
        return DualSeq()

    def dual_zero(self) -> SeqVector:
        return SeqVector()

    def dual_space(self):
        raise DualRepresentationError(
            "the dual of the bounded-sequence space has no finite representation"
        )

    @property
    def bidual_representable(self) -> bool:
        return False

    @property
    def ball_key(self) -> tuple:
        return ("seq-linf",)

    @property
    def dual_ball_key(self) -> tuple:
        return ("seq-l1",)

    def random_ball_point(self, rng) -> DualSeq:
        return _random_linf_point(rng)

    def random_dual_ball_point(self, rng) -> SeqVector:
        return _random_l1_point(rng)

    def extreme_ball_points(self) -> tuple[DualSeq, ...]:
        return _linf_extreme_points()

    def extreme_dual_ball_points(self) -> tuple[SeqVector, ...]:
        return _l1_extreme_points()

    def element_to_json(self, x: DualSeq):
        return x.to_json_obj()

    def element_from_json(self, obj) -> DualSeq:
        return DualSeq.from_json_obj(obj)

    def dual_element_from_json(self, obj) -> SeqVector:
        return SeqVector.from_json_obj(obj)


@dataclass(frozen=True)
class GridSpace:
    """L_p[0,1] modeled on the level-J dyadic grid; dual elements act by
    integration and carry the conjugate exponent's norm."""

    p: float
    level: int

    def __post_init__(self) -> None:
        if not 1.0 < self.p < math.inf:
            raise ValueError(f"grid space requires p in (1, inf), got {self.p}")
        if self.level < 0:
            raise ValueError(f"grid level must be >= 0, got {self.level}")

    def describe(self) -> str:
        return f"L_p[0,1] on the level-{self.level} dyadic grid (p={self.p:g})"

    def contains(self, x) -> bool:
        return isinstance(x, GridFunction)

    def dual_contains(self, xstar) -> bool:
        return isinstance(xstar, GridFunction)

    def norm(self, x: GridFunction) -> float:
        return grid_lp_norm(x, self.p)

    def dual_norm(self, xstar: GridFunction) -> float:
        return grid_lp_norm(xstar, conjugate_exponent(self.p))

    def apply_dual(self, xstar: GridFunction, x: GridFunction) -> float:
        return pairing_phi(xstar, x)

    def zero(self) -> GridFunction:
        return GridFunction.zero(self.level)

    dual_zero = zero

    def dual_space(self) -> "GridSpace":
        return GridSpace(conjugate_exponent(self.p), self.level)

    @property
    def bidual_representable(self) -> bool:
        return True  # reflexive: biduals are represented by primal elements

    @property
    def ball_key(self) -> tuple:
        return ("grid", self.level, self.p)

    @property
    def dual_ball_key(self) -> tuple:
        return ("grid", self.level, conjugate_exponent(self.p))

    def random_ball_point(self, rng) -> GridFunction:
        return _random_grid_point(rng, self.level, self.p)

    def random_dual_ball_point(self, rng) -> GridFunction:
        return _random_grid_point(rng, self.level, conjugate_exponent(self.p))

    def extreme_ball_points(self) -> tuple[GridFunction, ...]:
        return _grid_extreme_points(self.level, self.p)

    def extreme_dual_ball_points(self) -> tuple[GridFunction, ...]:
        return _grid_extreme_points(self.level, conjugate_exponent(self.p))

    def element_to_json(self, x: GridFunction):
        return x.to_json_obj()

    def element_from_json(self, obj) -> GridFunction:
        return GridFunction.from_json_obj(obj)

    dual_element_from_json = element_from_json


@dataclass(frozen=True)
class AmalgamSpace:
    """The amalgam space on a finite window of unit cells at a fixed level."""

    p: float
    q: float
    window: tuple[int, int]
    level: int

    def __post_init__(self) -> None:
        for name, v in (("p", self.p), ("q", self.q)):
            if not 1.0 < v < math.inf:
                raise ValueError(f"amalgam space requires {name} in (1, inf), got {v}")
        lo, hi = self.window
        if int(lo) > int(hi):
            raise ValueError(f"window must satisfy m_lo <= m_hi, got {self.window}")
        object.__setattr__(self, "window", (int(lo), int(hi)))
        if self.level < 0:
            raise ValueError(f"grid level must be >= 0, got {self.level}")

    def describe(self) -> str:
        lo, hi = self.window
        return (
            f"amalgam (L_p, l_q) on cells [{lo}, {hi}] at level {self.level} "
            f"(p={self.p:g}, q={self.q:g})"
        )

    def contains(self, x) -> bool:
        return isinstance(x, AmalgamFunction)

    def dual_contains(self, xstar) -> bool:
        return isinstance(xstar, AmalgamFunction)

    def norm(self, x: AmalgamFunction) -> float:
        return amalgam_norm(x, self.p, self.q)

    def dual_norm(self, xstar: AmalgamFunction) -> float:
        return amalgam_norm(xstar, conjugate_exponent(self.p), conjugate_exponent(self.q))

    def apply_dual(self, xstar: AmalgamFunction, x: AmalgamFunction) -> float:
        return pairing_phi_pq(xstar, x)

    def zero(self) -> AmalgamFunction:
        return AmalgamFunction.zero(self.window, self.level)

    dual_zero = zero

    def dual_space(self) -> "AmalgamSpace":
        return AmalgamSpace(
            conjugate_exponent(self.p), conjugate_exponent(self.q), self.window, self.level
        )

    @property
    def bidual_representable(self) -> bool:
        return True

    @property
    def ball_key(self) -> tuple:
        return ("amalgam", self.level, self.window, self.p, self.q)

    @property
    def dual_ball_key(self) -> tuple:
        return (
            "amalgam",
            self.level,
            self.window,
            conjugate_exponent(self.p),
            conjugate_exponent(self.q),
        )

    def random_ball_point(self, rng) -> AmalgamFunction:
        return _random_amalgam_point(rng, self.window, self.level, self.p, self.q)

    def random_dual_ball_point(self, rng) -> AmalgamFunction:
        return _random_amalgam_point(
            rng,
            self.window,
            self.level,
            conjugate_exponent(self.p),
            conjugate_exponent(self.q),
        )

    def extreme_ball_points(self) -> tuple[AmalgamFunction, ...]:
        return _amalgam_extreme_points(self.window, self.level, self.p)

    def extreme_dual_ball_points(self) -> tuple[AmalgamFunction, ...]:
        return _amalgam_extreme_points(
            self.window, self.level, conjugate_exponent(self.p)
        )

    def element_to_json(self, x: AmalgamFunction):
        return x.to_json_obj()

    def element_from_json(self, obj) -> AmalgamFunction:
        return AmalgamFunction.from_json_obj(obj)

    dual_element_from_json = element_from_json


# ---------------------------------------------------------------------------
# the frame itself
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Frame:
    """A rank-indexed family of (vector, functional) pairs on one space.

    ``generator`` must be deterministic: rank n always yields the same pair.
    ``max_rank`` bounds the representable ranks (None = every rank is valid).
    ``full_truncation`` is the rank horizon after which every representable
    element of the space is reconstructed exactly, when such a horizon exists.

    The three optional ``*_batch`` callables are vectorized equivalents of
    the generic rank-by-rank paths; they must agree with the generic route to
    float accuracy and exist purely for speed.
    """

    space: object
    generator: Callable[[int], tuple]
    label: str
    max_rank: Optional[int] = None
    full_truncation: Optional[int] = None
    covering: Optional[Callable] = None  # element -> smallest exact truncation
    coeff_batch: Optional[Callable] = None  # (x, N) -> ndarray of b_n(x)
    eval_batch: Optional[Callable] = None  # (xstar, N) -> ndarray of xstar(a_n)
    synth_batch: Optional[Callable] = None  # ndarray of coefficients -> element


def frame_pair(F: Frame, n: int) -> tuple:
    """The rank-n pair (a_n, b_n), with rank validation."""
    if n < 1:
        raise ValueError(f"frame ranks start at 1, got {n}")
    if F.max_rank is not None and n > F.max_rank:
        raise ValueError(
            f"frame {F.label!r} defines ranks 1..{F.max_rank}, got {n}"
        )
    return F.generator(n)


def _require_element(F: Frame, x) -> None:
    if not F.space.contains(x):
        raise ValueError(
            f"{type(x).__name__} is not an element of {F.space.describe()}"
        )


def _require_dual(F: Frame, xstar) -> None:
    if not F.space.dual_contains(xstar):
        raise ValueError(
            f"{type(xstar).__name__} does not represent a functional on "
            f"{F.space.describe()}"
        )


def analysis_coefficient(F: Frame, n: int, x) -> float:
    """The n-th coefficient b_n(x), via the space's exact pairing."""
    _require_element(F, x)
    _a, b = frame_pair(F, n)
    return float(F.space.apply_dual(b, x))


def synthesis_partial(F: Frame, x, N: int):
    """The partial expansion S_N x = sum_{n<=N} b_n(x) a_n."""
    _require_element(F, x)
    if N < 0:
        raise ValueError(f"truncation must be >= 0, got {N}")
    if N == 0:
        return F.space.zero()
    if F.coeff_batch is not None and F.synth_batch is not None:
        return F.synth_batch(F.coeff_batch(x, N))
    acc = F.space.zero()
    for n in range(1, N + 1):
        a, b = frame_pair(F, n)
        acc = acc + float(F.space.apply_dual(b, x)) * a
    return acc


def coefficient_products(F: Frame, x, xstar, N: int) -> np.ndarray:
    """Array of the N products b_n(x) * xstar(a_n), n = 1..N."""
    _require_element(F, x)
    _require_dual(F, xstar)
    if N < 1:
        raise ValueError(f"truncation must be >= 1, got {N}")
    if F.max_rank is not None and N > F.max_rank:
        raise ValueError(
            f"frame {F.label!r} defines ranks 1..{F.max_rank}, got truncation {N}"
        )
    if F.coeff_batch is not None and F.eval_batch is not None:
        return np.asarray(F.coeff_batch(x, N)) * np.asarray(F.eval_batch(xstar, N))
    out = np.empty(N)
    for n in range(1, N + 1):
        a, b = frame_pair(F, n)
        out[n - 1] = float(F.space.apply_dual(b, x)) * float(
            F.space.apply_dual(xstar, a)
        )
    return out


def coefficient_sequence(F: Frame, x, xstar, N: int) -> SeqVector:
    """The first N coefficient products as a finitely supported sequence."""
    return SeqVector.from_dense(coefficient_products(F, x, xstar, N))


def besselian_sum(F: Frame, x, xstar, N: int) -> float:
    """sum_{n<=N} |b_n(x)| |xstar(a_n)|, exactly rounded; nondecreasing in N."""
    return lp_norm(coefficient_sequence(F, x, xstar, N), 1.0)


def ball_pair_sweep(space, samples: int, seed: int) -> Iterator[tuple]:
    """Deterministic sweep of unit-ball pairs: extreme points, then samples.

    This single sweep is shared by the constant estimate and by the bound
    checks run against it, so the estimate's budget is always a superset of
    the checked pairs.  Random draws are keyed by the ball's identity, which
    mirrors the streams between a frame and its dual frame.
    """
    if samples < 0:
        raise ValueError(f"sample count must be >= 0, got {samples}")
    for x in space.extreme_ball_points():
        for xstar in space.extreme_dual_ball_points():
            yield x, xstar
    for k in range(samples):
        x = space.random_ball_point(derive_rng(seed, "ball", *space.ball_key, k))
        xstar = space.random_dual_ball_point(
            derive_rng(seed, "ball", *space.dual_ball_key, k)
        )
        yield x, xstar


def estimate_frame_constant(F: Frame, N: int, samples: int, seed: int) -> float:
    """Max of besselian_sum over the deterministic unit-ball pair sweep.

    A lower bound for the frame constant at truncation N, nondecreasing in
    both N and the sample count (per-sample seeding keeps earlier samples
    fixed as the budget grows).
    """
    if samples < 1:
        raise ValueError(f"sample count must be >= 1, got {samples}")
    best = 0.0
    for x, xstar in ball_pair_sweep(F.space, samples, seed):
        best = max(best, besselian_sum(F, x, xstar, N))
    return best


def dual_frame(F: Frame) -> Frame:
    """The frame ((b_n, a_n)) on the dual space.

    Vectors and functionals swap roles; on reflexive spaces the bidual
    element attached to a_n is represented by a_n itself.  Raises
    DualRepresentationError when the dual space has no finite representation
    for the functionals this would need.
    """
    dspace = F.space.dual_space()

    def gen(n: int) -> tuple:
        a, b = frame_pair(F, n)
        return b, a

    return Frame(
        space=dspace,
        generator=gen,
        label=F.label + "*",
        max_rank=F.max_rank,
        full_truncation=F.full_truncation,
        coeff_batch=F.eval_batch,
        eval_batch=F.coeff_batch,
    )


# ---------------------------------------------------------------------------
# unconditionality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnconditionalResult:
    """Outcome of the permutation/sign probe at one truncation."""

    truncation: int
    trials: int
    deviation: float  # max over trials of ||S_{pi,N} x - S_N x||
    sign_flip_norm: float  # max over trials of ||sum eps_n b_n(x) a_n||


def _ordered_partial(F: Frame, coeffs: list[float], order: Iterable[int]):
    """Accumulate sum of coeffs[n-1] * a_n in exactly the given rank order."""
    acc = F.space.zero()
    for n in order:
        a, _b = frame_pair(F, n)
        acc = acc + coeffs[n - 1] * a
    return acc


def unconditional_probe(
    F: Frame, x, N: int, trials: int, seed: int
) -> UnconditionalResult:
    """Rearrangement sensitivity of the N-term expansion of x.

    Each trial draws a permutation of {1..N} and a sign pattern.  The
    deviation compares the permuted accumulation against the identity-order
    accumulation computed the same way, so it isolates the effect of the
    ordering alone.  The sign-flipped partial-sum norm is recorded as the
    companion boundedness figure.
    """
    _require_element(F, x)
    if N < 1:
        raise ValueError(f"truncation must be >= 1, got {N}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    coeffs = [analysis_coefficient(F, n, x) for n in range(1, N + 1)]
    base = _ordered_partial(F, coeffs, range(1, N + 1))
    deviation = 0.0
    flip_norm = 0.0
    for t in range(trials):
        rng = derive_rng(seed, "unconditional", t)
        perm = [int(v) + 1 for v in rng.permutation(N)]
        signs = [int(v) * 2 - 1 for v in rng.integers(0, 2, size=N)]
        permuted = _ordered_partial(F, coeffs, perm)
        deviation = max(deviation, F.space.norm(permuted - base))
        flipped = _ordered_partial(
            F, [s * c for s, c in zip(signs, coeffs)], range(1, N + 1)
        )
        flip_norm = max(flip_norm, F.space.norm(flipped))
    return UnconditionalResult(
        truncation=N, trials=trials, deviation=deviation, sign_flip_norm=flip_norm
    )


def unconditional_deviation(F: Frame, x, N: int, trials: int, seed: int) -> float:
    """Max over trials of ||S_{pi,N} x - S_N x||; see unconditional_probe."""
    return unconditional_probe(F, x, N, trials, seed).deviation


# ---------------------------------------------------------------------------
# shrinking / boundedly complete tails
# ---------------------------------------------------------------------------


def shrinking_tail(F: Frame, xstar, N: int, M: int) -> float:
    """Dual-space norm of sum_{N<n<=M} xstar(a_n) b_n."""
    _require_dual(F, xstar)
    if not 0 <= N < M:
        raise ValueError(f"need horizon M > truncation N >= 0, got N={N}, M={M}")
    acc = F.space.dual_zero()
    for n in range(N + 1, M + 1):
        a, b = frame_pair(F, n)
        acc = acc + float(F.space.apply_dual(xstar, a)) * b
    return F.space.dual_norm(acc)


def boundedly_complete_tail(F: Frame, xss, N: int, M: int) -> float:
    """Primal norm of sum_{N<n<=M} xss(b_n) a_n, for xss given through the
    primal (reflexive identification).  Rejected when biduals have no finite
    representation on F's space."""
    if not F.space.bidual_representable:
        raise DualRepresentationError(
            f"bidual elements of {F.space.describe()} have no finite representation"
        )
    _require_element(F, xss)
    if not 0 <= N < M:
        raise ValueError(f"need horizon M > truncation N >= 0, got N={N}, M={M}")
    acc = F.space.zero()
    for n in range(N + 1, M + 1):
        a, b = frame_pair(F, n)
        acc = acc + float(F.space.apply_dual(b, xss)) * a
    return F.space.norm(acc)


def duality_constant_check(
    F: Frame, N: int, samples: int, seed: int
) -> tuple[float, float]:
    """(constant estimate of F, constant estimate of the dual frame).

    Both sides use the same truncation, the same budget and mirrored
    seed-derived sample streams, so the comparison is like for like.
    """
    Fdual = dual_frame(F)
    return (
        estimate_frame_constant(F, N, samples, seed),
        estimate_frame_constant(Fdual, N, samples, seed),
    )


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeResult:
    """One measured figure: (metric name, truncation, value, pass/fail).

    ``passed`` is None for purely informational rows (no pass criterion).
    """

    name: str
    truncation: int
    value: float
    passed: Optional[bool] = None
    tolerance: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "truncation", int(self.truncation))
        object.__setattr__(self, "value", float(self.value))
        if self.passed is not None:
            object.__setattr__(self, "passed", bool(self.passed))
        if self.tolerance is not None:
            object.__setattr__(self, "tolerance", float(self.tolerance))
        if not math.isfinite(self.value):
            raise ValueError(f"probe {self.name!r} produced non-finite {self.value}")

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "truncation": self.truncation,
            "value": self.value,
            "passed": self.passed,
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_json_obj(cls, obj) -> "ProbeResult":
        return cls(
            name=obj["name"],
            truncation=int(obj["truncation"]),
            value=float(obj["value"]),
            passed=obj["passed"],
            tolerance=obj["tolerance"],
        )


@dataclass(frozen=True)
class FrameReport:
    """Everything one suite run measured on one frame.

    Reproducible from (label, truncation, seed, samples): no timestamps, no
    environment state.  Serializes to JSON and to flat CSV rows of
    (suite, frame, N, metric, value, pass).
    """

    label: str
    suite: str
    truncation: int
    constant: float
    seed: int
    samples: int
    probes: tuple[ProbeResult, ...] = ()
    verdict: Optional[str] = None
    flags: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "truncation", int(self.truncation))
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "samples", int(self.samples))
        if not math.isfinite(self.constant) or self.constant < 0.0:
            raise ValueError(f"constant must be finite and >= 0, got {self.constant}")
        object.__setattr__(self, "probes", tuple(self.probes))
        object.__setattr__(self, "flags", tuple(self.flags))
        object.__setattr__(self, "notes", tuple(self.notes))

    def all_pass(self) -> bool:
        return all(p.passed is not False for p in self.probes)

    def to_json_obj(self) -> dict:
        return {
            "label": self.label,
            "suite": self.suite,
            "truncation": self.truncation,
            "constant": self.constant,
            "seed": self.seed,
            "samples": self.samples,
            "verdict": self.verdict,
            "flags": list(self.flags),
            "notes": list(self.notes),
            "probes": [p.to_json_obj() for p in self.probes],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "FrameReport":
        return cls(
            label=obj["label"],
            suite=obj["suite"],
            truncation=int(obj["truncation"]),
            constant=float(obj["constant"]),
            seed=int(obj["seed"]),
            samples=int(obj["samples"]),
            probes=tuple(ProbeResult.from_json_obj(p) for p in obj["probes"]),
            verdict=obj["verdict"],
            flags=tuple(obj["flags"]),
            notes=tuple(obj["notes"]),
        )

    def csv_rows(self) -> list[list[str]]:
        rows = []
        for p in self.probes:
            passed = "" if p.passed is None else ("pass" if p.passed else "fail")
            rows.append(
                [self.suite, self.label, str(p.truncation), p.name, repr(p.value), passed]
            )
        return rows


# ---------------------------------------------------------------------------
# the reflexivity probe
# ---------------------------------------------------------------------------

VERDICT_CONSISTENT = "consistent with reflexive"
VERDICT_NON_SHRINKING = "non-shrinking witness found"
VERDICT_NON_BOUNDEDLY_COMPLETE = "non-boundedly-complete witness found"
VERDICT_INCONCLUSIVE = "inconclusive"
VERDICT_DEGENERATE = "degenerate"


@dataclass(frozen=True)
class ProbeConfig:
    """Settings for reflexivity_probe."""

    schedule: tuple[int, ...] = (4, 16, 64, 256)
    samples: int = 8  # random candidates per leg
    seed: int = 42
    tail_tol: float = 1e-6
    horizon_factor: int = 2
    extreme_candidates: int = 4

    def __post_init__(self) -> None:
        sched = tuple(int(n) for n in self.schedule)
        if not sched or any(n < 1 for n in sched):
            raise ValueError(f"schedule must hold positive truncations, got {sched}")
        if any(a >= b for a, b in zip(sched, sched[1:])):
            raise ValueError(f"schedule must be strictly increasing, got {sched}")
        object.__setattr__(self, "schedule", sched)
        if self.samples < 0:
            raise ValueError(f"samples must be >= 0, got {self.samples}")
        if self.tail_tol <= 0:
            raise ValueError(f"tail tolerance must be positive, got {self.tail_tol}")
        if self.horizon_factor < 2:
            raise ValueError(
                f"horizon factor must be >= 2, got {self.horizon_factor}"
            )


def covering_truncation(F: Frame, x) -> Optional[int]:
    """Smallest truncation after which the expansion of x is exact, if the
    frame knows one for this element; None when no finite horizon applies."""
    _require_element(F, x)
    if F.covering is None:
        return None
    return F.covering(x)


def frame_has_zero_elements(F: Frame, upto: int) -> bool:
    """True when some pair at rank <= upto has a zero vector or functional."""
    horizon = upto if F.max_rank is None else min(upto, F.max_rank)
    for n in range(1, horizon + 1):
        a, b = frame_pair(F, n)
        if F.space.norm(a) == 0.0 or F.space.dual_norm(b) == 0.0:
            return True
    return False


def _frame_all_zero(F: Frame, upto: int) -> bool:
    horizon = upto if F.max_rank is None else min(upto, F.max_rank)
    for n in range(1, horizon + 1):
        a, b = frame_pair(F, n)
        if F.space.norm(a) != 0.0 or F.space.dual_norm(b) != 0.0:
            return False
    return horizon >= 1


def _clamped_tail(tail_fn, F: Frame, candidate, N: int, M: int) -> float:
    # Ranks past the frame's representable range pair every representable
    # input to a zero coefficient (finer oscillations integrate level-bounded
    # data to nothing), so clamping the horizon there is exact, not an
    # approximation.
    if F.max_rank is not None:
        M = min(M, F.max_rank)
    if M <= N:
        return 0.0
    return tail_fn(F, candidate, N, M)


def _leg_state(values: list[float], tol: float) -> str:
    first, last = values[0], values[-1]
    if last <= tol:
        return "ok"
    if last >= 0.5 * first:
        return "witness"  # the tail stalled instead of decaying
    return "undecided"


def reflexivity_probe(
    F: Frame, config: ProbeConfig = ProbeConfig(), suite: str = "reflexivity"
) -> FrameReport:
    """Decay evidence for the shrinking and boundedly-complete properties.

    For each scheduled truncation N the probe measures the worst tail norm
    over a fixed candidate family (deterministic extreme points first, then
    seeded random draws) with horizon M = horizon_factor * N.  Verdicts are
    evidence, never proofs: tails that decay below the tolerance are
    "consistent with reflexive"; a tail that stalls is a witness; anything
    in between is inconclusive.  Frames that are identically zero up to the
    probe horizon are flagged degenerate.
    """
    cfg = config
    schedule = cfg.schedule
    horizon = cfg.horizon_factor * schedule[-1]
    space = F.space

    probes: list[ProbeResult] = []
    notes: list[str] = []
    flags: list[str] = []

    scan = min(horizon, 512)
    if frame_has_zero_elements(F, scan):
        flags.append("zero-elements")
    degenerate = _frame_all_zero(F, scan)

    dual_candidates = list(space.extreme_dual_ball_points()[: cfg.extreme_candidates])
    for k in range(cfg.samples):
        dual_candidates.append(
            space.random_dual_ball_point(
                derive_rng(cfg.seed, "probe-dual", *space.dual_ball_key, k)
            )
        )

    shrink_values = []
    for N in schedule:
        worst = max(
            _clamped_tail(shrinking_tail, F, c, N, cfg.horizon_factor * N)
            for c in dual_candidates
        )
        shrink_values.append(worst)
        probes.append(ProbeResult("shrinking-tail", N, worst))
    shrink_state = _leg_state(shrink_values, cfg.tail_tol)

    if space.bidual_representable:
        bidual_candidates = list(space.extreme_ball_points()[: cfg.extreme_candidates])
        for k in range(cfg.samples):
            bidual_candidates.append(
                space.random_ball_point(
                    derive_rng(cfg.seed, "probe-bidual", *space.ball_key, k)
                )
            )
        bc_values = []
        for N in schedule:
            worst = max(
                _clamped_tail(boundedly_complete_tail, F, c, N, cfg.horizon_factor * N)
                for c in bidual_candidates
            )
            bc_values.append(worst)
            probes.append(ProbeResult("boundedly-complete-tail", N, worst))
        bc_state = _leg_state(bc_values, cfg.tail_tol)
    else:
        bc_state = "not representable"
        notes.append(
            "boundedly-complete leg skipped: bidual elements have no finite "
            "representation on this space"
        )

    if degenerate:
        verdict = VERDICT_DEGENERATE
    elif shrink_state == "witness":
        verdict = VERDICT_NON_SHRINKING
        notes.append(
            f"shrinking tail stalls at {shrink_values[-1]:.6g} "
            f"(first candidate is the constant all-ones pattern)"
        )
    elif bc_state == "witness":
        verdict = VERDICT_NON_BOUNDEDLY_COMPLETE
        notes.append(f"boundedly-complete tail stalls at {bc_values[-1]:.6g}")
    elif shrink_state == "ok" and bc_state == "ok":
        verdict = VERDICT_CONSISTENT
    else:
        verdict = VERDICT_INCONCLUSIVE

    probes.append(
        ProbeResult(
            "verdict-conclusive",
            schedule[-1],
            0.0 if verdict == VERDICT_INCONCLUSIVE else 1.0,
            passed=verdict != VERDICT_INCONCLUSIVE,
        )
    )

    return FrameReport(
        label=F.label,
        suite=suite,
        truncation=schedule[-1],
        constant=0.0,
        seed=cfg.seed,
        samples=cfg.samples,
        probes=tuple(probes),
        verdict=verdict,
        flags=tuple(flags),
        notes=tuple(notes),
    )
