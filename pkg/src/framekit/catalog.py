"""The concrete frames: canonical sequence frame, normalized Haar frame on
the dyadic grid, and the translated amalgam frame, plus the index machinery
(Haar generations, the diagonal enumeration of Z x N*) and label parsing.

All three constructions are exact: Haar functions with rank n <= 2^J live on
the level-J grid with no discretization error, and amalgam pairs are integer
translates of zero-extended grid pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .frames import (
    AmalgamSpace,
    Frame,
    GridSpace,
    SequenceSpace,
    frame_pair,
)
from .spaces import (
    AmalgamFunction,
    DualSeq,
    GridFunction,
    SeqVector,
    dyadic_step_coefficients,
    embed_tilde,
    translate,
)

__all__ = [
    "HaarIndex",
    "AmalgamIndex",
    "haar_index",
    "haar_eval",
    "haar_l2_norm",
    "canonical_l1_frame",
    "haar_frame",
    "enumerate_z_cross_n",
    "rank_of_index",
    "amalgam_frame",
    "zero_sequence_frame",
    "frame_from_label",
]


# ---------------------------------------------------------------------------
# Haar indexing and evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HaarIndex:
    """Rank n with its generation m (m = 0 for n = 1; else 2^(m-1) < n <= 2^m)."""

    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"Haar rank must be >= 1, got {self.n}")
        if self.n == 1:
            if self.m != 0:
                raise ValueError("rank 1 has generation 0 by convention")
        elif not 2 ** (self.m - 1) < self.n <= 2**self.m:
            raise ValueError(
                f"generation {self.m} does not match rank {self.n}"
            )


def haar_index(n: int) -> HaarIndex:
    """The generation bookkeeping for rank n."""
    if n < 1:
        raise ValueError(f"Haar rank must be >= 1, got {n}")
    return HaarIndex(n, 0 if n == 1 else (n - 1).bit_length())


def haar_eval(n: int, t: float) -> float:
    """Pointwise value of the n-th Haar function at t in [0, 1].

    Rank 1 is the indicator of [0, 1) (value 0 at t = 1).  For n >= 2 the
    function is +1 then -1 on the two halves of its dyadic support interval
    and 0 elsewhere.
    """
    idx = haar_index(n)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"point must lie in [0, 1], got {t}")
    if n == 1:
        return 1.0 if t < 1.0 else 0.0
    scale = 2.0**idx.m
    lo = (2 * n - 2) / scale - 1.0
    mid = (2 * n - 1) / scale - 1.0
    hi = (2 * n) / scale - 1.0
    if lo <= t < mid:
        return 1.0
    if mid <= t < hi:
        return -1.0
    return 0.0


def haar_l2_norm(n: int) -> float:
    """1 for n = 1, else 2^((1-m)/2) where m is the generation of n."""
    idx = haar_index(n)
    return 1.0 if n == 1 else 2.0 ** (0.5 * (1 - idx.m))


def _normalized_haar_coefficients(level: int, n: int) -> np.ndarray:
    """Level-J coefficients of h_n / ||h_n||_2 (values 0 or +-2^((m-1)/2))."""
    step = dyadic_step_coefficients(level, n)
    if n == 1:
        return step
    return step * 2.0 ** (0.5 * (haar_index(n).m - 1))


# ---------------------------------------------------------------------------
# canonical sequence frame
# ---------------------------------------------------------------------------


def canonical_l1_frame() -> Frame:
    """The pair family (e_n, coordinate functional n) on the sequence space."""
    space = SequenceSpace()

    @lru_cache(maxsize=None)
    def gen(n: int) -> tuple:
        return SeqVector.basis(n), DualSeq.unit_functional(n)

    def coeff_batch(x: SeqVector, N: int) -> np.ndarray:
        out = np.zeros(N)
        for i, v in x.entries:
            if i <= N:
                out[i - 1] = v
        return out

    def eval_batch(mu: DualSeq, N: int) -> np.ndarray:
        out = np.full(N, mu.tail)
        head = min(N, len(mu.prefix))
        out[:head] = mu.prefix[:head]
        return out

    def synth_batch(coeffs: np.ndarray) -> SeqVector:
        return SeqVector.from_dense(coeffs)

    def covering(x: SeqVector) -> int:
        return x.max_index

    return Frame(
        space=space,
        generator=gen,
        label="l1-canonical",
        covering=covering,
        coeff_batch=coeff_batch,
        eval_batch=eval_batch,
        synth_batch=synth_batch,
    )


def zero_sequence_frame() -> Frame:
    """A frame whose every pair is zero; kept constructible so degenerate
    flagging stays testable end to end."""
    space = SequenceSpace()

    def gen(n: int) -> tuple:
        if n < 1:
            raise ValueError(f"frame ranks start at 1, got {n}")
        return SeqVector(), DualSeq()

    def covering(x: SeqVector):
        return 0 if not x.entries else None

    return Frame(space=space, generator=gen, label="zero", covering=covering)


# ---------------------------------------------------------------------------
# normalized Haar frame on the level-J grid
# ---------------------------------------------------------------------------


def haar_frame(p: float, J: int) -> Frame:
    """The normalized Haar family (h_n/||h_n||_2 in both roles) on L_p.

    Ranks run 1..2^J; higher ranks are not representable on the level-J grid
    and are rejected rather than silently refined.
    """
    p = float(p)
    if not 1.0 < p < math.inf:
        raise ValueError(f"Haar frame requires p in (1, inf), got {p}")
    J = int(J)
    if J < 1:
        raise ValueError(f"Haar frame requires level J >= 1, got {J}")

    space = GridSpace(p, J)
    size = 2**J
    rows = np.vstack(
        [_normalized_haar_coefficients(J, n) for n in range(1, size + 1)]
    )
    rows.flags.writeable = False
    label = f"haar:p={p:g}:J={J}"

    @lru_cache(maxsize=None)
    def gen(n: int) -> tuple:
        if not 1 <= n <= size:
            raise ValueError(f"frame {label!r} defines ranks 1..{size}, got {n}")
        g = GridFunction(J, rows[n - 1])
        return g, g

    def _pair_batch(f: GridFunction, N: int) -> np.ndarray:
        # Integrals of the first N rows against f: block-sum f down to the
        # frame level (exact for piecewise constants), then one matvec.
        if not 1 <= N <= size:
            raise ValueError(f"frame {label!r} defines ranks 1..{size}, got {N}")
        if f.level < J:
            f = f.refine(J)
        v = f.coefficients.reshape(size, -1).sum(axis=1)
        return (rows[:N] @ v) * 2.0**-f.level

    def synth_batch(coeffs: np.ndarray) -> GridFunction:
        coeffs = np.asarray(coeffs, dtype=float)
        return GridFunction(J, rows[: coeffs.size].T @ coeffs)

    def covering(f: GridFunction):
        return 2**f.level if f.level <= J else None

    return Frame(
        space=space,
        generator=gen,
        label=label,
        max_rank=size,
        full_truncation=size,
        covering=covering,
        coeff_batch=_pair_batch,
        eval_batch=_pair_batch,
        synth_batch=synth_batch,
    )


# ---------------------------------------------------------------------------
# the diagonal enumeration of Z x N*
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmalgamIndex:
    """Translation m (any integer) and base rank n >= 1."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"base rank must be >= 1, got {self.n}")


def enumerate_z_cross_n(rank: int) -> AmalgamIndex:
    """Rank -> (m, n) along diagonals of constant |m| + n, m ascending.

    Block s holds the 2s - 1 pairs with |m| + n = s, so the blocks end at the
    perfect squares and the map is a bijection.
    """
    if rank < 1:
        raise ValueError(f"enumeration rank must be >= 1, got {rank}")
    s = math.isqrt(rank - 1) + 1
    offset = rank - (s - 1) ** 2 - 1
    m = offset - (s - 1)
    return AmalgamIndex(m=m, n=s - abs(m))


def rank_of_index(m: int, n: int) -> int:
    """Inverse of enumerate_z_cross_n."""
    if n < 1:
        raise ValueError(f"base rank must be >= 1, got {n}")
    s = abs(m) + n
    return (s - 1) ** 2 + (m + s - 1) + 1


def _diagonal_index_arrays(count: int) -> tuple[np.ndarray, np.ndarray]:
    """(m, n) for ranks 1..count as arrays, block by block."""
    ms: list[int] = []
    ns: list[int] = []
    s = 1
    while len(ms) < count:
        block = list(range(-(s - 1), s))
        ms.extend(block)
        ns.extend(s - abs(mm) for mm in block)
        s += 1
    return np.array(ms[:count]), np.array(ns[:count])


# ---------------------------------------------------------------------------
# translated amalgam frame
# ---------------------------------------------------------------------------


def amalgam_frame(base: Frame, q: float, window: tuple[int, int]) -> Frame:
    """Integer translates of the zero-extended base pairs on the amalgam space.

    Rank r maps to (m, n) through the diagonal enumeration.  Pairs whose
    translation falls outside the window, or whose base rank exceeds the base
    frame's range, are zero pairs: they contribute nothing and are flagged in
    reports.  For inputs supported inside the window at the base level this
    loses nothing -- those pairs would carry zero coefficients anyway.
    """
    if not isinstance(base.space, GridSpace):
        raise ValueError("amalgam frames are built over a grid-space base frame")
    q = float(q)
    if not 1.0 < q < math.inf:
        raise ValueError(f"amalgam frame requires q in (1, inf), got {q}")
    lo, hi = window
    if isinstance(lo, float) and not lo.is_integer():
        raise ValueError(f"window bounds must be integers, got {window}")
    if isinstance(hi, float) and not hi.is_integer():
        raise ValueError(f"window bounds must be integers, got {window}")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError(f"window must be bounded, got {window}")
    lo, hi = int(lo), int(hi)

    p = base.space.p
    J = base.space.level
    space = AmalgamSpace(p, q, (lo, hi), J)
    base_max = base.max_rank if base.max_rank is not None else 2**J
    label = f"amalgam:p={p:g}:q={q:g}:J={J}:window={lo},{hi}"
    zero = space.zero()

    def in_range(m: int, n: int) -> bool:
        return lo <= m <= hi and n <= base_max

    @lru_cache(maxsize=None)
    def gen(rank: int) -> tuple:
        idx = enumerate_z_cross_n(rank)
        if not in_range(idx.m, idx.n):
            return zero, zero
        a, b = frame_pair(base, idx.n)
        return (
            translate(embed_tilde(a), idx.m),
            translate(embed_tilde(b), idx.m),
        )

    width = hi - lo + 1
    has_base_batch = base.coeff_batch is not None and base.synth_batch is not None

    def _gather_batch(base_batch, f: AmalgamFunction, N: int) -> np.ndarray:
        ms, ns = _diagonal_index_arrays(N)
        table = np.vstack(
            [base_batch(f.cell(m), base_max) for m in range(lo, hi + 1)]
        )
        valid = (ms >= lo) & (ms <= hi) & (ns <= base_max)
        out = np.zeros(N)
        out[valid] = table[ms[valid] - lo, ns[valid] - 1]
        return out

    coeff_batch = eval_batch = synth_batch = None
    if has_base_batch:

        def coeff_batch(f: AmalgamFunction, N: int) -> np.ndarray:
            return _gather_batch(base.coeff_batch, f, N)

        def eval_batch(g: AmalgamFunction, N: int) -> np.ndarray:
            return _gather_batch(base.eval_batch, g, N)

        def synth_batch(coeffs: np.ndarray) -> AmalgamFunction:
            coeffs = np.asarray(coeffs, dtype=float)
            ms, ns = _diagonal_index_arrays(coeffs.size)
            valid = (ms >= lo) & (ms <= hi) & (ns <= base_max)
            table = np.zeros((width, base_max))
            table[ms[valid] - lo, ns[valid] - 1] = coeffs[valid]
            cells = {
                lo + j: base.synth_batch(table[j]) for j in range(width)
            }
            return AmalgamFunction((lo, hi), cells)

    def covering(f: AmalgamFunction):
        if f.level > J:
            return None
        support = [
            m for m, cell in f.cells.items() if np.any(cell.coefficients != 0.0)
        ]
        if not support:
            return 0
        if any(m < lo or m > hi for m in support):
            return None  # mass outside the window is unreachable
        need = min(2**f.level, base_max)
        return max(rank_of_index(m, need) for m in support)

    return Frame(
        space=space,
        generator=gen,
        label=label,
        full_truncation=max(rank_of_index(m, base_max) for m in range(lo, hi + 1)),
        covering=covering,
        coeff_batch=coeff_batch,
        eval_batch=eval_batch,
        synth_batch=synth_batch,
    )


# ---------------------------------------------------------------------------
# label resolution
# ---------------------------------------------------------------------------


def _parse_fields(parts: list[str], label: str) -> dict[str, str]:
    fields = {}
    for part in parts:
        key, sep, value = part.partition("=")
        if not sep or not value:
            raise ValueError(f"malformed frame label {label!r} near {part!r}")
        fields[key] = value
    return fields


def frame_from_label(label: str) -> Frame:
    """Resolve a frame label string to its catalog construction.

    Known forms: "l1-canonical", "zero", "haar:p=<val>:J=<val>",
    "amalgam:p=<val>:q=<val>:J=<val>:window=<lo>,<hi>".
    """
    if label == "l1-canonical":
        return canonical_l1_frame()
    if label == "zero":
        return zero_sequence_frame()
    kind, _, rest = label.partition(":")
    try:
        if kind == "haar":
            fields = _parse_fields(rest.split(":"), label)
            return haar_frame(float(fields["p"]), int(fields["J"]))
        if kind == "amalgam":
            fields = _parse_fields(rest.split(":"), label)
            lo, hi = fields["window"].split(",")
            base = haar_frame(float(fields["p"]), int(fields["J"]))
            return amalgam_frame(base, float(fields["q"]), (int(lo), int(hi)))
    except KeyError as missing:
        raise ValueError(f"frame label {label!r} is missing field {missing}") from None
    except ValueError as bad:
        raise ValueError(f"cannot parse frame label {label!r}: {bad}") from None
    raise ValueError(f"unknown frame label {label!r}")
