"""End-to-end acceptance checks, one test per criterion.

Each test enforces its stated tolerances and its runtime budget; the
conftest summary hook prints one pass/fail line per criterion at the end of
the run.
"""

import time

import numpy as np
import pytest

from framekit.catalog import (
    amalgam_frame,
    canonical_l1_frame,
    haar_frame,
    rank_of_index,
)
from framekit.frames import (
    ball_pair_sweep,
    besselian_sum,
    covering_truncation,
    duality_constant_check,
    estimate_frame_constant,
    frame_pair,
    synthesis_partial,
    unconditional_deviation,
)
from framekit.spaces import (
    AmalgamFunction,
    DualSeq,
    GridFunction,
    SeqVector,
    amalgam_norm,
    conjugate_exponent,
    grid_lp_norm,
    linf_norm,
    lp_norm,
    pairing_phi,
)
from framekit.verify import default_specs, run_all, run_james_suite, spec_for_label


class Budget:
    """Wall-clock guard for a criterion."""

    def __init__(self, seconds: float):
        self.seconds = seconds
        self.start = time.perf_counter()

    def check(self):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.seconds, (
            f"runtime budget exceeded: {elapsed:.1f}s >= {self.seconds}s"
        )


def random_seq_vector(rng) -> SeqVector:
    support = rng.choice(np.arange(1, 41), size=rng.integers(1, 13), replace=False)
    return SeqVector.from_pairs(
        [(int(i), float(v)) for i, v in zip(support, rng.standard_normal(len(support)))]
    )


def test_criterion_1_l1_exactness():
    budget = Budget(5.0)
    F = canonical_l1_frame()
    rng = np.random.default_rng(42)

    for _ in range(1000):
        lam = random_seq_vector(rng)
        N = covering_truncation(F, lam)
        assert lp_norm(lam - synthesis_partial(F, lam, N), 1.0) <= 1e-12

    # extreme-point enumeration makes the estimate exact, not approximate
    assert estimate_frame_constant(F, 16, 100, 42) == 1.0

    for _ in range(200):
        lam = random_seq_vector(rng)
        mu = DualSeq(tuple(rng.uniform(-1, 1, size=8)), float(rng.uniform(-1, 1)))
        N = max(lam.max_index, 1)
        assert besselian_sum(F, lam, mu, N) <= lp_norm(lam, 1.0) * linf_norm(mu) + 1e-12

    # sign-aligned functionals attain the bound exactly
    for _ in range(50):
        lam = random_seq_vector(rng)
        signs = tuple(1.0 if lam.value_at(n) >= 0 else -1.0 for n in range(1, lam.max_index + 1))
        mu = DualSeq(signs, 1.0)
        assert besselian_sum(F, lam, mu, lam.max_index) == lp_norm(lam, 1.0) * linf_norm(mu)

    budget.check()


def test_criterion_2_haar_reconstruction_and_orthogonality():
    budget = Budget(30.0)
    J = 8
    rng = np.random.default_rng(42)

    for p in (1.5, 2.0, 3.0):
        F = haar_frame(p, J)
        for _ in range(200):
            level = int(rng.integers(0, J + 1))
            f = GridFunction(level, rng.standard_normal(2**level))
            rebuilt = synthesis_partial(F, f, 2**J)
            assert grid_lp_norm(f - rebuilt, p) <= 1e-10

    F2 = haar_frame(2.0, J)
    n = 2**J
    elements = [frame_pair(F2, i)[0] for i in range(1, n + 1)]
    gram = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            gram[i, j] = pairing_phi(elements[i], elements[j])
    assert np.max(np.abs(gram - np.eye(n))) <= 1e-12

    budget.check()


def test_criterion_3_frame_constant_duality():
    budget = Budget(60.0)
    for p in (1.5, 2.0, 3.0):
        F = haar_frame(p, 8)
        lf, ld = duality_constant_check(F, 256, 2000, 42)
        assert abs(lf - ld) / max(lf, ld) <= 0.05
        if p == 2.0:
            assert lf == pytest.approx(1.0, abs=1e-6)
            assert ld == pytest.approx(1.0, abs=1e-6)
    budget.check()


def test_criterion_4_unconditionality():
    budget = Budget(30.0)
    rng = np.random.default_rng(42)

    H = haar_frame(2.0, 8)
    f = GridFunction(8, rng.standard_normal(256))
    N = covering_truncation(H, f)
    assert N == 256
    assert unconditional_deviation(H, f, N, 50, 42) <= 1e-10

    A = amalgam_frame(haar_frame(2.0, 4), 2.0, (-1, 1))
    g = AmalgamFunction(
        (-1, 1), {m: GridFunction(4, rng.standard_normal(16)) for m in (-1, 0, 1)}
    )
    N = covering_truncation(A, g)
    assert N == rank_of_index(1, 16)
    assert unconditional_deviation(A, g, N, 50, 42) <= 1e-10

    budget.check()


def test_criterion_5_amalgam_frame():
    budget = Budget(60.0)
    J = 6
    window = (-3, 3)
    base = haar_frame(2.0, J)
    A = amalgam_frame(base, 2.0, window)
    full = rank_of_index(window[1], 2**J)
    assert A.full_truncation == full == 4426
    rng = np.random.default_rng(42)

    def random_supported(level: int) -> AmalgamFunction:
        return AmalgamFunction(
            window,
            {
                m: GridFunction(level, rng.standard_normal(2**level))
                for m in range(window[0], window[1] + 1)
            },
        )

    for _ in range(100):
        f = random_supported(int(rng.integers(0, J + 1)))
        rebuilt = synthesis_partial(A, f, full)
        assert amalgam_norm(f - rebuilt, 2.0, 2.0) <= 1e-10

    base_lhat = estimate_frame_constant(base, 2**J, 600, 42)
    p_star = conjugate_exponent(2.0)
    q_star = conjugate_exponent(2.0)
    pairs = 0
    for f, g in ball_pair_sweep(A.space, 500, 42):
        bs = besselian_sum(A, f, g, full)
        bound = base_lhat * amalgam_norm(f, 2.0, 2.0) * amalgam_norm(g, p_star, q_star)
        assert bs <= bound + 1e-9
        pairs += 1
        if pairs >= 500:
            break
    assert pairs == 500

    budget.check()


def test_criterion_6_james_probe():
    budget = Budget(10.0)

    spec = spec_for_label("haar:p=2:J=8", samples=2000)
    report = run_james_suite(spec)
    assert report.verdict == "consistent with reflexive"
    finals = {
        p.name: p.value
        for p in report.probes
        if p.truncation == 256 and p.name.endswith("-tail")
    }
    assert set(finals) == {"shrinking-tail", "boundedly-complete-tail"}
    assert all(v <= 1e-6 for v in finals.values())

    spec = spec_for_label("l1-canonical", samples=2000)
    report = run_james_suite(spec)
    assert report.verdict == "non-shrinking witness found"
    tails = [p.value for p in report.probes if p.name == "shrinking-tail"]
    assert len(tails) == len(spec.schedule)
    assert all(v == 1.0 for v in tails)

    budget.check()


def test_criterion_7_determinism():
    specs = default_specs()
    start = time.perf_counter()
    single = run_all(specs, workers=1)
    single_runtime = time.perf_counter() - start

    start = time.perf_counter()
    parallel = run_all(specs, workers=4 * len(specs))
    parallel_runtime = time.perf_counter() - start

    assert single.all_pass()
    assert single.to_json() == parallel.to_json()
    assert single.to_csv() == parallel.to_csv()
    assert len(single.reports) == 4 * len(specs)
    assert parallel_runtime < 2.0 * single_runtime + 1.0
