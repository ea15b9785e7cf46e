"""Exact norms, pairings and serialization of the three space models."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framekit.spaces import (
    AmalgamFunction,
    DualSeq,
    GridFunction,
    SeqVector,
    amalgam_norm,
    conjugate_exponent,
    embed_tilde,
    grid_lp_norm,
    linf_norm,
    lp_norm,
    pairing_phi,
    pairing_phi_pq,
    pairing_psi,
    translate,
)

import oracles

finite = st.floats(min_value=-16.0, max_value=16.0, allow_nan=False, width=64)


def seq_vectors():
    return st.lists(
        st.tuples(st.integers(min_value=1, max_value=40), finite),
        max_size=10,
        unique_by=lambda iv: iv[0],
    ).map(SeqVector.from_pairs)


def dual_seqs():
    return st.builds(
        DualSeq,
        st.lists(finite, max_size=8).map(tuple),
        finite,
    )


def grid_functions(max_level=5):
    return st.integers(min_value=0, max_value=max_level).flatmap(
        lambda lvl: st.lists(
            finite, min_size=2**lvl, max_size=2**lvl
        ).map(lambda cs: GridFunction(lvl, cs))
    )


def amalgam_functions():
    def build(lo, width, level, flat):
        cells = {
            lo + i: GridFunction(level, flat[i * 2**level : (i + 1) * 2**level])
            for i in range(width)
        }
        return AmalgamFunction((lo, lo + width - 1), cells)

    return st.tuples(
        st.integers(min_value=-3, max_value=3),
        st.integers(min_value=1, max_value=3),
        st.integers(min_value=0, max_value=3),
    ).flatmap(
        lambda t: st.lists(
            finite, min_size=t[1] * 2 ** t[2], max_size=t[1] * 2 ** t[2]
        ).map(lambda flat: build(t[0], t[1], t[2], flat))
    )


# ---------------------------------------------------------------------------
# sequence space
# ---------------------------------------------------------------------------


def test_lp_norm_small_cases():
    v = SeqVector.from_pairs([(1, 3.0), (2, 4.0)])
    assert lp_norm(v, 1.0) == 7.0
    assert lp_norm(v, 2.0) == 5.0
    assert lp_norm(SeqVector.from_pairs([]), 1.0) == 0.0
    assert lp_norm(SeqVector.from_pairs([]), 3.0) == 0.0


def test_lp_norm_rejects_bad_exponent():
    v = SeqVector.basis(1)
    with pytest.raises(ValueError):
        lp_norm(v, 0.5)


def test_seq_vector_canonical_form():
    v = SeqVector.from_pairs([(3, 1.0), (1, 0.0), (2, -2.0)])
    assert v.entries == ((2, -2.0), (3, 1.0))
    assert v.value_at(1) == 0.0
    assert v.value_at(3) == 1.0
    assert SeqVector.from_pairs([(1, 1.0), (1, 2.0)]).value_at(1) == 3.0
    with pytest.raises(ValueError):
        SeqVector(((2, 1.0), (1, 2.0)))
    with pytest.raises(ValueError):
        SeqVector.from_pairs([(0, 1.0)])


def test_linf_norm_small_cases():
    assert linf_norm(DualSeq((1.0, -2.0, 3.0), 0.0)) == 3.0
    assert linf_norm(DualSeq((), 1.0)) == 1.0
    assert linf_norm(DualSeq((0.5,), 0.75)) == 0.75


def test_pairing_psi_small_cases():
    assert pairing_psi(DualSeq((2.0, 3.0), 0.0), SeqVector.from_pairs([(1, 1.0), (2, -1.0)])) == -1.0
    lam = SeqVector.from_pairs([(1, 5.0), (2, 7.0), (3, 11.0)])
    assert pairing_psi(DualSeq.unit_functional(3), lam) == 11.0
    assert pairing_psi(DualSeq.all_ones(), SeqVector.from_pairs([(1, 1.0), (2, -2.0), (3, 1.0)])) == 0.0


@given(mu=dual_seqs(), lam=seq_vectors())
def test_pairing_psi_within_product_of_norms(mu, lam):
    assert abs(pairing_psi(mu, lam)) <= linf_norm(mu) * lp_norm(lam, 1.0) + 1e-9


@given(mu=dual_seqs())
def test_psi_sharpness_on_basis_vectors(mu):
    # The sup over canonical basis vectors reaches the sup norm: some index
    # in the prefix or in the constant tail attains it.
    probe_upto = len(mu.prefix) + 1
    attained = max(
        abs(pairing_psi(mu, SeqVector.basis(n))) for n in range(1, probe_upto + 1)
    )
    assert attained == linf_norm(mu)


# ---------------------------------------------------------------------------
# grid space
# ---------------------------------------------------------------------------


def test_grid_lp_norm_small_cases():
    for level in (0, 1, 4):
        for p in (1.0, 1.5, 2.0, 3.0):
            assert grid_lp_norm(GridFunction.constant(1.0, level), p) == pytest.approx(1.0)
    h2 = GridFunction(1, (1.0, -1.0))
    assert grid_lp_norm(h2, 2.0) == 1.0
    assert grid_lp_norm(GridFunction(1, (2.0, 0.0)), 1.0) == 1.0
    with pytest.raises(ValueError):
        grid_lp_norm(h2, 0.99)


def test_grid_function_shape_is_validated():
    with pytest.raises(ValueError):
        GridFunction(2, (1.0, 2.0, 3.0))


def test_pairing_phi_small_cases():
    one = GridFunction.constant(1.0)
    h2 = GridFunction(1, (1.0, -1.0))
    h3 = GridFunction(2, (1.0, -1.0, 0.0, 0.0))
    assert pairing_phi(one, one) == 1.0
    assert pairing_phi(h2, h3) == 0.0
    assert pairing_phi(h2, h2) == 1.0
    # cross-check the nonzero cases against midpoint quadrature of the
    # pointwise branch formula
    assert pairing_phi(h2, h2) == pytest.approx(oracles.quadrature_pairing(2, 2), abs=1e-12)
    assert pairing_phi(h2, h3) == pytest.approx(oracles.quadrature_pairing(2, 3), abs=1e-12)


@given(f=grid_functions())
def test_grid_norm_matches_dense_oracle(f):
    for p in (1.0, 1.5, 2.0, 3.0, 4.0):
        want = oracles.dense_lp_norm(np.asarray(f.coefficients), p, 2.0**-f.level)
        assert grid_lp_norm(f, p) == pytest.approx(want, rel=1e-12, abs=1e-12)


@given(f=grid_functions(), g=grid_functions())
def test_holder_bound_on_grid(f, g):
    for p in (1.25, 1.5, 2.0, 3.0, 4.0):
        lhs = abs(pairing_phi(f, g))
        rhs = grid_lp_norm(f, conjugate_exponent(p)) * grid_lp_norm(g, p)
        assert lhs <= rhs + 1e-9


@given(g=grid_functions())
def test_holder_equality_on_aligned_pair(g):
    # f = sign(g) |g|^(p-1) makes |f|^{p*} proportional to |g|^p, the exact
    # equality case of the bound.
    for p in (1.25, 1.5, 2.0, 3.0, 4.0):
        coeffs = np.asarray(g.coefficients)
        f = GridFunction(g.level, np.sign(coeffs) * np.abs(coeffs) ** (p - 1.0))
        lhs = abs(pairing_phi(f, g))
        rhs = grid_lp_norm(f, conjugate_exponent(p)) * grid_lp_norm(g, p)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


@given(f=grid_functions(), g=grid_functions(), extra=st.integers(min_value=0, max_value=3))
def test_refinement_changes_nothing(f, g, extra):
    fr = f.refine(f.level + extra)
    assert fr == f
    for p in (1.0, 1.5, 2.0, 3.0):
        assert abs(grid_lp_norm(fr, p) - grid_lp_norm(f, p)) <= 1e-12
    assert abs(pairing_phi(fr, g) - pairing_phi(f, g)) <= 1e-12


def test_refine_rejects_coarsening():
    f = GridFunction(2, (1.0, 2.0, 3.0, 4.0))
    with pytest.raises(ValueError):
        f.refine(1)


def test_grid_value_at_reads_cells():
    f = GridFunction(1, (2.0, -3.0))
    assert f.value_at(0.0) == 2.0
    assert f.value_at(0.25) == 2.0
    assert f.value_at(0.5) == -3.0
    assert f.value_at(1.0) == 0.0


# ---------------------------------------------------------------------------
# amalgam space
# ---------------------------------------------------------------------------


def chi(m: int) -> AmalgamFunction:
    return translate(embed_tilde(GridFunction.constant(1.0)), m)


def test_amalgam_norm_small_cases():
    two_cells = chi(0) + chi(1)
    assert amalgam_norm(two_cells, 2.0, 3.0) == pytest.approx(2.0 ** (1.0 / 3.0))
    for p, q in ((1.5, 2.0), (2.0, 2.0), (3.0, 1.5)):
        assert amalgam_norm(chi(0), p, q) == pytest.approx(1.0)
    zero = AmalgamFunction.zero((0, 1))
    assert amalgam_norm(zero, 2.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        amalgam_norm(chi(0), 1.0, 2.0)
    with pytest.raises(ValueError):
        amalgam_norm(chi(0), 2.0, 1.0)


def test_pairing_phi_pq_small_cases():
    assert pairing_phi_pq(chi(0), chi(0)) == 1.0
    assert pairing_phi_pq(chi(0), chi(1)) == 0.0
    h2t = translate(embed_tilde(GridFunction(1, (1.0, -1.0))), 2)
    assert pairing_phi_pq(h2t, h2t) == 1.0


def test_translate_small_cases():
    assert translate(chi(0), 1) == chi(1)
    f = chi(0) + chi(1)
    assert translate(f, 0) == f
    assert translate(translate(f, 2), -2) == f
    with pytest.raises(ValueError):
        translate(f, 0.5)


def test_embed_tilde_small_cases():
    assert embed_tilde(GridFunction.constant(1.0)) == chi(0)
    z = embed_tilde(GridFunction.zero(2))
    assert amalgam_norm(z, 2.0, 2.0) == 0.0
    f = GridFunction(2, (1.0, -2.0, 0.5, 0.0))
    for p in (1.5, 2.0, 3.0):
        for q in (1.5, 2.0, 4.0):
            assert amalgam_norm(embed_tilde(f), p, q) == pytest.approx(grid_lp_norm(f, p))


@given(f=amalgam_functions(), a=st.integers(min_value=-4, max_value=4))
def test_translate_preserves_norms_exactly(f, a):
    for p, q in ((1.5, 2.0), (2.0, 2.0), (3.0, 1.5)):
        assert amalgam_norm(translate(f, a), p, q) == amalgam_norm(f, p, q)


@given(f=amalgam_functions(), g=amalgam_functions(), a=st.integers(min_value=-4, max_value=4))
def test_translate_preserves_pairings(f, g, a):
    assert pairing_phi_pq(translate(f, a), translate(g, a)) == pytest.approx(
        pairing_phi_pq(f, g), rel=1e-12, abs=1e-12
    )


@given(f=amalgam_functions())
def test_single_cell_amalgam_norm_equals_grid_norm(f):
    m = f.window[0]
    cell_only = AmalgamFunction((m, m), {m: f.cell(m)})
    for p, q in ((1.5, 3.0), (2.0, 2.0)):
        assert amalgam_norm(cell_only, p, q) == pytest.approx(grid_lp_norm(f.cell(m), p))


# ---------------------------------------------------------------------------
# serialization round-trips
# ---------------------------------------------------------------------------


@given(v=seq_vectors())
def test_seq_vector_json_round_trip(v):
    assert SeqVector.from_json_obj(json.loads(json.dumps(v.to_json_obj()))) == v


@given(mu=dual_seqs())
def test_dual_seq_json_round_trip(mu):
    assert DualSeq.from_json_obj(json.loads(json.dumps(mu.to_json_obj()))) == mu


@given(f=grid_functions())
def test_grid_function_json_round_trip(f):
    assert GridFunction.from_json_obj(json.loads(json.dumps(f.to_json_obj()))) == f


@given(f=amalgam_functions())
def test_amalgam_function_json_round_trip(f):
    assert AmalgamFunction.from_json_obj(json.loads(json.dumps(f.to_json_obj()))) == f


def test_conjugate_exponent_pairs():
    assert conjugate_exponent(2.0) == 2.0
    assert conjugate_exponent(1.5) == 3.0
    assert conjugate_exponent(3.0) == 1.5
    with pytest.raises(ValueError):
        conjugate_exponent(1.0)
