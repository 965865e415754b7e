"""Exact defining-identity residuals, deterministic and property-based."""

from hypothesis import given, settings
from hypothesis import strategies as st

from voacert.mode_engine import (borcherds_required_truncation,
                                 borcherds_residual, commutator_residual,
                                 sample_residuals, skewsymmetry_residual,
                                 translation_residual)

IDENTITIES = ("borcherds", "skewsymmetry", "commutator", "translation")


def test_sampled_residuals_vanish_everywhere(heis8, ising8, c1_8, lat2_6):
    for model in (heis8, ising8, c1_8, lat2_6):
        for identity in IDENTITIES:
            checked, failures = sample_residuals(model, identity, 60, seed=7)
            assert checked == 60
            assert failures == []


def test_borcherds_on_composites(heis8):
    a = heis8.basis.states(2)[0]
    b = heis8.basis.states(1)[0]
    c = heis8.basis.states(3)[1]
    for (m, n, k) in [(0, 0, 0), (1, -1, 0), (-1, 2, -2), (2, 1, 1)]:
        if borcherds_required_truncation(heis8, a, b, c, m, n, k) > heis8.N:
            continue
        assert borcherds_residual(heis8, a, b, c, m, n, k).is_zero


def test_skewsymmetry_across_sectors(lat2_6):
    tops = [st for st in lat2_6.basis.states(1) if not st.factors]
    assert len(tops) == 2
    ep, em = tops
    for n in (-2, -1, 0, 1):
        assert skewsymmetry_residual(lat2_6, ep, em, n).is_zero


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_commutator_property(heis6, data):
    pool = [s for d in range(4) for s in heis6.basis.states(d)]
    a = data.draw(st.sampled_from(pool))
    b = data.draw(st.sampled_from(pool))
    p = data.draw(st.integers(-2, 2))
    q = data.draw(st.integers(-2, 2))
    assert commutator_residual(heis6, a, p, b, q).is_zero


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_translation_property(heis6, data):
    pool = [s for d in range(5) for s in heis6.basis.states(d)]
    a = data.draw(st.sampled_from(pool))
    n = data.draw(st.integers(-2, 2))
    assert translation_residual(heis6, a, n).is_zero


def test_corrupted_model_fails_axioms():
    from voacert.graded_fock import build_model, heisenberg_spec

    bad = build_model(heisenberg_spec(1, 6), corrupt=(0, -1, 2, 0, 0, 1))
    _, failures = sample_residuals(bad, "commutator", 50, seed=1)
    assert failures
