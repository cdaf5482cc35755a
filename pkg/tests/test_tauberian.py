import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sunrise.constants import SearchConfig
from sunrise.core import DomainError, IntervalSet, StepWeight, weighted_measure
from sunrise.gallery import gallery_weight
from sunrise.maximal import halo, halo_iterate
from sunrise.tauberian import (
    FAMILIES,
    FlatCurveError,
    TauberianEstimate,
    embedding_threshold,
    fit_exponent,
    holder_constant,
    holder_modulus_check,
    regularize,
    restricted_weak_type_check,
    solyanik_fit,
    tauberian_lower,
    tauberian_ratio,
)

from conftest import iset, leb, levels, step_weights

FAST = SearchConfig(base=4)
LEB = leb(-100, 100)


def test_lebesgue_three_quarters():
    est = tauberian_lower(LEB, F(3, 4), families=["single"])
    assert est.ratio == F(4, 3)
    # any unit interval works; (0,1) itself maps to (-1/3, 1)
    assert halo(iset((0, 1)), F(3, 4)) == iset((F(-1, 3), 1))


@pytest.mark.parametrize("family", FAMILIES)
def test_each_family_is_at_least_one(family):
    est = tauberian_lower(gallery_weight("sawtooth"), F(1, 2), families=[family], cfg=FAST)
    assert est.value >= 1
    assert est.family == family


def test_estimate_reevaluates_at_witness():
    w = gallery_weight("step-down")
    est = tauberian_lower(w, F(4, 5), cfg=FAST)
    again = weighted_measure(w, halo(est.witness, F(4, 5))) / weighted_measure(w, est.witness)
    assert again == est.ratio
    assert TauberianEstimate.from_json(est.to_json()) == est


def test_nondecreasing_heavy_piece_below_lebesgue():
    # E at the left edge of the heavy piece: the halo grows into the light one
    w = StepWeight((F(0), F(1), F(2)), (F(1), F(4)))
    for alpha in (F(1, 4), F(1, 2), F(9, 10)):
        E = iset((1, F(3, 2)))
        assert tauberian_ratio(w, E, alpha) < 1 / alpha


def test_tauberian_rejects_levels():
    with pytest.raises(DomainError):
        tauberian_lower(LEB, F(1))
    with pytest.raises(ValueError):
        tauberian_lower(LEB, F(1, 2), families=[])


def test_regularize():
    assert regularize([3, 2, 2, 1]) == [3, 2, 2, 1]
    assert regularize([1, 3, 2, 4]) == [4, 4, 4, 4]
    assert regularize([2, 1, 1.5]) == [2, 1.5, 1.5]


def test_fit_exponent_exact_power():
    alphas = [0.9 + 0.01 * k for k in range(10)]
    vals = [1 + 3 * (1 - a) ** 0.5 for a in alphas]
    delta, K, used = fit_exponent(alphas, vals)
    assert delta == pytest.approx(0.5) and K == pytest.approx(3) and used == 10


def test_fit_exponent_flat_curve():
    with pytest.raises(FlatCurveError):
        fit_exponent([0.9, 0.95, 0.99, 0.995], [1.0, 1.0, 1 + 1e-12, 1.0])


def test_solyanik_lebesgue():
    alphas = [F(90 + k, 100) for k in range(10)]
    curve = solyanik_fit(LEB, alphas, families=["single"], window=(F(9, 10), F(99, 100)))
    assert curve.values == tuple(float(1 / a) for a in alphas)
    assert 0.95 <= curve.delta <= 1.05
    lines = curve.to_csv().splitlines()
    assert lines[0] == "alpha,value,value_minus_1" and len(lines) == 11


def test_solyanik_preconditions():
    with pytest.raises(DomainError):
        solyanik_fit(LEB, [F(1, 2), F(3, 5), F(7, 10), F(4, 5)])


def test_weak_type_lebesgue_half():
    rep = restricted_weak_type_check(
        LEB, F(1, 2), [F(1, 10), F(1, 3), F(1, 2), F(3, 4)], trials=40, seed=3,
        region=(F(-5), F(5)),
    )
    assert rep.C0 == 2 and rep.p == 1 and rep.exact
    assert rep.passed and rep.worst_slack >= 2


def test_weak_type_gallery_reports_gap_not_hard():
    for name in ("step-down", "sawtooth"):
        rep = restricted_weak_type_check(gallery_weight(name), F(1, 2), [F(1, 5), F(3, 5)], 20, cfg=FAST)
        assert rep.hard_violations == 0


def test_weak_type_seeded():
    args = (gallery_weight("step-up"), F(1, 2), [F(1, 4)], 10)
    assert restricted_weak_type_check(*args, seed=5).to_json() == restricted_weak_type_check(*args, seed=5).to_json()


def test_embedding_threshold():
    assert embedding_threshold(1.0, 1.0) == pytest.approx(math.e)
    assert embedding_threshold(2.0, 1.0) == pytest.approx(math.e**2)
    with pytest.raises(DomainError):
        embedding_threshold(0.5, 1.0)


def test_holder_lebesgue_unit_constant():
    pairs = [(F(i, 10), F(j, 10)) for i in range(1, 10) for j in range(i, 10)]
    rep = holder_modulus_check(LEB, pairs, families=["single"], fw=1.0)
    assert rep.K_unit == 1.0
    assert rep.gamma == 1.0 and rep.c == 1.0


def test_holder_constant_diagonal_is_zero():
    assert holder_constant({F(1, 2): 2.0}, [(F(1, 2), F(1, 2))], 1.0) == 0


def test_holder_gallery_resolves():
    pairs = [(F(i, 10), F(i + 1, 10)) for i in range(1, 9)]
    rep = holder_modulus_check(gallery_weight("step-down"), pairs, cfg=FAST, fw=1.5)
    assert rep.resolved and math.isfinite(rep.K) and rep.c is not None


# --- properties --------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(step_weights(max_cells=4), levels)
def test_value_at_least_one(w, alpha):
    assert tauberian_lower(w, alpha, cfg=SearchConfig(base=3)).ratio >= 1


@settings(max_examples=25, deadline=None)
@given(step_weights(max_cells=4), levels, st.integers(1, 3))
def test_chain_bound(w, alpha, k):
    # w(H^k(E)) <= value(alpha)^k w(E): each step is itself a tauberian ratio
    est = tauberian_lower(w, alpha, families=["single"], cfg=SearchConfig(base=3))
    chain = halo_iterate(est.witness, alpha, k).iterates
    ratios = [tauberian_ratio(w, S, alpha) for S in chain[:-1]]
    assert weighted_measure(w, chain[-1]) == weighted_measure(w, est.witness) * math.prod(ratios)
    for r in ratios:
        assert r >= 1


@settings(max_examples=10, deadline=None)
@given(step_weights(max_cells=4), st.integers(0, 1000))
def test_tauberian_seeded(w, seed):
    cfg = SearchConfig(base=3, seed=seed)
    assert tauberian_lower(w, F(2, 3), cfg=cfg) == tauberian_lower(w, F(2, 3), cfg=cfg)


def test_embedding_threshold_pattern_on_exp_family():
    # A_p at p = 1.01 blows up with L; at p = 2 p* (c = 1) it stays below the
    # exp(exp(fw)) bound and grows far more slowly, though it is not bounded
    from sunrise.constants import ap_plus_lower, fujii_wilson

    near_one, above = [], []
    for L in (4, 16, 64):
        w = gallery_weight(f"exp-decay-{L}")
        fw = fujii_wilson(w).value
        p_star = embedding_threshold(fw, 1.0)
        near_one.append(ap_plus_lower(w, 1.01).value)
        above.append(ap_plus_lower(w, 2 * p_star).value)
        assert above[-1] <= math.exp(math.exp(fw))
    assert near_one[0] < near_one[1] < near_one[2]
    rel = [b / a for a, b in zip(near_one, above)]
    assert rel[0] > rel[1] > rel[2]
