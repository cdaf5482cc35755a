import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from sunrise.constants import (
    ConstantEstimate,
    SearchConfig,
    a1_objective,
    a1_plus,
    ap_objective,
    ap_plus_lower,
    fujii_wilson,
    fw_objective,
    integrate_mminus_truncated,
    nested_order,
    sigma_weight,
)
from sunrise.core import DomainError, StepWeight, restrict
from sunrise.gallery import exp_weight, gallery_weight
from sunrise.maximal import mminus_weight_at

from conftest import leb, step_weights

FAST = SearchConfig(base=4, rounds=1, steps=4)


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(base=0)
    with pytest.raises(ValueError):
        SearchConfig(tol=0.1)


def test_nested_order_is_a_permutation():
    assert sorted(nested_order(9)) == list(range(9))
    assert nested_order(5)[:2] == [0, 4]


def test_sigma_examples():
    assert sigma_weight(leb(0, 1), 3.0).value_at(0.5) == pytest.approx(1.0)
    four = StepWeight((F(0), F(1)), (F(4),))
    assert sigma_weight(four, 2.0).mass(0.0, 1.0) == pytest.approx(0.25)
    assert sigma_weight(four, 3.0).value_at(0.5) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        sigma_weight(four, 1.0)
    with pytest.raises(DomainError):
        sigma_weight(StepWeight((F(0), F(1), F(2)), (F(1), F(0))), 2.0)


@pytest.mark.parametrize("p, value", [(2.0, 0.25), (3.0, 4 / 27)])
def test_ap_lebesgue(p, value):
    est = ap_plus_lower(leb(0, 100), p)
    assert est.value == pytest.approx(value, abs=1e-9)
    wit = est.witness
    sigma = sigma_weight(leb(0, 100), p)
    assert ap_objective(leb(0, 100), sigma, wit["a"], wit["b"], wit["c"]) == est.value


def test_ap_lebesgue_witness_balanced():
    wit = ap_plus_lower(leb(0, 100), 2.0).witness
    assert wit["b"] - wit["a"] == pytest.approx(wit["c"] - wit["b"], rel=1e-6)


def test_ap_near_one_does_not_overflow():
    w = gallery_weight("step-down")
    est = ap_plus_lower(w, 1.01, FAST)
    assert math.isfinite(est.value) and est.value > 0


def test_a1_examples():
    assert a1_plus(gallery_weight("step-up")).value == 1.0
    down = StepWeight((F(0), F(1), F(2)), (F(2), F(1)))
    est = a1_plus(down)
    assert est.value == 2.0
    assert a1_objective(down, F(est.witness["x"]), est.witness["side"]) == 2
    assert a1_plus(StepWeight((F(0), F(3)), (F(5),))).value == 1.0


def test_a1_rejects_zero_values():
    with pytest.raises(DomainError):
        a1_plus(StepWeight((F(0), F(1), F(2)), (F(1), F(0))))


def test_integral_examples():
    assert integrate_mminus_truncated(leb(0, 1), F(0), F(1), 1e-8) == pytest.approx(1, abs=1e-8)
    ind = StepWeight((F(0), F(1), F(2)), (F(1), F(0)))
    got = integrate_mminus_truncated(ind, F(0), F(2), 1e-8)
    assert got == pytest.approx(1 + math.log(2), abs=1e-8)


def test_integral_tolerance_contract():
    ind = StepWeight((F(0), F(1), F(2)), (F(1), F(0)))
    exact = 1 + math.log(2)
    for tol in (1e-4, 5e-5, 2.5e-5):
        assert abs(integrate_mminus_truncated(ind, F(0), F(2), tol) - exact) <= tol


@settings(max_examples=15, deadline=None)
@given(step_weights(max_cells=4))
def test_integral_against_pointwise_quadrature(w):
    # oracle: scipy quad over the exact pointwise maximal function of w 1_(a,b)
    a, b = w.support
    r = restrict(w, a, b)
    f = lambda x: float(mminus_weight_at(r, F(x)))
    pts = [float(t) for t in w.breakpoints]
    ref = sum(integrate.quad(f, u, v, epsabs=1e-11, limit=200)[0] for u, v in zip(pts, pts[1:]))
    got = integrate_mminus_truncated(w, a, b, 1e-8)
    assert got == pytest.approx(ref, abs=1e-7 * float(w.total_mass) + 1e-9)


@pytest.mark.parametrize("L", [1, 10, 100])
def test_fw_lebesgue(L):
    est = fujii_wilson(leb(0, L))
    assert est.value == pytest.approx(1, abs=1e-6)


def test_fw_nondecreasing_is_one():
    assert fujii_wilson(gallery_weight("step-up")).value == pytest.approx(1, abs=1e-6)


def test_fw_exp_decay_closed_form():
    # M- of e^-x restricted to (0, L) is (1 - e^-x)/x, so the ratio over (0, L)
    # is Ein(L)/(1 - e^-L) with Ein(L) = gamma + log L + E1(L)
    w = exp_weight(F(0), F(4), F(-1), 256)
    ein = np.euler_gamma + math.log(4) + special.exp1(4)
    analytic = ein / (1 - math.exp(-4))
    assert fw_objective(w, 0.0, 4.0, 1e-8) == pytest.approx(analytic, rel=1e-4)
    assert fujii_wilson(w).value == pytest.approx(analytic, rel=1e-4)


def test_estimate_json_round_trip():
    est = fujii_wilson(gallery_weight("step-down"), FAST)
    assert ConstantEstimate.from_json(est.to_json()) == est


def test_fw_witness_reevaluates():
    cfg = FAST
    est = fujii_wilson(gallery_weight("sawtooth"), cfg)
    again = fw_objective(gallery_weight("sawtooth"), est.witness["a"], est.witness["b"], cfg.tol)
    assert again == est.value


@settings(max_examples=15, deadline=None)
@given(step_weights(max_cells=5, positive=True))
def test_monotone_budget(w):
    for small, large in ((SearchConfig(base=2), SearchConfig(base=5)),
                         (SearchConfig(rounds=1), SearchConfig(rounds=2))):
        assert ap_plus_lower(w, 2.0, large).value >= ap_plus_lower(w, 2.0, small).value
        assert fujii_wilson(w, large).value >= fujii_wilson(w, small).value


@settings(max_examples=15, deadline=None)
@given(step_weights(max_cells=5, positive=True), st.fractions(-5, 5, max_denominator=8),
       st.integers(1, 9))
def test_translation_and_scaling(w, t, c):
    assert a1_plus(w.shift(t)).value == a1_plus(w).value
    assert a1_plus(w.scale(F(c))).value == a1_plus(w).value
    base = fujii_wilson(w, FAST).value
    assert fujii_wilson(w.scale(F(c)), FAST).value == pytest.approx(base, rel=1e-9)
    assert fujii_wilson(w.shift(t), FAST).value == pytest.approx(base, rel=1e-6)
    ap = ap_plus_lower(w, 2.0, FAST).value
    assert ap_plus_lower(w.scale(F(c)), 2.0, FAST).value == pytest.approx(ap, rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(step_weights(max_cells=5))
def test_fw_at_least_one(w):
    assert fujii_wilson(w, FAST).value >= 1 - 1e-9


@settings(max_examples=20, deadline=None)
@given(step_weights(max_cells=5, positive=True))
def test_a1_against_one_sided_probe(w):
    # oracle: evaluate M- w / w just inside every cell edge
    est = a1_plus(w).value
    delta = F(1, 10**9)
    probes = []
    for i in range(w.n):
        for x in (w.breakpoints[i] + delta, w.breakpoints[i + 1] - delta):
            probes.append(float(mminus_weight_at(w, x) / w.value_at(x)))
    assert est >= max(probes) - 1e-12
    assert est == pytest.approx(max(probes), rel=1e-6)


def test_seeded_reproducible():
    w = gallery_weight("sawtooth")
    cfg = SearchConfig(seed=11)
    assert ap_plus_lower(w, 2.5, cfg) == ap_plus_lower(w, 2.5, cfg)
