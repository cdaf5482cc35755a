from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from sunrise.core import DomainError, IntervalSet, StepWeight, measure
from sunrise.maximal import (
    Decomposition,
    HaloChain,
    LowerHull,
    halo,
    halo_iterate,
    halo_iteration_bound,
    mass_halving_sequence,
    mminus_at_breakpoints,
    mminus_weight_at,
    mplus_indicator_at,
    superlevel_indicator,
)
from sunrise.oracle import GridSpec, grid_mplus

from conftest import interval_sets, iset, levels, rationals, step_weights


def test_mplus_examples(unit):
    assert mplus_indicator_at(unit, F(-1)) == F(1, 2)
    assert mplus_indicator_at(unit, F(1, 2)) == 1
    assert mplus_indicator_at(unit, F(2)) == 0
    assert mplus_indicator_at(unit, F(0)) == 1  # left endpoint: h -> 0 limit


def test_superlevel_examples(unit):
    dec = superlevel_indicator(unit, F(1, 2))
    assert dec.as_set() == iset((-1, 1))
    assert [c.mass for c in dec.components] == [1]
    two = iset((0, 1), (2, 3))
    dec = superlevel_indicator(two, F(2, 3))
    assert dec.as_set() == iset((F(-1, 2), 1), (F(3, 2), 3))
    assert [c.mass for c in dec.components] == [1, 1]
    assert superlevel_indicator(unit, F(9, 10)).as_set() == iset((F(-1, 9), 1))


def test_touching_components_kept_separately():
    # at alpha = 1/2 both pieces of the two-interval set have exact certificates
    # and touch at x = 1, which is excluded (average there is 1/2, not > 1/2)
    dec = superlevel_indicator(iset((0, 1), (2, 3)), F(1, 2))
    assert [(c.a, c.b) for c in dec.components] == [(-1, 1), (1, 3)]
    assert not dec.certificate_failures()
    assert mplus_indicator_at(iset((0, 1), (2, 3)), F(1)) == F(1, 2)


@pytest.mark.parametrize("alpha", [F(0), F(1), F(3, 2), F(-1, 2)])
def test_superlevel_rejects_levels(unit, alpha):
    with pytest.raises(DomainError):
        superlevel_indicator(unit, alpha)


def test_empty_set_rejected():
    with pytest.raises(DomainError):
        superlevel_indicator(IntervalSet(), F(1, 2))
    with pytest.raises(DomainError):
        mplus_indicator_at(IntervalSet(), F(0))


def test_halo_examples(unit):
    assert halo(unit, F(1, 4)) == iset((-3, 1))
    assert halo(halo(unit, F(1, 2)), F(1, 2)) == iset((-3, 1))
    with pytest.raises(DomainError):
        halo(unit, F(1))


def test_halo_iterate(unit):
    chain = halo_iterate(unit, F(1, 2), 2)
    assert chain.iterates == (unit, iset((-1, 1)), iset((-3, 1)))
    assert halo_iterate(unit, F(1, 3), 1).iterates[1] == halo(unit, F(1, 3))
    assert HaloChain.from_json(chain.to_json()) == chain
    with pytest.raises(ValueError):
        halo_iterate(unit, F(1, 2), 0)


@pytest.mark.parametrize("lam, alpha, n", [(F(1, 4), F(1, 2), 2), (F(1, 8), F(1, 2), 3), (F(1, 5), F(1, 2), 3)])
def test_halo_iteration_bound(lam, alpha, n):
    assert halo_iteration_bound(lam, alpha) == n


def test_halo_iteration_bound_domain():
    with pytest.raises(DomainError):
        halo_iteration_bound(F(1, 2), F(1, 4))


def test_mminus_examples():
    ind = StepWeight((F(0), F(1)), (F(1),))
    assert mminus_weight_at(ind, F(2)) == F(1, 2)
    assert mminus_weight_at(ind, F(1, 2)) == 1
    w = StepWeight((F(0), F(1), F(2)), (F(2), F(1)))
    assert mminus_weight_at(w, F(3, 2)) == F(5, 3)


def test_mass_halving_examples(unit):
    mh = mass_halving_sequence(unit, F(-1), F(1), 2)
    assert mh.points == (-1, F(1, 2), F(3, 4))
    assert mh.tail_mass == F(1, 4)
    mh = mass_halving_sequence(iset((0, 1), (2, 3)), F(-1), F(3), 1)
    assert mh.points[1] == 2


def test_decomposition_json_round_trip():
    dec = superlevel_indicator(iset((0, 1), (F(5, 2), 3)), F(2, 5))
    assert Decomposition.from_json(dec.to_json()) == dec


def test_lower_hull_matches_brute_force():
    pts = [(F(0), F(0)), (F(1), F(3)), (F(2), F(3)), (F(3), F(7)), (F(5), F(8))]
    hull = LowerHull()
    for x, y in pts:
        hull.push(x, y)
    q = (F(6), F(12))
    assert hull.max_slope(*q) == max((q[1] - y) / (q[0] - x) for x, y in pts)


# --- properties --------------------------------------------------------------


@given(interval_sets(), levels)
def test_certificates_exact(E, alpha):
    dec = superlevel_indicator(E, alpha)
    assert not dec.certificate_failures()
    comps = dec.components
    assert all(comps[i].b <= comps[i + 1].a for i in range(len(comps) - 1))


@given(interval_sets(), levels, st.data())
def test_component_suffix_property(E, alpha, data):
    # inside a component every suffix (x, b_j) carries at least alpha of its length
    for c in superlevel_indicator(E, alpha).components:
        t = data.draw(st.fractions(0, 1, max_denominator=64))
        x = c.a + t * (c.b - c.a)
        assert E.measure_up_to(c.b) - E.measure_up_to(x) >= alpha * (c.b - x)


@given(interval_sets(), levels, rationals)
def test_outside_points_bounded(E, alpha, x):
    H = halo(E, alpha)
    value = mplus_indicator_at(E, x)
    if H.contains(x):
        assert value > alpha
    else:
        assert value <= alpha


@given(interval_sets(), levels)
def test_measure_identity(E, alpha):
    H = halo(E, alpha)
    mass = sum(measure(E.intersect_interval(l, r)) for l, r in H.intervals)
    assert measure(H) == mass / alpha
    assert measure(H) <= measure(E) / alpha
    assert H.covers(E)


@given(interval_sets(), levels, levels)
def test_monotone_in_level(E, a, b):
    lo, hi = min(a, b), max(a, b)
    assert halo(E, lo).covers(halo(E, hi))


@given(interval_sets(), levels)
def test_monotone_in_set(E, alpha):
    sub = IntervalSet(E.intervals[:1])
    assert halo(E, alpha).covers(halo(sub, alpha))


@settings(max_examples=50)
@given(interval_sets(max_parts=4), levels, st.integers(0, 40))
def test_grid_oracle_agrees_pointwise(E, alpha, k):
    g = GridSpec.for_set(E, alpha, F(1, 4))
    x = g.left + k * (g.right - g.left) / 40
    assert grid_mplus(E, x, g) == mplus_indicator_at(E, x)


@given(interval_sets(), levels, levels)
def test_halo_iteration_inclusion(E, a, b):
    if a == b:
        return
    lam, alpha = min(a, b), max(a, b)
    n = halo_iteration_bound(lam, alpha)
    assert halo_iterate(E, alpha, n).iterates[-1].covers(halo(E, lam))


@given(step_weights(), rationals)
def test_mminus_brute_force(w, x):
    # independent: all breakpoints t < x plus a tiny left neighbourhood
    cands = [(w.cumulative(x) - w.cumulative(t)) / (x - t) for t in w.breakpoints if t < x]
    cands.append(w.left_limit(x))
    assert mminus_weight_at(w, x) == max(cands)


@given(step_weights())
def test_mminus_at_breakpoints_matches_pointwise(w):
    for t, (left, right) in zip(w.breakpoints, mminus_at_breakpoints(w)):
        assert left == mminus_weight_at(w, t)
        assert right == max(left, w.value_at(t))


@given(interval_sets(), st.integers(1, 6))
def test_mass_halving_invariant(E, depth):
    a, b = E.lower - 1, E.upper
    mh = mass_halving_sequence(E, a, b, depth)
    tail = lambda x: measure(E.intersect_interval(x, b)) if x < b else 0
    for prev, cur in zip(mh.points, mh.points[1:]):
        assert tail(prev) == 2 * tail(cur)
    assert mh.tail_mass == measure(E) / 2**depth
