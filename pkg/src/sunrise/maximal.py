"""Exact one-sided maximal functions on step data.

The forward operator is only ever applied to indicators of interval sets,
the backward one to step weights.  Superlevel sets of the forward maximal
function are computed with the rising-sun construction: with
F(x) = |E ∩ (-inf, x]| - alpha*x, a point belongs to {M+ 1_E > alpha} iff F
takes a strictly larger value somewhere to its right.  F is piecewise linear
with rational knots, so a single right-to-left running maximum gives every
component endpoint as the exact root of a linear piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    DomainError,
    IntervalSet,
    StepWeight,
    format_rational,
    measure,
    normalize,
    parse_rational,
)


@dataclass(frozen=True)
class Component:
    a: Fraction
    b: Fraction
    mass: Fraction  # |E ∩ (a, b)|


@dataclass(frozen=True)
class Decomposition:
    alpha: Fraction
    components: tuple[Component, ...]

    def as_set(self) -> IntervalSet:
        return normalize((c.a, c.b) for c in self.components)

    def certificate_failures(self) -> list[Component]:
        """Components whose mass is not exactly alpha times their length."""
        return [c for c in self.components if c.mass != self.alpha * (c.b - c.a)]

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "alpha": format_rational(self.alpha),
            "components": [
                {
                    "a": format_rational(c.a),
                    "b": format_rational(c.b),
                    "mass": format_rational(c.mass),
                }
                for c in self.components
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Decomposition":
        return cls(
            parse_rational(data["alpha"]),
            tuple(
                Component(
                    parse_rational(c["a"]),
                    parse_rational(c["b"]),
                    parse_rational(c["mass"]),
                )
                for c in data["components"]
            ),
        )


@dataclass(frozen=True)
class HaloChain:
    base: IntervalSet
    alpha: Fraction
    iterates: tuple[IntervalSet, ...]

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "alpha": format_rational(self.alpha),
            "iterates": [s.to_json() for s in self.iterates],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HaloChain":
        iterates = tuple(IntervalSet.from_json(s) for s in data["iterates"])
        return cls(iterates[0], parse_rational(data["alpha"]), iterates)


@dataclass(frozen=True)
class MassHalving:
    points: tuple[Fraction, ...]
    tail_mass: Fraction  # |E ∩ (x_depth, b)|


def _check_set(E: IntervalSet) -> None:
    if not E:
        raise DomainError("the set E is empty")


def _check_level(alpha: Fraction, name: str = "alpha") -> Fraction:
    alpha = parse_rational(alpha)
    if not 0 < alpha < 1:
        raise DomainError(f"{name} must lie in (0, 1), got {alpha}")
    return alpha


def mplus_indicator_at(E: IntervalSet, x: Fraction) -> Fraction:
    """M+ 1_E(x) = sup_h |E ∩ (x, x+h)| / h.

    The average over (x, x+h) decreases while x+h runs through a gap of E and
    increases while it runs through E, so the sup is either the h -> 0 limit
    (1 when x is in the closure of a component from the left) or is attained
    at a right endpoint of a component.
    """
    _check_set(E)
    x = parse_rational(x)
    best = Fraction(0)
    below = E.measure_up_to(x)
    for left, right in E.intervals:
        if left <= x < right:
            return Fraction(1)
        if right > x:
            best = max(best, (E.measure_up_to(right) - below) / (right - x))
    return best


def superlevel_indicator(E: IntervalSet, alpha: Fraction) -> Decomposition:
    """Rising-sun decomposition of {M+ 1_E > alpha}."""
    _check_set(E)
    alpha = _check_level(alpha)
    knots = E.endpoints()
    m = len(knots)
    F = []
    acc = Fraction(0)
    for i, k in enumerate(knots):
        if i % 2 == 1:
            acc += k - knots[i - 1]
        F.append(acc - alpha * k)
    # suffix[i] = max F(k_j) over j >= i
    suffix = [Fraction(0)] * (m + 1)
    running = None
    for i in range(m - 1, -1, -1):
        running = F[i] if running is None else max(running, F[i])
        suffix[i] = running

    pieces: list[tuple[Fraction, Fraction]] = []
    # left ray: slope -alpha, F(x) < suffix[0] iff x > root
    root = knots[0] - (suffix[0] - F[0]) / alpha
    pieces.append((root, knots[0]))
    for i in range(m - 1):
        level = suffix[i + 1]
        slope = 1 - alpha if i % 2 == 0 else -alpha
        root = knots[i] + (level - F[i]) / slope
        if slope > 0:
            hi = min(root, knots[i + 1])
            if hi > knots[i]:
                pieces.append((knots[i], hi))
        else:
            lo = max(root, knots[i])
            if lo < knots[i + 1]:
                pieces.append((lo, knots[i + 1]))

    in_set = {knots[i]: F[i] < suffix[i + 1] for i in range(m - 1)}
    merged: list[list[Fraction]] = []
    for lo, hi in pieces:
        if merged and merged[-1][1] == lo and in_set.get(lo, False):
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])

    components = tuple(
        Component(a, b, E.measure_up_to(b) - E.measure_up_to(a)) for a, b in merged
    )
    return Decomposition(alpha, components)


def halo(E: IntervalSet, lam: Fraction) -> IntervalSet:
    """H_lam(E) = {M+ 1_E > lam}."""
    return superlevel_indicator(E, lam).as_set()


def halo_iterate(E: IntervalSet, alpha: Fraction, k: int) -> HaloChain:
    if k < 1:
        raise ValueError("k must be a positive integer")
    alpha = _check_level(alpha)
    iterates = [E]
    for _ in range(k):
        nxt = halo(iterates[-1], alpha)
        if not nxt.covers(iterates[-1]):
            raise AssertionError("halo iterate failed to contain its predecessor")
        iterates.append(nxt)
    return HaloChain(E, alpha, tuple(iterates))


def halo_iteration_bound(lam: Fraction, alpha: Fraction) -> int:
    """Smallest N with alpha**N <= lam, i.e. ceil(log(1/lam) / log(1/alpha))."""
    lam, alpha = parse_rational(lam), parse_rational(alpha)
    if not 0 < lam < alpha < 1:
        raise DomainError(f"need 0 < lambda < alpha < 1, got {lam}, {alpha}")
    n, power = 1, alpha
    while power > lam:
        power *= alpha
        n += 1
    return n


def mminus_weight_at(w: StepWeight, x: Fraction) -> Fraction:
    """M- w(x) = sup_h (1/h) ∫_{x-h}^x w, exact.

    On a constant piece the average (W(x) - W(t)) / (x - t) is monotone in t,
    so the sup is attained at a breakpoint t < x or is the left limit w(x-).
    """
    x = parse_rational(x)
    best = w.left_limit(x)
    Wx = w.cumulative(x)
    for t, Wt in zip(w.breakpoints, w.antiderivative.masses):
        if t >= x:
            break
        avg = (Wx - Wt) / (x - t)
        if avg > best:
            best = avg
    return best


def mass_halving_sequence(
    E: IntervalSet, a: Fraction, b: Fraction, depth: int
) -> MassHalving:
    """x_0 = a and x_k the E-mass median of (x_{k-1}, b), for k = 1..depth.

    When the median falls on a gap of E the right end of that gap is taken.
    """
    a, b = parse_rational(a), parse_rational(b)
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    inside = E.intersect_interval(a, b)
    total = measure(inside)
    if total == 0:
        raise DomainError("E has zero mass in (a, b)")
    points = [a]
    below = Fraction(0)  # |E ∩ (a, x_k)|
    for _ in range(depth):
        below = (below + total) / 2
        points.append(_mass_inverse(inside, below))
    return MassHalving(tuple(points), total - below)


def _mass_inverse(S: IntervalSet, target: Fraction) -> Fraction:
    """Largest x with |S ∩ (-inf, x)| = target, for 0 <= target < |S|."""
    acc = Fraction(0)
    for left, right in S.intervals:
        length = right - left
        if acc + length > target:
            return left + (target - acc)
        acc += length
    raise ValueError("target mass exceeds the set's measure")


class LowerHull:
    """Lower convex hull of points pushed in increasing x order.

    ``max_slope(qx, qy)`` returns the largest chord slope from a pushed point
    to a query point lying to the right of all of them; the maximiser is the
    lower tangent vertex, found by binary search since chord slopes along the
    hull increase and then decrease.  Works for Fractions and floats alike.
    """

    __slots__ = ("xs", "ys")

    def __init__(self):
        self.xs = []
        self.ys = []

    def __len__(self):
        return len(self.xs)

    def push(self, x, y) -> None:
        xs, ys = self.xs, self.ys
        while len(xs) >= 2:
            ox, oy = xs[-2], ys[-2]
            if (xs[-1] - ox) * (y - oy) - (ys[-1] - oy) * (x - ox) <= 0:
                xs.pop()
                ys.pop()
            else:
                break
        xs.append(x)
        ys.append(y)

    def max_slope(self, qx, qy):
        xs, ys = self.xs, self.ys
        lo, hi = 0, len(xs) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if (qy - ys[mid + 1]) * (qx - xs[mid]) > (qy - ys[mid]) * (qx - xs[mid + 1]):
                lo = mid + 1
            else:
                hi = mid
        return (qy - ys[lo]) / (qx - xs[lo])


def mminus_at_breakpoints(w: StepWeight) -> list[tuple[Fraction, Fraction]]:
    """Exact one-sided limits of M- w at every breakpoint.

    Returns ``(left, right)`` pairs: ``left = M- w(t-)`` (which equals
    M- w(t)) and ``right = M- w(t+) = max(w(t+), M- w(t))``.  One hull sweep,
    so the cost is O(n log n) instead of the O(n^2) of pointwise evaluation.
    """
    hull = LowerHull()
    out = []
    masses = w.antiderivative.masses
    for i, t in enumerate(w.breakpoints):
        left = w.left_limit(t)
        if len(hull):
            left = max(left, hull.max_slope(t, masses[i]))
        right = max(left, w.value_at(t))
        out.append((left, right))
        hull.push(t, masses[i])
    return out
