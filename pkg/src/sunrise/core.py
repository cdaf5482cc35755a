"""Exact rational interval sets and step weights.

Everything here is built on :class:`fractions.Fraction`.  Interval sets are
finite unions of open intervals, identified up to null sets, so touching
intervals are merged into one.  Step weights are compactly supported and
piecewise constant, with a cumulative-mass table used for every average.
"""

from __future__ import annotations

import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

RationalLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*$")
_RATIO_RE = re.compile(r"^\s*[+-]?\d+\s*/\s*\d+\s*$")


class DomainError(ValueError):
    """Input is well formed but outside the mathematical domain of an operation."""


def parse_rational(text: RationalLike) -> Fraction:
    """Parse ``"p/q"``, an integer or a terminating decimal into an exact Fraction.

    Floats are refused on purpose: they would silently carry binary rounding
    into quantities that are meant to be exact.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    if _RATIO_RE.match(text):
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    if _RATIONAL_RE.match(text):
        return Fraction(text.strip())
    raise ValueError(f"not a rational: {text!r}")


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# Interval sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalSet:
    """Canonical finite union of disjoint open intervals.

    Construct through :func:`normalize` unless the intervals are already
    sorted, disjoint and non-touching.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        prev = None
        for left, right in self.intervals:
            if not left < right:
                raise ValueError(f"degenerate interval ({left}, {right})")
            if prev is not None and not prev < left:
                raise ValueError("intervals must be sorted, disjoint and non-touching")
            prev = right

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    @property
    def lower(self) -> Fraction:
        return self.intervals[0][0]

    @property
    def upper(self) -> Fraction:
        return self.intervals[-1][1]

    def endpoints(self) -> list[Fraction]:
        return [e for iv in self.intervals for e in iv]

    def contains(self, x: Fraction) -> bool:
        """True when x lies in the (open) set."""
        i = bisect_right(self._lefts(), x) - 1
        return i >= 0 and x < self.intervals[i][1] and x > self.intervals[i][0]

    def _lefts(self) -> list[Fraction]:
        return [left for left, _ in self.intervals]

    def covers(self, other: "IntervalSet") -> bool:
        """other ⊆ self up to null sets."""
        lefts = self._lefts()
        for left, right in other.intervals:
            i = bisect_right(lefts, left) - 1
            if i < 0 or self.intervals[i][1] < right:
                return False
        return True

    def measure_up_to(self, x: Fraction) -> Fraction:
        """|S ∩ (-inf, x)|."""
        total = Fraction(0)
        for left, right in self.intervals:
            if right <= x:
                total += right - left
            else:
                if left < x:
                    total += x - left
                break
        return total

    def intersect_interval(self, a: Fraction, b: Fraction) -> "IntervalSet":
        out = []
        for left, right in self.intervals:
            lo, hi = max(left, a), min(right, b)
            if lo < hi:
                out.append((lo, hi))
        return IntervalSet(tuple(out))

    def shift(self, t: Fraction) -> "IntervalSet":
        return IntervalSet(tuple((l + t, r + t) for l, r in self.intervals))

    def to_json(self) -> dict:
        return {
            "intervals": [
                [format_rational(l), format_rational(r)] for l, r in self.intervals
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "IntervalSet":
        return normalize(
            (parse_rational(l), parse_rational(r)) for l, r in data["intervals"]
        )


def normalize(intervals: Iterable[Sequence[RationalLike]]) -> IntervalSet:
    """Sort, merge overlapping and touching intervals."""
    pairs = []
    for pair in intervals:
        left, right = (parse_rational(v) for v in pair)
        if not left < right:
            raise ValueError(f"interval ({left}, {right}) has left >= right")
        pairs.append((left, right))
    pairs.sort()
    merged: list[list[Fraction]] = []
    for left, right in pairs:
        if merged and left <= merged[-1][1]:
            if right > merged[-1][1]:
                merged[-1][1] = right
        else:
            merged.append([left, right])
    return IntervalSet(tuple((l, r) for l, r in merged))


def measure(s: IntervalSet) -> Fraction:
    return sum((r - l for l, r in s.intervals), Fraction(0))


def union(*sets: IntervalSet) -> IntervalSet:
    return normalize(iv for s in sets for iv in s.intervals)


def hausdorff(a: IntervalSet, b: IntervalSet) -> Fraction:
    """Hausdorff distance between the closures of two nonempty interval sets."""
    if not a or not b:
        raise ValueError("Hausdorff distance needs nonempty sets")
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def _distance_to(s: IntervalSet, x: Fraction) -> Fraction:
    best = None
    for left, right in s.intervals:
        if left <= x <= right:
            return Fraction(0)
        d = left - x if x < left else x - right
        if best is None or d < best:
            best = d
    return best


def _directed_hausdorff(a: IntervalSet, b: IntervalSet) -> Fraction:
    # sup over closure(a) of dist(., b): attained at endpoints of a or at
    # midpoints of gaps of b that fall inside a.
    candidates = a.endpoints()
    bounds = b.endpoints()
    for i in range(1, len(bounds) - 1, 2):
        mid = (bounds[i] + bounds[i + 1]) / 2
        for left, right in a.intervals:
            if left <= mid <= right:
                candidates.append(mid)
    return max(_distance_to(b, x) for x in candidates)


# ---------------------------------------------------------------------------
# Step weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Antiderivative:
    """Cumulative mass W(x) = ∫_{-inf}^x w at the breakpoints of a step weight."""

    breakpoints: tuple[Fraction, ...]
    masses: tuple[Fraction, ...]


@dataclass(frozen=True, eq=False)
class StepWeight:
    """Nonnegative piecewise-constant weight, zero outside [breakpoints[0], breakpoints[-1]].

    ``values[i]`` is the weight on the open cell (breakpoints[i], breakpoints[i+1]).
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    antiderivative: Antiderivative = field(init=False, repr=False)

    def __post_init__(self):
        bps = tuple(parse_rational(b) for b in self.breakpoints)
        vals = tuple(parse_rational(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        if len(bps) != len(vals) + 1 or not vals:
            raise ValueError("need n+1 breakpoints for n >= 1 values")
        if any(not bps[i] < bps[i + 1] for i in range(len(vals))):
            raise ValueError("breakpoints must be strictly increasing")
        if any(v < 0 for v in vals):
            raise ValueError("weight values must be nonnegative")
        if not any(v > 0 for v in vals):
            raise ValueError("weight must have a positive value somewhere")
        masses = [Fraction(0)]
        for i, v in enumerate(vals):
            masses.append(masses[-1] + v * (bps[i + 1] - bps[i]))
        object.__setattr__(self, "antiderivative", Antiderivative(bps, tuple(masses)))

    def __eq__(self, other):
        if not isinstance(other, StepWeight):
            return NotImplemented
        return self.breakpoints == other.breakpoints and self.values == other.values

    def __hash__(self):
        return hash((self.breakpoints, self.values))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def total_mass(self) -> Fraction:
        return self.antiderivative.masses[-1]

    def cumulative(self, x: Fraction) -> Fraction:
        """W(x) = ∫_{-inf}^x w, exact."""
        bps = self.breakpoints
        if x <= bps[0]:
            return Fraction(0)
        if x >= bps[-1]:
            return self.total_mass
        i = bisect_right(bps, x) - 1
        return self.antiderivative.masses[i] + self.values[i] * (x - bps[i])

    def mass(self, a: Fraction, b: Fraction) -> Fraction:
        """w(a, b) for a <= b."""
        return self.cumulative(b) - self.cumulative(a)

    def value_at(self, x: Fraction) -> Fraction:
        """w on the cell containing x; at a breakpoint, the value to the right."""
        bps = self.breakpoints
        if x < bps[0] or x >= bps[-1]:
            return Fraction(0)
        return self.values[bisect_right(bps, x) - 1]

    def left_limit(self, x: Fraction) -> Fraction:
        """w(x-)."""
        bps = self.breakpoints
        if x <= bps[0] or x > bps[-1]:
            return Fraction(0)
        return self.values[bisect_left(bps, x) - 1]

    def is_nondecreasing(self) -> bool:
        return all(self.values[i] <= self.values[i + 1] for i in range(self.n - 1))

    def shift(self, t: Fraction) -> "StepWeight":
        return StepWeight(tuple(b + t for b in self.breakpoints), self.values)

    def scale(self, c: Fraction) -> "StepWeight":
        return StepWeight(self.breakpoints, tuple(c * v for v in self.values))

    def float_tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(breakpoints, values, cumulative masses) as float arrays, cached."""
        cached = self.__dict__.get("_float_tables")
        if cached is None:
            cached = (
                np.array([float(b) for b in self.breakpoints]),
                np.array([float(v) for v in self.values]),
                np.array([float(m) for m in self.antiderivative.masses]),
            )
            object.__setattr__(self, "_float_tables", cached)
        return cached

    def to_json(self) -> dict:
        return {
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "values": [format_rational(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StepWeight":
        return cls(
            tuple(parse_rational(b) for b in data["breakpoints"]),
            tuple(parse_rational(v) for v in data["values"]),
        )


def interval_integrals(w: StepWeight, a, b, q: float = 1.0) -> np.ndarray:
    """∫_(a,b) w^q for float arrays a <= b, without prefix-sum cancellation.

    Prefix-table differences lose all digits when w(a, b) is tiny next to the
    mass to the left of a (a decaying weight far out in its tail).  Those
    entries are recomputed by summing the overlapped cells directly.
    """
    bps, vals, cum = w.float_tables()
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    vq = vals if q == 1.0 else vals**q
    table = cum if q == 1.0 else np.concatenate(([0.0], np.cumsum(np.diff(bps) * vq)))
    Wa, Wb = np.interp(a, bps, table), np.interp(b, bps, table)
    out = Wb - Wa
    for k in np.flatnonzero(out <= 1e-4 * Wb):
        i = max(int(np.searchsorted(bps, a[k], side="right")) - 1, 0)
        j = min(int(np.searchsorted(bps, b[k], side="left")), len(vq))
        if i >= j:
            out[k] = 0.0
            continue
        lens = np.minimum(bps[i + 1:j + 1], b[k]) - np.maximum(bps[i:j], a[k])
        out[k] = float(np.dot(np.maximum(lens, 0.0), vq[i:j]))
    return out


def weighted_measure(w: StepWeight, s: IntervalSet) -> Fraction:
    """∫_S w, exact."""
    return sum((w.mass(l, r) for l, r in s.intervals), Fraction(0))


def restrict(w: StepWeight, a: Fraction, b: Fraction) -> StepWeight:
    """w · 1_(a,b).

    Raises DomainError when (a, b) misses the support of w, since the result
    would be the zero weight.
    """
    a, b = parse_rational(a), parse_rational(b)
    if not a < b:
        raise ValueError(f"restrict needs a < b, got ({a}, {b})")
    lo, hi = max(a, w.breakpoints[0]), min(b, w.breakpoints[-1])
    if not lo < hi:
        raise DomainError("restriction has empty support")
    inner = [x for x in w.breakpoints if lo < x < hi]
    bps = [lo, *inner, hi]
    vals = [w.value_at(bps[i]) for i in range(len(bps) - 1)]
    if not any(v > 0 for v in vals):
        raise DomainError("restriction is the zero weight")
    return StepWeight(tuple(bps), tuple(vals))
