"""Brute-force oracles and inequality samplers.

The grid oracles recompute M+ of an indicator and its superlevel sets
without the rising-sun sweep, so they can cross-check it.  The samplers
test the one-sided reverse Hoelder and measure-ratio inequalities, and the
converse tauberian chain, at many triples a < b < c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .core import DomainError, IntervalSet, StepWeight, interval_integrals, parse_rational

PASS_TOL = 1e-9


# ---------------------------------------------------------------------------
# grid oracle for M+ 1_E
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    step: Fraction
    left: Fraction
    right: Fraction

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if not self.left < self.right:
            raise ValueError("grid window must have left < right")

    @classmethod
    def for_set(cls, E: IntervalSet, alpha: Fraction, step: Fraction) -> "GridSpec":
        """Window around E wide enough to hold every halo at level alpha.

        A halo component has length |E ∩ component| / alpha, so it never reaches
        further left than |supp| / alpha; the right margin mirrors it.
        """
        alpha = parse_rational(alpha)
        lo, hi = E.lower, E.upper
        margin = (hi - lo) / min(alpha, 1 - alpha)
        # snap the window to the grid so grid points are lo + k*step
        k = math.ceil(margin / step)
        return cls(step, lo - k * step, hi + k * step)

    def points(self) -> int:
        return int((self.right - self.left) // self.step) + 1

    def covers(self, E: IntervalSet) -> bool:
        return self.left <= E.lower and E.upper <= self.right


def _check_window(E: IntervalSet, g: GridSpec) -> None:
    if not E:
        raise DomainError("the set E is empty")
    if not g.covers(E):
        raise DomainError("grid window does not cover the set")


def grid_mplus(E: IntervalSet, x: Fraction, g: GridSpec) -> Fraction:
    """Max of |E ∩ (x, x+h)|/h over grid lengths h and right endpoints r - x."""
    _check_window(E, g)
    x = parse_rational(x)
    if not g.left <= x <= g.right:
        raise DomainError(f"point {x} lies outside the grid window")
    below = E.measure_up_to(x)
    hs = [r - x for _, r in E.intervals if r > x]
    k = 1
    while x + k * g.step <= g.right:
        hs.append(k * g.step)
        k += 1
    best = Fraction(0)
    for h in hs:
        best = max(best, (E.measure_up_to(x + h) - below) / h)
    return best


def _cum_measure(E: IntervalSet):
    knots = np.array([float(e) for e in E.endpoints()])
    cum = np.zeros(len(knots))
    cum[1::2] = np.cumsum(knots[1::2] - knots[0::2])
    cum[2::2] = cum[1:-1:2]
    return knots, cum


def grid_superlevel(
    E: IntervalSet, alpha: Fraction, g: GridSpec, max_multiples: int = 64
) -> IntervalSet:
    """Union of step-width cells centred at grid points where M+ 1_E > alpha.

    The grid values are computed in floating point from h in the first
    ``max_multiples`` grid lengths and every right endpoint of E (which is
    where the sup is attained for indicators), plus the interior test.
    """
    _check_window(E, g)
    alpha = parse_rational(alpha)
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    n = g.points()
    xs = float(g.left) + float(g.step) * np.arange(n)
    knots, cum = _cum_measure(E)
    m = lambda t: np.interp(t, knots, cum)
    mx = m(xs)
    best = np.zeros(n)
    for r in knots[1::2]:
        h = r - xs
        ok = h > 0
        best[ok] = np.maximum(best[ok], (m(r) - mx[ok]) / h[ok])
    step = float(g.step)
    for k in range(1, max_multiples + 1):
        h = k * step
        best = np.maximum(best, (m(xs + h) - mx) / h)
    lefts, rights = knots[0::2], knots[1::2]
    idx = np.searchsorted(lefts, xs, side="right") - 1
    inside = (idx >= 0) & (xs < rights[np.clip(idx, 0, None)])
    best[inside] = 1.0
    marked = best > float(alpha)
    # run-length encode the marked grid points into cells
    edges = np.diff(np.concatenate(([0], marked.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    half = g.step / 2
    return IntervalSet(
        tuple(
            (g.left + int(i) * g.step - half, g.left + int(j) * g.step + half)
            for i, j in zip(starts, ends)
        )
    )


# ---------------------------------------------------------------------------
# inequality samplers
# ---------------------------------------------------------------------------


@dataclass
class InequalityReport:
    tag: str
    samples: int = 0
    skipped: int = 0
    worst_ratio: float = 0.0
    worst_witness: Optional[dict] = None
    flags: int = 0  # samples where a chain inequality fails under estimated constants
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst_ratio <= 1 + PASS_TOL

    def absorb(self, ratios: np.ndarray, witnesses: Callable[[int], dict]) -> None:
        self.samples += len(ratios)
        if len(ratios):
            i = int(np.argmax(ratios))
            if ratios[i] > self.worst_ratio or self.worst_witness is None:
                self.worst_ratio = float(ratios[i])
                self.worst_witness = witnesses(i)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "tag": self.tag,
            "samples": self.samples,
            "skipped": self.skipped,
            "worst_ratio": self.worst_ratio,
            "worst_witness": self.worst_witness,
            "flags": self.flags,
            "passed": self.passed,
            "params": self.params,
        }


def sample_triples(w: StepWeight, count: int, rng: np.random.Generator):
    """Triples lo <= a < b < c <= hi inside the support of w.

    Aspect ratios (c - b)/(b - a) are log-uniform in [2^-10, 2^10] and the
    total length is log-uniform down to 2^-12 of the support.  A quarter of
    the samples snap a, b or c to a breakpoint, where the weight jumps.
    """
    bps, _, _ = w.float_tables()
    lo, hi = bps[0], bps[-1]
    span = hi - lo
    length = span * 2.0 ** -rng.uniform(0, 12, count)
    aspect = 2.0 ** rng.uniform(-10, 10, count)
    a = lo + (span - length) * rng.random(count)
    b = a + length / (1 + aspect)
    c = a + length
    snap = rng.random(count) < 0.25
    which = rng.integers(0, 3, count)
    pick = bps[rng.integers(0, len(bps), count)]
    a = np.where(snap & (which == 0) & (pick < b), pick, a)
    b = np.where(snap & (which == 1) & (pick > a) & (pick < c), pick, b)
    c = np.where(snap & (which == 2) & (pick > b), pick, c)
    return a, b, c


def _triple_witness(a, b, c, i, **extra):
    return {"a": float(a[i]), "b": float(b[i]), "c": float(c[i]), **extra}


def reverse_holder_check(
    w: StepWeight, eps: float, budget: int = 10_000, seed: int = 0, triples=None
) -> InequalityReport:
    """|(b,c)|^eps ∫_(a,b) w^(1+eps) <= 2 (∫_(a,c) w)^(1+eps) at sampled triples."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    a, b, c = triples if triples is not None else sample_triples(w, budget, rng)
    a, b, c = (np.asarray(t, dtype=float) for t in (a, b, c))
    wac = interval_integrals(w, a, c)
    live = wac > 0
    # compare in log space: the powers overflow for very heavy weights
    with np.errstate(divide="ignore"):
        lhs = eps * np.log(c - b) + np.log(interval_integrals(w, a, b, 1 + eps))
        rhs = math.log(2) + (1 + eps) * np.log(np.where(live, wac, 1.0))
    ratio = np.exp(lhs[live] - rhs[live])
    report = InequalityReport("reverse-holder", skipped=int((~live).sum()), params={"eps": eps})
    a, b, c = a[live], b[live], c[live]
    report.absorb(ratio, lambda i: _triple_witness(a, b, c, i))
    return report


def _heavy_sets(w: StepWeight, a, b, rng):
    """E = the k heaviest cells of w inside (a, b), k random; returns (|E|, w(E))."""
    bps, vals, _ = w.float_tables()
    size = np.empty(len(a))
    mass = np.empty(len(a))
    for s in range(len(a)):
        i = max(np.searchsorted(bps, a[s], side="right") - 1, 0)
        j = np.searchsorted(bps, b[s], side="left")
        lens = np.minimum(bps[i + 1:j + 1], b[s]) - np.maximum(bps[i:j], a[s])
        v = vals[i:j]
        order = np.argsort(-v, kind="stable")
        k = int(rng.integers(1, len(order) + 1))
        size[s] = lens[order[:k]].sum()
        mass[s] = (lens[order[:k]] * v[order[:k]]).sum()
    return size, mass


def sample_sets(w: StepWeight, a, b, rng: np.random.Generator):
    """Sets E ⊆ (a, b): heavy cells, random, left and right subintervals.

    Returns (|E|, w(E), kind) arrays.
    """
    n = len(a)
    kind = rng.integers(0, 4, n)
    u = rng.random(n)
    v = rng.random(n)
    lo = np.where(kind == 1, a + (b - a) * np.minimum(u, v), a)
    lo = np.where(kind == 3, b - (b - a) * u, lo)
    hi = np.where(kind == 1, a + (b - a) * np.maximum(u, v), b)
    hi = np.where(kind == 2, a + (b - a) * u, hi)
    size = hi - lo
    mass = interval_integrals(w, lo, hi)
    heavy = np.flatnonzero(kind == 0)
    if len(heavy):
        size[heavy], mass[heavy] = _heavy_sets(w, a[heavy], b[heavy], rng)
    return size, mass, kind


SET_KINDS = ("heavy", "random", "left", "right")


def measure_ratio_check(
    w: StepWeight,
    eps: Optional[float] = None,
    exponent: Optional[float] = None,
    budget: int = 10_000,
    seed: int = 0,
) -> InequalityReport:
    """w(E)/w(a,c) <= 2 (|E|/|(b,c)|)^exponent, exponent = eps/(1+eps) unless given."""
    if exponent is None:
        if eps is None or not 0 < eps < 1:
            raise DomainError("give eps in (0, 1) or an explicit exponent")
        exponent = eps / (1 + eps)
    if exponent <= 0:
        raise DomainError("exponent must be positive")
    rng = np.random.default_rng(seed)
    a, b, c = sample_triples(w, budget, rng)
    size, mass, kind = sample_sets(w, a, b, rng)
    wac = interval_integrals(w, a, c)
    live = wac > 0
    rhs = 2 * (size / (c - b)) ** exponent
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(mass > 0, mass / np.where(live, wac, 1.0) / rhs, 0.0)
    report = InequalityReport(
        "measure-ratio", skipped=int((~live).sum()), params={"eps": eps, "exponent": exponent}
    )
    sel = np.flatnonzero(live)
    report.absorb(
        ratio[sel],
        lambda i: _triple_witness(
            a[sel], b[sel], c[sel], i,
            set=SET_KINDS[kind[sel][i]], size=float(size[sel][i]), mass=float(mass[sel][i]),
        ),
    )
    return report


def solyanik_converse_check(
    w: StepWeight,
    beta: float,
    budget: int = 10_000,
    seed: int = 0,
    curve: Optional[Callable[[float], Optional[float]]] = None,
) -> InequalityReport:
    """w(E)/w(a,c) <= e (|E|/|(b,c)|)^(1/beta) at sampled triples and sets.

    With ``curve`` (alpha -> lower bound for C_w(alpha)) each sample with
    r = |E|/|(b,c)| < e^-beta is also checked against the chain bound
    w(E) <= (C(1 - r) - 1) w(a,c).  The curve is only a lower bound, so
    failures there are counted as flags rather than failures.
    """
    if beta <= 1:
        raise DomainError("beta must exceed 1")
    rng = np.random.default_rng(seed)
    a, b, c = sample_triples(w, budget, rng)
    size, mass, kind = sample_sets(w, a, b, rng)
    wac = interval_integrals(w, a, c)
    live = wac > 0
    r = size / (c - b)
    lhs = np.where(live & (mass > 0), mass / np.where(live, wac, 1.0), 0.0)
    rhs = math.e * r ** (1 / beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs > 0, lhs / rhs, 0.0)
    report = InequalityReport(
        "solyanik-converse", skipped=int((~live).sum()), params={"beta": beta}
    )
    if curve is not None:
        for s in np.flatnonzero(live & (r < math.exp(-beta)) & (lhs > 0)):
            bound = curve(1 - float(r[s]))
            if bound is not None and lhs[s] > bound - 1 + PASS_TOL:
                report.flags += 1
    sel = np.flatnonzero(live)
    report.absorb(
        ratio[sel],
        lambda i: _triple_witness(
            a[sel], b[sel], c[sel], i,
            set=SET_KINDS[kind[sel][i]], size=float(size[sel][i]), mass=float(mass[sel][i]),
        ),
    )
    return report
