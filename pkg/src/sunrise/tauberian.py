"""Lower bounds for the weighted tauberian constant of M+ and what follows from them.

C_w(alpha) = sup_E w({M+ 1_E > alpha}) / w(E).  Every candidate set E is
evaluated exactly: the halo comes from the rising-sun sweep and both masses
are rational, so each reported value is a certified lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .constants import SearchConfig, nested_order
from .core import (
    DomainError,
    IntervalSet,
    StepWeight,
    format_rational,
    normalize,
    parse_rational,
    weighted_measure,
)
from .maximal import halo, halo_iterate, halo_iteration_bound

FAMILIES = ("single", "random", "comb", "adapted")
DEFAULT_WINDOW = (Fraction(9, 10), Fraction(995, 1000))
FLAT = 1e-9


class FlatCurveError(DomainError):
    """The tauberian curve is indistinguishable from 1, so no exponent can be fitted."""


@dataclass(frozen=True)
class TauberianEstimate:
    alpha: Fraction
    ratio: Fraction  # exact w(H)/w(E) at the witness
    witness: IntervalSet
    family: str
    candidates: int = 0

    @property
    def value(self) -> float:
        return float(self.ratio)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "alpha": format_rational(self.alpha),
            "value": self.value,
            "ratio": format_rational(self.ratio),
            "family": self.family,
            "witness": self.witness.to_json(),
            "candidates": self.candidates,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TauberianEstimate":
        return cls(
            parse_rational(data["alpha"]),
            parse_rational(data["ratio"]),
            IntervalSet.from_json(data["witness"]),
            data["family"],
            data.get("candidates", 0),
        )


def tauberian_ratio(w: StepWeight, E: IntervalSet, alpha: Fraction) -> Optional[Fraction]:
    """w(H_alpha(E)) / w(E), or None when w(E) = 0."""
    mass = weighted_measure(w, E)
    if mass == 0:
        return None
    return weighted_measure(w, halo(E, alpha)) / mass


# ---------------------------------------------------------------------------
# candidate families
# ---------------------------------------------------------------------------


def _anchors(w: StepWeight, base: int) -> list[Fraction]:
    bps = w.breakpoints
    pts = [bps[i] for i in nested_order(len(bps))[: base]]
    mids = [(bps[i] + bps[i + 1]) / 2 for i in nested_order(len(bps) - 1)[: base]]
    return sorted(set(pts) | set(mids))


def _anchor_pairs(w: StepWeight, base: int) -> list[tuple[Fraction, Fraction]]:
    pts = _anchors(w, base)
    return [(x, r) for i, x in enumerate(pts) for r in pts[i + 1:]]


def single_family(w: StepWeight, alpha: Fraction, cfg: SearchConfig) -> Iterable[IntervalSet]:
    """Single intervals: right-flush sets whose halo is exactly an anchor pair,
    and dyadic-length intervals starting at an anchor."""
    lo, hi = w.support
    for x, r in _anchor_pairs(w, cfg.base):
        yield IntervalSet(((r - alpha * (r - x), r),))
    width = hi - lo
    for x in _anchors(w, cfg.base):
        for k in range(cfg.base):
            length = width / 2**k
            if x + length <= hi:
                yield IntervalSet(((x, x + length),))


def random_family(w: StepWeight, alpha: Fraction, cfg: SearchConfig) -> Iterable[IntervalSet]:
    """Unions of 1 to 4 random intervals with dyadic endpoints inside the support."""
    lo, hi = w.support
    rng = np.random.default_rng(cfg.seed)
    for _ in range(4 * cfg.base):
        k = int(rng.integers(1, 5))
        pts = np.sort(rng.random(2 * k))
        ivs = []
        for j in range(k):
            a = lo + (hi - lo) * Fraction(float(pts[2 * j]))
            b = lo + (hi - lo) * Fraction(float(pts[2 * j + 1]))
            if a < b:
                ivs.append((a, b))
        if ivs:
            yield normalize(ivs)


def comb_family(w: StepWeight, alpha: Fraction, cfg: SearchConfig) -> Iterable[IntervalSet]:
    """n equal intervals with equal gaps in front of each, over anchor windows."""
    duties = sorted({alpha, (1 + alpha) / 2, (3 + alpha) / 4})
    pairs = _anchor_pairs(w, max(2, cfg.base // 2))
    for x, r in pairs:
        for j in range(min(cfg.base, 7)):
            n = 2**j
            period = (r - x) / n
            for d in duties:
                yield IntervalSet(
                    tuple(
                        (x + i * period + (1 - d) * period, x + (i + 1) * period)
                        for i in range(n)
                    )
                )


def adapted_family(
    w: StepWeight, alpha: Fraction, cfg: SearchConfig, max_cells: int = 256
) -> Iterable[IntervalSet]:
    """Cheapest E whose halo still covers an anchor window.

    For a window (x, r) the halo covers it when every prefix of the window
    carries at most alpha times its length of E and the total is
    alpha * (r - x).  Those prefix constraints form a polymatroid, so filling
    the lightest cells first (mass flush right in each cell) minimises w(E).
    Windows with many cells are coarsened to ``max_cells`` groups.
    """
    bps, vals, _ = w.float_tables()
    for x, r in _anchor_pairs(w, cfg.base):
        fx, fr = float(x), float(r)
        inner = bps[(bps > fx) & (bps < fr)]
        edges = np.concatenate(([fx], inner, [fr]))
        if len(edges) - 1 > max_cells:
            edges = edges[np.linspace(0, len(edges) - 1, max_cells + 1).round().astype(int)]
            edges = np.unique(edges)
        lengths = np.diff(edges)
        cum = np.interp(edges, bps, np.concatenate(([0.0], np.cumsum(vals * np.diff(bps)))))
        cost = np.diff(cum) / lengths
        a = float(alpha)
        slack = a * (edges[1:] - fx)
        remaining = a * (fr - fx)
        alloc = np.zeros_like(lengths)
        for j in np.lexsort((-edges[1:], cost)):
            if remaining <= 0:
                break
            m = min(lengths[j], slack[j:].min(), remaining)
            if m <= 0:
                continue
            alloc[j] = m
            slack[j:] -= m
            remaining -= m
        ivs = [
            (Fraction(float(edges[j + 1] - alloc[j])), Fraction(float(edges[j + 1])))
            for j in range(len(alloc))
            if alloc[j] > 0
        ]
        ivs = [(max(p, x), min(q, r)) for p, q in ivs]
        ivs = [(p, q) for p, q in ivs if p < q]
        if ivs:
            yield normalize(ivs)


_FAMILY_FUNCS = {
    "single": single_family,
    "random": random_family,
    "comb": comb_family,
    "adapted": adapted_family,
}


def tauberian_lower(
    w: StepWeight,
    alpha: Fraction,
    families: Sequence[str] = FAMILIES,
    cfg: SearchConfig = SearchConfig(),
) -> TauberianEstimate:
    alpha = parse_rational(alpha)
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not families:
        raise ValueError("select at least one candidate family")
    best = None
    count = 0
    for name in families:
        if name not in _FAMILY_FUNCS:
            raise ValueError(f"unknown family {name!r}; choose from {FAMILIES}")
        for E in _FAMILY_FUNCS[name](w, alpha, cfg):
            ratio = tauberian_ratio(w, E, alpha)
            if ratio is None:
                continue
            count += 1
            if best is None or ratio > best[0] or (ratio == best[0] and E.intervals < best[1].intervals):
                best = (ratio, E, name)
    if best is None:
        raise DomainError("no candidate set carries positive weight")
    return TauberianEstimate(alpha, best[0], best[1], best[2], count)


# ---------------------------------------------------------------------------
# Solyanik curve
# ---------------------------------------------------------------------------


def regularize(values: Sequence[float]) -> list:
    """Running max from the right: the smallest nonincreasing majorant.

    Valid for lower bounds of a nonincreasing function of alpha: a bound at a
    larger alpha is also a bound at every smaller one.
    """
    out = list(values)
    for i in range(len(out) - 2, -1, -1):
        out[i] = max(out[i], out[i + 1])
    return out


@dataclass(frozen=True)
class SolyanikCurve:
    alphas: tuple[Fraction, ...]
    raw: tuple[float, ...]
    values: tuple[float, ...]  # regularized
    delta: float
    K: float
    window: tuple[Fraction, Fraction]
    used: int
    families: tuple[str, ...] = FAMILIES
    seed: int = 0

    def at(self, alpha: float) -> Optional[float]:
        """Lower bound for C_w(alpha): the curve value at the first grid alpha >= alpha."""
        for a, v in zip(self.alphas, self.values):
            if a >= alpha:
                return v
        return None

    def to_csv(self) -> str:
        lines = ["alpha,value,value_minus_1"]
        for a, v in zip(self.alphas, self.values):
            lines.append(f"{format_rational(a)},{v!r},{v - 1!r}")
        return "\n".join(lines) + "\n"

    def fit_json(self) -> dict:
        return {
            "schema": 1,
            "delta": self.delta,
            "K": self.K,
            "window": [format_rational(self.window[0]), format_rational(self.window[1])],
            "points_used": self.used,
            "family": list(self.families),
            "seed": self.seed,
        }


def fit_exponent(alphas: Sequence[float], values: Sequence[float]) -> tuple[float, float, int]:
    """Least squares of log(value - 1) on log(1 - alpha); returns (delta, K, points used)."""
    xs, ys = [], []
    for a, v in zip(alphas, values):
        if v - 1 > FLAT:
            xs.append(math.log(1 - float(a)))
            ys.append(math.log(v - 1))
    if len(xs) < 4:
        raise FlatCurveError(
            f"delta unresolved: only {len(xs)} points with value - 1 > {FLAT}, curve flat"
        )
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(slope), float(math.exp(intercept)), len(xs)


def solyanik_fit(
    w: StepWeight,
    alphas: Sequence[Fraction],
    families: Sequence[str] = FAMILIES,
    cfg: SearchConfig = SearchConfig(),
    window: tuple[Fraction, Fraction] = DEFAULT_WINDOW,
) -> SolyanikCurve:
    alphas = sorted(parse_rational(a) for a in alphas)
    if any(not 0 < a < 1 for a in alphas):
        raise DomainError("alphas must lie in (0, 1)")
    if len(alphas) < 4 or alphas[-1] < Fraction(9, 10):
        raise DomainError("need at least 4 alphas with the largest >= 0.9")
    raw = [tauberian_lower(w, a, families, cfg).value for a in alphas]
    vals = regularize(raw)
    lo, hi = window
    sel = [(a, v) for a, v in zip(alphas, vals) if lo <= a <= hi]
    delta, K, used = fit_exponent([a for a, _ in sel], [v for _, v in sel])
    return SolyanikCurve(
        tuple(alphas), tuple(raw), tuple(vals), delta, K, (lo, hi), used,
        tuple(families), cfg.seed,
    )


# ---------------------------------------------------------------------------
# restricted weak type
# ---------------------------------------------------------------------------


def random_sets(
    rng: np.random.Generator, lo: Fraction, hi: Fraction, count: int, max_parts: int = 4,
    denominator: int = 64,
) -> list[IntervalSet]:
    """Seeded unions of up to ``max_parts`` intervals with rational endpoints in [lo, hi]."""
    out = []
    span = hi - lo
    while len(out) < count:
        k = int(rng.integers(1, max_parts + 1))
        cuts = sorted(set(int(c) for c in rng.integers(0, denominator + 1, size=2 * k)))
        if len(cuts) < 2:
            continue
        ivs = [
            (lo + span * Fraction(cuts[i], denominator), lo + span * Fraction(cuts[i + 1], denominator))
            for i in range(0, len(cuts) - 1, 2)
        ]
        out.append(normalize(ivs))
    return out


@dataclass
class WeakTypeReport:
    alpha0: Fraction
    C0: Fraction
    p: float
    samples: int = 0
    worst_slack: float = math.inf  # min over samples of bound / observed ratio
    worst_witness: Optional[dict] = None
    estimation_gap: int = 0  # bound under the estimated C0 fails
    hard_violations: int = 0  # an exact inclusion or monotonicity fails: a bug
    exact: bool = False

    @property
    def passed(self) -> bool:
        return self.hard_violations == 0 and self.estimation_gap == 0

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "alpha0": format_rational(self.alpha0),
            "C0": format_rational(self.C0),
            "p": self.p,
            "samples": self.samples,
            "worst_slack": self.worst_slack,
            "worst_witness": self.worst_witness,
            "estimation_gap": self.estimation_gap,
            "hard_violations": self.hard_violations,
            "exact": self.exact,
            "passed": self.passed,
        }


def restricted_weak_type_check(
    w: StepWeight,
    alpha0: Fraction,
    lambdas: Sequence[Fraction],
    trials: int,
    seed: int = 0,
    cfg: SearchConfig = SearchConfig(),
    C0: Optional[Fraction] = None,
    region: Optional[tuple[Fraction, Fraction]] = None,
) -> WeakTypeReport:
    """Check w(H_lam(E)) <= C0 * lam^(-p) * w(E) with p = log C0 / log(1/alpha0).

    C0 is only a lower bound for the true constant, so a failure of that
    bound is counted as an estimation gap.  Independently every sample is
    checked against exact facts that hold for any weight: monotonicity in the
    level above alpha0, and the halo-iteration inclusion below it.  Those
    are counted as hard violations.
    """
    alpha0 = parse_rational(alpha0)
    if not 0 < alpha0 < 1:
        raise DomainError(f"alpha0 must lie in (0, 1), got {alpha0}")
    lambdas = [parse_rational(l) for l in lambdas]
    if any(not 0 < l < 1 for l in lambdas):
        raise DomainError("every lambda must lie in (0, 1)")
    if C0 is None:
        C0 = tauberian_lower(w, alpha0, cfg=cfg).ratio
    p = math.log(C0) / math.log(1 / alpha0)
    exact_p = p == round(p) and p >= 0
    report = WeakTypeReport(alpha0, C0, p, exact=exact_p)
    rng = np.random.default_rng(seed)
    lo, hi = region if region is not None else w.support
    alpha_mid = (1 + alpha0) / 2
    for E in random_sets(rng, lo, hi, trials):
        mass = weighted_measure(w, E)
        if mass == 0:
            continue
        H0 = halo(E, alpha0)
        for lam in lambdas:
            H = halo(E, lam)
            wH = weighted_measure(w, H)
            if exact_p:
                bound = C0 * (1 / lam) ** int(round(p)) * mass
                slack = float(bound / wH) if wH else math.inf
                failed = wH > bound
            else:
                bound = float(C0) * (1 / float(lam)) ** p * float(mass)
                slack = bound / float(wH) if wH else math.inf
                failed = slack < 1 - 1e-12
            report.samples += 1
            if slack < report.worst_slack:
                report.worst_slack = slack
                report.worst_witness = {"E": E.to_json(), "lambda": format_rational(lam)}
            if failed:
                report.estimation_gap += 1
            if lam >= alpha0:
                hard = not H0.covers(H)
            else:
                alpha = max(alpha_mid, (1 + lam) / 2)
                N = halo_iteration_bound(lam, alpha)
                hard = not halo_iterate(E, alpha, N).iterates[-1].covers(H)
            if hard:
                report.hard_violations += 1
    return report


# ---------------------------------------------------------------------------
# embedding threshold and Hoelder modulus
# ---------------------------------------------------------------------------


def embedding_threshold(fw: float, c: float) -> float:
    """p* = exp(c * fw): A_infty weights with constant fw lie in A_p for p > p*."""
    if fw < 1 or c <= 0:
        raise DomainError("need fw >= 1 and c > 0")
    return math.exp(c * fw)


@dataclass
class HolderReport:
    pairs: int
    K_unit: float  # smallest K for exponent 1
    gamma: float  # fitted exponent 1/(c fw)
    K: float
    c: Optional[float]
    K_cap: float
    resolved: bool

    def to_json(self) -> dict:
        return {"schema": 1, **self.__dict__}


def holder_constant(curve: dict, pairs, gamma: float, exact: bool = False):
    """Smallest K with |C(x) - C(y)| <= K C(y) ((y - x)/x)^gamma over all pairs."""
    best = Fraction(0) if exact else 0.0
    for x, y in pairs:
        if x == y:
            continue
        cx, cy = curve[x], curve[y]
        r = (y - x) / x
        if exact:
            k = abs(cx - cy) / (cy * r)
        else:
            k = abs(float(cx) - float(cy)) / (float(cy) * float(r) ** gamma)
        best = max(best, k)
    return best


def holder_modulus_check(
    w: StepWeight,
    pairs: Sequence[tuple[Fraction, Fraction]],
    families: Sequence[str] = FAMILIES,
    cfg: SearchConfig = SearchConfig(),
    fw: Optional[float] = None,
    K_cap: float = 4.0,
) -> HolderReport:
    """Fit the local Hoelder modulus of the estimated tauberian curve.

    For each exponent on a grid in (0, 1] the smallest admissible K is
    computed; the reported exponent is the largest one whose K stays below
    ``K_cap`` (or the smallest grid exponent when none does).  With an
    A_infty estimate ``fw`` the exponent is converted to c = 1/(gamma fw).
    """
    pairs = [(parse_rational(x), parse_rational(y)) for x, y in pairs]
    if any(not (0 < x <= y < 1) for x, y in pairs):
        raise DomainError("pairs must satisfy 0 < x <= y < 1")
    alphas = sorted({a for pr in pairs for a in pr})
    ests = [tauberian_lower(w, a, families, cfg).ratio for a in alphas]
    curve = dict(zip(alphas, regularize(ests)))
    K_unit = float(holder_constant(curve, pairs, 1.0, exact=True))
    grid = [k / 100 for k in range(100, 0, -1)]
    gamma, K = grid[-1], float(holder_constant(curve, pairs, grid[-1]))
    for g in grid:
        k = holder_constant(curve, pairs, g)
        if k <= K_cap:
            gamma, K = g, float(k)
            break
    resolved = math.isfinite(K)
    c = 1 / (gamma * fw) if fw else None
    return HolderReport(len(pairs), K_unit, gamma, K, c, K_cap, resolved)
