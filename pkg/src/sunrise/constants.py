"""Lower-bound estimators for one-sided Muckenhoupt constants.

All three constants are suprema over intervals or interval triples.  Each
estimator evaluates a nested candidate family (breakpoints and cell
midpoints, introduced coarse-to-fine, plus a seeded random stream), then runs
a compass search from every candidate that improved the incumbent.  The
returned value is the objective at the returned witness, so it is a lower
bound by construction.

Weights are compactly supported and every constant is taken over intervals
inside the support hull [breakpoints[0], breakpoints[-1]].  Zero extension
outside the support would make the A_infty and A_1 quantities infinite for
every compactly supported weight.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .core import DomainError, StepWeight, format_rational, interval_integrals, parse_rational
from .maximal import LowerHull, mminus_at_breakpoints, mminus_weight_at


@dataclass(frozen=True)
class SearchConfig:
    base: int = 8
    rounds: int = 3
    steps: int = 16
    seed: int = 0
    tol: float = 1e-6

    def __post_init__(self):
        for name in ("base", "rounds", "steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"SearchConfig.{name} must be >= 1")
        if not 0 < self.tol <= 1e-3:
            raise ValueError("SearchConfig.tol must lie in (0, 1e-3]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConstantEstimate:
    kind: str  # "A1", "Ap" or "FujiiWilson"
    value: float
    witness: dict
    budget: dict
    p: Optional[float] = None
    evaluations: int = field(default=0, compare=False)

    def to_json(self) -> dict:
        out = {"schema": 1, "kind": self.kind, "value": self.value}
        if self.p is not None:
            out["p"] = self.p
        out["witness"] = self.witness
        out["budget"] = self.budget
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ConstantEstimate":
        return cls(
            data["kind"], data["value"], data["witness"], data["budget"], data.get("p")
        )


# ---------------------------------------------------------------------------
# candidate machinery shared by the searches
# ---------------------------------------------------------------------------


def nested_order(n: int) -> list[int]:
    """Indices 0..n-1, coarse to fine: both ends, then bisection midpoints."""
    if n <= 0:
        return []
    if n == 1:
        return [0]
    order = [0, n - 1]
    queue = [(0, n - 1)]
    head = 0
    while head < len(queue):
        lo, hi = queue[head]
        head += 1
        if hi - lo < 2:
            continue
        mid = (lo + hi) // 2
        order.append(mid)
        queue.append((lo, mid))
        queue.append((mid, hi))
    return order


def axis_points(w: StepWeight, base: int, rng: np.random.Generator) -> list[float]:
    """Per-level candidate coordinates: one breakpoint, one cell midpoint and one
    random point of the support per level, so a larger ``base`` only appends."""
    bps, _, _ = w.float_tables()
    lo, hi = bps[0], bps[-1]
    bp_order = nested_order(len(bps))
    mid_order = nested_order(len(bps) - 1)
    pts = []
    for level in range(base):
        u = lo + (hi - lo) * rng.random()
        if level < len(bp_order):
            pts.append(float(bps[bp_order[level]]))
        if level < len(mid_order):
            i = mid_order[level]
            pts.append(float(0.5 * (bps[i] + bps[i + 1])))
        pts.append(float(u))
    return pts


def _records(values: Sequence[float]) -> list[int]:
    best = -math.inf
    out = []
    for i, v in enumerate(values):
        if v > best:
            best = v
            out.append(i)
    return out


def compass_search(
    f: Callable[[tuple], float],
    start: tuple,
    fstart: float,
    lo: float,
    hi: float,
    trials: int,
) -> tuple[tuple, float, int]:
    """Anytime compass search over increasing coordinate tuples in [lo, hi].

    The trial sequence depends only on the start point, so a larger trial
    budget extends the same path and never ends lower.
    """
    x, fx = start, fstart
    d = len(x)
    h = (hi - lo) / 8.0
    fails = 0
    k = 0
    evals = 0
    while k < trials:
        j, sign = divmod(k % (2 * d), 2)
        k += 1
        cand = list(x)
        cand[j] += h if sign == 0 else -h
        cand = tuple(cand)
        ok = lo <= cand[0] and cand[-1] <= hi and all(
            cand[i] < cand[i + 1] for i in range(d - 1)
        )
        if ok:
            fc = f(cand)
            evals += 1
            if fc > fx:
                x, fx = cand, fc
                fails = 0
                continue
        fails += 1
        if fails >= 2 * d:
            h *= 0.5
            fails = 0
    return x, fx, evals


def _search(
    f: Callable[[tuple], float],
    candidates: list[tuple],
    lo: float,
    hi: float,
    cfg: SearchConfig,
) -> tuple[tuple, float, int]:
    values = [f(c) for c in candidates]
    best_x, best_f = None, -math.inf
    evals = len(values)
    for i in _records(values):
        x, fx, n = compass_search(f, candidates[i], values[i], lo, hi, cfg.rounds * cfg.steps)
        evals += n
        for cand, fc in ((candidates[i], values[i]), (x, fx)):
            if fc > best_f or (fc == best_f and cand < best_x):
                best_x, best_f = cand, fc
    return best_x, best_f, evals


def _budget(cfg: SearchConfig, n_candidates: int, evals: int) -> dict:
    return {**cfg.to_json(), "candidates": n_candidates, "evaluations": evals}


def _nested_tuples(pts: list[float], size: int) -> list[tuple]:
    """Sorted distinct tuples of the given size, ordered by the level at which
    their last coordinate was introduced."""
    out = []
    seen = set()
    for j in range(len(pts)):
        new = pts[j]
        earlier = pts[:j]
        if size == 2:
            combos = [(e,) for e in earlier]
        else:
            combos = [(e1, e2) for i, e1 in enumerate(earlier) for e2 in earlier[i + 1:]]
        for combo in combos:
            t = tuple(sorted((*combo, new)))
            if len(set(t)) == size and t not in seen:
                seen.add(t)
                out.append(t)
    return out


# ---------------------------------------------------------------------------
# A_p
# ---------------------------------------------------------------------------


class SigmaWeight:
    """sigma = w^(-1/(p-1)) on the support of w, zero elsewhere.

    Values are kept as logarithms: for p close to 1 the dual weight of an
    ordinary step weight overflows binary64 long before the A_p objective does.
    """

    def __init__(self, w: StepWeight, p: float):
        if not p > 1:
            raise DomainError(f"p must exceed 1, got {p}")
        if any(v == 0 for v in w.values):
            raise DomainError("weight vanishes inside its support; sigma is undefined")
        self.w = w
        self.p = float(p)
        bps, vals, _ = w.float_tables()
        self.bps = bps
        self.log_values = -np.log(vals) / (self.p - 1.0)

    def value_at(self, x: float) -> float:
        i = int(np.searchsorted(self.bps, x, side="right")) - 1
        if i < 0 or i >= len(self.log_values):
            return 0.0
        return float(np.exp(self.log_values[i]))

    def log_mass(self, b: float, c: float) -> float:
        """log sigma(b, c); -inf when the interval misses the support."""
        bps = self.bps
        b, c = max(b, bps[0]), min(c, bps[-1])
        if not b < c:
            return -math.inf
        i0 = max(int(np.searchsorted(bps, b, side="right")) - 1, 0)
        i1 = min(int(np.searchsorted(bps, c, side="left")), len(bps) - 1)
        left = np.maximum(bps[i0:i1], b)
        right = np.minimum(bps[i0 + 1:i1 + 1], c)
        lengths = right - left
        logs = self.log_values[i0:i1]
        keep = lengths > 0
        lengths, logs = lengths[keep], logs[keep]
        m = logs.max()
        return float(m + math.log(np.sum(lengths * np.exp(logs - m))))

    def mass(self, b: float, c: float) -> float:
        return math.exp(self.log_mass(b, c))


def sigma_weight(w: StepWeight, p: float) -> SigmaWeight:
    return SigmaWeight(w, p)


def _float_mass(w: StepWeight, a: float, b: float) -> float:
    return float(interval_integrals(w, a, b)[0])


def ap_objective(w: StepWeight, sigma: SigmaWeight, a: float, b: float, c: float) -> float:
    """(w(a,b)/|(a,c)|) (sigma(b,c)/|(a,c)|)^(p-1), evaluated in log space."""
    wab = _float_mass(w, a, b)
    if wab <= 0:
        return 0.0
    ls = sigma.log_mass(b, c)
    if ls == -math.inf:
        return 0.0
    span = math.log(c - a)
    return math.exp(math.log(wab) - span + (sigma.p - 1.0) * (ls - span))


def ap_plus_lower(w: StepWeight, p: float, cfg: SearchConfig = SearchConfig()) -> ConstantEstimate:
    sigma = sigma_weight(w, p)
    rng = np.random.default_rng(cfg.seed)
    pts = axis_points(w, cfg.base, rng)
    candidates = _nested_tuples(pts, 3)
    lo, hi = float(w.breakpoints[0]), float(w.breakpoints[-1])

    def f(t):
        return ap_objective(w, sigma, *t)

    (a, b, c), value, evals = _search(f, candidates, lo, hi, cfg)
    return ConstantEstimate(
        "Ap",
        value,
        {"a": a, "b": b, "c": c},
        _budget(cfg, len(candidates), evals),
        p=float(p),
    )


# ---------------------------------------------------------------------------
# A_1
# ---------------------------------------------------------------------------


def a1_plus(w: StepWeight, cfg: SearchConfig = SearchConfig()) -> ConstantEstimate:
    """ess sup of M- w / w over the support.

    On each cell every average (W(x) - W(t)) / (x - t) is monotone in x, so
    the sup over a cell is one of the two one-sided limits of M- w at the
    cell's ends.  Those come from a single exact hull sweep; the cell
    midpoints are checked on top as a consistency guard.
    """
    if any(v == 0 for v in w.values):
        raise DomainError("weight vanishes inside its support; A1 ratio is unbounded")
    limits = mminus_at_breakpoints(w)
    best = None
    for i, c in enumerate(w.values):
        cands = [
            (limits[i][1] / c, w.breakpoints[i], "right"),
            (limits[i + 1][0] / c, w.breakpoints[i + 1], "left"),
        ]
        if i < cfg.base:
            mid = (w.breakpoints[i] + w.breakpoints[i + 1]) / 2
            cands.append((mminus_weight_at(w, mid) / c, mid, "at"))
        for ratio, x, side in cands:
            key = (ratio, -x)
            if best is None or key > best[0]:
                best = (key, ratio, x, side)
    _, ratio, x, side = best
    return ConstantEstimate(
        "A1",
        float(ratio),
        {"x": format_rational(x), "side": side, "ratio": format_rational(ratio)},
        _budget(cfg, 2 * w.n + min(cfg.base, w.n), 2 * w.n + min(cfg.base, w.n)),
    )


def a1_objective(w: StepWeight, x: Fraction, side: str) -> Fraction:
    """M- w / w at x, taking the one-sided limit named by ``side``."""
    x = parse_rational(x)
    m = mminus_weight_at(w, x)
    if side == "right":
        return max(m, w.value_at(x)) / w.value_at(x)
    if side == "left":
        return m / w.left_limit(x)
    return m / w.value_at(x)


# ---------------------------------------------------------------------------
# Fujii-Wilson A_infty
# ---------------------------------------------------------------------------


def _truncated_mminus_integral(w: StepWeight, a: float, b: float, tol_abs: float) -> float:
    """∫_a^b M-(w 1_(a,b)) by adaptive Simpson on breakpoint-aligned cells.

    The integrand is evaluated exactly (up to binary64) from the lower hull of
    the cumulative-mass graph on [a, x).
    """
    bps, vals, _ = w.float_tables()
    i0 = int(np.searchsorted(bps, a, side="right"))
    i1 = int(np.searchsorted(bps, b, side="left"))
    edges = [a, *bps[i0:i1].tolist(), b]
    n_cells = len(edges) - 1
    # value on the cell starting at edges[j]
    idx = np.searchsorted(bps, np.asarray(edges[:-1]), side="right") - 1
    cell_vals = np.where((idx >= 0) & (idx < len(vals)), vals[np.clip(idx, 0, len(vals) - 1)], 0.0)
    W0 = 0.0  # only differences of W enter, so start locally to avoid cancellation
    span = b - a
    hull = LowerHull()
    total = 0.0
    Wu = W0
    for j in range(n_cells):
        u, v = edges[j], edges[j + 1]
        c = float(cell_vals[j])
        f_u = c if not len(hull) else max(c, hull.max_slope(u, Wu))
        hull.push(u, Wu)

        def f(x, u=u, Wu=Wu, c=c):
            return max(c, hull.max_slope(x, Wu + c * (x - u)))

        Wv = Wu + c * (v - u)
        f_v = max(c, hull.max_slope(v, Wv))
        eps = tol_abs * (v - u) / span
        total += _adaptive_simpson(f, u, v, f_u, f_v, eps)
        Wu = Wv
    return total


def _adaptive_simpson(f, a, b, fa, fb, eps, depth=40):
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    return _simpson_step(f, a, b, fa, fm, fb, whole, eps, depth)


def _simpson_step(f, a, b, fa, fm, fb, whole, eps, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4 * flm + fm) / 6
    right = (b - m) * (fm + 4 * frm + fb) / 6
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15 * eps:
        return left + right + delta / 15
    return _simpson_step(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) + _simpson_step(
        f, m, b, fm, frm, fb, right, eps / 2, depth - 1
    )


def integrate_mminus_truncated(w: StepWeight, a, b, tol: float) -> float:
    """∫_(a,b) M-(w 1_(a,b)) with absolute error at most tol * w(a, b)."""
    a = float(parse_rational(a)) if not isinstance(a, float) else a
    b = float(parse_rational(b)) if not isinstance(b, float) else b
    if not a < b:
        raise ValueError("need a < b")
    mass = _float_mass(w, a, b)
    if mass <= 0:
        raise DomainError("w(a, b) = 0")
    return _truncated_mminus_integral(w, a, b, tol * mass)


def fw_objective(w: StepWeight, a: float, b: float, tol: float) -> float:
    mass = _float_mass(w, a, b)
    if mass <= 0:
        return 0.0
    return _truncated_mminus_integral(w, a, b, tol * mass) / mass


def fujii_wilson(w: StepWeight, cfg: SearchConfig = SearchConfig()) -> ConstantEstimate:
    rng = np.random.default_rng(cfg.seed)
    pts = axis_points(w, cfg.base, rng)
    bps = [float(x) for x in w.breakpoints]
    # a pair inside one constant cell has ratio exactly 1, so the estimate is >= 1
    k = next(i for i, v in enumerate(w.values) if v > 0)
    first_cell = (bps[k], bps[k + 1])
    candidates = [first_cell] + [t for t in _nested_tuples(pts, 2) if t != first_cell]
    lo, hi = bps[0], bps[-1]

    def f(t):
        return fw_objective(w, t[0], t[1], cfg.tol)

    (a, b), value, evals = _search(f, candidates, lo, hi, cfg)
    return ConstantEstimate(
        "FujiiWilson",
        value,
        {"a": a, "b": b},
        _budget(cfg, len(candidates), evals),
    )
