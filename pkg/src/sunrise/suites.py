"""Seeded invariant suites behind ``sunrise verify``.

Each suite returns a list of check records; a record passes or fails as a
whole and carries enough detail to reproduce the failing instance.  Output
contains no timings so that identical seeds give identical bytes.
"""

from __future__ import annotations

import os
from dataclasses import replace
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional

import numpy as np

from .constants import fujii_wilson
from .core import IntervalSet, StepWeight, format_rational
from .gallery import gallery_names, gallery_weight
from .maximal import (
    halo,
    halo_iterate,
    halo_iteration_bound,
    mplus_indicator_at,
    superlevel_indicator,
)
from .oracle import measure_ratio_check, reverse_holder_check
from .tauberian import (
    holder_modulus_check,
    random_sets,
    restricted_weak_type_check,
    tauberian_lower,
)

SUITES = ("rsun", "halo", "rhi", "tauberian")
LEBESGUE = StepWeight((Fraction(-100), Fraction(100)), (Fraction(1),))


def _check(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), **detail}


def random_level(rng: np.random.Generator) -> Fraction:
    return Fraction(int(rng.integers(1, 10)), 10)


def rsun_suite(seed: int, budget: Optional[int] = None, inject_fault: bool = False) -> list[dict]:
    """Mass certificates and outside-point bounds for random rising-sun instances."""
    n = budget or 1000
    rng = np.random.default_rng([seed, 1])
    sets = random_sets(rng, Fraction(0), Fraction(10), n, max_parts=6, denominator=640)
    bad_cert, bad_out, points = [], [], 0
    for k, E in enumerate(sets):
        alpha = random_level(rng)
        dec = superlevel_indicator(E, alpha)
        if inject_fault and k == 0:
            # nudge one endpoint but keep the old mass: the certificate must break
            first, *rest = dec.components
            bumped = replace(first, b=first.b + Fraction(1, 10**6))
            dec = replace(dec, components=(bumped, *rest))
        if dec.certificate_failures():
            bad_cert.append(k)
        H = dec.as_set()
        lo = H.lower - 1
        hi = H.upper + 1
        x = lo + (hi - lo) * Fraction(int(rng.integers(0, 2**20)), 2**20)
        while H.contains(x):
            x = lo + (hi - lo) * Fraction(int(rng.integers(0, 2**20)), 2**20)
        points += 1
        if mplus_indicator_at(E, x) > alpha:
            bad_out.append(k)
    return [
        _check("mass-certificates", not bad_cert, instances=n, failures=bad_cert[:10]),
        _check("outside-points", not bad_out, points=points, failures=bad_out[:10]),
    ]


def halo_suite(seed: int, budget: Optional[int] = None, inject_fault: bool = False) -> list[dict]:
    """H_lam(E) ⊆ N-fold halo at alpha, plus the closed-form fixture."""
    n = budget or 500
    rng = np.random.default_rng([seed, 2])
    sets = random_sets(rng, Fraction(0), Fraction(10), n, max_parts=6, denominator=640)
    bad = []
    for k, E in enumerate(sets):
        i, j = sorted(rng.choice(np.arange(1, 20), size=2, replace=False))
        lam, alpha = Fraction(int(i), 20), Fraction(int(j), 20)
        N = halo_iteration_bound(lam, alpha)
        outer = halo_iterate(E, alpha, N).iterates[-1]
        if inject_fault and k == 0:
            outer = E  # every halo strictly extends E to the left
        if not outer.covers(halo(E, lam)):
            bad.append(k)
    E0 = IntervalSet(((Fraction(0), Fraction(1)),))
    fixture = halo_iterate(E0, Fraction(1, 2), 2).iterates[-1]
    expected = IntervalSet(((Fraction(-3), Fraction(1)),))
    return [
        _check("iterated-inclusion", not bad, instances=n, failures=bad[:10]),
        _check(
            "fixture-quarter-half",
            fixture == expected == halo(E0, Fraction(1, 4))
            and halo_iteration_bound(Fraction(1, 4), Fraction(1, 2)) == 2,
            result=fixture.to_json(),
        ),
    ]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SUNRISE_THREADS", "1")))
    except ValueError:
        return 1


def _rhi_one(name: str, seed: int, samples: int, inject_fault: bool) -> list[dict]:
    w = gallery_weight(name)
    fw = fujii_wilson(w).value
    eps = 1 / (2 * fw)
    if inject_fault:
        # a spike far outside the guaranteed eps range, tested at its worst triple
        spike = StepWeight((Fraction(0), Fraction(1, 10**6), Fraction(1)), (Fraction(10**6), Fraction(1)))
        rh = reverse_holder_check(spike, 0.99, triples=([0.0], [1e-6], [1.0]))
    else:
        rh = reverse_holder_check(w, eps, budget=samples, seed=seed)
    mr = measure_ratio_check(w, exponent=1 / (3 * fw), budget=samples, seed=seed)
    return [
        _check(f"reverse-holder/{name}", rh.passed, fw=fw, eps=eps,
               worst_ratio=rh.worst_ratio, samples=rh.samples),
        _check(f"measure-ratio/{name}", mr.passed, fw=fw, exponent=1 / (3 * fw),
               worst_ratio=mr.worst_ratio, samples=mr.samples),
    ]


def rhi_suite(seed: int, budget: Optional[int] = None, inject_fault: bool = False) -> list[dict]:
    """Reverse Hoelder at eps = 1/(2 fw) and measure ratio at 1/(3 fw), every gallery weight."""
    samples = budget or 10_000
    names = gallery_names()
    faults = [inject_fault and i == 0 for i in range(len(names))]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda a: _rhi_one(a[0], seed, samples, a[1]), zip(names, faults)))
    return [c for group in results for c in group]


def tauberian_suite(seed: int, budget: Optional[int] = None, inject_fault: bool = False) -> list[dict]:
    """Lebesgue identity 1/alpha, restricted weak type and the Hoelder fixture."""
    alphas = [Fraction(k, 10) for k in range(1, 10)] + [Fraction(95, 100), Fraction(99, 100)]
    bad = []
    for a in alphas:
        est = tauberian_lower(LEBESGUE, a, families=["single"])
        target = 1 / a + (Fraction(1, 10**6) if inject_fault else 0)
        if est.ratio != target:
            bad.append(format_rational(a))
    checks = [_check("lebesgue-identity", not bad, alphas=len(alphas), failures=bad)]
    trials = budget or 500
    rw = restricted_weak_type_check(
        LEBESGUE, Fraction(1, 2), [Fraction(k, 20) for k in range(1, 20)], trials // 19 + 1,
        seed=seed, region=(Fraction(-10), Fraction(10)),
    )
    checks.append(_check("weak-type/lebesgue", rw.passed and rw.worst_slack >= 2,
                         samples=rw.samples, worst_slack=rw.worst_slack, C0=format_rational(rw.C0)))
    pairs = [(Fraction(i, 20), Fraction(j, 20)) for i in range(1, 20) for j in range(i + 1, 20)][:50]
    hm = holder_modulus_check(LEBESGUE, pairs, families=["single"], fw=1.0)
    checks.append(_check("holder/lebesgue", hm.K_unit <= 1 + 1e-12, pairs=hm.pairs, K=hm.K_unit))
    return checks


SUITE_FUNCS = {
    "rsun": rsun_suite,
    "halo": halo_suite,
    "rhi": rhi_suite,
    "tauberian": tauberian_suite,
}


def run_suites(suite: str, seed: int, budget: Optional[int] = None,
               inject_fault: bool = False) -> dict:
    names = SUITES if suite == "all" else (suite,)
    out = {}
    for name in names:
        checks = SUITE_FUNCS[name](seed, budget, inject_fault)
        out[name] = {"passed": all(c["passed"] for c in checks), "checks": checks}
    return {
        "schema": 1,
        "suite": suite,
        "seed": seed,
        "budget": budget,
        "passed": all(s["passed"] for s in out.values()),
        "suites": out,
    }
