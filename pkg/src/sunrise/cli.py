"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .constants import SearchConfig, a1_plus, ap_plus_lower, fujii_wilson
from .core import DomainError, IntervalSet, format_rational, normalize, parse_rational
from .gallery import parse_weight_spec
from .maximal import halo_iterate, mminus_weight_at, superlevel_indicator
from .oracle import measure_ratio_check, reverse_holder_check, solyanik_converse_check
from .suites import SUITES, run_suites
from .tauberian import FAMILIES, solyanik_fit, tauberian_lower

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2, 3


def parse_set(text: str) -> IntervalSet:
    """``"a,b;c,d"`` shorthand or IntervalSet JSON (object or bare list of pairs)."""
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        data = json.loads(text)
        pairs = data["intervals"] if isinstance(data, dict) else data
    else:
        pairs = [part.split(",") for part in text.split(";") if part.strip()]
    for pair in pairs:
        if len(pair) != 2:
            raise ValueError(f"interval needs two endpoints, got {pair!r}")
    S = normalize((str(l).strip(), str(r).strip()) for l, r in pairs)
    if not S:
        raise ValueError("empty set")
    return S


def parse_alphas(text: str) -> list[Fraction]:
    """``start:end:count`` (evenly spaced, exact) or a comma list of rationals."""
    if ":" in text:
        start, end, count = text.split(":")
        a, b, n = parse_rational(start), parse_rational(end), int(count)
        if n < 2:
            raise ValueError("alpha range needs count >= 2")
        return [a + (b - a) * Fraction(i, n - 1) for i in range(n)]
    return [parse_rational(t) for t in text.split(",")]


def _config(args) -> SearchConfig:
    kw = {"seed": args.seed}
    if args.budget is not None:
        kw["base"] = args.budget
    if args.tol is not None:
        kw["tol"] = args.tol
    return SearchConfig(**kw)


def _emit(args, payload: dict, csv_rows=None) -> None:
    if args.format == "csv" and csv_rows is not None:
        text = csv_rows
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_superlevel(args) -> int:
    dec = superlevel_indicator(parse_set(args.set), parse_rational(args.alpha))
    payload = {**dec.to_json(), "certified": not dec.certificate_failures()}
    rows = [(format_rational(c.a), format_rational(c.b), format_rational(c.mass))
            for c in dec.components]
    _emit(args, payload, _csv(["a", "b", "mass"], rows))
    return EXIT_OK


def cmd_halo_iter(args) -> int:
    chain = halo_iterate(parse_set(args.set), parse_rational(args.alpha), args.k)
    rows = [(k, format_rational(l), format_rational(r))
            for k, S in enumerate(chain.iterates) for l, r in S.intervals]
    _emit(args, chain.to_json(), _csv(["k", "a", "b"], rows))
    return EXIT_OK


def cmd_mminus(args) -> int:
    w = parse_weight_spec(args.weight).resolve()
    xs = [parse_rational(t) for t in args.x.split(",")]
    values = [mminus_weight_at(w, x) for x in xs]
    payload = {
        "schema": 1,
        "points": [{"x": format_rational(x), "value": format_rational(v)} for x, v in zip(xs, values)],
    }
    rows = [(format_rational(x), format_rational(v)) for x, v in zip(xs, values)]
    _emit(args, payload, _csv(["x", "value"], rows))
    return EXIT_OK


def cmd_constant(args) -> int:
    spec = parse_weight_spec(args.weight)
    w = spec.resolve()
    cfg = _config(args)
    if args.which == "a1":
        est = a1_plus(w, cfg)
    elif args.which == "fw":
        est = fujii_wilson(w, cfg)
    else:
        if args.p is None:
            raise ValueError("--p is required for --which ap")
        est = ap_plus_lower(w, args.p, cfg)
    payload = {**est.to_json(), "weight": spec.to_json(), "config": cfg.to_json()}
    _emit(args, payload, _csv(["kind", "value"], [(est.kind, repr(est.value))]))
    return EXIT_OK


def _families(args) -> list[str]:
    return args.family or list(FAMILIES)


def cmd_tauberian(args) -> int:
    spec = parse_weight_spec(args.weight)
    cfg = _config(args)
    est = tauberian_lower(spec.resolve(), parse_rational(args.alpha), _families(args), cfg)
    payload = {**est.to_json(), "weight": spec.to_json(), "config": cfg.to_json()}
    _emit(args, payload, _csv(["alpha", "value"], [(format_rational(est.alpha), repr(est.value))]))
    return EXIT_OK


def cmd_solyanik(args) -> int:
    spec = parse_weight_spec(args.weight)
    cfg = _config(args)
    kw = {}
    if args.window:
        lo, hi = args.window.split(":")
        kw["window"] = (parse_rational(lo), parse_rational(hi))
    curve = solyanik_fit(spec.resolve(), parse_alphas(args.alphas), _families(args), cfg, **kw)
    fit = {**curve.fit_json(), "weight": spec.to_json(), "config": cfg.to_json()}
    if args.format == "csv":
        _emit(args, {}, curve.to_csv())
        sys.stderr.write(json.dumps(fit, sort_keys=True) + "\n")
    else:
        points = [{"alpha": format_rational(a), "value": v, "raw": r}
                  for a, v, r in zip(curve.alphas, curve.values, curve.raw)]
        _emit(args, {**fit, "points": points})
    return EXIT_OK


def cmd_check(args) -> int:
    spec = parse_weight_spec(args.weight)
    w = spec.resolve()
    budget = args.budget or 10_000
    fw = None
    if args.eps is None and args.inequality in ("rhi", "ratio"):
        fw = fujii_wilson(w, SearchConfig(seed=args.seed)).value
    if args.inequality == "rhi":
        eps = args.eps if args.eps is not None else 1 / (2 * fw)
        report = reverse_holder_check(w, eps, budget=budget, seed=args.seed)
    elif args.inequality == "ratio":
        if args.eps is not None:
            report = measure_ratio_check(w, eps=args.eps, budget=budget, seed=args.seed)
        else:
            report = measure_ratio_check(w, exponent=1 / (3 * fw), budget=budget, seed=args.seed)
    else:
        if args.beta is None:
            raise ValueError("--beta is required for --inequality converse")
        report = solyanik_converse_check(w, args.beta, budget=budget, seed=args.seed)
    payload = {**report.to_json(), "weight": spec.to_json(), "fw_estimate": fw}
    _emit(args, payload, _csv(["tag", "samples", "worst_ratio", "passed"],
                              [(report.tag, report.samples, repr(report.worst_ratio), report.passed)]))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    summary = run_suites(args.suite, args.seed, args.budget, args.inject_fault)
    rows = [(name, c["name"], c["passed"])
            for name, s in summary["suites"].items() for c in s["checks"]]
    _emit(args, summary, _csv(["suite", "check", "passed"], rows))
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--budget", type=int, default=None,
                        help="search base size, or sample/instance count for check and verify")
    common.add_argument("--tol", type=float, default=None, help="quadrature tolerance (default 1e-6)")

    parser = argparse.ArgumentParser(prog="sunrise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("superlevel", parents=[common], help="rising-sun decomposition of {M+ 1_E > alpha}")
    p.add_argument("--set", required=True, help='interval set, "a,b;c,d" or JSON')
    p.add_argument("--alpha", required=True)
    p.set_defaults(func=cmd_superlevel)

    p = sub.add_parser("halo-iter", parents=[common], help="iterated halo extensions")
    p.add_argument("--set", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_halo_iter)

    p = sub.add_parser("mminus", parents=[common], help="backward maximal function of a weight")
    p.add_argument("--weight", required=True)
    p.add_argument("--x", required=True, help="comma-separated rational points")
    p.set_defaults(func=cmd_mminus)

    p = sub.add_parser("constant", parents=[common], help="A1, Ap or Fujii-Wilson lower bound")
    p.add_argument("--weight", required=True)
    p.add_argument("--which", choices=("a1", "ap", "fw"), required=True)
    p.add_argument("--p", type=float)
    p.set_defaults(func=cmd_constant)

    for name, func, help_text in (
        ("tauberian", cmd_tauberian, "lower bound for the tauberian constant"),
        ("solyanik", cmd_solyanik, "tauberian curve and fitted exponent"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--weight", required=True)
        p.add_argument("--family", action="append", choices=FAMILIES)
        if name == "tauberian":
            p.add_argument("--alpha", required=True)
        else:
            p.add_argument("--alphas", required=True, help="start:end:count or a comma list")
            p.add_argument("--window", help="fit window lo:hi (default 9/10:199/200)")
        p.set_defaults(func=func)

    p = sub.add_parser("check", parents=[common], help="sampled inequality checks")
    p.add_argument("--weight", required=True)
    p.add_argument("--inequality", choices=("rhi", "ratio", "converse"), default="rhi")
    p.add_argument("--eps", type=float)
    p.add_argument("--beta", type=float)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", parents=[common], help="seeded invariant suites")
    p.add_argument("--suite", choices=("all", *SUITES), default="all")
    p.add_argument("--inject-fault", action="store_true",
                   help="corrupt one instance per suite to show the harness fails")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
