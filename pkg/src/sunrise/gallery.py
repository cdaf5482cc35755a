"""Named weights and textual weight specifications."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .core import StepWeight, parse_rational

DEFAULT_PIECES_PER_UNIT = 256


@dataclass(frozen=True)
class WeightSpec:
    """kind is one of piecewise, lebesgue, exp or gallery."""

    kind: str
    params: dict

    def resolve(self) -> StepWeight:
        p = self.params
        if self.kind == "piecewise":
            return StepWeight(
                tuple(parse_rational(b) for b in p["breakpoints"]),
                tuple(parse_rational(v) for v in p["values"]),
            )
        if self.kind == "lebesgue":
            a, b = (parse_rational(x) for x in p["support"])
            return StepWeight((a, b), (Fraction(1),))
        if self.kind == "exp":
            a, b = (parse_rational(x) for x in p["support"])
            return exp_weight(a, b, parse_rational(p.get("rate", "-1")),
                              int(p.get("pieces_per_unit", DEFAULT_PIECES_PER_UNIT)))
        if self.kind == "gallery":
            return gallery_weight(p["name"])
        raise ValueError(f"unknown weight kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params}


def exp_weight(a: Fraction, b: Fraction, rate: Fraction, pieces_per_unit: int) -> StepWeight:
    """e^(rate x) on (a, b), sampled at the midpoints of equal pieces.

    Values are the binary64 samples converted exactly to rationals.
    """
    if not a < b:
        raise ValueError("exp weight needs a < b")
    if pieces_per_unit < 1:
        raise ValueError("pieces_per_unit must be positive")
    n = max(1, math.ceil((b - a) * pieces_per_unit))
    h = (b - a) / n
    bps = tuple(a + i * h for i in range(n + 1))
    vals = tuple(Fraction(math.exp(float(rate * (a + (i + Fraction(1, 2)) * h)))) for i in range(n))
    return StepWeight(bps, vals)


@lru_cache(maxsize=None)
def _gallery_specs() -> dict:
    text = resources.files("sunrise").joinpath("data/gallery.json").read_text()
    return json.loads(text)["weights"]


def gallery_names() -> list[str]:
    return list(_gallery_specs())


@lru_cache(maxsize=None)
def gallery_weight(name: str) -> StepWeight:
    specs = _gallery_specs()
    if name not in specs:
        raise ValueError(f"unknown gallery weight {name!r}; choose from {sorted(specs)}")
    data = dict(specs[name])
    return WeightSpec(data.pop("kind"), data).resolve()


def parse_weight_spec(text: str) -> WeightSpec:
    """Parse a weight from the command line.

    Accepted forms: ``gallery:NAME``, ``lebesgue:a,b``, ``exp:a,b[,rate[,ppu]]``,
    ``piecewise:x0,x1,...,xn;v1,...,vn`` (breakpoints, a semicolon, values)
    or a JSON object with a ``kind`` key.
    """
    text = text.strip()
    if text.startswith("{"):
        data = json.loads(text)
        if "kind" not in data:
            data["kind"] = "piecewise"
        kind = data.pop("kind")
        spec = WeightSpec(kind, data)
    else:
        kind, _, rest = text.partition(":")
        if kind == "gallery":
            spec = WeightSpec("gallery", {"name": rest})
        elif kind == "lebesgue":
            a, b = rest.split(",")
            spec = WeightSpec("lebesgue", {"support": [a.strip(), b.strip()]})
        elif kind == "exp":
            parts = [s.strip() for s in rest.split(",")]
            if len(parts) not in (2, 3, 4):
                raise ValueError("exp weight needs a,b[,rate[,pieces_per_unit]]")
            params = {"support": parts[:2], "rate": parts[2] if len(parts) > 2 else "-1"}
            params["pieces_per_unit"] = int(parts[3]) if len(parts) > 3 else DEFAULT_PIECES_PER_UNIT
            spec = WeightSpec("exp", params)
        elif kind == "piecewise":
            bps, _, vals = rest.partition(";")
            spec = WeightSpec(
                "piecewise",
                {"breakpoints": [s.strip() for s in bps.split(",")],
                 "values": [s.strip() for s in vals.split(",")]},
            )
        else:
            raise ValueError(f"cannot parse weight spec {text!r}")
    spec.resolve()  # validate early
    return spec
