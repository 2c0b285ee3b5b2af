"""JSON run configs: an equation spec with string coefficient expressions plus run parameters."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from typing import Tuple

import numpy as np

from . import expr as ex
from .errors import ParseError, TimeScaleError, ValidationError
from .oscillation import NeutralEquationSpec, infer_range
from .scale import scale_from_dict

SPEC_KEYS = {"n", "scale", "t0", "A", "B", "alpha", "beta", "range", "params"}


@dataclass(frozen=True)
class RunConfig:
    gamma: float = 0.25
    lambda_min: float = 1e-4
    lambda_max: float = 1e2
    lambda_points: int = 200
    window_points: int = 200
    horizon: int = 200
    margin: float = 1e-3
    strict_tol: float = 1e-12
    seed: int = 42
    phi: str = "1"

    def lambda_grid(self):
        return np.logspace(np.log10(self.lambda_min), np.log10(self.lambda_max), self.lambda_points)

    def validate(self, n: int = 1):
        if not 0 < self.gamma < 1:
            raise ValidationError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0 < self.lambda_min < self.lambda_max:
            raise ValidationError("need 0 < lambda_min < lambda_max")
        if self.lambda_points < 1:
            raise ValidationError("lambda_points must be positive")
        if self.window_points < 8:
            raise ValidationError("window_points must be at least 8")
        if self.horizon < n + 1:
            raise ValidationError(f"horizon must be at least n + 1 = {n + 1}")
        if self.margin < 0 or self.strict_tol < 0:
            raise ValidationError("margin and strict_tol must be nonnegative")
        ex.parse(self.phi)


RUN_KEYS = {f.name for f in fields(RunConfig)}
_INT_KEYS = {"lambda_points", "window_points", "horizon", "seed", "n"}


def _number(key, val):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(f"{key} must be a number, got {val!r}")
    if key in _INT_KEYS and int(val) != val:
        raise ValidationError(f"{key} must be an integer, got {val!r}")
    return int(val) if key in _INT_KEYS else float(val)


def parse_config(text: str) -> Tuple[NeutralEquationSpec, RunConfig]:
    """Parse and validate a JSON config; coefficient strings go through the expression grammar."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e.msg}", e.pos) from None
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    unknown = set(doc) - SPEC_KEYS - RUN_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")

    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("params must be an object")
    params = {k: _number(f"params.{k}", v) for k, v in params.items()}
    exprs = {}
    for key, default in (("A", "0"), ("B", None), ("alpha", "t"), ("beta", "t")):
        src = doc.get(key, default)
        if src is None:
            raise ValidationError(f"missing required key {key!r}")
        exprs[key] = ex.parse(str(src))
    # a constant negative B is rejected before anything else is looked at
    if not _depends_on_t(exprs["B"]) and ex.params_of(exprs["B"]) <= set(params):
        b = float(ex.evaluate(exprs["B"], 0.0, params))
        if b < 0:
            raise ValidationError(f"B must be nonnegative, got constant {b}")
    for key in ("n", "scale"):
        if key not in doc:
            raise ValidationError(f"missing required key {key!r}")
    n = _number("n", doc["n"])
    if not isinstance(doc["scale"], dict):
        raise ValidationError("scale must be an object")
    try:
        scale = scale_from_dict(doc["scale"])
    except KeyError as e:
        raise ValidationError(f"scale is missing {e.args[0]!r}") from None
    t0 = _number("t0", doc["t0"]) if "t0" in doc else scale.point(0) if scale.min_index is None else scale.point(scale.min_index)

    try:
        scale.index_of(t0)
    except TimeScaleError as e:
        raise ValidationError(f"t0={t0} is not a point of the scale") from e

    run = RunConfig(**{k: (_number(k, v) if k != "phi" else str(v)) for k, v in doc.items() if k in RUN_KEYS})
    run.validate(n)
    if "range" in doc:
        tag = doc["range"]
    else:
        tag = infer_range(exprs["A"], scale, t0, params, run.window_points)
    spec = NeutralEquationSpec(n=n, scale=scale, t0=t0, range_tag=tag, params=params, **exprs)
    spec.check(run.window_points)
    return spec, run


def _depends_on_t(e) -> bool:
    if isinstance(e, ex.Var):
        return True
    if isinstance(e, (ex.Neg, ex.Call)):
        return _depends_on_t(e.arg)
    if isinstance(e, ex.BinOp):
        return _depends_on_t(e.left) or _depends_on_t(e.right)
    return False


def render(spec: NeutralEquationSpec, run: RunConfig = None) -> str:
    doc = spec.to_dict()
    if run is not None:
        doc.update(asdict(run))
    return json.dumps(doc, indent=2)
