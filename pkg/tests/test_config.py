import json

import pytest
from hypothesis import given, settings, strategies as st

from tsosc.config import RunConfig, parse_config, render
from tsosc.errors import ParseError, ValidationError
from tsosc.expr import evaluate
from tsosc.oscillation import NeutralEquationSpec
from tsosc.scale import Geometric, Uniform

QDIFF = {"n": 2, "scale": {"type": "geometric", "q": 2, "t0": 1}, "B": "1/t^2", "beta": "t/2", "A": "0", "alpha": "t"}


def test_qdifference_config():
    spec, run = parse_config(json.dumps(QDIFF))
    assert spec.n == 2 and spec.t0 == 1 and spec.range_tag == "none"
    assert evaluate(spec.B, 4.0) == 1 / 16
    assert evaluate(spec.beta, 4.0) == 2
    assert run == RunConfig()


def test_negative_constant_b_rejected():
    with pytest.raises(ValidationError, match="nonnegative"):
        parse_config('{"B":"-1"}')
    cfg = dict(QDIFF, B="1 - 2*t")
    with pytest.raises(ValidationError, match="nonnegative"):
        parse_config(json.dumps(cfg))


def test_malformed_json():
    with pytest.raises(ParseError) as err:
        parse_config('{"n": 2,, }')
    assert err.value.position == 8


def test_bad_expression_reports_position():
    with pytest.raises(ParseError) as err:
        parse_config(json.dumps(dict(QDIFF, B="1/(t^2")))
    assert err.value.position == 6


def test_validation_errors():
    bad = [
        dict(QDIFF, alpha="2*t"),
        dict(QDIFF, beta="1/t"),
        dict(QDIFF, A="0.5", range="none"),
        dict(QDIFF, A="2"),
        dict(QDIFF, gamma=1.5),
        dict(QDIFF, window_points=3),
        dict(QDIFF, horizon=2),
        dict(QDIFF, lambda_min=5, lambda_max=1),
        dict(QDIFF, n=1.5),
        dict(QDIFF, colour="red"),
        dict(QDIFF, t0=3),
        dict(QDIFF, B="b0/t"),
        {k: v for k, v in QDIFF.items() if k != "scale"},
    ]
    for cfg in bad:
        with pytest.raises(ValidationError):
            parse_config(json.dumps(cfg))


def test_range_inference():
    cfg = {"n": 2, "scale": {"type": "uniform", "h": 1, "t0": 0}, "t0": 1,
           "A": "a0", "alpha": "t - 1", "B": "1/t", "beta": "t - 1", "params": {"a0": 0.5}}
    assert parse_config(json.dumps(cfg))[0].range_tag == "R1"
    cfg["A"] = "-a0"
    assert parse_config(json.dumps(cfg))[0].range_tag == "R2"


def test_run_parameters_parsed():
    spec, run = parse_config(json.dumps(dict(QDIFF, gamma=0.1, horizon=50, seed=7, phi="t")))
    assert (run.gamma, run.horizon, run.seed, run.phi) == (0.1, 50, 7, "t")
    assert len(run.lambda_grid()) == 200


def test_round_trip_examples():
    for cfg in (QDIFF, dict(QDIFF, B="b0/t^n", params={"b0": 2, "n": 2}, window_points=50)):
        spec, run = parse_config(json.dumps(cfg))
        again, run2 = parse_config(render(spec, run))
        assert again == spec and run2 == run


specs = st.builds(
    lambda n, geo, b0, shift, a0: NeutralEquationSpec(
        n=n,
        scale=Geometric(2.0, 1.0) if geo else Uniform(1.0, 0.0),
        t0=1.0 if geo else 2.0,
        A="a0*(1 - sin(t))/3",
        B="b0/t^n",
        alpha="t/2" if geo else "t - 1",
        beta=f"t/{2 ** shift}" if geo else f"t - {shift}",
        range_tag="R1",
        params={"a0": a0, "b0": b0, "n": n},
    ),
    st.integers(1, 5), st.booleans(), st.floats(0.01, 10), st.integers(0, 2), st.floats(0, 1),
)


@settings(max_examples=40)
@given(specs)
def test_round_trip_property(spec):
    again, _ = parse_config(render(spec))
    assert again == spec
