"""Command line.

Exit codes: 0 on success, 2 for invalid scenarios or overrides, 3 for
numerical failures, 4 when --expect-tipping finds nothing. Reports: sorted
keys, floats to 17 significant digits, identical bytes on identical runs of
every builtin.
"""

import asyncio
import json

import numpy as np
import pytest

from cli import (
    EXIT_INVALID,
    EXIT_NO_TIPPING,
    EXIT_NUMERICAL,
    EXIT_OK,
    build_parser,
    encode,
    format_float,
    main,
)
from common.types import Stability
from scenarios import builtin_names, builtin_payload


def _run(argv, settings):
    return asyncio.run(main([str(a) for a in argv], settings))


def _write(tmp_path, name, payload):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.mark.parametrize(
    "value, text",
    [
        (1.0, "1.0"),
        (-3.0, "-3.0"),
        (0.1, "0.10000000000000001"),
        (1e20, "1e+20"),
        (float("nan"), '"nan"'),
        (float("-inf"), '"-inf"'),
    ],
)
def test_format_float(value, text):
    assert format_float(value) == text


def test_encode_sorts_keys_and_handles_numpy():
    payload = {"b": [1, 2.5, None], "a": True, "d": Stability.SINK, "c": np.float64(0.5), "e": np.arange(2)}
    assert encode(payload) == '{"a": true, "b": [1, 2.5, null], "c": 0.5, "d": "SINK", "e": [0, 1]}'
    with pytest.raises(TypeError):
        encode({"x": object()})


def test_jobs_must_be_positive():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["diagram", "sn1d", "--jobs", "0"])


def test_validate_prints_the_limit_data(fast_settings, tmp_path, capsys):
    assert _run(["validate", "sn1d", "--out", tmp_path], fast_settings) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["valid"] is True
    assert report["e_plus"]["x"] == pytest.approx([-4.0])
    assert report["catalogue"] == ["A0"]
    assert report["config"]["command"] == "validate"


def test_alpha_override_outside_the_window(fast_settings, tmp_path):
    assert _run(["validate", "sn1d", "--alpha", "1.5", "--out", tmp_path], fast_settings) == EXIT_INVALID


def test_invalid_scenario_file(fast_settings, tmp_path):
    payload = builtin_payload("sn1d")
    payload["system"]["equations"] = ["(x1 + lam1)^2 - y"]
    path = _write(tmp_path, "bad", payload)
    assert _run(["validate", path, "--out", tmp_path], fast_settings) == EXIT_INVALID


def test_numerical_failure(fast_settings, tmp_path):
    code = _run(["construct-input", "sn1d-reversed", "--out", tmp_path], fast_settings)
    assert code == EXIT_NUMERICAL


def test_expect_tipping_without_tipping_is_deterministic(fast_settings, tmp_path):
    payload = builtin_payload("sn1d")
    payload["rates"]["r_hi"] = 0.1
    path = _write(tmp_path, "slow", payload)
    outputs = []
    for run in ("first", "second"):
        out = tmp_path / run
        code = _run(["find-rc", path, "--expect-tipping", "--out", out], fast_settings)
        assert code == EXIT_NO_TIPPING
        outputs.append((out / "tipping_report.json").read_bytes())
    assert outputs[0] == outputs[1]
    report = json.loads(outputs[0])
    assert report["tipping"]["verdict"] == "NO_TIPPING_FOUND"
    assert report["config"]["flags"]["expect_tipping"] is True


def test_run_uses_the_scenario_analysis(fast_settings, tmp_path):
    assert _run(["run", "fold-btip", "--out", tmp_path], fast_settings) == EXIT_OK
    for name in ("tracking_report.json", "tracking.csv", "sink_branch.csv", "edge_branch.csv", "tracking.svg"):
        assert (tmp_path / name).exists()
    report = json.loads((tmp_path / "tracking_report.json").read_text(encoding="utf-8"))
    assert report["config"]["command"] == "track"
    assert report["tracking"]["end_point"] is False


@pytest.mark.parametrize("name", builtin_names())
def test_run_is_byte_identical_on_every_builtin(fast_settings, tmp_path, name):
    codes, outputs = [], []
    for run in ("first", "second"):
        out = tmp_path / run
        codes.append(_run(["run", name, "--out", out], fast_settings))
        outputs.append({path.name: path.read_bytes() for path in sorted(out.iterdir())})
    assert codes[0] == codes[1]
    assert outputs[0]
    assert outputs[0] == outputs[1]
