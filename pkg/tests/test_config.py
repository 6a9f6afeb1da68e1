"""Settings and logging.

Overrides: None values are skipped, invalid values raise. Resolved config
omits the logging keys. Formatters: missing extras never break a record and
JSON lines only carry the extras that were set.
"""

import json
import logging

import pytest
from pydantic import ValidationError

from config.logging_conf import JsonLinesFormatter, SafeExtraFormatter
from config.settings import NumericSettings


def _record(**extra) -> logging.LogRecord:
    record = logging.LogRecord("ratekit.test", logging.INFO, __file__, 1, "probe %s", ("done",), None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_overrides_skip_none():
    settings = NumericSettings()
    assert settings.with_overrides(None) is settings
    updated = settings.with_overrides({"tol_r": 1e-3, "alpha": None})
    assert updated.tol_r == 1e-3
    assert updated.alpha is None
    assert settings.tol_r == 1e-5


@pytest.mark.parametrize("overrides", [{"seed_delta_rel": 0.5}, {"coarse_points": 1}, {"alpha": -1.0}])
def test_invalid_overrides_raise(overrides):
    with pytest.raises(ValidationError):
        NumericSettings().with_overrides(overrides)


def test_resolved_config_leaves_out_logging():
    resolved = NumericSettings().resolved()
    assert "log_level" not in resolved
    assert "log_file" not in resolved
    assert resolved["seed_delta_rel"] == 1e-6


def test_handover_point():
    assert NumericSettings().with_overrides({"handover_gap": 1e-3}).s_hand == pytest.approx(0.999)


def test_structured_formatter_fills_missing_extras():
    formatter = SafeExtraFormatter("%(message)s scenario=%(scenario)s rate=%(rate)s")
    assert formatter.format(_record(rate=0.5)) == "probe done scenario=- rate=0.5"


def test_json_lines_carry_only_set_extras():
    payload = json.loads(JsonLinesFormatter().format(_record(scenario="sn1d")))
    assert payload == {"level": "INFO", "logger": "ratekit.test", "message": "probe done", "scenario": "sn1d"}
