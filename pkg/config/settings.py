from __future__ import annotations

from functools import lru_cache
import os
from typing import Any, Mapping

from pydantic import (
    AliasChoices,
    Field,
    StrictFloat,
    StrictInt,
    StrictStr,
    field_validator,
)
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv


class NumericSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=True,
        env_ignore_empty=True,
        populate_by_name=True,
    )

    rtol: StrictFloat = Field(
        default=1e-9, gt=0.0, le=1e-2, validation_alias=AliasChoices("RATEKIT_RTOL", "rtol")
    )
    atol: StrictFloat = Field(
        default=1e-11, gt=0.0, le=1e-2, validation_alias=AliasChoices("RATEKIT_ATOL", "atol")
    )
    blowup_norm: StrictFloat = Field(
        default=1e6,
        ge=10.0,
        validation_alias=AliasChoices("RATEKIT_BLOWUP_NORM", "blowup_norm"),
    )
    newton_tol: StrictFloat = Field(
        default=1e-12,
        gt=0.0,
        le=1e-4,
        validation_alias=AliasChoices("RATEKIT_NEWTON_TOL", "newton_tol"),
    )
    newton_max_iter: StrictInt = Field(
        default=50,
        ge=1,
        le=500,
        validation_alias=AliasChoices("RATEKIT_NEWTON_MAX_ITER", "newton_max_iter"),
    )
    hyperbolicity_tol: StrictFloat = Field(
        default=1e-6,
        gt=0.0,
        le=1e-1,
        validation_alias=AliasChoices("RATEKIT_HYPERBOLICITY_TOL", "hyperbolicity_tol"),
    )
    fold_tol: StrictFloat = Field(
        default=1e-8,
        gt=0.0,
        le=1e-2,
        validation_alias=AliasChoices("RATEKIT_FOLD_TOL", "fold_tol"),
    )
    capture_radius: StrictFloat = Field(
        default=1e-3,
        gt=0.0,
        le=1.0,
        validation_alias=AliasChoices("RATEKIT_CAPTURE_RADIUS", "capture_radius"),
    )
    dwell_factor: StrictFloat = Field(
        default=20.0,
        gt=0.0,
        le=1_000.0,
        validation_alias=AliasChoices("RATEKIT_DWELL_FACTOR", "dwell_factor"),
    )
    t_max: StrictFloat = Field(
        default=1e4, gt=0.0, validation_alias=AliasChoices("RATEKIT_T_MAX", "t_max")
    )
    seed_delta_rel: StrictFloat = Field(
        default=1e-6,
        ge=1e-8,
        le=1e-3,
        validation_alias=AliasChoices("RATEKIT_SEED_DELTA", "seed_delta_rel", "seed_delta"),
    )
    handover_gap: StrictFloat = Field(
        default=1e-6,
        gt=0.0,
        le=1e-2,
        validation_alias=AliasChoices("RATEKIT_HANDOVER_GAP", "handover_gap"),
    )
    eta_capture: StrictFloat = Field(
        default=1e-2,
        gt=0.0,
        le=1.0,
        validation_alias=AliasChoices("RATEKIT_ETA_CAPTURE", "eta_capture"),
    )
    coarse_points: StrictInt = Field(
        default=64,
        ge=2,
        le=4096,
        validation_alias=AliasChoices("RATEKIT_COARSE_POINTS", "coarse_points"),
    )
    tol_r: StrictFloat = Field(
        default=1e-5, gt=0.0, validation_alias=AliasChoices("RATEKIT_TOL_R", "tol_r")
    )
    connect_tol: StrictFloat = Field(
        default=1e-6,
        gt=0.0,
        le=1e-2,
        validation_alias=AliasChoices("RATEKIT_CONNECT_TOL", "connect_tol"),
    )
    identical_tail_tol: StrictFloat = Field(
        default=1e-4,
        gt=0.0,
        validation_alias=AliasChoices("RATEKIT_IDENTICAL_TAIL_TOL", "identical_tail_tol"),
    )
    branch_samples: StrictInt = Field(
        default=201,
        ge=3,
        le=100_000,
        validation_alias=AliasChoices("RATEKIT_BRANCH_SAMPLES", "branch_samples"),
    )
    scan_points: StrictInt = Field(
        default=41,
        ge=3,
        le=2_000,
        validation_alias=AliasChoices("RATEKIT_SCAN_POINTS", "scan_points"),
    )
    eps_floor: StrictFloat = Field(
        default=1e-3,
        gt=0.0,
        le=0.5,
        validation_alias=AliasChoices("RATEKIT_EPS_FLOOR", "eps_floor"),
    )
    alpha: StrictFloat | None = Field(
        default=None, gt=0.0, validation_alias=AliasChoices("RATEKIT_ALPHA", "alpha")
    )
    log_level: StrictStr = Field(
        default="INFO", validation_alias=AliasChoices("RATEKIT_LOG_LEVEL", "LOG_LEVEL")
    )
    log_file: StrictStr | None = Field(
        default=None, validation_alias=AliasChoices("RATEKIT_LOG_FILE", "LOG_FILE")
    )
    log_max_bytes: StrictInt = Field(
        default=5_000_000,
        ge=100_000,
        le=100_000_000,
        validation_alias=AliasChoices("RATEKIT_LOG_MAX_BYTES", "LOG_MAX_BYTES"),
    )
    log_backup_count: StrictInt = Field(
        default=5,
        ge=1,
        le=100,
        validation_alias=AliasChoices("RATEKIT_LOG_BACKUP_COUNT", "LOG_BACKUP_COUNT"),
    )

    @field_validator(
        "newton_max_iter",
        "coarse_points",
        "branch_samples",
        "scan_points",
        "log_max_bytes",
        "log_backup_count",
        mode="before",
    )
    @classmethod
    def _parse_int(cls, value):
        if isinstance(value, str):
            return int(value)
        if isinstance(value, float) and value.is_integer():
            return int(value)
        return value

    @field_validator(
        "rtol",
        "atol",
        "blowup_norm",
        "newton_tol",
        "hyperbolicity_tol",
        "fold_tol",
        "capture_radius",
        "dwell_factor",
        "t_max",
        "seed_delta_rel",
        "handover_gap",
        "eta_capture",
        "tol_r",
        "connect_tol",
        "identical_tail_tol",
        "eps_floor",
        "alpha",
        mode="before",
    )
    @classmethod
    def _parse_float(cls, value):
        if value is None or value == "":
            return None
        if isinstance(value, (str, int)) and not isinstance(value, bool):
            return float(value)
        return value

    @field_validator("log_file", mode="before")
    @classmethod
    def _parse_optional(cls, value):
        if value is None or value == "":
            return None
        return value

    @property
    def s_hand(self) -> float:
        return 1.0 - self.handover_gap

    def with_overrides(self, overrides: Mapping[str, Any] | None) -> "NumericSettings":
        if not overrides:
            return self
        merged = self.model_dump()
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return type(self).model_validate(merged)

    def resolved(self) -> dict[str, Any]:
        payload = self.model_dump()
        for key in ("log_level", "log_file", "log_max_bytes", "log_backup_count"):
            payload.pop(key, None)
        return payload


@lru_cache
def get_settings() -> NumericSettings:
    override = os.getenv("DOTENV_OVERRIDE", "1").lower() in {"1", "true", "yes", "y"}
    load_dotenv(".env", override=override)
    return NumericSettings()
