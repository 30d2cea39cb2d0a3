from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from bicgrad.errors import ConfigError
from bicgrad.io_utils import deep_merge, read_json
from bicgrad.schema.experiment import ExperimentConfig

KINDS = ("potential", "disk-area", "blowup", "torus", "collar", "annulus")


def packaged_defaults() -> dict[str, Any]:
    """The defaults shipped in `bicgrad/presets/defaults.json`."""
    source = resources.files("bicgrad.presets") / "defaults.json"
    return json.loads(source.read_text(encoding="utf-8"))


def _dotted(loc: tuple[int | str, ...]) -> str:
    return ".".join(str(part) for part in loc)


def _first_error(exc: ValidationError) -> ConfigError:
    err = exc.errors()[0]
    msg = err["msg"]
    # pydantic prefixes errors raised in validators
    if msg.startswith("Value error, "):
        msg = msg[len("Value error, ") :]
    if err["type"] == "extra_forbidden":
        msg = "unknown key"
    elif err["type"] == "missing":
        msg = "required key is missing"
    return ConfigError(_dotted(err["loc"]), msg)


def validate_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a merged config dict; the first violation becomes a ConfigError."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise _first_error(exc) from exc


def load_config(
    path: Path | None = None,
    *,
    seed: int | None = None,
    output: str | None = None,
) -> ExperimentConfig:
    """Packaged defaults <- config file <- command-line overrides."""
    data = packaged_defaults()
    if path is not None:
        data = deep_merge(data, read_json(Path(path)))
    overrides: dict[str, Any] = {}
    if seed is not None:
        overrides["seed"] = seed
    if output is not None:
        overrides["output"] = output
    return validate_config(deep_merge(data, overrides))


def config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    return config.model_dump(mode="json", by_alias=True)
