"""
Loading, dumping and example generation for scenario configs. JSON is canonical; YAML is
accepted for hand-written files.
"""
import json
from pathlib import Path

import yaml
from pydantic import ValidationError

from sqw.utils.configs.modes import ModeFamily, ScenarioKind
from sqw.utils.configs.scenarioconfigs import (
    BeamConfig,
    CurrentsConfig,
    GridConfig,
    ModeConfig,
    PotentialConfig,
    PropagationConfig,
    ScenarioConfig,
    SpectralConfig,
    SweepConfig,
    VortexConfig,
)
from sqw.utils.errors import ConfigError, OutputError

SCHEMA_NAME = "scenario.schema.json"


def _parse(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config {path} is not UTF-8 text: {exc}") from exc
    except OSError as exc:
        raise OutputError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        elif path.suffix.lower() == ".json":
            data = json.loads(text)
        else:
            raise ConfigError(f"config {path} must be .json, .yaml or .yml")
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"config {path} is not well-formed: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a mapping at the top level")
    return data


def validate_config(data: dict, kind: ScenarioKind | str | None = None, source: str = "config") -> ScenarioConfig:
    """Validate a raw mapping; ``kind`` (the CLI sub-command) fills or must match ``data['kind']``."""
    data = dict(data)
    if kind is not None:
        kind = ScenarioKind(kind)
        declared = data.setdefault("kind", kind.value)
        if declared != kind.value:
            raise ConfigError(f"{source} declares kind {declared!r} but was run as {kind.value!r}",
                              [f"kind: expected {kind.value!r}"])
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError.from_validation(exc, source) from exc


def load_config(path: Path | str, kind: ScenarioKind | str | None = None) -> ScenarioConfig:
    path = Path(path)
    return validate_config(_parse(path), kind, source=str(path))


def dump_config(config: ScenarioConfig) -> str:
    return json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def scenario_schema() -> dict:
    return ScenarioConfig.model_json_schema()


def example_configs() -> dict[str, ScenarioConfig]:
    """One ready-to-run config per scenario kind, keyed by file stem."""
    neutron = BeamConfig(wavelength=2e-10, w0=1e-5)
    return {
        "propagate": ScenarioConfig(
            kind=ScenarioKind.propagate,
            potential=PotentialConfig(A=0.4),
            mode=ModeConfig(family=ModeFamily.HG, first=2, second=1),
            propagation=PropagationConfig(zeta=[0.0, 0.5, 1.0, 1.5, 2.0]),
            output="out/propagate",
        ),
        "propagate-si": ScenarioConfig(
            kind=ScenarioKind.propagate,
            beam=neutron,
            potential=PotentialConfig(alpha=1e-26),
            mode=ModeConfig(family=ModeFamily.LG, first=1, second=0),
            output="out/propagate-si",
        ),
        "interfere-grating": ScenarioConfig(
            kind=ScenarioKind.interfere_grating,
            potential=PotentialConfig(A=0.2),
            sweep=SweepConfig(A=[0.05, 0.1, 0.2, 0.3, 0.5]),
            output="out/interfere-grating",
        ),
        "interfere-vortex": ScenarioConfig(
            kind=ScenarioKind.interfere_vortex,
            potential=PotentialConfig(A=0.0),
            vortex=VortexConfig(ell=1, zeta=20.0),
            sweep=SweepConfig(A=[0.0, 0.001, 0.002, 0.003], ell=[1, 2, 3, 4, 5, 6]),
            output="out/interfere-vortex",
        ),
        "currents": ScenarioConfig(
            kind=ScenarioKind.currents,
            potential=PotentialConfig(A=0.4),
            mode=ModeConfig(family=ModeFamily.LG, first=1, second=0),
            currents=CurrentsConfig(zeta_start=0.0, zeta_end=2.0),
            output="out/currents",
        ),
        "expand": ScenarioConfig(
            kind=ScenarioKind.expand,
            potential=PotentialConfig(A=0.3),
            mode=ModeConfig(family=ModeFamily.HG, first=2, second=1),
            grid=GridConfig(nx=128, ny=128, extent_x=8.0, extent_y=8.0),
            propagation=PropagationConfig(zeta=[0.0, 0.5, 1.0]),
            spectral=SpectralConfig(zeta_max=1.0),
            output="out/expand",
        ),
        "validate": ScenarioConfig(kind=ScenarioKind.validate, output="out/validate"),
    }


__all__ = ["SCHEMA_NAME", "validate_config", "load_config", "dump_config", "scenario_schema", "example_configs"]
