import json
from pathlib import Path

from sqw.utils.configs.config_io import SCHEMA_NAME, dump_config, example_configs, scenario_schema


def create_schema(path: Path | str, name: str = SCHEMA_NAME) -> Path:
    """Write the scenario config JSON schema into ``path``."""
    target = Path(path) / name
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(scenario_schema(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target


def create_examples(path: Path | str, overwrite: bool = False) -> list[tuple[Path, bool]]:
    """Write one example config per scenario; returns (file, written) pairs, skipping existing files unless told otherwise."""
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    results = []
    for stem, config in example_configs().items():
        target = directory / f"{stem}.json"
        if target.exists() and not overwrite:
            results.append((target, False))
            continue
        target.write_text(dump_config(config), encoding="utf-8")
        results.append((target, True))
    return results
