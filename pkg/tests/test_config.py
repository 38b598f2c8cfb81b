import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from sqw.physics import nondimensionalize
from sqw.scripts.schema.schema_gen import create_examples, create_schema
from sqw.utils.configs.config_io import dump_config, example_configs, load_config, scenario_schema, validate_config
from sqw.utils.configs.modes import ScenarioKind
from sqw.utils.errors import ConfigError, OutputError
from sqw.utils.tables import read_table, sha256_of, write_manifest, write_table

CONFIGS_DIR = Path(__file__).resolve().parent.parent / "configs"


def test_tables_round_trip_floats(tmp_path):
    frame = pd.DataFrame({"zeta": [0.1, 1.0 / 3.0, 2.0], "value": [np.pi, -1e-300, 6.02214076e23]})
    back = read_table(write_table(frame, tmp_path / "t.csv"))
    pd.testing.assert_frame_equal(back, frame, check_exact=True)


def test_manifest_is_sorted_and_deterministic(tmp_path):
    (tmp_path / "b").mkdir()
    files = [tmp_path / "b" / "z.txt", tmp_path / "a.txt"]
    for i, path in enumerate(files):
        path.write_text(f"payload {i}")
    manifest = write_manifest(tmp_path, files)
    first = manifest.read_bytes()
    entries = json.loads(first)["files"]
    assert [e["path"] for e in entries] == ["a.txt", "b/z.txt"]
    assert entries[0]["sha256"] == sha256_of(tmp_path / "a.txt")
    assert entries[0]["bytes"] == len("payload 1")
    assert write_manifest(tmp_path, reversed(files)).read_bytes() == first


@pytest.mark.parametrize("path", sorted(CONFIGS_DIR.iterdir()), ids=lambda p: p.name)
def test_shipped_configs_load(path):
    kind = ScenarioKind(path.stem.removesuffix("-si"))
    config = load_config(path, kind)
    assert config.kind == kind


def test_unknown_keys_are_reported_with_their_path():
    with pytest.raises(ConfigError) as info:
        validate_config({"grid": {"bogus": 1}}, "propagate")
    assert any(line.startswith("grid.bogus") for line in info.value.diagnostics)
    assert info.value.exit_code == 2


@pytest.mark.parametrize("data", [
    {"potential": {"A": 0.1, "alpha": 1e-26}},
    {"potential": {"alpha": 1e-26}},
    {"potential": {"A": float("nan")}},
    {"beam": {"wavelength": 2e-10, "p0": 1e-24, "w0": 1e-5}},
    {"grid": {"nx": 63}},
    {"currents": {"zeta_start": 1.0, "zeta_end": 0.5}},
])
def test_invalid_configs(data):
    with pytest.raises(ConfigError):
        validate_config(data, "propagate")


def test_kind_must_match_the_command():
    with pytest.raises(ConfigError):
        validate_config({"kind": "expand"}, "propagate")
    assert validate_config({}, "currents").kind == ScenarioKind.currents


def test_config_files_must_exist_and_parse(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    text = tmp_path / "config.txt"
    text.write_text("{}")
    with pytest.raises(ConfigError):
        load_config(text)
    broken = tmp_path / "broken.yaml"
    broken.write_text("kind: [propagate\n")
    with pytest.raises(ConfigError):
        load_config(broken)
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(listed)


def test_unreadable_config_is_an_io_error(tmp_path):
    folder = tmp_path / "folder.yaml"
    folder.mkdir()
    with pytest.raises(OutputError) as info:
        load_config(folder)
    assert info.value.exit_code == 4
    binary = tmp_path / "binary.json"
    binary.write_bytes(b"\xff\xfe\x00")
    with pytest.raises(ConfigError):
        load_config(binary)


def test_si_potential_is_reduced_through_the_beam():
    config = example_configs()["propagate-si"]
    beam = config.beam.to_beam()
    assert config.is_si
    assert config.reduced_A == pytest.approx(nondimensionalize(beam, 1e-26).A, rel=1e-15)
    assert config.A_values() == [config.reduced_A]


@pytest.mark.parametrize("stem", list(example_configs()))
def test_dumped_examples_validate_again(stem):
    config = example_configs()[stem]
    assert validate_config(json.loads(dump_config(config))) == config


def test_schema_and_examples_on_disk(tmp_path):
    assert "kind" in scenario_schema()["properties"]
    schema_path = create_schema(tmp_path)
    assert json.loads(schema_path.read_text()) == scenario_schema()
    first = create_examples(tmp_path)
    assert all(written for _, written in first)
    assert not any(written for _, written in create_examples(tmp_path))
    assert all(written for _, written in create_examples(tmp_path, overwrite=True))
    for path, _ in first:
        load_config(path)
