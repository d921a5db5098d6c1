import json

import pytest
import yaml

from pml_select.config import (
    RunConfig,
    environment_overrides,
    load_config_file,
    load_run_config,
)
from pml_select.errors import ConfigError
from pml_select.reflectivity import GridSpec, Sampling


def test_defaults_reproduce_reference_setup():
    config = load_run_config(environ={})
    assert config == RunConfig()
    assert config.grid() == GridSpec(lambda0=1.0, n0=1.0, h=0.05, m=5)
    assert config.quadrature().size == 100
    assert config.simplex_config().max_evals == 2000


def test_yaml_and_json_files(tmp_path):
    yaml_path = tmp_path / "run.yaml"
    yaml_path.write_text("m: 8\nsampling: cell-average\nscan_a2: [0, 40, 21]\n")
    json_path = tmp_path / "run.json"
    json_path.write_text(json.dumps({"h": 0.025, "quad_nodes": 150}))

    from_yaml = load_run_config(yaml_path, environ={})
    assert from_yaml.m == 8
    assert from_yaml.grid().sampling is Sampling.CELL_AVERAGE
    assert from_yaml.scan_a2 == (0, 40, 21)

    from_json = load_run_config(json_path, environ={})
    assert (from_json.h, from_json.quad_nodes, from_json.m) == (0.025, 150, 5)


def test_precedence_file_then_environment_then_flags(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("quad_nodes: 120\nmax_evals: 500\nm: 6\n")
    environ = {"PMLSEL_QUAD_NODES": "160", "PMLSEL_M": "7"}

    config = load_run_config(path, overrides={"m": 9, "h": None}, environ=environ)

    assert config.max_evals == 500
    assert config.quad_nodes == 160
    assert config.m == 9
    assert config.h == 0.05


def test_environment_values_are_parsed_as_scalars():
    env = environment_overrides({"PMLSEL_H": "0.1", "PMLSEL_SAMPLING": "midpoint", "PMLSEL_N0": "", "OTHER": "1"})
    assert env == {"h": 0.1, "sampling": "midpoint"}


def test_echo_round_trips_through_a_file(tmp_path):
    original = RunConfig(h=0.04, m=7, sampling="cell-average", workers=3)
    path = tmp_path / "echo.yaml"
    path.write_text(yaml.safe_dump(original.to_dict()))
    assert load_run_config(path, environ={}) == original


@pytest.mark.parametrize(
    "payload",
    [
        "unknown_key: 1\n",
        "m: 0\n",
        "m: 2.5\n",
        "h: -0.05\n",
        "sampling: trapezoid\n",
        "scan_ap: [0, 300]\n",
        "- just\n- a list\n",
        "m: [unclosed\n",
    ],
)
def test_bad_files_raise_config_error(tmp_path, payload):
    path = tmp_path / "bad.yaml"
    path.write_text(payload)
    with pytest.raises(ConfigError) as excinfo:
        load_config_file(path)
    assert excinfo.value.exit_code == 2


def test_missing_file_and_bad_environment(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_run_config(tmp_path / "missing.yaml", environ={})
    with pytest.raises(ConfigError, match="max_evals"):
        load_run_config(environ={"PMLSEL_MAX_EVALS": "lots"})
    with pytest.raises(ConfigError):
        load_run_config(overrides={"workers": 0}, environ={})
