import json
import math
import os

import pytest

from fluxtransfer.config import (
    CONFIG_ENV_VARIABLE, DEFAULT_CONFIG, LOCAL_CONFIG_FILE, ConfigurationError, RunConfig,
    get_configuration_file_path, load_run_config, parse_grid, read_config)
from fluxtransfer.protocol import ScheduleError


def test_defaults():
    config = RunConfig.from_dict(DEFAULT_CONFIG)
    assert config.qubit_a.g == 3.0e9
    assert config.qubit_a.omega02 == config.resonator.omega_c + 10 * config.qubit_a.g
    assert config.qubit_b.omega12 == 5.5e10
    assert config.rabi_tilde == 10 * config.qubit_a.g
    assert config.integrator.steps_per_period == 1000
    assert config.integrator.norm_tolerance == 1e-9
    assert config.space.fock_cutoff == 2
    assert config.grid == tuple(float(v) for v in range(1, 11))
    assert config.mc_samples == 100000 and config.seed == 42
    assert config.output_path is None
    assert 1.0e-8 <= config.schedule().total_time <= 1.1e-8


def test_discovery_order(tmp_path, monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VARIABLE, raising=False)
    monkeypatch.chdir(tmp_path)
    local = tmp_path / LOCAL_CONFIG_FILE
    local.write_text(json.dumps({'seed': 7}))
    assert get_configuration_file_path() == (LOCAL_CONFIG_FILE, True)
    assert load_run_config().seed == 7

    from_env = tmp_path / 'env.json'
    from_env.write_text(json.dumps({'seed': 8}))
    monkeypatch.setenv(CONFIG_ENV_VARIABLE, str(from_env))
    assert load_run_config().seed == 8

    # explicit path wins over everything
    explicit = tmp_path / 'explicit.json'
    explicit.write_text(json.dumps({'seed': 9}))
    assert load_run_config(str(explicit)).seed == 9


def test_partial_documents_are_merged(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'device': {'qubit_b': {'delta_c_over_g': 20.0, 'omega12': 8e10}},
                                'integrator': {'steps_per_period': 800}}))
    config = load_run_config(str(path))
    assert config.qubit_b.omega02 == config.resonator.omega_c + 20 * config.qubit_b.g
    assert config.qubit_b.omega12 == 8e10
    assert config.qubit_a.omega12 == 5e10
    assert config.integrator.steps_per_period == 800
    assert config.integrator.record_stride == 10

    explicit = load_run_config(overrides={'device': {'qubit_a': {'omega02': 8e10}}, 'protocol': {'rabi_tilde': 1e9}})
    assert explicit.qubit_a.omega02 == 8e10
    assert explicit.rabi_tilde == 1e9


def test_reading_never_writes(tmp_path, monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VARIABLE, raising=False)
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv('XDG_CONFIG_HOME', str(tmp_path / 'xdg'))
    document = read_config()
    assert document['seed'] == DEFAULT_CONFIG['seed']
    assert os.listdir(str(tmp_path)) == []


@pytest.mark.parametrize('document, error', [
    ({'units': 'hertz'}, ConfigurationError),
    ({'device': {'resonator': {'omega_c': -1.0}}}, ConfigurationError),
    ({'device': {'qubit_a': {'g': 'strong'}}}, ConfigurationError),
    ({'integrator': {'steps_per_period': 10.5}}, ConfigurationError),
    ({'integrator': {'trace_samples': 1}}, ConfigurationError),
    ({'integrator': {'fock_cutoff': 0}}, ConfigurationError),
    ({'sweep': {'variable': 'delta_c'}}, ConfigurationError),
    ({'sweep': {'grid': '1:10:0'}}, ConfigurationError),
    ({'seed': -3}, ConfigurationError),
    ({'seed': True}, ConfigurationError),
    ({'output_path': 3}, ConfigurationError),
    ({'monte_carlo': {'samples': 0}}, ConfigurationError),
    ({'device': {'qubit_a': {'omega02': 3e10}}}, ScheduleError),
    ({'device': {'qubit_b': {'g': 0.0}}}, ConfigurationError),
])
def test_invalid_documents(document, error):
    with pytest.raises(error):
        load_run_config(overrides=document)


def test_unreadable_files(tmp_path):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"seed": ')
    with pytest.raises(ConfigurationError):
        read_config(str(broken))
    listing = tmp_path / 'list.json'
    listing.write_text('[1, 2]')
    with pytest.raises(ConfigurationError):
        read_config(str(listing))
    with pytest.raises(ConfigurationError):
        read_config(str(tmp_path / 'missing.json'))


def test_parse_grid():
    assert parse_grid('0.5:2:0.5') == (0.5, 1.0, 1.5, 2.0)
    assert parse_grid([1, 2.5, 10]) == (1.0, 2.5, 10.0)
    assert parse_grid('3:3:1') == (3.0,)
    for invalid in ('1:10', '1:10:-1', '10:1:1', '1:2:0.3', 'a:b:c', [], [0, 1], [1, math.inf], 5):
        with pytest.raises(ConfigurationError):
            parse_grid(invalid)


def test_with_overrides():
    config = RunConfig.from_dict(DEFAULT_CONFIG)
    changed = config.with_overrides(seed=1, grid=(2.0, 4.0))
    assert changed.seed == 1 and changed.grid == (2.0, 4.0)
    assert config.seed == 42
    assert changed.schedule() == config.schedule()
    with pytest.raises(ConfigurationError):
        load_run_config(overrides={'integrator': {'fock_cutoff': True}})
