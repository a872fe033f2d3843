"""Run configuration: one JSON document describing device, protocol, integrator, sweep and Monte-Carlo settings.

Lookup order when no explicit path is given:
    1. path in the environment variable ``FLUXTRANSFER_CONFIG``
    2. ``fluxtransfer.json`` in the current working directory
    3. ``config.json`` in the user config directory (``appdirs.user_config_dir('fluxtransfer')``)
    4. built-in defaults

Loaded documents are merged over the defaults, so a file only needs to contain the values it changes.
All frequencies are angular (rad/s); ``units`` must be ``"angular"``.
"""
import json
import math
import os
from collections import OrderedDict
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from appdirs import user_config_dir

from fluxtransfer.hilbert import SpaceConfig
from fluxtransfer.model import QubitParams, ResonatorParams
from fluxtransfer.propagator import IntegratorConfig
from fluxtransfer.protocol import Schedule, build_schedule
from fluxtransfer.utils import recursive_dict_update

CONFIG_ENV_VARIABLE = 'FLUXTRANSFER_CONFIG'
LOCAL_CONFIG_FILE = 'fluxtransfer.json'
SWEEP_VARIABLES = ('rabi_over_s',)


class ConfigurationError(ValueError):
    pass


def _qubit_defaults(omega12):
    return OrderedDict([('g', 3.0e9), ('omega12', omega12), ('delta_c_over_g', 10.0), ('omega02', None)])


DEFAULT_CONFIG = OrderedDict([
    ('units', 'angular'),
    ('device', OrderedDict([('qubit_a', _qubit_defaults(5.0e10)),
                            ('qubit_b', _qubit_defaults(5.5e10)),
                            ('resonator', OrderedDict([('omega_c', 4.0e10)]))])),
    ('protocol', OrderedDict([('rabi_tilde_over_g', 10.0), ('rabi_tilde', None)])),
    ('integrator', OrderedDict([('dt', None), ('norm_tolerance', 1e-9), ('steps_per_period', 1000),
                                ('record_stride', 10), ('trace_samples', 101), ('fock_cutoff', 2)])),
    ('sweep', OrderedDict([('variable', 'rabi_over_s'), ('grid', '1:10:1')])),
    ('monte_carlo', OrderedDict([('samples', 100000), ('batch_size', 10000), ('n_jobs', 1)])),
    ('seed', 42),
    ('output_path', None),
])


def get_configuration_file_path():
    """Returns the path of the configuration file to use and whether it exists."""
    config_path_in_home = os.path.join(user_config_dir('fluxtransfer'), 'config.json')

    if CONFIG_ENV_VARIABLE in os.environ:
        return os.environ[CONFIG_ENV_VARIABLE], True
    elif os.path.exists(LOCAL_CONFIG_FILE):
        return LOCAL_CONFIG_FILE, True
    elif os.path.exists(config_path_in_home):
        return config_path_in_home, True
    else:
        return config_path_in_home, False


def read_config(path: Optional[str] = None) -> dict:
    """Defaults merged with the JSON document at ``path`` (or the discovered file)."""
    config_exists = path is not None
    if path is None:
        path, config_exists = get_configuration_file_path()
    config = DEFAULT_CONFIG.copy()
    if config_exists:
        try:
            with open(path, 'r') as json_config_file:
                loaded_config = json.load(json_config_file)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError("Could not read configuration '{}': {}".format(path, e))
        if not isinstance(loaded_config, dict):
            raise ConfigurationError("Configuration '{}' must contain a JSON object".format(path))
        config = recursive_dict_update(config, loaded_config)
    return config


def parse_grid(grid) -> Tuple[float, ...]:
    """Sweep grid from ``"start:stop:step"`` (stop included) or an explicit list.

    >>> parse_grid('1:10:1')
    (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)
    >>> parse_grid([1, 3, 2])
    Traceback (most recent call last):
    ...
    fluxtransfer.config.ConfigurationError: Sweep grid must be strictly increasing, got [1.0, 3.0, 2.0]
    """
    if isinstance(grid, str):
        try:
            start, stop, step = (float(e) for e in grid.split(':'))
        except ValueError:
            raise ConfigurationError("Grid must have the form start:stop:step, got '{}'".format(grid))
        if not step > 0 or stop < start:
            raise ConfigurationError("Grid '{}' needs a positive step and stop >= start".format(grid))
        intervals = int(round((stop - start) / step))
        if abs(start + intervals * step - stop) > 1e-9 * step:
            raise ConfigurationError("Grid '{}': stop is not reached by whole steps".format(grid))
        values = [float(v) for v in np.linspace(start, stop, intervals + 1)]
    else:
        try:
            values = [float(v) for v in grid]
        except (TypeError, ValueError):
            raise ConfigurationError("Grid must be a string or a list of numbers, got {!r}".format(grid))
    if not values or not all(math.isfinite(v) and v > 0 for v in values):
        raise ConfigurationError("Grid values must be finite and positive, got {}".format(values))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigurationError("Sweep grid must be strictly increasing, got {}".format(values))
    return tuple(values)


def _positive(document, *keys, allow_none=False, integer=False):
    value = document
    for key in keys:
        value = value[key] if isinstance(value, dict) and key in value else None
    name = '.'.join(keys)
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise ConfigurationError("'{}' must be a finite positive number, got {!r}".format(name, value))
    if integer and int(value) != value:
        raise ConfigurationError("'{}' must be an integer, got {!r}".format(name, value))
    return int(value) if integer else float(value)


@dataclass(frozen=True)
class RunConfig:
    qubit_a: QubitParams
    qubit_b: QubitParams
    resonator: ResonatorParams
    rabi_tilde: float
    integrator: IntegratorConfig
    space: SpaceConfig
    grid: Tuple[float, ...]
    mc_samples: int
    mc_batch_size: int
    n_jobs: int
    seed: int
    output_path: Optional[str] = None

    @classmethod
    def from_dict(cls, document: dict) -> 'RunConfig':
        """Validates a (merged) configuration document.

        >>> RunConfig.from_dict(DEFAULT_CONFIG).qubit_a.omega02
        70000000000.0
        """
        if document.get('units') != 'angular':
            raise ConfigurationError("Only 'angular' units (rad/s) are supported, got {!r}".format(
                document.get('units')))
        omega_c = _positive(document, 'device', 'resonator', 'omega_c')

        def qubit(label):
            key = 'qubit_' + label
            g = _positive(document, 'device', key, 'g')
            omega02 = _positive(document, 'device', key, 'omega02', allow_none=True)
            if omega02 is None:
                omega02 = omega_c + _positive(document, 'device', key, 'delta_c_over_g') * g
            return QubitParams(omega02, _positive(document, 'device', key, 'omega12'), g, label)

        qubit_a, qubit_b = qubit('a'), qubit('b')
        rabi_tilde = _positive(document, 'protocol', 'rabi_tilde', allow_none=True)
        if rabi_tilde is None:
            rabi_tilde = _positive(document, 'protocol', 'rabi_tilde_over_g') * qubit_a.g

        integrator = IntegratorConfig(
            dt=_positive(document, 'integrator', 'dt', allow_none=True),
            norm_tolerance=_positive(document, 'integrator', 'norm_tolerance'),
            steps_per_period=_positive(document, 'integrator', 'steps_per_period', integer=True),
            record_stride=_positive(document, 'integrator', 'record_stride', integer=True),
            trace_samples=_positive(document, 'integrator', 'trace_samples', integer=True))
        if integrator.trace_samples < 2:
            raise ConfigurationError("'integrator.trace_samples' must be at least 2")

        sweep = document.get('sweep') or {}
        if sweep.get('variable', 'rabi_over_s') not in SWEEP_VARIABLES:
            raise ConfigurationError("Unknown sweep variable {!r}, valid: {}".format(sweep.get('variable'),
                                                                                    SWEEP_VARIABLES))
        seed = document.get('seed', 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigurationError("'seed' must be a non-negative integer, got {!r}".format(seed))
        output_path = document.get('output_path')
        if output_path is not None and not isinstance(output_path, str):
            raise ConfigurationError("'output_path' must be a string, got {!r}".format(output_path))

        config = cls(qubit_a=qubit_a, qubit_b=qubit_b,
                     resonator=ResonatorParams(omega_c),
                     rabi_tilde=rabi_tilde,
                     integrator=integrator,
                     space=SpaceConfig(_positive(document, 'integrator', 'fock_cutoff', integer=True)),
                     grid=parse_grid(sweep.get('grid', '1:10:1')),
                     mc_samples=_positive(document, 'monte_carlo', 'samples', integer=True),
                     mc_batch_size=_positive(document, 'monte_carlo', 'batch_size', integer=True),
                     n_jobs=_positive(document, 'monte_carlo', 'n_jobs', integer=True),
                     seed=seed,
                     output_path=output_path)
        config.schedule()
        return config

    def schedule(self) -> Schedule:
        return build_schedule(self.qubit_a, self.qubit_b, self.resonator, self.rabi_tilde)

    def with_overrides(self, **changes) -> 'RunConfig':
        return replace(self, **changes)


def load_run_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Reads, merges and validates a run configuration; ``overrides`` is merged last."""
    document = read_config(path)
    if overrides:
        document = recursive_dict_update(document, overrides)
    return RunConfig.from_dict(document)
