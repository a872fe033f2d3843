"""Schrödinger-equation propagation: exact for constant Hamiltonians, fixed-step RK4 otherwise.

Time-dependent Hamiltonians may be any callable ``t -> Operator``; objects offering ``matrix_at``,
``max_frequency`` and ``spectral_bound`` (like `fluxtransfer.model.InteractionHamiltonian`) are evaluated on
the fast path and get an automatic step size. States are never renormalised: a norm drift above
``norm_tolerance`` raises `IntegrationAccuracyError`.
"""
import logging
import math
from typing import Callable, List, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from fluxtransfer.hilbert import DimensionMismatchError, Operator, StateVector

logger = logging.getLogger(__name__)

MIN_STEPS_PER_PERIOD = 50


class HermiticityError(ValueError):
    pass


class DurationError(ValueError):
    pass


class IntegrationAccuracyError(ArithmeticError):
    """Norm drift exceeded the configured tolerance; ``drift`` holds the observed value."""

    def __init__(self, drift, tolerance):
        super().__init__("Norm drift {:.3e} exceeds tolerance {:.1e}".format(drift, tolerance))
        self.drift = drift
        self.tolerance = tolerance


class IntegratorConfig(NamedTuple):
    """Integration settings.

    Attributes:
        method: 'rk4' for time-dependent, 'expm' for constant Hamiltonians
        dt: fixed step; None selects 2π / (steps_per_period · ω_max)
        norm_tolerance: maximal allowed |‖ψ(t)‖ - ‖ψ(0)‖|
        steps_per_period: resolution of the fastest oscillation for automatic steps
        record_stride: RK4 steps between two recorded trajectory samples
        trace_samples: samples per step for closed-form and constant-Hamiltonian traces
    """
    method: str = 'rk4'
    dt: Optional[float] = None
    norm_tolerance: float = 1e-9
    steps_per_period: int = 1000
    record_stride: int = 10
    trace_samples: int = 101


class ColumnTrajectory(NamedTuple):
    """Samples of a block of propagated column states; ``samples[k]`` has shape (dimension, columns)."""
    times: np.ndarray
    samples: np.ndarray
    drift: float

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1]


Hamiltonian = Union[Operator, Callable[[float], Operator]]


def _check_duration(duration):
    if not duration >= 0:
        raise DurationError("Propagation time must be non-negative, got {}".format(duration))


def _check_drift(initial_norms, final_norms, tolerance) -> float:
    drift = float(np.max(np.abs(np.asarray(final_norms) - np.asarray(initial_norms)), initial=0.0))
    if drift > tolerance:
        raise IntegrationAccuracyError(drift, tolerance)
    return drift


def evolve_constant(state: StateVector, hamiltonian: Operator, duration: float,
                    norm_tolerance: float = IntegratorConfig().norm_tolerance) -> StateVector:
    """Applies exp(-iHt) for a constant, hermitian-flagged Hamiltonian.

    >>> from fluxtransfer.hilbert import SpaceConfig
    >>> config = SpaceConfig(1)
    >>> h = Operator(np.eye(config.dimension), hermitian=True)
    >>> s = evolve_constant(StateVector.basis((0, 0, 0), config), h, math.pi)
    >>> round(s.amplitude((0, 0, 0)).real, 12)
    -1.0
    """
    trajectory = propagate_constant_columns(state.amplitudes, hamiltonian, [duration], norm_tolerance)
    return StateVector(trajectory.final[:, 0], state.config)


def propagate_constant_columns(columns: np.ndarray, hamiltonian: Operator, times: np.ndarray,
                               norm_tolerance: float = IntegratorConfig().norm_tolerance) -> ColumnTrajectory:
    """Exact propagation of a block of column states under a constant hamiltonian-flagged operator.

    ``times`` are measured from the start of the evolution; one sample is stored per entry.
    """
    if not isinstance(hamiltonian, Operator) or not hamiltonian.hermitian:
        raise HermiticityError("Constant evolution requires an operator flagged hermitian")
    y = np.array(columns, dtype=complex)
    if y.ndim == 1:
        y = y[:, None]
    if hamiltonian.dimension != y.shape[0]:
        raise DimensionMismatchError("Hamiltonian dimension {} does not match state dimension {}".format(
            hamiltonian.dimension, y.shape[0]))
    times = np.asarray(times, dtype=float)
    for t in times:
        _check_duration(t)
    samples = np.array([y if t == 0 else scipy.linalg.expm(-1j * t * hamiltonian.matrix) @ y for t in times])
    drift = _check_drift(np.linalg.norm(y, axis=0), np.linalg.norm(samples[-1], axis=0), norm_tolerance)
    return ColumnTrajectory(times, samples, drift)


def _matrix_function(hamiltonian) -> Callable[[float], np.ndarray]:
    if hasattr(hamiltonian, 'matrix_at'):
        return hamiltonian.matrix_at
    if isinstance(hamiltonian, Operator):
        matrix = hamiltonian.matrix
        return lambda t: matrix
    return lambda t: hamiltonian(t).matrix


def angular_frequency_scale(hamiltonian, t0: float = 0.0) -> float:
    """ω_max: largest rotating frequency or spectral bound of ``hamiltonian``, whichever is larger."""
    if hasattr(hamiltonian, 'spectral_bound'):
        return max(hamiltonian.max_frequency, hamiltonian.spectral_bound)
    return float(np.linalg.norm(_matrix_function(hamiltonian)(t0), 2))


def step_count(duration: float, omega_max: float, cfg: IntegratorConfig) -> Tuple[int, float]:
    """Number of RK4 steps (a multiple of ``record_stride``) and the step size that covers ``duration`` exactly.

    >>> step_count(1.0, 2 * math.pi, IntegratorConfig(steps_per_period=100, record_stride=10))
    (100, 0.01)
    >>> step_count(0.0, 0.0, IntegratorConfig())
    (0, 0.0)
    """
    _check_duration(duration)
    if duration == 0:
        return 0, 0.0
    if omega_max <= 0:
        dt_limit = math.inf
    else:
        dt_limit = 2 * math.pi / (MIN_STEPS_PER_PERIOD * omega_max)
    if cfg.dt is not None:
        if cfg.dt <= 0:
            raise ValueError("Step size must be positive, got {}".format(cfg.dt))
        if cfg.dt > dt_limit:
            raise ValueError("Step size {} too coarse: at most {:.3e} for omega_max={:.3e}".format(
                cfg.dt, dt_limit, omega_max))
        dt = cfg.dt
    elif omega_max > 0:
        dt = 2 * math.pi / (cfg.steps_per_period * omega_max)
    else:
        dt = duration
    stride = max(1, int(cfg.record_stride))
    n_steps = max(1, math.ceil(round(duration / dt, 9)))
    n_steps = stride * math.ceil(n_steps / stride)
    return n_steps, duration / n_steps


def propagate_columns(columns: np.ndarray, hamiltonian: Hamiltonian, t0: float, duration: float,
                      cfg: IntegratorConfig = IntegratorConfig()) -> ColumnTrajectory:
    """RK4 propagation of a block of column states over [t0, t0 + duration].

    Every ``record_stride`` steps the block is stored, the first sample being the initial block.
    """
    if cfg.method != 'rk4':
        raise ValueError("Time-dependent propagation supports only method 'rk4', got '{}'".format(cfg.method))
    _check_duration(duration)
    y = np.array(columns, dtype=complex)
    if y.ndim == 1:
        y = y[:, None]
    matrix_at = _matrix_function(hamiltonian)
    initial_norms = np.linalg.norm(y, axis=0)
    if duration == 0:
        return ColumnTrajectory(np.array([t0]), y[None].copy(), 0.0)

    n_steps, dt = step_count(duration, angular_frequency_scale(hamiltonian, t0), cfg)
    stride = max(1, int(cfg.record_stride))
    logger.debug("RK4: %d steps of %.3e s over %.3e s for %d column(s)", n_steps, dt, duration, y.shape[1])

    times, samples = [t0], [y.copy()]
    h_start = matrix_at(t0)
    for step in range(1, n_steps + 1):
        t = t0 + (step - 1) * dt
        h_half = matrix_at(t + 0.5 * dt)
        h_end = matrix_at(t0 + step * dt)
        k1 = -1j * (h_start @ y)
        k2 = -1j * (h_half @ (y + 0.5 * dt * k1))
        k3 = -1j * (h_half @ (y + 0.5 * dt * k2))
        k4 = -1j * (h_end @ (y + dt * k3))
        y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        h_start = h_end
        if step % stride == 0:
            times.append(t0 + step * dt)
            samples.append(y.copy())

    drift = _check_drift(initial_norms, np.linalg.norm(y, axis=0), cfg.norm_tolerance)
    logger.debug("RK4 finished with norm drift %.3e", drift)
    return ColumnTrajectory(np.array(times), np.array(samples), drift)


def evolve_time_dependent(state: StateVector, hamiltonian: Hamiltonian, t0: float, duration: float,
                          cfg: IntegratorConfig = IntegratorConfig()) -> StateVector:
    """Propagates ``state`` from ``t0`` over ``duration`` with fixed-step RK4."""
    trajectory = propagate_columns(state.amplitudes, hamiltonian, t0, duration, cfg)
    return StateVector(trajectory.final[:, 0], state.config)


def step_and_record(state: StateVector, hamiltonian: Hamiltonian, duration: float, n_samples: int,
                    t0: float = 0.0, cfg: IntegratorConfig = IntegratorConfig()) -> List[Tuple[float, StateVector]]:
    """Trajectory of ``n_samples`` equally spaced states, first at ``t0`` and last at ``t0 + duration``.

    Constant (hermitian-flagged) operators are evolved exactly, everything else with RK4 where the step
    count is a multiple of the sampling interval. A zero ``duration`` yields ``n_samples`` copies of ``state``.
    """
    if n_samples < 2:
        raise ValueError("At least two samples (start and end) are required, got {}".format(n_samples))
    _check_duration(duration)
    if duration == 0:
        return [(float(t0), StateVector(state.amplitudes.copy(), state.config)) for _ in range(n_samples)]
    times = t0 + np.linspace(0.0, duration, n_samples)
    if isinstance(hamiltonian, Operator):
        trajectory = propagate_constant_columns(state.amplitudes, hamiltonian, times - t0, cfg.norm_tolerance)
        return [(float(t), StateVector(sample[:, 0], state.config)) for t, sample in zip(times, trajectory.samples)]

    intervals = n_samples - 1
    n_steps, _ = step_count(duration, angular_frequency_scale(hamiltonian, t0), cfg._replace(record_stride=1))
    stride = math.ceil(n_steps / intervals)
    trajectory = propagate_columns(state.amplitudes, hamiltonian, t0, duration,
                                   cfg._replace(dt=duration / (stride * intervals), record_stride=stride))
    return [(float(t), StateVector(sample[:, 0], state.config))
            for t, sample in zip(trajectory.times, trajectory.samples)]
