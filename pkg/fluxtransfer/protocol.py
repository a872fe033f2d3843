"""Four-step transfer of a qubit state from qubit a to qubit b through a shared resonator mode.

Steps:
    1. Raman pulse on qubit a moves |1⟩_a|0⟩_c to |0⟩_a|1⟩_c (resonator and 1-2 drive equally detuned).
    2. Resonant π/2 pulses: qubit a on 0-2, qubit b on 1-2.
    3. Resonant π/2 pulses: qubit a on 1-2, qubit b on 0-2.
    4. Raman pulse on qubit b moves |0⟩_b|1⟩_c to |1⟩_b|0⟩_c.

The two basis inputs |0⟩_a|1⟩_b|0⟩_c and |1⟩_a|1⟩_b|0⟩_c are always propagated together; the evolution of
α|0⟩_a + β|1⟩_a follows by linearity.

Engines:
    ``analytic``: exact closed-form maps of each step
    ``dispersive``: closed-form maps plus the one-photon level shifts of the resonant steps
    ``effective``: matrix exponential of the eliminated-level and resonant-pulse Hamiltonians
    ``full``: RK4 integration of the time-dependent interaction-picture Hamiltonian
"""
import logging
import math
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from fluxtransfer.analytics import (
    FidelityParams, NormalizationError, PhaseShift, _check_normalized, apply_pulse, apply_raman, level_shifts,
    overlap_fidelities, phase_shift_model, sample_bloch_angles)
from fluxtransfer.cache import disk_cache
from fluxtransfer.hilbert import SpaceConfig, StateVector, basis_index, basis_label, format_label, photon_number
from fluxtransfer.model import (
    DriveParams, InteractionHamiltonian, QubitParams, ResonatorParams, effective_raman_hamiltonian,
    resonant_drive_hamiltonian)
from fluxtransfer.propagator import (
    IntegrationAccuracyError, IntegratorConfig, propagate_columns, propagate_constant_columns)

logger = logging.getLogger(__name__)

ENGINES = ('analytic', 'dispersive', 'effective', 'full')
TRUTH_TABLE_THRESHOLDS = {'analytic': 1e-12, 'dispersive': 0.1, 'effective': 1e-8, 'full': 0.22}
FIDELITY_THRESHOLDS = {'analytic': 1 - 1e-12, 'dispersive': 0.9, 'effective': 1 - 1e-8, 'full': 0.85}

RAMAN_PHASE = math.pi
FIRST_PULSE_PHASE = -math.pi / 2
SECOND_PULSE_PHASE = math.pi / 2

INPUT_LABELS = ((0, 1, 0), (1, 1, 0))
IDEAL_OUTPUT_LABELS = ((1, 0, 0), (1, 1, 0))
EXPECTED_STATES = (
    ((0, 1, 0), (0, 1, 0), (2, 2, 0), (1, 0, 0), (1, 0, 0)),
    ((1, 1, 0), (0, 1, 1), (2, 2, 1), (1, 0, 1), (1, 1, 0)),
)

__all__ = ['ENGINES', 'Step', 'Schedule', 'TransferReport', 'TruthTable', 'build_schedule', 'run_transfer',
           'verify_truth_table', 'transfer_matrix', 'haar_random_inputs', 'ScheduleError', 'NormalizationError']


class ScheduleError(ValueError):
    pass


class Step(NamedTuple):
    index: int
    drives: Tuple[DriveParams, ...]
    duration: float
    start: float
    engine_note: str


class Schedule(NamedTuple):
    steps: Tuple[Step, Step, Step, Step]
    qubits: Tuple[QubitParams, QubitParams]
    resonator: ResonatorParams
    rabi_tilde: float

    def qubit(self, label: str) -> QubitParams:
        return self.qubits[0] if label == 'a' else self.qubits[1]

    def delta_c(self, label: str) -> float:
        return self.qubit(label).omega02 - self.resonator.omega_c

    @property
    def durations(self) -> Tuple[float, ...]:
        return tuple(s.duration for s in self.steps)

    @property
    def total_time(self) -> float:
        return sum(self.durations)

    @property
    def fidelity_params(self) -> FidelityParams:
        qa, qb = self.qubits
        return FidelityParams(2 * qa.g ** 2 / self.delta_c('a'), 2 * qb.g ** 2 / self.delta_c('b'), self.rabi_tilde)


class LeakageRecord(NamedTuple):
    step: int
    p2_a: float
    p2_b: float


class TransferReport(NamedTuple):
    engine: str
    alpha: complex
    beta: complex
    final_state: StateVector
    step_trace: Tuple[StateVector, ...]
    fidelity_vs_ideal: float
    leakage: Tuple[LeakageRecord, ...]
    residual_photon: float
    norm_drift: float

    def to_dict(self):
        return {
            'engine': self.engine,
            'alpha': [self.alpha.real, self.alpha.imag],
            'beta': [self.beta.real, self.beta.imag],
            'fidelity_vs_ideal': self.fidelity_vs_ideal,
            'residual_photon': self.residual_photon,
            'norm_drift': self.norm_drift,
            'leakage': [{'step': l.step, 'p2_a': l.p2_a, 'p2_b': l.p2_b} for l in self.leakage],
            'final_state': _nonzero_amplitudes(self.final_state),
        }


class TruthTableEntry(NamedTuple):
    input_row: int
    step: int
    expected: Tuple[int, int, int]
    state: StateVector
    global_phase: float
    raw_deviation: float
    deviation: float


class TruthTable(NamedTuple):
    engine: str
    entries: Tuple[TruthTableEntry, ...]

    @property
    def max_deviation(self) -> float:
        return max(e.deviation for e in self.entries)

    @property
    def max_raw_deviation(self) -> float:
        return max(e.raw_deviation for e in self.entries)

    def passes(self, threshold: Optional[float] = None) -> bool:
        threshold = TRUTH_TABLE_THRESHOLDS[self.engine] if threshold is None else threshold
        return self.max_deviation <= threshold


class EngineTrace(NamedTuple):
    """Evolution of both basis inputs: ``step_states`` (5, dim, 2) and per-step ``samples`` (m, dim, 2)."""
    step_states: np.ndarray
    samples: Tuple[np.ndarray, ...]
    norm_drift: float


def _nonzero_amplitudes(state: StateVector, tolerance=1e-12):
    return {format_label(basis_label(k, state.config)): [a.real, a.imag]
            for k, a in enumerate(state.amplitudes) if abs(a) > tolerance}


def build_schedule(qa: QubitParams, qb: QubitParams, resonator: ResonatorParams, rabi_tilde: float) -> Schedule:
    """Creates the four pulses of the transfer for the given device.

    Raman pulses match the resonator detuning of the addressed qubit and have Rabi frequency g; the resonant
    pulses all use ``rabi_tilde``.

    Examples:
        >>> g = 3.0e9
        >>> qa = QubitParams(4e10 + 10 * g, 5e10, g, 'a')
        >>> qb = QubitParams(4e10 + 10 * g, 5.5e10, g, 'b')
        >>> schedule = build_schedule(qa, qb, ResonatorParams(4e10), 10 * g)
        >>> [round(d * g / math.pi, 9) for d in schedule.durations]
        [5.0, 0.05, 0.05, 5.0]
    """
    if qa.label != 'a' or qb.label != 'b':
        raise ScheduleError("Expected qubits labelled 'a' and 'b', got '{}' and '{}'".format(qa.label, qb.label))
    if not (math.isfinite(rabi_tilde) and rabi_tilde > 0):
        raise ScheduleError("Resonant Rabi frequency must be positive and finite, got {}".format(rabi_tilde))
    for q in (qa, qb):
        delta = q.omega02 - resonator.omega_c
        if not delta > 0:
            raise ScheduleError("Resonator detuning of qubit {} must be positive, got {}".format(q.label, delta))
        if not q.g > 0:
            raise ScheduleError("Qubit {} must couple to the resonator, got g={}".format(q.label, q.g))
        if not q.omega12 - delta > 0:
            raise ScheduleError("Raman drive of qubit {} would need omega_uw={} <= 0".format(
                q.label, q.omega12 - delta))

    def raman(q):
        delta = q.omega02 - resonator.omega_c
        drive = DriveParams(q.label, (1, 2), q.omega12 - delta, q.g, RAMAN_PHASE)
        return (drive,), math.pi * delta / (2 * q.g ** 2)

    t_pulse = math.pi / (2 * rabi_tilde)
    drives_1, t1 = raman(qa)
    drives_2 = (DriveParams('a', (0, 2), qa.omega02, rabi_tilde, FIRST_PULSE_PHASE),
                DriveParams('b', (1, 2), qb.omega12, rabi_tilde, FIRST_PULSE_PHASE))
    drives_3 = (DriveParams('a', (1, 2), qa.omega12, rabi_tilde, SECOND_PULSE_PHASE),
                DriveParams('b', (0, 2), qb.omega02, rabi_tilde, SECOND_PULSE_PHASE))
    drives_4, t4 = raman(qb)
    steps = (Step(1, drives_1, t1, 0.0, "qubit a Raman: resonator and 1-2 drive detuned by delta_c^a"),
             Step(2, drives_2, t_pulse, t1, "resonant pulses: qubit a 0-2, qubit b 1-2"),
             Step(3, drives_3, t_pulse, t1 + t_pulse, "resonant pulses: qubit a 1-2, qubit b 0-2"),
             Step(4, drives_4, t4, t1 + 2 * t_pulse, "qubit b Raman: resonator and 1-2 drive detuned by delta_c^b"))
    return Schedule(steps, (qa, qb), resonator, float(rabi_tilde))


# ---------------------------------------------------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------------------------------------------------


def _initial_block(config: SpaceConfig) -> np.ndarray:
    block = np.zeros((config.dimension, 2), dtype=complex)
    for column, label in enumerate(INPUT_LABELS):
        block[basis_index(label, config), column] = 1
    return block


def _closed_form_step(tensor, step: Step, schedule: Schedule, t: float,
                      phase_shifts: Optional[Sequence[PhaseShift]]) -> np.ndarray:
    for drive in step.drives:
        q = schedule.qubit(drive.target_qubit)
        if step.index in (1, 4):
            tensor = apply_raman(tensor, q.label, q.g, schedule.delta_c(q.label), t, drive.phase, drive.rabi)
        else:
            shifts = None if phase_shifts is None else level_shifts(phase_shifts, step.index, q.label)
            tensor = apply_pulse(tensor, q.label, drive.transition, drive.rabi, drive.phase, t, shifts)
    return tensor


def _closed_form_trace(schedule: Schedule, cfg: IntegratorConfig, config: SpaceConfig, dispersive: bool):
    block = _initial_block(config)
    phase_shifts = phase_shift_model(schedule) if dispersive else None
    states, samples = [block], []
    for step in schedule.steps:
        start = [block[:, c].reshape(config.shape) for c in range(2)]
        times = np.linspace(0.0, step.duration, max(2, cfg.trace_samples))
        step_samples = np.array([np.stack([_closed_form_step(s, step, schedule, t, phase_shifts).reshape(-1)
                                           for s in start], axis=1) for t in times])
        block = step_samples[-1]
        states.append(block)
        samples.append(step_samples)
    return EngineTrace(np.array(states), tuple(samples), 0.0)


def _step_hamiltonian(step: Step, schedule: Schedule, config: SpaceConfig):
    if step.index in (1, 4):
        drive = step.drives[0]
        return effective_raman_hamiltonian(schedule.qubit(drive.target_qubit), schedule.resonator, drive, config)
    hamiltonian = resonant_drive_hamiltonian(step.drives[0], config)
    for drive in step.drives[1:]:
        hamiltonian = hamiltonian + resonant_drive_hamiltonian(drive, config)
    return hamiltonian


def _effective_trace(schedule: Schedule, cfg: IntegratorConfig, config: SpaceConfig):
    block = _initial_block(config)
    states, samples, drift = [block], [], 0.0
    for step in schedule.steps:
        times = np.linspace(0.0, step.duration, max(2, cfg.trace_samples))
        trajectory = propagate_constant_columns(block, _step_hamiltonian(step, schedule, config), times,
                                                cfg.norm_tolerance)
        block = trajectory.final
        states.append(block)
        samples.append(trajectory.samples)
        drift = max(drift, float(np.max(np.abs(np.linalg.norm(block, axis=0) - 1))))
    return EngineTrace(np.array(states), tuple(samples), drift)


def _full_trace(schedule: Schedule, cfg: IntegratorConfig, config: SpaceConfig):
    block = _initial_block(config)
    states, samples = [block], []
    for step in schedule.steps:
        logger.debug("Full engine: step %d from t=%.4e s for %.4e s", step.index, step.start, step.duration)
        hamiltonian = InteractionHamiltonian(schedule.qubits, schedule.resonator, step.drives, config)
        trajectory = propagate_columns(block, hamiltonian, step.start, step.duration, cfg)
        block = trajectory.final
        states.append(block)
        samples.append(trajectory.samples)
    drift = float(np.max(np.abs(np.linalg.norm(block, axis=0) - 1)))
    if drift > cfg.norm_tolerance:
        raise IntegrationAccuracyError(drift, cfg.norm_tolerance)
    return EngineTrace(np.array(states), tuple(samples), drift)


_full_trace_cached = disk_cache(_full_trace)


def engine_trace(schedule: Schedule, engine: str = 'analytic', cfg: IntegratorConfig = IntegratorConfig(),
                 config: SpaceConfig = SpaceConfig()) -> EngineTrace:
    """Propagates both basis inputs through all four steps with the chosen engine."""
    if engine not in ENGINES:
        raise ValueError("Unknown engine '{}', valid engines are {}".format(engine, ENGINES))
    logger.debug("Running %s engine, fock cutoff %d", engine, config.fock_cutoff)
    if engine in ('analytic', 'dispersive'):
        return _closed_form_trace(schedule, cfg, config, dispersive=engine == 'dispersive')
    if engine == 'effective':
        return _effective_trace(schedule, cfg, config)
    return _full_trace_cached(schedule, cfg, config)


# ---------------------------------------------------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------------------------------------------------


def _qubit_level_population(columns: np.ndarray, config: SpaceConfig, axis: int, level: int) -> np.ndarray:
    tensors = np.abs(columns.reshape((-1,) + config.shape)) ** 2
    return np.sum(np.take(tensors, level, axis=axis + 1), axis=(1, 2))


def run_transfer(alpha: complex, beta: complex, schedule: Schedule, engine: str = 'analytic',
                 cfg: IntegratorConfig = IntegratorConfig(), config: SpaceConfig = SpaceConfig()) -> TransferReport:
    """Transfers α|0⟩_a + β|1⟩_a (qubit b in |1⟩, resonator empty) and compares with |1⟩_a(α|0⟩_b + β|1⟩_b)|0⟩_c.

    Examples:
        >>> g = 3.0e9
        >>> qa = QubitParams(4e10 + 10 * g, 5e10, g, 'a')
        >>> qb = QubitParams(4e10 + 10 * g, 5.5e10, g, 'b')
        >>> schedule = build_schedule(qa, qb, ResonatorParams(4e10), 10 * g)
        >>> report = run_transfer(0, 1, schedule)
        >>> report.fidelity_vs_ideal, abs(report.final_state.amplitude((1, 1, 0)) - 1)
        (1.0, 0.0)
    """
    alpha, beta = complex(alpha), complex(beta)
    _check_normalized(alpha, beta)
    trace = engine_trace(schedule, engine, cfg, config)
    weights = np.array([alpha, beta])
    step_trace = tuple(StateVector(block @ weights, config) for block in trace.step_states)
    final = step_trace[-1]

    ideal = np.zeros(config.dimension, dtype=complex)
    ideal[basis_index(IDEAL_OUTPUT_LABELS[0], config)] = alpha
    ideal[basis_index(IDEAL_OUTPUT_LABELS[1], config)] = beta
    fidelity_value = min(1.0, abs(np.vdot(ideal, final.amplitudes)) ** 2)

    leakage = []
    for step, samples in zip(schedule.steps, trace.samples):
        combined = samples @ weights
        leakage.append(LeakageRecord(step.index,
                                     float(np.max(_qubit_level_population(combined, config, 0, 2))),
                                     float(np.max(_qubit_level_population(combined, config, 1, 2)))))
    return TransferReport(engine, alpha, beta, final, step_trace, float(fidelity_value), tuple(leakage),
                          photon_number(final), trace.norm_drift)


def _global_phase(state: np.ndarray, ideal: np.ndarray) -> float:
    overlap = np.vdot(ideal, state)
    return float(np.angle(overlap)) if abs(overlap) > 0 else 0.0


def verify_truth_table(schedule: Schedule, engine: str = 'analytic', cfg: IntegratorConfig = IntegratorConfig(),
                       config: SpaceConfig = SpaceConfig()) -> TruthTable:
    """Compares the state after each step with the ideal basis states of the transfer table.

    For every step one global phase γ = arg⟨ideal|ψ⟩ is removed before taking the largest amplitude deviation;
    the deviation without that correction is reported as ``raw_deviation``.
    """
    trace = engine_trace(schedule, engine, cfg, config)
    entries = []
    for row, expected_labels in enumerate(EXPECTED_STATES):
        for step, label in enumerate(expected_labels):
            state = trace.step_states[step][:, row]
            ideal = np.zeros(config.dimension, dtype=complex)
            ideal[basis_index(label, config)] = 1
            gamma = _global_phase(state, ideal)
            raw = float(np.max(np.abs(state - ideal)))
            deviation = float(np.max(np.abs(state - np.exp(1j * gamma) * ideal))) if gamma else raw
            logger.info("%s engine, input row %d, step %d: global phase %.12g rad", engine, row, step, gamma)
            entries.append(TruthTableEntry(row, step, label, StateVector(state, config), gamma, raw, deviation))
    return TruthTable(engine, tuple(entries))


def transfer_matrix(schedule: Schedule, engine: str = 'analytic', cfg: IntegratorConfig = IntegratorConfig(),
                    config: SpaceConfig = SpaceConfig()) -> np.ndarray:
    """T_kl = ⟨ideal_k|ψ_l(τ)⟩ for basis input l; the fidelity of input v = (α, β) is |v†Tv|²."""
    final = engine_trace(schedule, engine, cfg, config).step_states[-1]
    rows = [basis_index(label, config) for label in IDEAL_OUTPUT_LABELS]
    return final[rows, :].copy()


def haar_random_inputs(n: int, seed: int = 0) -> Sequence[Tuple[complex, complex]]:
    """``n`` input states α|0⟩ + β|1⟩ drawn uniformly from the Bloch sphere."""
    angles = sample_bloch_angles(n, np.random.default_rng(seed))
    return [(complex(math.cos(theta / 2)), complex(np.exp(1j * phi) * math.sin(theta / 2)))
            for theta, phi in zip(angles.theta, angles.phi)]


def transfer_fidelities(schedule: Schedule, inputs: Sequence[Tuple[complex, complex]], engine: str = 'analytic',
                        cfg: IntegratorConfig = IntegratorConfig(), config: SpaceConfig = SpaceConfig()) -> np.ndarray:
    """Fidelities of several inputs from a single propagation of the basis states."""
    transfer = transfer_matrix(schedule, engine, cfg, config)
    alpha, beta = np.array(inputs, dtype=complex).T
    return overlap_fidelities(transfer, alpha, beta)
