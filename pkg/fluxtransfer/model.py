"""Device parameters and interaction-picture Hamiltonians.

Conventions: ħ = 1, all frequencies are angular (rad/s). The interaction picture is taken with respect
to Σ_l E_l σ_ll of both qubits plus ω_c a⁺a, with the absolute protocol clock ``t``.

A microwave pulse of Rabi frequency Ω and phase φ on transition |i⟩↔|j⟩ (i the lower level) enters as::

    Ω e^{iφ} e^{-iΔt} |i⟩⟨j| + h.c.,        Δ = ω_ij - ω_μw

and the resonator couples to each qubit's |0⟩↔|2⟩ transition as g (a⁺|0⟩⟨2| e^{-iΔ_c t} + h.c.),
Δ_c = ω_02 - ω_c.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Tuple

import numpy as np

from fluxtransfer.hilbert import Operator, SpaceConfig, single_site_operator, sigma

VALID_TRANSITIONS = ((1, 2), (0, 2), (0, 1))
RAMAN_DETUNING_RTOL = 1e-9


class ParameterError(ValueError):
    pass


class DriveTargetError(ValueError):
    pass


class RamanConditionError(ValueError):
    pass


def _check_frequency(name, value, allow_zero=False):
    if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
        raise ParameterError("{} must be a finite number, got {!r}".format(name, value))
    if value < 0 or (value == 0 and not allow_zero):
        raise ParameterError("{} must be {}, got {}".format(name, "non-negative" if allow_zero else "positive",
                                                            value))


@dataclass(frozen=True)
class QubitParams:
    """Λ-type flux qubit: transition frequencies ω₀₂ > ω₁₂ and resonator coupling ``g`` of |0⟩↔|2⟩.

    ``g = 0`` describes a qubit that does not couple to the resonator.

    >>> QubitParams(omega02=7e10, omega12=5e10, g=3e9, label='a').omega01
    20000000000.0
    """
    omega02: float
    omega12: float
    g: float
    label: str

    def __post_init__(self):
        if self.label not in ('a', 'b'):
            raise ParameterError("Qubit label must be 'a' or 'b', got {!r}".format(self.label))
        _check_frequency('omega02', self.omega02)
        _check_frequency('omega12', self.omega12)
        _check_frequency('g', self.g, allow_zero=True)
        if not self.omega02 > self.omega12:
            raise ParameterError("Level 1 must lie between levels 0 and 2: omega02={} <= omega12={}".format(
                self.omega02, self.omega12))

    @property
    def omega01(self) -> float:
        return self.omega02 - self.omega12

    def transition_frequency(self, transition: Tuple[int, int]) -> float:
        return {(0, 2): self.omega02, (1, 2): self.omega12, (0, 1): self.omega01}[tuple(transition)]


@dataclass(frozen=True)
class ResonatorParams:
    omega_c: float

    def __post_init__(self):
        _check_frequency('omega_c', self.omega_c)


@dataclass(frozen=True)
class DriveParams:
    """Classical microwave pulse on ``transition`` of qubit ``target_qubit``; phase in (-π, π]."""
    target_qubit: str
    transition: Tuple[int, int]
    omega_uw: float
    rabi: float
    phase: float = 0.0

    def __post_init__(self):
        if self.target_qubit not in ('a', 'b'):
            raise ParameterError("Drive target must be 'a' or 'b', got {!r}".format(self.target_qubit))
        object.__setattr__(self, 'transition', tuple(self.transition))
        if self.transition not in VALID_TRANSITIONS:
            raise ParameterError("Transition must be one of {}, got {}".format(VALID_TRANSITIONS, self.transition))
        _check_frequency('omega_uw', self.omega_uw)
        _check_frequency('rabi', self.rabi, allow_zero=True)
        if not -math.pi < self.phase <= math.pi:
            raise ParameterError("Drive phase must lie in (-pi, pi], got {}".format(self.phase))


class Detunings(NamedTuple):
    delta_c: float
    delta_uw: float


def detunings(qubit: QubitParams, resonator: ResonatorParams, drive: DriveParams) -> Detunings:
    """Resonator detuning Δ_c = ω₀₂ - ω_c and drive detuning Δ_μw = ω_trans - ω_μw.

    >>> q = QubitParams(7e10, 5e10, 3e9, 'a')
    >>> detunings(q, ResonatorParams(4e10), DriveParams('a', (1, 2), 2e10, 3e9))
    Detunings(delta_c=30000000000.0, delta_uw=30000000000.0)
    """
    if drive.target_qubit != qubit.label:
        raise DriveTargetError("Drive addresses qubit '{}' but parameters of qubit '{}' were given".format(
            drive.target_qubit, qubit.label))
    return Detunings(qubit.omega02 - resonator.omega_c, qubit.transition_frequency(drive.transition) - drive.omega_uw)


class InteractionHamiltonian:
    """Time-dependent interaction-picture Hamiltonian of both qubits, the resonator and the given drives.

    Stored as ``H(t) = H0 + Σ_f (e^{-ift} A_f + e^{ift} A_f⁺)`` so evaluation is a handful of scaled additions.

    Args:
        qubits: parameters of qubit a and qubit b (any order)
        resonator: resonator parameters
        drives: active microwave pulses
        config: space truncation
        coupled: labels of qubits whose |0⟩↔|2⟩ transition couples to the resonator
    """

    def __init__(self, qubits: Sequence[QubitParams], resonator: ResonatorParams, drives: Iterable[DriveParams],
                 config: SpaceConfig, coupled: Sequence[str] = ('a', 'b')):
        self.config = config
        by_label = {q.label: q for q in qubits}
        create = single_site_operator('create', 'resonator', config).matrix
        static = np.zeros((config.dimension, config.dimension), dtype=complex)
        rotating = []

        def add(frequency, component):
            nonlocal static
            if frequency == 0:
                static = static + component + component.conj().T
            else:
                rotating.append((float(frequency), component, component.conj().T.copy()))

        for label in coupled:
            if label not in by_label:
                raise ParameterError("No parameters for coupled qubit '{}'".format(label))
            qubit = by_label[label]
            if qubit.g == 0:
                continue
            lowering = single_site_operator(sigma(0, 2), label, config).matrix
            add(qubit.omega02 - resonator.omega_c, qubit.g * (create @ lowering))

        for drive in drives:
            if drive.target_qubit not in by_label:
                raise DriveTargetError("No parameters for driven qubit '{}'".format(drive.target_qubit))
            if drive.rabi == 0:
                continue
            delta = by_label[drive.target_qubit].transition_frequency(drive.transition) - drive.omega_uw
            i, j = drive.transition
            transition = single_site_operator(sigma(i, j), drive.target_qubit, config).matrix
            add(delta, drive.rabi * cmath.exp(1j * drive.phase) * transition)

        static.flags.writeable = False
        self._static = static
        self._rotating = tuple(rotating)

    @property
    def max_frequency(self) -> float:
        """Largest rotating frequency |f| appearing in the Hamiltonian (0 if constant)."""
        return max((abs(f) for f, _, _ in self._rotating), default=0.0)

    @property
    def is_constant(self) -> bool:
        return not self._rotating

    @property
    def spectral_bound(self) -> float:
        """Upper bound of ‖H(t)‖₂ valid for all t."""
        return float(np.linalg.norm(self._static, 2) + sum(2 * np.linalg.norm(c, 2) for _, c, _ in self._rotating))

    def matrix_at(self, t: float) -> np.ndarray:
        result = self._static.copy()
        for frequency, component, component_dag in self._rotating:
            phase = cmath.exp(-1j * frequency * t)
            result += phase * component
            result += phase.conjugate() * component_dag
        return result

    def __call__(self, t: float) -> Operator:
        return Operator(self.matrix_at(t), hermitian=True, dims=self.config.shape)


def full_interaction_hamiltonian(t: float, qubits: Sequence[QubitParams], resonator: ResonatorParams,
                                 drives: Iterable[DriveParams], config: SpaceConfig,
                                 coupled: Sequence[str] = ('a', 'b')) -> Operator:
    """Evaluates the full interaction-picture Hamiltonian at time ``t``.

    >>> config = SpaceConfig(2)
    >>> qa, qb = QubitParams(7e10, 5e10, 0.0, 'a'), QubitParams(7e10, 5.5e10, 0.0, 'b')
    >>> h = full_interaction_hamiltonian(0.3e-9, [qa, qb], ResonatorParams(4e10), [], config)
    >>> bool((h.matrix == 0).all()), h.hermitian
    (True, True)
    """
    return InteractionHamiltonian(qubits, resonator, drives, config, coupled)(t)


def effective_raman_hamiltonian(qubit: QubitParams, resonator: ResonatorParams, drive: DriveParams,
                                config: SpaceConfig) -> Operator:
    """Constant Hamiltonian left after eliminating level |2⟩ under the two-photon resonance Δ_c = Δ_μw = Δ::

        -[(Ω²/Δ) σ₁₁ + (g²/Δ) a⁺a σ₀₀ + (Ωg/Δ)(e^{-iφ} a⁺|0⟩⟨1| + h.c.)]
    """
    if drive.transition != (1, 2):
        raise RamanConditionError("Raman pulse must drive the 1-2 transition, got {}".format(drive.transition))
    delta_c, delta_uw = detunings(qubit, resonator, drive)
    if delta_c == 0:
        raise RamanConditionError("Raman coupling requires a non-zero detuning")
    if abs(delta_c - delta_uw) > RAMAN_DETUNING_RTOL * max(abs(delta_c), abs(delta_uw)):
        raise RamanConditionError("Two-photon resonance violated: delta_c={} delta_uw={}".format(delta_c, delta_uw))
    label, rabi, g, delta = qubit.label, drive.rabi, qubit.g, delta_c

    def op(kind, slot=label):
        return single_site_operator(kind, slot, config).matrix

    n_photons = op('create', 'resonator') @ op('annihilate', 'resonator')
    flip_flop = cmath.exp(-1j * drive.phase) * (op('create', 'resonator') @ op(sigma(0, 1)))
    matrix = (rabi ** 2 / delta) * op(sigma(1, 1)) \
        + (g ** 2 / delta) * (n_photons @ op(sigma(0, 0))) \
        + (rabi * g / delta) * (flip_flop + flip_flop.conj().T)
    return Operator(-matrix, hermitian=True, dims=config.shape)


def resonant_drive_hamiltonian(drive: DriveParams, config: SpaceConfig) -> Operator:
    """Ω̃ (e^{iφ}|i⟩⟨j| + h.c.) on the addressed qubit for a pulse at exact resonance."""
    i, j = drive.transition
    transition = drive.rabi * cmath.exp(1j * drive.phase) * single_site_operator(
        sigma(i, j), drive.target_qubit, config).matrix
    return Operator(transition + transition.conj().T, hermitian=True, dims=config.shape)
