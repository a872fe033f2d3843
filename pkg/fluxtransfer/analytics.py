"""Closed-form evolution maps, leakage and fidelity formulas, and a Monte-Carlo average-fidelity estimate.

Every two-level map in this module is the exact propagator of a constant 2×2 Hamiltonian, evaluated by
`two_level_propagator`. Angles that are (within 1e-12) a rational multiple of π with a small denominator
are evaluated exactly through sympy, so ideal pulses produce exact zeros and ones.

Amplitude tensors passed to `apply_raman` and `apply_pulse` are indexed ``[i, j, n]``: level of qubit a,
level of qubit b, photon number.
"""
import cmath
import math
import warnings
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from joblib import Parallel, delayed

from fluxtransfer.cache import memorycache

MAX_PI_DENOMINATOR = 64
ANGLE_SNAP_TOLERANCE = 1e-12
NORMALIZATION_TOLERANCE = 1e-12
MIN_MC_SAMPLES = 1000
DISCREPANCY_SIGMAS = 3.0


class DomainError(ValueError):
    pass


class NormalizationError(ValueError):
    pass


class FidelityDiscrepancyWarning(UserWarning):
    """Monte-Carlo average fidelity differs from a printed closed form by more than three standard errors."""


class RamanAmplitudes(NamedTuple):
    """Coefficients of |0⟩|1⟩_c and |1⟩|0⟩_c of the Raman-addressed qubit."""
    c01: complex
    c10: complex


class FidelityParams(NamedTuple):
    """Dispersive rates s = 2g²/Δ_c of both qubits and the resonant Rabi frequency Ω̃ (all rad/s)."""
    s_a: float
    s_b: float
    rabi_tilde: float


class BlochAngles(NamedTuple):
    theta: np.ndarray
    phi: np.ndarray


class MonteCarloEstimate(NamedTuple):
    value: float
    stderr: float
    n_samples: int


class PhaseShift(NamedTuple):
    """Phase factor exp(i·argument) picked up by ``level`` of ``qubit`` during ``step`` when one photon is present."""
    step: int
    qubit: str
    level: int
    argument: float
    duration: float

    @property
    def shift(self) -> float:
        """Level shift δ with argument = -δ·duration."""
        return -self.argument / self.duration

    @property
    def factor(self) -> complex:
        return cmath.exp(1j * self.argument)


class ConsistencyReport(NamedTuple):
    params: FidelityParams
    mc: MonteCarloEstimate
    f_bar: float
    f_bar_linear: float
    f_bar_squared: float
    f_bar_flagged: bool
    linear_flagged: bool
    squared_flagged: bool

    def to_dict(self):
        return {
            'rabi_over_s': self.params.rabi_tilde / self.params.s_a if self.params.s_a else math.inf,
            'n_samples': self.mc.n_samples,
            'F_bar_mc': self.mc.value,
            'mc_stderr': self.mc.stderr,
            'F_bar_eq12': self.f_bar,
            'F_bar_linear': self.f_bar_linear,
            'F_bar_squared': self.f_bar_squared,
            'eq12_flagged': self.f_bar_flagged,
            'linear_flagged': self.linear_flagged,
            'squared_flagged': self.squared_flagged,
        }


# ---------------------------------------------------------------------------------------------------------------------
# Exact trigonometry
# ---------------------------------------------------------------------------------------------------------------------


@memorycache(maxsize=1024)
def _pi_fraction_cos_sin(numerator: int, denominator: int) -> Tuple[float, float]:
    angle = sp.pi * sp.Rational(numerator, denominator)
    return float(sp.cos(angle)), float(sp.sin(angle))


def exact_cos_sin(angle: float) -> Tuple[float, float]:
    """cos and sin of ``angle``; exact for angles within 1e-12 of a small rational multiple of π.

    >>> exact_cos_sin(math.pi / 2)
    (0.0, 1.0)
    >>> exact_cos_sin(-math.pi)
    (-1.0, 0.0)
    """
    ratio = Fraction(angle / math.pi).limit_denominator(MAX_PI_DENOMINATOR)
    if abs(float(ratio) * math.pi - angle) <= ANGLE_SNAP_TOLERANCE * max(1.0, abs(angle)):
        return _pi_fraction_cos_sin(ratio.numerator, ratio.denominator)
    return math.cos(angle), math.sin(angle)


def exact_cis(angle: float) -> complex:
    """e^{i·angle} with the exactness of `exact_cos_sin`.

    >>> exact_cis(math.pi / 2)
    1j
    """
    cos, sin = exact_cos_sin(angle)
    return complex(cos, sin)


def two_level_propagator(energy_i: float, energy_j: float, coupling: complex, t: float) -> np.ndarray:
    """exp(-iHt) for H = [[energy_i, coupling], [conj(coupling), energy_j]] in the basis (|i⟩, |j⟩).

    >>> u = two_level_propagator(0.0, 0.0, 1.0, math.pi / 2)
    >>> bool(u[1, 0] == -1j)
    True
    """
    coupling = complex(coupling)
    mean = 0.5 * (energy_i + energy_j)
    half_split = 0.5 * (energy_i - energy_j)
    frequency = math.hypot(abs(coupling), half_split)
    phase = exact_cis(-mean * t)
    if frequency == 0:
        return phase * np.eye(2, dtype=complex)
    cos, sin = exact_cos_sin(frequency * t)
    unit = coupling / frequency
    split = half_split / frequency
    return phase * np.array([[cos - 1j * sin * split, -1j * sin * unit],
                             [-1j * sin * unit.conjugate(), cos + 1j * sin * split]], dtype=complex)


# ---------------------------------------------------------------------------------------------------------------------
# Raman transfer (adiabatically eliminated |2⟩)
# ---------------------------------------------------------------------------------------------------------------------


def raman_matrix(g: float, delta_c: float, t: float, phase: float = math.pi, photons: int = 0,
                 rabi: Optional[float] = None) -> np.ndarray:
    """Propagator of the eliminated-level Hamiltonian on the pair (|0⟩|n+1⟩_c, |1⟩|n⟩_c), n = ``photons``.

    For n = 0, Ω = g and phase π this is e^{iθ}[[cos θ, -i sin θ], [-i sin θ, cos θ]] with θ = g²t/Δ_c.
    """
    if not delta_c > 0:
        raise DomainError("Raman detuning must be positive, got {}".format(delta_c))
    rabi = g if rabi is None else rabi
    root = math.sqrt(photons + 1)
    return two_level_propagator(-(photons + 1) * g ** 2 / delta_c, -rabi ** 2 / delta_c,
                                -root * rabi * g / delta_c * exact_cis(-phase), t)


def raman_evolution(amplitudes: RamanAmplitudes, g: float, delta_c: float, t: float) -> RamanAmplitudes:
    """Evolves the (|0⟩|1⟩_c, |1⟩|0⟩_c) pair of a Raman-addressed qubit; |0⟩|0⟩_c is left unchanged.

    Examples:
        >>> out = raman_evolution(RamanAmplitudes(0, 1), g=1.0, delta_c=10.0, t=5 * math.pi)
        >>> abs(out.c01 - 1), abs(out.c10)
        (0.0, 0.0)
    """
    c01, c10 = raman_matrix(g, delta_c, t) @ np.array([amplitudes.c01, amplitudes.c10], dtype=complex)
    return RamanAmplitudes(complex(c01), complex(c10))


def _qubit_axis(qubit: str) -> int:
    if qubit not in ('a', 'b'):
        raise DomainError("Qubit must be 'a' or 'b', got {!r}".format(qubit))
    return 0 if qubit == 'a' else 1


def apply_raman(tensor: np.ndarray, qubit: str, g: float, delta_c: float, t: float, phase: float = math.pi,
                rabi: Optional[float] = None) -> np.ndarray:
    """Applies the eliminated-level Raman propagator of ``qubit`` to an amplitude tensor.

    Pairs (|0⟩|n+1⟩_c, |1⟩|n⟩_c) rotate with `raman_matrix`; |1⟩|N⟩_c only acquires its Stark phase;
    |0⟩|0⟩_c and every |2⟩ component are unchanged.
    """
    rabi = g if rabi is None else rabi
    moved = np.moveaxis(np.array(tensor, dtype=complex), _qubit_axis(qubit), 0)
    cutoff = moved.shape[-1] - 1
    result = moved.copy()
    for n in range(cutoff):
        block = raman_matrix(g, delta_c, t, phase, photons=n, rabi=rabi)
        pair = np.stack([moved[0, ..., n + 1], moved[1, ..., n]])
        rotated = np.tensordot(block, pair, axes=1)
        result[0, ..., n + 1] = rotated[0]
        result[1, ..., n] = rotated[1]
    result[1, ..., cutoff] = exact_cis(rabi ** 2 / delta_c * t) * moved[1, ..., cutoff]
    return np.moveaxis(result, 0, _qubit_axis(qubit))


# ---------------------------------------------------------------------------------------------------------------------
# Resonant pulses
# ---------------------------------------------------------------------------------------------------------------------


def rabi_matrix(rabi: float, phase: float, t: float, shift_i: float = 0.0, shift_j: float = 0.0) -> np.ndarray:
    """Propagator of Ω̃(e^{iφ}|i⟩⟨j| + h.c.) + δ_i|i⟩⟨i| + δ_j|j⟩⟨j| on (|i⟩, |j⟩).

    Without shifts: |i⟩ → cos(Ω̃t)|i⟩ - i e^{-iφ} sin(Ω̃t)|j⟩ and |j⟩ → -i e^{iφ} sin(Ω̃t)|i⟩ + cos(Ω̃t)|j⟩.
    """
    return two_level_propagator(shift_i, shift_j, rabi * exact_cis(phase), t)


def rabi_rotation(amp_i: complex, amp_j: complex, rabi_tilde: float, phase: float, t: float) -> Tuple[complex, complex]:
    """Resonant two-level rotation with angle Ω̃t and phase φ.

    Examples:
        >>> new_i, new_j = rabi_rotation(1, 0, 1.0, -math.pi / 2, math.pi / 2)
        >>> abs(new_i), new_j == 1
        (0.0, True)
        >>> new_i, new_j = rabi_rotation(0, 1, 1.0, math.pi / 2, math.pi / 2)
        >>> new_i == 1, abs(new_j)
        (True, 0.0)
    """
    new_i, new_j = rabi_matrix(rabi_tilde, phase, t) @ np.array([amp_i, amp_j], dtype=complex)
    return complex(new_i), complex(new_j)


def pulse_matrix(transition: Sequence[int], rabi: float, phase: float, t: float,
                 shifts: Sequence[float] = (0.0, 0.0, 0.0)) -> np.ndarray:
    """3×3 propagator of a resonant pulse on ``transition`` with optional level shifts δ_0, δ_1, δ_2."""
    i, j = transition
    spectator = 3 - i - j
    result = np.zeros((3, 3), dtype=complex)
    result[np.ix_([i, j], [i, j])] = rabi_matrix(rabi, phase, t, shifts[i], shifts[j])
    result[spectator, spectator] = exact_cis(-shifts[spectator] * t)
    return result


def apply_pulse(tensor: np.ndarray, qubit: str, transition: Sequence[int], rabi: float, phase: float, t: float,
                photon_shifts: Optional[Sequence[float]] = None) -> np.ndarray:
    """Applies a resonant pulse on ``qubit``; ``photon_shifts`` are level shifts used in the one-photon sector."""
    axis = _qubit_axis(qubit)
    moved = np.moveaxis(np.array(tensor, dtype=complex), axis, 0)
    result = np.tensordot(pulse_matrix(transition, rabi, phase, t), moved, axes=1)
    if photon_shifts is not None and moved.shape[-1] > 1:
        shifted = pulse_matrix(transition, rabi, phase, t, photon_shifts)
        result[..., 1] = np.tensordot(shifted, moved[..., 1], axes=1)
    return np.moveaxis(result, 0, axis)


def dispersive_shifts(g: float, delta_c: float) -> Tuple[float, float, float]:
    """Shifts of (|0⟩, |1⟩, |2⟩) from the off-resonant resonator coupling when one photon is present.

    >>> dispersive_shifts(1.0, 10.0)
    (-0.1, 0.0, 0.1)
    """
    if not delta_c > 0:
        raise DomainError("Resonator detuning must be positive, got {}".format(delta_c))
    chi = g ** 2 / delta_c
    return -chi, 0.0, chi


def phase_shift_model(schedule) -> Tuple[PhaseShift, ...]:
    """Phase factors of the one-photon branch during the resonant steps (ii) and (iii).

    One record per driven qubit and shifted level, with δ from `dispersive_shifts`; the factor over the whole
    step is exp(-iδt).

    >>> from fluxtransfer.model import QubitParams, ResonatorParams
    >>> from fluxtransfer.protocol import build_schedule
    >>> qa, qb = QubitParams(7e10, 5e10, 3e9, 'a'), QubitParams(7e10, 5.5e10, 3e9, 'b')
    >>> records = phase_shift_model(build_schedule(qa, qb, ResonatorParams(4e10), 3e10))
    >>> [(r.step, r.qubit, r.level) for r in records]
    [(2, 'a', 0), (2, 'a', 2), (2, 'b', 0), (2, 'b', 2), (3, 'a', 0), (3, 'a', 2), (3, 'b', 0), (3, 'b', 2)]
    >>> round(max(abs(r.argument) for r in records), 12) == round(math.pi / 200, 12)
    True
    """
    records = []
    for step in schedule.steps[1:3]:
        for drive in step.drives:
            qubit = schedule.qubit(drive.target_qubit)
            shifts = dispersive_shifts(qubit.g, schedule.delta_c(qubit.label))
            records.extend(PhaseShift(step.index, qubit.label, level, -shift * step.duration, step.duration)
                           for level, shift in enumerate(shifts) if shift)
    return tuple(records)


def level_shifts(records: Sequence[PhaseShift], step: int, qubit: str) -> Tuple[float, float, float]:
    """Level shifts (δ_0, δ_1, δ_2) of ``qubit`` during ``step`` recovered from `phase_shift_model` records."""
    shifts = [0.0, 0.0, 0.0]
    for record in records:
        if record.step == step and record.qubit == qubit:
            shifts[record.level] = record.shift
    return tuple(shifts)



# ---------------------------------------------------------------------------------------------------------------------
# Leakage, timing and fidelity formulas
# ---------------------------------------------------------------------------------------------------------------------


def occupation_p2(omega_rabi: float, delta_uw: float, g: float, delta_c: float) -> float:
    """Upper estimate of the |2⟩ population during a Raman step.

    >>> round(occupation_p2(1.0, 10.0, 1.0, 10.0), 12) == round(1 / 26, 12)
    True
    """
    if not (delta_uw > 0 and delta_c > 0):
        raise DomainError("Detunings must be positive, got delta_uw={} delta_c={}".format(delta_uw, delta_c))
    return 0.5 * (4 * omega_rabi ** 2 / (4 * omega_rabi ** 2 + delta_uw ** 2) + 4 * g ** 2 / (4 * g ** 2 + delta_c ** 2))


def fidelity_params(g_a: float, delta_a: float, g_b: float, delta_b: float, rabi_tilde: float) -> FidelityParams:
    if not (delta_a > 0 and delta_b > 0):
        raise DomainError("Detunings must be positive, got {} and {}".format(delta_a, delta_b))
    return FidelityParams(2 * g_a ** 2 / delta_a, 2 * g_b ** 2 / delta_b, rabi_tilde)


def _check_fidelity_params(params: FidelityParams):
    if min(params) < 0:
        raise DomainError("Fidelity parameters must be non-negative, got {}".format(params))
    if not params.rabi_tilde > 0:
        raise DomainError("Rabi frequency must be positive, got {}".format(params.rabi_tilde))


def pq_factors(params: FidelityParams) -> Tuple[float, float]:
    """Amplitude factors p (qubit a) and q (qubit b) of the incomplete resonant transfers.

    Examples:
        >>> pq_factors(FidelityParams(0.0, 0.0, 1.0))
        (1.0, 1.0)
        >>> p, q = pq_factors(FidelityParams(1.0, 1.0, 1.0))
        >>> round(p, 4)
        0.8791
    """
    _check_fidelity_params(params)

    def factor(s):
        root = math.sqrt(params.rabi_tilde ** 2 + s ** 2 / 4)
        return params.rabi_tilde / root * exact_cos_sin(math.pi * root / (2 * params.rabi_tilde))[1]

    return factor(params.s_a), factor(params.s_b)


def _check_normalized(alpha, beta):
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1) > NORMALIZATION_TOLERANCE:
        raise NormalizationError("Input state is not normalized: |alpha|^2 + |beta|^2 = {!r}".format(norm))


def fidelity(alpha: complex, beta: complex, p: float, q: float) -> float:
    """Transfer fidelity |α|² + pq|β|² as a closed form.

    >>> fidelity(0, 1, 0.9, 0.8)
    0.7200000000000001
    """
    _check_normalized(alpha, beta)
    return abs(alpha) ** 2 + p * q * abs(beta) ** 2


def average_fidelity(p: float, q: float) -> float:
    """Average fidelity over the Bloch sphere, (1 + p²q² + p⁴q⁴)/3.

    >>> average_fidelity(1, 1), average_fidelity(0, 0)
    (1.0, 0.3333333333333333)
    """
    pq2 = (p * q) ** 2
    return (1 + pq2 + pq2 ** 2) / 3


def average_fidelity_linear(p: float, q: float) -> float:
    """Sphere average of |α|² + pq|β|², which is (1 + pq)/2."""
    return (1 + p * q) / 2


def average_fidelity_squared(p: float, q: float) -> float:
    """Sphere average of (|α|² + pq|β|²)², which is (1 + pq + p²q²)/3."""
    pq = p * q
    return (1 + pq + pq ** 2) / 3


def sphere_average(expr: sp.Expr, alpha_sq: sp.Symbol, beta_sq: sp.Symbol) -> sp.Expr:
    """Uniform Bloch-sphere average of an expression in |α|² and |β|².

    With u = cos ϑ one has |α|² = (1+u)/2, |β|² = (1-u)/2 and the uniform measure is du/2 on [-1, 1].

    Examples:
        >>> a2, b2, pq = sp.symbols('a2 b2 pq')
        >>> sp.factor(sphere_average(a2 + pq * b2, a2, b2))
        (pq + 1)/2
    """
    u = sp.Symbol('u', real=True)
    integrand = sp.sympify(expr).subs({alpha_sq: (1 + u) / 2, beta_sq: (1 - u) / 2}, simultaneous=True)
    return sp.simplify(sp.integrate(integrand, (u, -1, 1)) / 2)


def total_time(qa, qb, resonator, rabi_tilde: float) -> float:
    """Duration of the complete transfer: two Raman steps plus two resonant π/2 pulses.

    >>> from fluxtransfer.model import QubitParams, ResonatorParams
    >>> g = 3.0e9
    >>> qa, qb = QubitParams(4e10 + 10 * g, 5e10, g, 'a'), QubitParams(4e10 + 10 * g, 5.5e10, g, 'b')
    >>> '{:.4g}'.format(total_time(qa, qb, ResonatorParams(4e10), 10 * g))
    '1.058e-08'
    """
    delta_a = qa.omega02 - resonator.omega_c
    delta_b = qb.omega02 - resonator.omega_c
    if not (delta_a > 0 and delta_b > 0):
        raise DomainError("Resonator detunings must be positive, got {} and {}".format(delta_a, delta_b))
    if not (qa.g > 0 and qb.g > 0):
        raise DomainError("Couplings must be positive, got {} and {}".format(qa.g, qb.g))
    if not rabi_tilde > 0:
        raise DomainError("Rabi frequency must be positive, got {}".format(rabi_tilde))
    return math.pi * delta_a / (2 * qa.g ** 2) + math.pi * delta_b / (2 * qb.g ** 2) + math.pi / rabi_tilde


# ---------------------------------------------------------------------------------------------------------------------
# Monte-Carlo average fidelity
# ---------------------------------------------------------------------------------------------------------------------


def dispersive_overlap_matrix(params: FidelityParams) -> np.ndarray:
    """2×2 matrix T_kl = ⟨ideal_k|ψ_l(τ)⟩ of the closed-form protocol with one-photon phase shifts.

    Column l is the evolution of |l⟩_a|1⟩_b|0⟩_c, row k is the ideal output |1⟩_a|k⟩_b|0⟩_c.
    Only the shifts set by ``params`` enter; the Raman steps are ideal.
    """
    _check_fidelity_params(params)
    shifts_a = (-params.s_a / 2, 0.0, params.s_a / 2)
    shifts_b = (-params.s_b / 2, 0.0, params.s_b / 2)
    t_pulse = math.pi / (2 * params.rabi_tilde)
    columns = []
    for level in (0, 1):
        tensor = np.zeros((3, 3, 2), dtype=complex)
        tensor[level, 1, 0] = 1
        tensor = apply_raman(tensor, 'a', 1.0, 1.0, math.pi / 2)
        tensor = apply_pulse(tensor, 'a', (0, 2), params.rabi_tilde, -math.pi / 2, t_pulse, shifts_a)
        tensor = apply_pulse(tensor, 'b', (1, 2), params.rabi_tilde, -math.pi / 2, t_pulse, shifts_b)
        tensor = apply_pulse(tensor, 'a', (1, 2), params.rabi_tilde, math.pi / 2, t_pulse, shifts_a)
        tensor = apply_pulse(tensor, 'b', (0, 2), params.rabi_tilde, math.pi / 2, t_pulse, shifts_b)
        tensor = apply_raman(tensor, 'b', 1.0, 1.0, math.pi / 2)
        columns.append([tensor[1, 0, 0], tensor[1, 1, 0]])
    return np.array(columns, dtype=complex).T


def sample_bloch_angles(n: int, rng: np.random.Generator) -> BlochAngles:
    """Uniform samples on the Bloch sphere: ϑ = arccos(1 - 2u), φ = 2πv."""
    u = rng.random(n)
    v = rng.random(n)
    return BlochAngles(np.arccos(1 - 2 * u), 2 * np.pi * v)


def overlap_fidelities(transfer: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """|v†Tv|² for input amplitude arrays v = (α, β)."""
    alpha, beta = np.asarray(alpha), np.asarray(beta)
    overlap = np.abs(alpha) ** 2 * transfer[0, 0] + np.abs(beta) ** 2 * transfer[1, 1] \
        + np.conj(alpha) * beta * transfer[0, 1] + np.conj(beta) * alpha * transfer[1, 0]
    return np.abs(overlap) ** 2


def _mc_batch(transfer: np.ndarray, size: int, seed_sequence: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed_sequence)
    u = rng.random(size)
    v = rng.random(size)
    # |α|² = cos²(ϑ/2) = 1 - u for ϑ = arccos(1 - 2u)
    a_sq, b_sq = 1 - u, u
    cross = np.sqrt(a_sq * b_sq)
    phase = np.exp(2j * np.pi * v)
    # written so that T = 1 gives exactly 1
    overlap = transfer[0, 0] + b_sq * (transfer[1, 1] - transfer[0, 0]) \
        + cross * (phase * transfer[0, 1] + phase.conjugate() * transfer[1, 0])
    return np.abs(overlap) ** 2


def average_fidelity_mc(params: FidelityParams, n_samples: int = 100000, seed: int = 0, batch_size: int = 10000,
                        n_jobs: int = 1) -> MonteCarloEstimate:
    """Bloch-sphere average of |⟨ψ_id|ψ(τ)⟩|² by uniform sampling.

    Samples are drawn in batches of ``batch_size``; batch k always uses child k of ``SeedSequence(seed)``,
    so the estimate does not depend on ``n_jobs``.
    """
    if n_samples < MIN_MC_SAMPLES:
        raise DomainError("At least {} samples are required, got {}".format(MIN_MC_SAMPLES, n_samples))
    if batch_size < 1:
        raise DomainError("Batch size must be positive, got {}".format(batch_size))
    transfer = dispersive_overlap_matrix(params)
    sizes = [batch_size] * (n_samples // batch_size)
    if n_samples % batch_size:
        sizes.append(n_samples % batch_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    batches = Parallel(n_jobs=n_jobs)(delayed(_mc_batch)(transfer, size, child)
                                      for size, child in zip(sizes, children))
    values = np.concatenate(batches)
    return MonteCarloEstimate(float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(n_samples)),
                              int(n_samples))


def consistency_report(params: FidelityParams, n_samples: int = 100000, seed: int = 0, batch_size: int = 10000,
                       n_jobs: int = 1) -> ConsistencyReport:
    """Compares the Monte-Carlo estimate with the closed-form averages; flags but never raises on mismatch."""
    mc = average_fidelity_mc(params, n_samples, seed, batch_size, n_jobs)
    p, q = pq_factors(params)
    f_bar, linear, squared = average_fidelity(p, q), average_fidelity_linear(p, q), average_fidelity_squared(p, q)

    def flagged(value):
        return bool(abs(mc.value - value) > DISCREPANCY_SIGMAS * mc.stderr
                    and abs(mc.value - value) > NORMALIZATION_TOLERANCE)

    report = ConsistencyReport(params, mc, f_bar, linear, squared, flagged(f_bar), flagged(linear), flagged(squared))
    if report.f_bar_flagged:
        warnings.warn("Monte-Carlo average fidelity {:.6f} ± {:.1e} differs from (1 + p²q² + p⁴q⁴)/3 = {:.6f}".format(
            mc.value, mc.stderr, f_bar), FidelityDiscrepancyWarning)
    return report

