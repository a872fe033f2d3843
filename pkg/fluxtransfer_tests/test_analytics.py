import math
import warnings

import numpy as np
import pytest
import sympy as sp

from fluxtransfer.analytics import (
    DomainError, FidelityDiscrepancyWarning, FidelityParams, NormalizationError, RamanAmplitudes, apply_pulse,
    apply_raman, average_fidelity, average_fidelity_linear, average_fidelity_mc, average_fidelity_squared,
    consistency_report, dispersive_overlap_matrix, dispersive_shifts, exact_cos_sin, fidelity, fidelity_params,
    level_shifts, occupation_p2, overlap_fidelities, phase_shift_model, pq_factors, rabi_rotation, raman_evolution,
    raman_matrix, sample_bloch_angles, sphere_average, total_time)
from fluxtransfer.hilbert import SpaceConfig, StateVector
from fluxtransfer.model import DriveParams, QubitParams, ResonatorParams, effective_raman_hamiltonian
from fluxtransfer.propagator import evolve_constant
from fluxtransfer.protocol import build_schedule

G = 3.0e9


def test_exact_angles():
    assert exact_cos_sin(math.pi) == (-1.0, 0.0)
    assert exact_cos_sin(3 * math.pi / 2) == (0.0, -1.0)
    assert exact_cos_sin(50 * math.pi) == (1.0, 0.0)
    cos, sin = exact_cos_sin(0.3)
    assert cos == math.cos(0.3) and sin == math.sin(0.3)


def test_raman_transfer_is_complete():
    for ratio in (5.0, 10.0, 37.5):
        delta = ratio * G
        t1 = math.pi * delta / (2 * G ** 2)
        out = raman_evolution(RamanAmplitudes(0, 1), G, delta, t1)
        assert out.c01 == 1
        assert abs(out.c10) == 0

    # half way: equal weights
    delta = 10 * G
    out = raman_evolution(RamanAmplitudes(0, 1), G, delta, math.pi * delta / (4 * G ** 2))
    assert math.isclose(abs(out.c01) ** 2, 0.5)
    assert math.isclose(abs(out.c10) ** 2, 0.5)

    with pytest.raises(DomainError):
        raman_matrix(G, -delta, 1e-9)


def test_raman_map_matches_effective_hamiltonian():
    """Closed-form eliminated-level evolution against the matrix exponential of the same Hamiltonian."""
    config = SpaceConfig(2)
    rng = np.random.default_rng(7)
    omega_c = 1.0e11
    for _ in range(20):
        g = rng.uniform(1e9, 5e9)
        delta = rng.uniform(5, 50) * g
        qubit = QubitParams(omega_c + delta, omega_c + delta - 1e10, g, 'a')
        drive = DriveParams('a', (1, 2), qubit.omega12 - delta, g, math.pi)
        h = effective_raman_hamiltonian(qubit, ResonatorParams(omega_c), drive, config)
        t = rng.uniform(0, math.pi * delta / g ** 2)

        amplitudes = rng.normal(size=2) + 1j * rng.normal(size=2)
        amplitudes /= np.linalg.norm(amplitudes)
        tensor = np.zeros(config.shape, dtype=complex)
        tensor[0, 1, 1], tensor[1, 1, 0] = amplitudes
        propagated = evolve_constant(StateVector.from_tensor(tensor, config), h, t).tensor

        closed = raman_evolution(RamanAmplitudes(*amplitudes), g, delta, t)
        overlap = np.conj(closed.c01) * propagated[0, 1, 1] + np.conj(closed.c10) * propagated[1, 1, 0]
        assert 1 - abs(overlap) ** 2 <= 1e-9

        # all photon sectors at once
        full = rng.normal(size=config.shape) + 1j * rng.normal(size=config.shape)
        full /= np.linalg.norm(full)
        propagated = evolve_constant(StateVector.from_tensor(full, config), h, t).tensor
        assert np.allclose(apply_raman(full, 'a', g, delta, t), propagated, atol=1e-9)


def test_apply_raman_leaves_spectators_alone():
    config = SpaceConfig(2)
    tensor = np.zeros(config.shape, dtype=complex)
    tensor[0, 2, 0] = 0.6
    tensor[2, 1, 1] = 0.8j
    delta = 10 * G
    result = apply_raman(tensor, 'a', G, delta, 0.37 * math.pi * delta / G ** 2)
    assert result[0, 2, 0] == 0.6
    assert result[2, 1, 1] == 0.8j

    # qubit b in |1⟩ with an empty resonator moves the excitation into the resonator
    tensor = np.zeros(config.shape, dtype=complex)
    tensor[1, 1, 0] = 1
    result = apply_raman(tensor, 'b', G, delta, math.pi * delta / (2 * G ** 2))
    assert result[1, 0, 1] == 1
    with pytest.raises(DomainError):
        apply_raman(tensor, 'c', G, delta, 0.0)


def test_resonant_pulses():
    new_i, new_j = rabi_rotation(1, 0, 10 * G, -math.pi / 2, math.pi / (20 * G))
    assert new_i == 0 and new_j == 1
    new_i, new_j = rabi_rotation(0, 1, 10 * G, math.pi / 2, math.pi / (20 * G))
    assert new_i == 1 and new_j == 0

    # generic angle: unitary with the documented coefficients
    phase, angle = 0.4, 0.9
    new_i, new_j = rabi_rotation(1, 0, 1.0, phase, angle)
    assert np.isclose(new_i, math.cos(angle))
    assert np.isclose(new_j, -1j * np.exp(-1j * phase) * math.sin(angle))

    tensor = np.zeros((3, 3, 3), dtype=complex)
    tensor[0, 1, 1] = 1
    tensor = apply_pulse(tensor, 'a', (0, 2), 10 * G, -math.pi / 2, math.pi / (20 * G))
    tensor = apply_pulse(tensor, 'b', (1, 2), 10 * G, -math.pi / 2, math.pi / (20 * G))
    assert tensor[2, 2, 1] == 1


def test_dispersive_pulse_reduces_transfer():
    s = 1.0
    rabi = 1.0
    tensor = np.zeros((3, 3, 2), dtype=complex)
    tensor[0, 1, 1] = 1
    shifted = apply_pulse(tensor, 'a', (0, 2), rabi, -math.pi / 2, math.pi / (2 * rabi), (-s / 2, 0.0, s / 2))
    p, _ = pq_factors(FidelityParams(s, s, rabi))
    assert math.isclose(abs(shifted[2, 1, 1]), p, rel_tol=1e-12)
    # zero photon branch stays ideal
    tensor = np.zeros((3, 3, 2), dtype=complex)
    tensor[0, 1, 0] = 1
    shifted = apply_pulse(tensor, 'a', (0, 2), rabi, -math.pi / 2, math.pi / (2 * rabi), (-s / 2, 0.0, s / 2))
    assert shifted[2, 1, 0] == 1


def test_occupation_estimate():
    assert math.isclose(occupation_p2(1.0, 10.0, 1.0, 10.0), 1 / 26)
    assert math.isclose(occupation_p2(G, 10 * G, G, 10 * G), 1 / 26)
    assert occupation_p2(G, 20 * G, G, 20 * G) < 0.01
    with pytest.raises(DomainError):
        occupation_p2(G, 0.0, G, 10 * G)


def test_pq_factors_and_fidelity():
    p, q = pq_factors(FidelityParams(1.0, 1.0, 1.0))
    assert abs(p - 0.8791) < 5e-5
    assert p == q

    p_a, p_b = pq_factors(FidelityParams(0.2 * G, 0.1 * G, 2 * G))
    assert 0 < p_a < p_b < 1

    assert fidelity(1, 0, 0.5, 0.5) == 1
    assert math.isclose(fidelity(math.sqrt(0.5), 1j * math.sqrt(0.5), 0.9, 0.8), 0.5 + 0.5 * 0.72)
    with pytest.raises(NormalizationError):
        fidelity(1, 1, 0.9, 0.9)
    with pytest.raises(DomainError):
        pq_factors(FidelityParams(-1.0, 0.0, 1.0))
    with pytest.raises(DomainError):
        pq_factors(FidelityParams(1.0, 1.0, 0.0))

    assert np.allclose(fidelity_params(G, 10 * G, G, 10 * G, 10 * G), (0.2 * G, 0.2 * G, 10 * G))
    with pytest.raises(DomainError):
        fidelity_params(G, 0.0, G, 10 * G, 10 * G)


def test_average_fidelity_is_monotonic():
    s = 0.2 * G
    values = [average_fidelity(*pq_factors(FidelityParams(s, s, ratio * s))) for ratio in range(1, 11)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert abs(values[-1] - 0.99502) < 1e-4
    assert average_fidelity(1, 1) == 1


def test_sphere_averages():
    a2, b2, pq = sp.symbols('a2 b2 pq')
    linear = sphere_average(a2 + pq * b2, a2, b2)
    squared = sphere_average((a2 + pq * b2) ** 2, a2, b2)
    assert sp.simplify(linear - (1 + pq) / 2) == 0
    assert sp.simplify(squared - (1 + pq + pq ** 2) / 3) == 0

    for value in (0.0, 0.5, 0.93, 1.0):
        assert math.isclose(average_fidelity_linear(value, 1.0), float(linear.subs(pq, value)))
        assert math.isclose(average_fidelity_squared(value, 1.0), float(squared.subs(pq, value)))


def test_total_time():
    qa = QubitParams(4e10 + 10 * G, 5e10, G, 'a')
    qb = QubitParams(4e10 + 10 * G, 5.5e10, G, 'b')
    tau = total_time(qa, qb, ResonatorParams(4e10), 10 * G)
    assert 1.0e-8 <= tau <= 1.1e-8
    assert math.isclose(tau, 10.1 * math.pi / G)
    with pytest.raises(DomainError):
        total_time(qa, qb, ResonatorParams(8e10), 10 * G)


def test_phase_shift_model():
    qa = QubitParams(4e10 + 10 * G, 5e10, G, 'a')
    qb = QubitParams(4e10 + 20 * G, 8e10, G, 'b')
    schedule = build_schedule(qa, qb, ResonatorParams(4e10), 10 * G)
    shifts = phase_shift_model(schedule)
    assert len(shifts) == 8
    assert {(s.step, s.qubit) for s in shifts} == {(2, 'a'), (2, 'b'), (3, 'a'), (3, 'b')}
    t_pulse = math.pi / (20 * G)
    by_key = {(s.step, s.qubit, s.level): s for s in shifts}
    assert math.isclose(by_key[2, 'a', 0].argument, t_pulse * G / 10)
    assert math.isclose(by_key[3, 'b', 2].argument, -t_pulse * G / 20)
    assert math.isclose(abs(by_key[2, 'b', 2].factor), 1)
    assert math.isclose(by_key[3, 'b', 0].shift, -G / 20)
    assert level_shifts(shifts, 2, 'a') == pytest.approx(dispersive_shifts(G, 10 * G))
    assert level_shifts(shifts, 1, 'a') == (0.0, 0.0, 0.0)

    weak = build_schedule(qa, QubitParams(4e10 + 20 * G, 8e10, 1e-6 * G, 'b'), ResonatorParams(4e10), 10 * G)
    assert all(abs(s.factor - 1) < 1e-9 for s in phase_shift_model(weak) if s.qubit == 'b')


def test_dispersive_overlap_matrix():
    ideal = dispersive_overlap_matrix(FidelityParams(0.0, 0.0, 1.0))
    assert np.array_equal(ideal, np.eye(2))

    params = FidelityParams(1.0, 0.5, 4.0)
    transfer = dispersive_overlap_matrix(params)
    assert transfer[0, 0] == 1
    assert transfer[0, 1] == 0 and transfer[1, 0] == 0
    # 0-2 pulses are detuned by s, 1-2 pulses by s/2
    p, q = pq_factors(params)
    p_half, q_half = pq_factors(FidelityParams(params.s_a / 2, params.s_b / 2, params.rabi_tilde))
    assert math.isclose(abs(transfer[1, 1]), p * q * p_half * q_half, rel_tol=1e-9)
    assert abs(transfer[1, 1]) < p * q

    alpha = np.array([1, 0, math.sqrt(0.5)])
    beta = np.array([0, 1, math.sqrt(0.5)])
    values = overlap_fidelities(transfer, alpha, beta)
    assert values[0] == 1
    assert math.isclose(values[1], abs(transfer[1, 1]) ** 2, rel_tol=1e-12)
    assert math.isclose(values[2], abs(0.5 + 0.5 * transfer[1, 1]) ** 2, rel_tol=1e-12)


def test_bloch_sampling_is_uniform():
    angles = sample_bloch_angles(200000, np.random.default_rng(1))
    assert np.all((angles.theta >= 0) & (angles.theta <= math.pi))
    assert np.all((angles.phi >= 0) & (angles.phi < 2 * math.pi))
    # uniform on the sphere: cos ϑ uniform on [-1, 1]
    assert abs(np.mean(np.cos(angles.theta))) < 0.01
    assert abs(np.mean(np.cos(angles.theta) ** 2) - 1 / 3) < 0.01


def test_monte_carlo_average_fidelity():
    estimate = average_fidelity_mc(FidelityParams(0.0, 0.0, 1.0), 2000, seed=3)
    assert estimate.value == 1
    assert estimate.stderr == 0

    s = 0.2 * G
    params = FidelityParams(s, s, 10 * s)
    estimate = average_fidelity_mc(params, 100000, seed=42)
    assert estimate.n_samples == 100000
    assert estimate.stderr < 5e-4
    # with a diagonal overlap matrix the sphere average is (1 + Re T + |T|²) / 3
    t = dispersive_overlap_matrix(params)[1, 1]
    expected = (1 + t.real + abs(t) ** 2) / 3
    assert abs(estimate.value - expected) < 5 * estimate.stderr
    assert 0.995 < estimate.value < 0.997

    # batches depend on the seed only, not on the worker count
    serial = average_fidelity_mc(params, 5000, seed=11, batch_size=1000)
    parallel = average_fidelity_mc(params, 5000, seed=11, batch_size=1000, n_jobs=2)
    assert serial == parallel
    assert average_fidelity_mc(params, 5000, seed=12, batch_size=1000) != serial
    assert average_fidelity_mc(params, 5500, seed=11, batch_size=1000).n_samples == 5500

    with pytest.raises(DomainError):
        average_fidelity_mc(params, 999)


def test_consistency_report_flags_mismatch():
    s = 0.2 * G
    params = FidelityParams(s, s, 10 * s)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        report = consistency_report(params, 100000, seed=42)
    flagged = [w for w in caught if issubclass(w.category, FidelityDiscrepancyWarning)]
    assert report.f_bar_flagged
    assert len(flagged) == 1
    assert abs(report.f_bar - 0.99502) < 1e-4
    document = report.to_dict()
    assert math.isclose(document['rabi_over_s'], 10)
    assert document['eq12_flagged'] is True

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        report = consistency_report(FidelityParams(0.0, 0.0, 1.0), 2000)
    assert not [w for w in caught if issubclass(w.category, FidelityDiscrepancyWarning)]
    assert report.mc.value == 1 and report.f_bar == 1
    assert not (report.f_bar_flagged or report.linear_flagged or report.squared_flagged)
    assert report.to_dict()['rabi_over_s'] == math.inf
