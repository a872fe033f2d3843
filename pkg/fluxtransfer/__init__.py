"""Simulation and analysis of a qubit-to-qubit state transfer through a shared resonator mode"""
from fluxtransfer import analytics
from fluxtransfer.analytics import FidelityParams, average_fidelity, average_fidelity_mc, pq_factors
from fluxtransfer.config import RunConfig, load_run_config
from fluxtransfer.hilbert import (
    Operator, SpaceConfig, StateVector, expectation, sigma, single_site_operator, tensor_product)
from fluxtransfer.model import (
    DriveParams, QubitParams, ResonatorParams, detunings, effective_raman_hamiltonian,
    full_interaction_hamiltonian, resonant_drive_hamiltonian)
from fluxtransfer.propagator import IntegratorConfig, evolve_constant, evolve_time_dependent, step_and_record
from fluxtransfer.protocol import Schedule, build_schedule, run_transfer, transfer_matrix, verify_truth_table

__all__ = ['analytics',
           'FidelityParams', 'average_fidelity', 'average_fidelity_mc', 'pq_factors',
           'RunConfig', 'load_run_config',
           'Operator', 'SpaceConfig', 'StateVector', 'expectation', 'sigma', 'single_site_operator',
           'tensor_product',
           'DriveParams', 'QubitParams', 'ResonatorParams', 'detunings', 'effective_raman_hamiltonian',
           'full_interaction_hamiltonian', 'resonant_drive_hamiltonian',
           'IntegratorConfig', 'evolve_constant', 'evolve_time_dependent', 'step_and_record',
           'Schedule', 'build_schedule', 'run_transfer', 'transfer_matrix', 'verify_truth_table']

__version__ = '0.1.0'
