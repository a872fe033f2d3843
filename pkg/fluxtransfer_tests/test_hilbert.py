import numpy as np
import pytest

from fluxtransfer.hilbert import (
    DimensionMismatchError, Operator, OperatorKindError, SpaceConfig, SpaceConfigurationError, StateVector,
    basis_index, basis_label, basis_labels, commutator, expectation, is_hermitian, number_operator, photon_number,
    population, sigma, single_site_operator, tensor_product)


def test_basis_order():
    config = SpaceConfig(2)
    assert config.shape == (3, 3, 3)
    assert basis_index((0, 0, 0), config) == 0
    assert basis_index((0, 0, 1), config) == 1
    assert basis_index((0, 1, 0), config) == 3
    assert basis_index((1, 0, 0), config) == 9
    assert basis_index((2, 2, 2), config) == 26
    for k, label in enumerate(basis_labels(config)):
        assert basis_index(label, config) == k
        assert basis_label(k, config) == label

    with pytest.raises(DimensionMismatchError):
        basis_index((0, 0, 3), config)
    with pytest.raises(DimensionMismatchError):
        basis_label(27, config)


def test_space_config_validation():
    assert SpaceConfig().fock_cutoff == 2
    assert SpaceConfig(4).dimension == 45
    for invalid in (0, -1, 1.5, True):
        with pytest.raises(SpaceConfigurationError):
            SpaceConfig(invalid)


def test_single_site_operators_act_on_their_slot():
    config = SpaceConfig(2)
    state = StateVector.basis((1, 2, 1), config)

    lowered = single_site_operator(sigma(0, 1), 'a', config) @ state
    assert lowered == StateVector.basis((0, 2, 1), config)

    lowered = single_site_operator(sigma(0, 2), 'b', config) @ state
    assert lowered == StateVector.basis((1, 0, 1), config)

    raised = single_site_operator('create', 'resonator', config) @ state
    assert np.isclose(raised.amplitude((1, 2, 2)), np.sqrt(2))
    assert np.isclose(raised.norm(), np.sqrt(2))

    annihilated = single_site_operator('annihilate', 'resonator', config) @ StateVector.basis((0, 0, 0), config)
    assert annihilated.norm() == 0

    identity = single_site_operator('identity', 'a', config)
    assert identity.hermitian
    assert np.array_equal(identity.matrix, np.eye(config.dimension))


def test_ladder_operator_truncation():
    config = SpaceConfig(2)
    a = single_site_operator('annihilate', 'resonator', config)
    a_dag = single_site_operator('create', 'resonator', config)
    assert a_dag == a.dag()
    # [a, a⁺] = 1 except on the highest Fock state
    diagonal = np.real(np.diag(commutator(a, a_dag).matrix)).reshape(config.shape)
    assert np.allclose(diagonal[:, :, :2], 1)
    assert np.allclose(diagonal[:, :, 2], -2)


def test_operator_kind_errors():
    config = SpaceConfig(2)
    with pytest.raises(OperatorKindError):
        single_site_operator('create', 'b', config)
    with pytest.raises(OperatorKindError):
        single_site_operator(sigma(0, 1), 'resonator', config)
    with pytest.raises(OperatorKindError):
        single_site_operator(sigma(0, 3), 'a', config)
    with pytest.raises(OperatorKindError):
        single_site_operator('destroy', 'resonator', config)
    with pytest.raises(OperatorKindError):
        single_site_operator('identity', 'c', config)


def test_hermitian_flag():
    config = SpaceConfig(1)
    transition = single_site_operator(sigma(0, 2), 'a', config)
    assert not transition.hermitian
    x = transition + transition.dag()
    assert x.hermitian is False
    assert is_hermitian(x.matrix)

    h = Operator(x.matrix, hermitian=True, dims=config.shape)
    assert (h * 2.0).hermitian
    assert not (h * 1j).hermitian
    assert (h - h).hermitian
    assert (-h).hermitian

    with pytest.raises(OperatorKindError):
        Operator(transition.matrix, hermitian=True)

    # tolerance is relative to the largest entry
    big = np.array([[1e10, 1.0], [1.0 + 1e-3, 0.0]])
    assert is_hermitian(big)
    assert not is_hermitian(np.array([[0.0, 1.0], [1.001, 0.0]]))


def test_dimension_checks():
    one, two = SpaceConfig(1), SpaceConfig(2)
    with pytest.raises(DimensionMismatchError):
        StateVector(np.zeros(5), one)
    with pytest.raises(DimensionMismatchError):
        StateVector.basis((0, 0, 0), one) + StateVector.basis((0, 0, 0), two)
    with pytest.raises(DimensionMismatchError):
        single_site_operator('identity', 'a', one) @ StateVector.basis((0, 0, 0), two)
    with pytest.raises(DimensionMismatchError):
        single_site_operator('identity', 'a', one) + single_site_operator('identity', 'a', two)
    with pytest.raises(DimensionMismatchError):
        Operator(np.zeros((2, 3)))
    with pytest.raises(DimensionMismatchError):
        Operator(np.eye(4), dims=(3,))
    with pytest.raises(DimensionMismatchError):
        tensor_product(Operator(np.eye(2)), Operator(np.eye(2)), config=one)


def test_tensor_product_matches_embedding():
    config = SpaceConfig(1)
    qubit = Operator(np.diag([0, 1, 2]), hermitian=True)
    identity3 = Operator(np.eye(3), hermitian=True)
    identity_fock = Operator(np.eye(config.fock_dimension), hermitian=True)
    product = tensor_product(tensor_product(qubit, identity3), identity_fock, config)
    assert product.dims == config.shape
    assert product.hermitian

    embedded = single_site_operator(sigma(1, 1), 'a', config) + single_site_operator(sigma(2, 2), 'a', config) * 2
    assert np.array_equal(product.matrix, embedded.matrix)


def test_state_vector_is_immutable():
    state = StateVector.basis((0, 1, 0), SpaceConfig(2))
    with pytest.raises(ValueError):
        state.amplitudes[0] = 1
    assert hash(state) == hash(StateVector.basis((0, 1, 0), SpaceConfig(2)))
    assert 'a0b1c0' in repr(state)


def test_expectation_values():
    config = SpaceConfig(2)
    tensor = np.zeros(config.shape, dtype=complex)
    tensor[1, 1, 0] = np.sqrt(0.25)
    tensor[0, 1, 1] = np.sqrt(0.5) * 1j
    tensor[2, 0, 2] = -np.sqrt(0.25)
    state = StateVector.from_tensor(tensor, config)
    assert np.isclose(state.norm(), 1)

    n = expectation(state, number_operator(config))
    assert n.imag == 0
    assert np.isclose(n.real, 0.5 + 2 * 0.25)
    assert np.isclose(photon_number(state), 1.0)
    assert np.isclose(population(state, 'a', 1), 0.25)
    assert np.isclose(population(state, 'b', 1), 0.75)
    assert np.isclose(population(state, 'resonator', 2), 0.25)
    assert np.isclose(state.overlap(StateVector.basis((0, 1, 1), config)), -1j * np.sqrt(0.5))

    with pytest.raises(OperatorKindError):
        population(state, 'c', 0)
