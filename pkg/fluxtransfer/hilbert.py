"""Finite Hilbert space of two three-level flux qubits ``a``, ``b`` and one truncated resonator mode.

Basis states are labelled ``(i, j, n)``: level ``i`` of qubit a, level ``j`` of qubit b and ``n`` photons.
The vector index is lexicographic in that order::

    index = (i * 3 + j) * (N + 1) + n

where ``N`` is the Fock cutoff. All operators acting on the full space are built through `embed`,
which is the only place where the slot order enters a Kronecker product.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from fluxtransfer.cache import memorycache

QUBIT_LEVELS = 3
SLOTS = ('a', 'b', 'resonator')
QUBIT_SLOTS = ('a', 'b')
HERMITICITY_TOLERANCE = 1e-12

BasisLabel = Tuple[int, int, int]
OperatorKind = Union[str, Tuple[str, int, int]]


class SpaceConfigurationError(ValueError):
    pass


class OperatorKindError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SpaceConfig:
    """Truncation of the joint space; ``fock_cutoff`` is the largest photon number kept.

    >>> SpaceConfig(2).dimension
    27
    >>> SpaceConfig(0)
    Traceback (most recent call last):
    ...
    fluxtransfer.hilbert.SpaceConfigurationError: Fock cutoff must be an integer >= 1, got 0
    """
    fock_cutoff: int = 2

    def __post_init__(self):
        if isinstance(self.fock_cutoff, bool) or not isinstance(self.fock_cutoff, (int, np.integer)) \
                or self.fock_cutoff < 1:
            raise SpaceConfigurationError("Fock cutoff must be an integer >= 1, got {}".format(self.fock_cutoff))

    @property
    def fock_dimension(self) -> int:
        return self.fock_cutoff + 1

    @property
    def shape(self) -> Tuple[int, int, int]:
        return QUBIT_LEVELS, QUBIT_LEVELS, self.fock_dimension

    @property
    def dimension(self) -> int:
        return QUBIT_LEVELS * QUBIT_LEVELS * self.fock_dimension

    def slot_dimension(self, slot: str) -> int:
        if slot in QUBIT_SLOTS:
            return QUBIT_LEVELS
        if slot == 'resonator':
            return self.fock_dimension
        raise OperatorKindError("Unknown slot '{}', valid slots are {}".format(slot, SLOTS))


def basis_index(label: BasisLabel, config: SpaceConfig) -> int:
    """Vector index of basis state ``(i, j, n)``.

    >>> basis_index((1, 1, 0), SpaceConfig(2))
    12
    """
    i, j, n = label
    if not (0 <= i < QUBIT_LEVELS and 0 <= j < QUBIT_LEVELS and 0 <= n <= config.fock_cutoff):
        raise DimensionMismatchError("Basis label {} outside space with cutoff {}".format(label, config.fock_cutoff))
    return int(np.ravel_multi_index((i, j, n), config.shape))


def basis_label(index: int, config: SpaceConfig) -> BasisLabel:
    """Inverse of `basis_index`.

    >>> basis_label(12, SpaceConfig(2))
    (1, 1, 0)
    """
    if not 0 <= index < config.dimension:
        raise DimensionMismatchError("Index {} outside space of dimension {}".format(index, config.dimension))
    return tuple(int(e) for e in np.unravel_index(index, config.shape))


def basis_labels(config: SpaceConfig):
    """All basis labels in vector order."""
    return [basis_label(k, config) for k in range(config.dimension)]


def format_label(label: BasisLabel) -> str:
    """Compact text form of a basis label, e.g. ``a1b0c1``."""
    return "a{}b{}c{}".format(*label)


class StateVector:
    """Immutable normalisable amplitude vector on the joint space."""

    __slots__ = ('_amplitudes', 'config')

    def __init__(self, amplitudes, config: SpaceConfig):
        amplitudes = np.array(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != config.dimension:
            raise DimensionMismatchError("State has {} amplitudes, space dimension is {}".format(
                amplitudes.shape[0], config.dimension))
        amplitudes.flags.writeable = False
        self._amplitudes = amplitudes
        self.config = config

    @classmethod
    def basis(cls, label: BasisLabel, config: SpaceConfig) -> 'StateVector':
        amplitudes = np.zeros(config.dimension, dtype=complex)
        amplitudes[basis_index(label, config)] = 1
        return cls(amplitudes, config)

    @classmethod
    def from_tensor(cls, tensor, config: SpaceConfig) -> 'StateVector':
        tensor = np.asarray(tensor)
        if tensor.shape != config.shape:
            raise DimensionMismatchError("Tensor shape {} does not match {}".format(tensor.shape, config.shape))
        return cls(tensor.reshape(-1), config)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amplitudes

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes as read-only array indexed ``[i, j, n]``."""
        return self._amplitudes.reshape(self.config.shape)

    def amplitude(self, label: BasisLabel) -> complex:
        return complex(self._amplitudes[basis_index(label, self.config)])

    def norm(self) -> float:
        return float(np.linalg.norm(self._amplitudes))

    def overlap(self, other: 'StateVector') -> complex:
        """Inner product ⟨self|other⟩."""
        self._check_compatible(other)
        return complex(np.vdot(self._amplitudes, other._amplitudes))

    def _check_compatible(self, other):
        if not isinstance(other, StateVector) or other.config != self.config:
            raise DimensionMismatchError("States live in different spaces")

    def __add__(self, other):
        self._check_compatible(other)
        return StateVector(self._amplitudes + other._amplitudes, self.config)

    def __sub__(self, other):
        self._check_compatible(other)
        return StateVector(self._amplitudes - other._amplitudes, self.config)

    def __mul__(self, scalar):
        return StateVector(self._amplitudes * complex(scalar), self.config)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, StateVector) and other.config == self.config and \
            np.array_equal(self._amplitudes, other._amplitudes)

    def __hash__(self):
        return hash((self.config, self._amplitudes.tobytes()))

    def __repr__(self):
        significant = [(format_label(basis_label(k, self.config)), complex(a))
                       for k, a in enumerate(self._amplitudes) if abs(a) > 1e-12]
        return "StateVector({})".format(", ".join("{}: {:.6g}".format(l, a) for l, a in significant))


class Operator:
    """Immutable square matrix acting on a product of slots with dimensions ``dims``.

    The ``hermitian`` flag is checked on construction and propagated through sums and real multiples.
    """

    __slots__ = ('_matrix', 'hermitian', 'dims')

    def __init__(self, matrix, hermitian: bool = False, dims: Optional[Sequence[int]] = None):
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError("Operator matrix must be square, got shape {}".format(matrix.shape))
        dims = (matrix.shape[0],) if dims is None else tuple(int(d) for d in dims)
        if int(np.prod(dims)) != matrix.shape[0]:
            raise DimensionMismatchError("Slot dimensions {} do not multiply to {}".format(dims, matrix.shape[0]))
        if hermitian and not is_hermitian(matrix):
            raise OperatorKindError("Matrix flagged hermitian deviates from its adjoint by {}".format(
                np.max(np.abs(matrix - matrix.conj().T))))
        matrix.flags.writeable = False
        self._matrix = matrix
        self.hermitian = bool(hermitian)
        self.dims = dims

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dimension(self) -> int:
        return self._matrix.shape[0]

    def dag(self) -> 'Operator':
        return Operator(self._matrix.conj().T, self.hermitian, self.dims)

    def _check_compatible(self, other):
        if not isinstance(other, Operator) or other.dims != self.dims:
            raise DimensionMismatchError("Operators act on different spaces: {} vs {}".format(
                self.dims, getattr(other, 'dims', None)))

    def __add__(self, other):
        self._check_compatible(other)
        return Operator(self._matrix + other._matrix, self.hermitian and other.hermitian, self.dims)

    def __sub__(self, other):
        self._check_compatible(other)
        return Operator(self._matrix - other._matrix, self.hermitian and other.hermitian, self.dims)

    def __neg__(self):
        return Operator(-self._matrix, self.hermitian, self.dims)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return Operator(self._matrix * scalar, self.hermitian and scalar.imag == 0, self.dims)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if self.dimension != other.config.dimension:
                raise DimensionMismatchError("Operator of dimension {} applied to state of dimension {}".format(
                    self.dimension, other.config.dimension))
            return StateVector(self._matrix @ other.amplitudes, other.config)
        self._check_compatible(other)
        return Operator(self._matrix @ other._matrix, False, self.dims)

    def __eq__(self, other):
        return isinstance(other, Operator) and other.dims == self.dims and np.array_equal(self._matrix, other._matrix)

    def __hash__(self):
        return hash((self.dims, self._matrix.tobytes()))

    def __repr__(self):
        return "Operator(dims={}, hermitian={})".format(self.dims, self.hermitian)


def is_hermitian(matrix, tolerance=HERMITICITY_TOLERANCE) -> bool:
    """Adjoint check with a tolerance relative to the largest entry (at least absolute ``tolerance``)."""
    matrix = np.asarray(matrix)
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tolerance * scale)


def commutator(first: Operator, second: Operator) -> Operator:
    return first @ second - second @ first


def sigma(l: int, m: int) -> Tuple[str, int, int]:
    """Kind descriptor of the qubit operator |l⟩⟨m|."""
    return 'sigma', l, m


def local_matrix(kind: OperatorKind, slot: str, config: SpaceConfig) -> np.ndarray:
    """Matrix of an elementary operator on its own slot only."""
    dim = config.slot_dimension(slot)
    if kind == 'identity':
        return np.eye(dim, dtype=complex)
    if kind in ('annihilate', 'create'):
        if slot != 'resonator':
            raise OperatorKindError("Ladder operator '{}' requires the resonator slot, not '{}'".format(kind, slot))
        annihilate = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
        return annihilate if kind == 'annihilate' else annihilate.T.copy()
    if isinstance(kind, tuple) and len(kind) == 3 and kind[0] == 'sigma':
        if slot not in QUBIT_SLOTS:
            raise OperatorKindError("Qubit operator {} requires slot 'a' or 'b', not '{}'".format(kind, slot))
        _, l, m = kind
        if not (0 <= l < QUBIT_LEVELS and 0 <= m < QUBIT_LEVELS):
            raise OperatorKindError("Qubit levels must be in 0..{}, got {}".format(QUBIT_LEVELS - 1, kind))
        result = np.zeros((QUBIT_LEVELS, QUBIT_LEVELS), dtype=complex)
        result[l, m] = 1
        return result
    raise OperatorKindError("Unknown operator kind {}".format(kind))


def embed(matrix, slot: str, config: SpaceConfig) -> np.ndarray:
    """Places a single-slot matrix into the joint space, identities on all other slots."""
    factors = [np.asarray(matrix) if s == slot else np.eye(config.slot_dimension(s), dtype=complex) for s in SLOTS]
    if slot not in SLOTS:
        raise OperatorKindError("Unknown slot '{}', valid slots are {}".format(slot, SLOTS))
    if factors[SLOTS.index(slot)].shape != (config.slot_dimension(slot),) * 2:
        raise DimensionMismatchError("Matrix of shape {} does not fit slot '{}'".format(np.shape(matrix), slot))
    result = factors[0]
    for f in factors[1:]:
        result = np.kron(result, f)
    return result


@memorycache(maxsize=512)
def single_site_operator(kind: OperatorKind, slot: str, config: SpaceConfig) -> Operator:
    """Elementary operator embedded into the joint space.

    Args:
        kind: ``sigma(l, m)`` for |l⟩⟨m| on a qubit, ``'annihilate'`` / ``'create'`` for the resonator,
              or ``'identity'``
        slot: one of ``'a'``, ``'b'``, ``'resonator'``
        config: space truncation

    Examples:
        >>> config = SpaceConfig(2)
        >>> op = single_site_operator(sigma(0, 2), 'a', config)
        >>> s = op @ StateVector.basis((2, 1, 0), config)
        >>> s.amplitude((0, 1, 0))
        (1+0j)
        >>> single_site_operator('annihilate', 'a', config)
        Traceback (most recent call last):
        ...
        fluxtransfer.hilbert.OperatorKindError: Ladder operator 'annihilate' requires the resonator slot, not 'a'
    """
    matrix = local_matrix(kind, slot, config)
    hermitian = kind == 'identity' or (isinstance(kind, tuple) and kind[1] == kind[2])
    return Operator(embed(matrix, slot, config), hermitian=hermitian, dims=config.shape)


def number_operator(config: SpaceConfig) -> Operator:
    create = single_site_operator('create', 'resonator', config)
    annihilate = single_site_operator('annihilate', 'resonator', config)
    return Operator((create @ annihilate).matrix, hermitian=True, dims=config.shape)


def tensor_product(first: Operator, second: Operator, config: Optional[SpaceConfig] = None) -> Operator:
    """Kronecker product of two subspace operators.

    If ``config`` is given, the product dimension has to divide the joint space dimension.

    >>> x = Operator([[0, 1], [1, 0]], hermitian=True)
    >>> tensor_product(x, x).dims
    (2, 2)
    """
    if not isinstance(first, Operator) or not isinstance(second, Operator):
        raise DimensionMismatchError("tensor_product expects two Operator instances")
    dimension = first.dimension * second.dimension
    if config is not None and config.dimension % dimension != 0:
        raise DimensionMismatchError("Product dimension {} does not divide space dimension {}".format(
            dimension, config.dimension))
    return Operator(np.kron(first.matrix, second.matrix), first.hermitian and second.hermitian,
                    first.dims + second.dims)


def expectation(state: StateVector, op: Operator) -> complex:
    """⟨ψ|M|ψ⟩; real up to rounding when ``op`` is flagged hermitian.

    >>> config = SpaceConfig(1)
    >>> expectation(StateVector.basis((0, 0, 1), config), number_operator(config))
    (1+0j)
    """
    if op.dimension != state.config.dimension:
        raise DimensionMismatchError("Operator of dimension {} measured on state of dimension {}".format(
            op.dimension, state.config.dimension))
    value = complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))
    if op.hermitian:
        return complex(value.real, 0.0) if abs(value.imag) <= HERMITICITY_TOLERANCE * max(1.0, abs(value)) \
            else value
    return value


def population(state: StateVector, slot: str, level: int) -> float:
    """Probability of finding ``slot`` in ``level`` (photon number for the resonator)."""
    tensor = state.tensor
    if slot == 'a':
        return float(np.sum(np.abs(tensor[level, :, :]) ** 2))
    if slot == 'b':
        return float(np.sum(np.abs(tensor[:, level, :]) ** 2))
    if slot == 'resonator':
        return float(np.sum(np.abs(tensor[:, :, level]) ** 2))
    raise OperatorKindError("Unknown slot '{}', valid slots are {}".format(slot, SLOTS))


def photon_number(state: StateVector) -> float:
    occupations = np.sum(np.abs(state.tensor) ** 2, axis=(0, 1))
    return float(np.dot(np.arange(state.config.fock_dimension), occupations))
