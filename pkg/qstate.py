# -*- coding: utf-8 -*-

"""
ptlab.qstate
~~~~~~~~~~~~

This module contains the linear-algebra substrate of the laboratory: the
tripartite dimension bookkeeping, pure states, reduced density matrices, the
partial-transpose index map and Hermitian spectra. Amplitudes are stored
row-major over the composite index i*N3 + n, matrices over i*N + j.
"""

from fractions import Fraction
from functools import lru_cache
from math import isclose, log2, sqrt

import numpy as np
import scipy.linalg

# absolute tolerances for validating states and operators
HERMITIAN_TOLERANCE = 1e-12
NORM_TOLERANCE = 1e-12
NPT_THRESHOLD = 1e-12


def _qubits(dimension):
    exponent = log2(dimension)
    return int(exponent) if exponent == int(exponent) else None


class PartitionDims(object):
    """Dimensions of the three factors of a tripartite system."""

    def __init__(self, n1, n2, n3):
        for name, value in (('N1', n1), ('N2', n2), ('N3', n3)):
            if int(value) != value or value < 1:
                raise ValueError(f'Invalid dims: {name} must be an integer >= 1, got {value}')
        self._n1 = int(n1)
        self._n2 = int(n2)
        self._n3 = int(n3)

    @classmethod
    def from_qubits(cls, l1, l2, l):
        """Dims for L1 and L2 qubits out of L, the remaining L - L1 - L2 traced out."""
        l3 = l - l1 - l2
        if min(l1, l2, l3) < 0:
            raise ValueError(f'Invalid dims: qubit counts ({l1}, {l2}, {l}) leave a negative environment')
        return cls(2**l1, 2**l2, 2**l3)

    @property
    def n1(self):
        return self._n1

    @property
    def n2(self):
        return self._n2

    @property
    def n3(self):
        return self._n3

    @property
    def n(self):
        return self._n1 * self._n2

    @property
    def m(self):
        return self._n1 * self._n2 * self._n3

    @property
    def q(self):
        return Fraction(self._n3, self.n)

    @property
    def l1(self):
        return _qubits(self._n1)

    @property
    def l2(self):
        return _qubits(self._n2)

    @property
    def l3(self):
        return _qubits(self._n3)

    @property
    def r_tilde(self):
        """Scaled semicircle radius 2*sqrt(N1*N2/N3)."""
        return 2.0 * sqrt(self.n / self._n3)

    @property
    def is_critical(self):
        return self._n3 == 4 * self.n

    def as_tuple(self):
        return self._n1, self._n2, self._n3

    def permuted(self, order):
        """Dims reordered by a permutation of (1, 2, 3)."""
        if sorted(order) != [1, 2, 3]:
            raise ValueError(f'Invalid permutation: {order}')
        dims = self.as_tuple()
        return PartitionDims(*(dims[k - 1] for k in order))

    def __eq__(self, other):
        return isinstance(other, PartitionDims) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f'PartitionDims({self._n1}, {self._n2}, {self._n3})'


class PureState(object):
    """A normalized tripartite pure state with amplitudes a_{in}."""

    FIELDS = ('complex', 'real')

    def __init__(self, dims, amplitudes, field='complex', tolerance=NORM_TOLERANCE):
        if field not in self.FIELDS:
            raise ValueError(f'Invalid field: must be "complex" or "real", got "{field}"')
        amplitudes = np.asarray(amplitudes)
        if amplitudes.shape != (dims.m,):
            raise ValueError(f'Invalid state: expected {dims.m} amplitudes for {dims}, got shape {amplitudes.shape}')
        if field == 'real':
            if np.iscomplexobj(amplitudes):
                if np.any(amplitudes.imag != 0):
                    raise ValueError('Invalid state: real state has non-zero imaginary parts')
                amplitudes = amplitudes.real
            amplitudes = amplitudes.astype(np.float64)
        else:
            amplitudes = amplitudes.astype(np.complex128)
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > tolerance:
            raise ValueError(f'Invalid state: squared norm is {norm!r}, not 1')
        self._dims = dims
        self._amplitudes = amplitudes
        self._field = field

    @property
    def dims(self):
        return self._dims

    @property
    def amplitudes(self):
        return self._amplitudes

    @property
    def field(self):
        return self._field

    @property
    def matrix(self):
        """Amplitudes as the N x N3 matrix a_{in}."""
        return self._amplitudes.reshape(self._dims.n, self._dims.n3)

    @property
    def tensor(self):
        return self._amplitudes.reshape(self._dims.as_tuple())

    def overlap(self, other):
        return complex(np.vdot(other.amplitudes, self._amplitudes))


class HermitianOperator(object):
    """A dense Hermitian matrix, usually a reduced density matrix or its PT."""

    def __init__(self, entries, tolerance=HERMITIAN_TOLERANCE):
        entries = np.asarray(entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f'Invalid operator: must be square, got shape {entries.shape}')
        residual = self.residual(entries)
        if residual > tolerance:
            raise ValueError(f'Invalid operator: Hermiticity residual {residual:.3e} exceeds {tolerance:.0e} (dim {entries.shape[0]})')
        self._entries = entries

    @staticmethod
    def residual(entries):
        if entries.size == 0:
            return 0.0
        return float(np.max(np.abs(entries - entries.conj().T)))

    @property
    def dim(self):
        return self._entries.shape[0]

    @property
    def entries(self):
        return self._entries

    @property
    def trace(self):
        return float(np.trace(self._entries).real)

    def check_density(self, tolerance=1e-12):
        """Raises ValueError unless the operator has unit trace and no eigenvalue below -tolerance."""
        if abs(self.trace - 1.0) > tolerance:
            raise ValueError(f'Invalid density matrix: trace is {self.trace!r}')
        lowest = hermitian_spectrum(self).min_value
        if lowest < -tolerance:
            raise ValueError(f'Invalid density matrix: eigenvalue {lowest!r} is negative')

    def to_json(self):
        """Array of rows, each entry a [real, imag] pair."""
        return [[[float(z.real), float(z.imag)] for z in row] for row in self._entries]


class SpectrumSample(object):
    """Sorted real eigenvalues of an N x N operator, and their scaled form x = N*mu."""

    def __init__(self, values, trace=None, tolerance=1e-10):
        values = np.sort(np.asarray(values, dtype=np.float64))
        if values.ndim != 1 or values.size == 0:
            raise ValueError('Invalid spectrum: need a non-empty list of eigenvalues')
        if trace is not None and abs(values.sum() - trace) > tolerance:
            raise ValueError(f'Invalid spectrum: eigenvalues sum to {values.sum()!r}, trace is {trace!r}')
        self._values = values

    @property
    def values(self):
        return self._values

    @property
    def scaled(self):
        return self._values.size * self._values

    @property
    def min_value(self):
        return float(self._values[0])

    @property
    def trace(self):
        return float(self._values.sum())

    def __len__(self):
        return self._values.size


def pt_index_map(i, j, n2):
    """(g(i, j), g(j, i)) with g(i, j) = i - i mod N2 + j mod N2; works elementwise on arrays."""
    return i - i % n2 + j % n2, j - j % n2 + i % n2


@lru_cache(maxsize=64)
def _pt_targets(n, n2):
    rows, cols = np.indices((n, n))
    targets = pt_index_map(rows, cols, n2)
    for target in targets:
        target.setflags(write=False)
    return targets


def partial_transpose(rho, dims, subsystem=2):
    """Partial transpose of an N1*N2 operator on factor 1 or 2.

    The factor-2 transpose is the exact permutation (rho^T2)[g(i,j), g(j,i)] =
    rho[i, j]; the factor-1 transpose is its full transpose.
    """
    if subsystem not in (1, 2):
        raise ValueError(f'Invalid subsystem: must be 1 or 2, got {subsystem}')
    entries = rho.entries if isinstance(rho, HermitianOperator) else np.asarray(rho)
    if entries.shape != (dims.n, dims.n):
        raise ValueError(f'Invalid operator: expected shape ({dims.n}, {dims.n}) for {dims}, got {entries.shape}')
    rows, cols = _pt_targets(dims.n, dims.n2)
    transposed = np.empty_like(entries)
    transposed[rows, cols] = entries
    if subsystem == 1:
        transposed = transposed.T.copy()
    return HermitianOperator(transposed)


def partial_trace(state):
    """rho_12 = tr_3 |psi><psi|, i.e. (rho_12)_{ij} = sum_n a_{in} a*_{jn}."""
    if state.amplitudes.shape != (state.dims.m,):
        raise ValueError(f'Invalid state: {state.amplitudes.size} amplitudes for {state.dims}')
    a = state.matrix
    rho = a @ a.conj().T
    return HermitianOperator((rho + rho.conj().T) / 2)


def reduced_pair(state, keep=(1, 2)):
    """Reduced density matrix of the ordered factor pair `keep`, tracing the third.

    Returns the operator and the dims (Na, Nb, Nc) in pair order, so that a
    following partial_transpose acts on the second factor of the pair.
    """
    a, b = keep
    if a == b or {a, b} - {1, 2, 3}:
        raise ValueError(f'Invalid pair: {keep}')
    c = ({1, 2, 3} - {a, b}).pop()
    dims = state.dims.permuted((a, b, c))
    block = np.transpose(state.tensor, (a - 1, b - 1, c - 1)).reshape(dims.n, dims.n3)
    rho = block @ block.conj().T
    return HermitianOperator((rho + rho.conj().T) / 2), dims


def hermitian_spectrum(operator):
    """Full sorted spectrum of a Hermitian operator, re-symmetrized before the solve."""
    entries = operator.entries if isinstance(operator, HermitianOperator) else np.asarray(operator)
    symmetric = (entries + entries.conj().T) / 2
    try:
        values = scipy.linalg.eigh(symmetric, eigvals_only=True, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as error:
        residual = HermitianOperator.residual(entries)
        raise RuntimeError(f'eigen-solve failed for dim {entries.shape[0]} '
                           f'(Hermiticity residual {residual:.3e}, finite={np.isfinite(entries).all()}): {error}') from error
    return SpectrumSample(values, trace=float(np.trace(symmetric).real))


def schmidt_coefficients(state):
    """Squared Schmidt coefficients of a pure bipartite state (N3 = 1), in descending order."""
    if state.dims.n3 != 1:
        raise ValueError(f'Invalid state: Schmidt decomposition needs N3 = 1, got {state.dims}')
    singular = scipy.linalg.svdvals(state.amplitudes.reshape(state.dims.n1, state.dims.n2))
    return singular**2


def schmidt_pt_spectrum(lambdas, n1, n2, tolerance=1e-10):
    """PT spectrum {lambda_i} U {+-sqrt(lambda_i lambda_j), i < j} of a pure bipartite state, zero padded."""
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if lambdas.size > min(n1, n2):
        raise ValueError(f'Invalid Schmidt spectrum: {lambdas.size} coefficients for {n1}x{n2}')
    if np.any(lambdas < -tolerance):
        raise ValueError(f'Invalid Schmidt spectrum: negative coefficient {lambdas.min()!r}')
    if not isclose(lambdas.sum(), 1.0, rel_tol=0.0, abs_tol=tolerance):
        raise ValueError(f'Invalid Schmidt spectrum: coefficients sum to {lambdas.sum()!r}')
    lambdas = np.clip(lambdas, 0.0, None)
    upper = np.triu_indices(lambdas.size, k=1)
    cross = np.sqrt(lambdas[upper[0]] * lambdas[upper[1]])
    values = np.zeros(n1 * n2)
    values[:lambdas.size + 2 * cross.size] = np.concatenate((lambdas, cross, -cross))
    return SpectrumSample(values)


def product_state(dims, field='complex'):
    """The basis state |0>|0>|0>."""
    amplitudes = np.zeros(dims.m)
    amplitudes[0] = 1.0
    return PureState(dims, amplitudes, field)


def bell_state():
    """(|00> + |11>)/sqrt(2) on two qubits with a trivial third factor."""
    amplitudes = np.zeros(4)
    amplitudes[0] = amplitudes[3] = 1 / sqrt(2)
    return PureState(PartitionDims(2, 2, 1), amplitudes, 'real')


def w_state(alpha, beta, gamma):
    """alpha|001> + beta|010> + gamma|100> on three qubits."""
    if not isclose(alpha**2 + beta**2 + gamma**2, 1.0, abs_tol=1e-12):
        raise ValueError(f'Invalid W-state: squared weights sum to {alpha**2 + beta**2 + gamma**2!r}')
    amplitudes = np.zeros(8)
    amplitudes[1], amplitudes[2], amplitudes[4] = alpha, beta, gamma
    return PureState(PartitionDims(2, 2, 2), amplitudes, 'real')
