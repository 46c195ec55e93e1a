# -*- coding: utf-8 -*-

"""
ptlab.rotor
~~~~~~~~~~~

This module contains three coupled kicked rotors (standard maps on the torus):
the classical six-dimensional map, the quantum Floquet operator in the
position representation, its eigen-decomposition and the entanglement
statistics of its eigenstates, which are treated as tripartite pure states.
"""

import cmath
from math import pi, sqrt

import numpy as np
import scipy.linalg

from measures import MeasureReport, state_spectra
from qstate import PartitionDims, PureState

# (K1, K2, K3), (b12, b13, b23)
PARAMETER_SETS = {
    1: ((8.0, 7.0, 6.0), (1.60, 1.51, 1.42)),
    2: ((15.0, 14.0, 13.0), (2.60, 2.51, 2.42)),
}

_PAIRS = ((0, 1), (0, 2), (1, 2))


class RotorParams(object):
    """Kick strengths, symmetric couplings, Hilbert dimensions and the quantization phase."""

    _REQUIRED_CONFIG = [
        'rotor.alpha',
        'rotor.max_dim',
    ]

    def __init__(self, k, b, dims=(2, 2, 2), alpha=0.35):
        if len(k) != 3 or len(b) != 3 or len(dims) != 3:
            raise ValueError('Invalid rotor: need three kicks, three couplings and three dimensions')
        if min(dims) < 2:
            raise ValueError(f'Invalid rotor: every dimension must be >= 2, got {tuple(dims)}')
        if not 0 <= alpha < 1:
            raise ValueError(f'Invalid rotor: alpha must be in [0, 1), got {alpha}')
        self._k = tuple(float(x) for x in k)
        self._b = tuple(float(x) for x in b)
        self._dims = PartitionDims(*dims)
        self._alpha = float(alpha)

    @classmethod
    def checkconfig(cls, config):
        for required in cls._REQUIRED_CONFIG:
            if required not in config:
                raise ValueError(f'Invalid config: missing "{required}"')

    @classmethod
    def from_set(cls, number, dims, alpha=0.35):
        if number not in PARAMETER_SETS:
            raise ValueError(f'Invalid parameter set: {number} (known: {sorted(PARAMETER_SETS)})')
        k, b = PARAMETER_SETS[number]
        return cls(k, b, dims, alpha)

    @property
    def k(self):
        return self._k

    @property
    def b(self):
        return self._b

    @property
    def dims(self):
        return self._dims

    @property
    def alpha(self):
        return self._alpha

    def coupling(self, i, j):
        """b_ij for 0-based rotor indices, symmetric in i and j."""
        return self._b[_PAIRS.index(tuple(sorted((i, j))))]


def _torus(x):
    wrapped = np.mod(x, 1.0)
    return np.where(wrapped >= 1.0, 0.0, wrapped)


def classical_step(state, params):
    """One kick of the map on (q1, p1, q2, p2, q3, p3): momenta first, then positions with the new momenta."""
    state = np.asarray(state, dtype=float)
    q = state[0::2]
    p = state[1::2].copy()
    for i in range(3):
        p[i] += params.k[i] / (2 * pi) * np.sin(2 * pi * q[i])
        for j in range(3):
            if j != i:
                p[i] += params.coupling(i, j) / (2 * pi) * np.sin(2 * pi * (q[i] + q[j]))
    p = _torus(p)
    q = _torus(q + p)
    result = np.empty(6)
    result[0::2] = q
    result[1::2] = p
    return result


def classical_orbit(state, params, steps):
    orbit = [np.asarray(state, dtype=float)]
    for _ in range(steps):
        orbit.append(classical_step(orbit[-1], params))
    return np.array(orbit)


def single_map_unitary(k, n, alpha=0.35):
    """U(n', n) = (1/sqrt(iN)) exp[-i N K/2pi cos(2pi(n + alpha)/N)] exp[i pi (n' - n)^2/N]."""
    if n < 2:
        raise ValueError(f'Invalid rotor: N must be >= 2, got {n}')
    positions = np.arange(n)
    kick = np.exp(-1j * n * k / (2 * pi) * np.cos(2 * pi * (positions + alpha) / n))
    free = np.exp(1j * pi * np.subtract.outer(positions, positions)**2 / n)
    return cmath.exp(-1j * pi / 4) / sqrt(n) * free * kick[np.newaxis, :]


def coupling_phases(params):
    """Diagonal of the two-body kick, exp{-i sqrt(Ni Nj) b_ij/2pi cos[2pi((ni+a)/Ni + (nj+a)/Nj)]}."""
    dims = params.dims.as_tuple()
    grids = np.meshgrid(*[(np.arange(d) + params.alpha) / d for d in dims], indexing='ij')
    phase = np.zeros(dims)
    for i, j in _PAIRS:
        phase += sqrt(dims[i] * dims[j]) * params.coupling(i, j) / (2 * pi) * np.cos(2 * pi * (grids[i] + grids[j]))
    return np.exp(-1j * phase).ravel()


class FloquetOperator(object):
    """The one-kick propagator of the coupled rotors on C^(N1 N2 N3)."""

    def __init__(self, params, max_dim=4096, tolerance=1e-10):
        dim = params.dims.m
        if dim > max_dim:
            raise ValueError(f'Invalid rotor: dimension {dim} exceeds rotor.max_dim={max_dim} '
                             f'(a dense {dim}x{dim} complex matrix needs {16 * dim**2 / 2**30:.1f} GiB)')
        n1, n2, n3 = params.dims.as_tuple()
        single = np.kron(np.kron(single_map_unitary(params.k[0], n1, params.alpha),
                                 single_map_unitary(params.k[1], n2, params.alpha)),
                         single_map_unitary(params.k[2], n3, params.alpha))
        self._entries = single * coupling_phases(params)[np.newaxis, :]
        self._params = params
        residual = self.unitarity_residual()
        if residual > tolerance:
            raise RuntimeError(f'Floquet operator of dim {dim} is not unitary: residual {residual:.3e}')

    @property
    def dim(self):
        return self._entries.shape[0]

    @property
    def entries(self):
        return self._entries

    @property
    def params(self):
        return self._params

    def unitarity_residual(self):
        product = self._entries.conj().T @ self._entries
        return float(np.max(np.abs(product - np.eye(self.dim))))


def coupled_unitary(params, max_dim=4096):
    return FloquetOperator(params, max_dim)


def eigen_decompose(operator, tolerance=1e-8):
    """Eigenphases and orthonormal eigenvectors of a unitary from its complex Schur form.

    A normal matrix has a diagonal Schur form, so the Schur vectors are the
    eigenvectors; off-diagonal residue or moduli away from 1 beyond
    `tolerance` are reported as failures.
    """
    entries = operator.entries if isinstance(operator, FloquetOperator) else np.asarray(operator)
    try:
        triangular, vectors = scipy.linalg.schur(entries, output='complex')
    except (np.linalg.LinAlgError, ValueError) as error:
        raise RuntimeError(f'Schur decomposition of dim {entries.shape[0]} failed: {error}') from error
    eigenvalues = np.diag(triangular).copy()
    off_diagonal = float(np.max(np.abs(np.triu(triangular, k=1)))) if entries.shape[0] > 1 else 0.0
    modulus = float(np.max(np.abs(np.abs(eigenvalues) - 1.0)))
    if off_diagonal > tolerance or modulus > tolerance:
        raise RuntimeError(f'eigen-decomposition of dim {entries.shape[0]} is not unitary: '
                           f'off-diagonal residue {off_diagonal:.3e}, modulus deviation {modulus:.3e}')
    return eigenvalues, vectors


def _measure_columns(vectors, dims, first, thresholds):
    reports = []
    scaled = []
    for offset in range(vectors.shape[1]):
        column = vectors[:, offset]
        state = PureState(dims, column / np.linalg.norm(column), 'complex')
        rho_spec, pt_spec = state_spectra(state)
        reports.append(MeasureReport(first + offset, dims, 'complex', rho_spec, pt_spec, **thresholds))
        scaled.append(pt_spec.scaled)
    return reports, scaled


def eigenstate_pipeline(params, client=None, chunk=250, max_dim=4096, **thresholds):
    """Measures every eigenstate of the Floquet operator of `params` as a tripartite state.

    Returns the reports in the eigenvalue order of the Schur form, the
    eigenvalues and the pooled scaled PT spectra N*mu of all eigenstates.
    """
    operator = coupled_unitary(params, max_dim)
    eigenvalues, vectors = eigen_decompose(operator)
    dims = params.dims
    if client is None:
        results = [_measure_columns(vectors, dims, 0, thresholds)]
    else:
        results = _submit_columns(client, vectors, dims, chunk, thresholds)
    reports = []
    pooled = []
    for chunk_reports, chunk_scaled in results:
        reports.extend(chunk_reports)
        pooled.extend(chunk_scaled)
    return reports, eigenvalues, np.concatenate(pooled)


def _submit_columns(client, vectors, dims, chunk, thresholds):
    import dask.distributed
    futures = []
    for first in range(0, dims.m, chunk):
        block = client.scatter(np.ascontiguousarray(vectors[:, first:first + chunk]))
        futures.append(client.submit(_measure_columns, block, dims, first, thresholds))
    dask.distributed.wait(futures)
    return [future.result() for future in futures]
