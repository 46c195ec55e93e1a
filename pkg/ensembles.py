# -*- coding: utf-8 -*-

"""
ptlab.ensembles
~~~~~~~~~~~~~~~

This module contains the random sources: Haar-random pure states (complex and
real), Gaussian unitary and orthogonal matrices and the shifted model
B = A + I/N whose spectrum stands in for the partial transpose. Every sample
is drawn from its own counter-based stream, keyed by the master seed and the
trial index, so a trial can be reproduced alone and in any order.
"""

from math import sqrt

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from qstate import HermitianOperator, PureState


class SeedSpec(object):
    """A (master seed, trial index) pair naming one independent random stream."""

    def __init__(self, master_seed, trial_index=0):
        if not 0 <= master_seed < 2**64:
            raise ValueError(f'Invalid seed: master seed must fit in 64 bits, got {master_seed}')
        if trial_index < 0:
            raise ValueError(f'Invalid seed: trial index must be >= 0, got {trial_index}')
        self._master_seed = int(master_seed)
        self._trial_index = int(trial_index)

    @property
    def master_seed(self):
        return self._master_seed

    @property
    def trial_index(self):
        return self._trial_index

    def trial(self, index):
        return SeedSpec(self._master_seed, index)

    def __repr__(self):
        return f'SeedSpec({self._master_seed}, {self._trial_index})'


def trial_generator(seed):
    """The Philox stream for one trial; identical for identical SeedSpecs."""
    sequence = SeedSequence(seed.master_seed, spawn_key=(seed.trial_index,))
    return Generator(Philox(sequence))


class GaussEnsembleParams(object):
    """Dimension, entry variance and symmetry class of a Gaussian ensemble.

    Diagonal entries have variance sigma2. For beta 2 the off-diagonal real
    and imaginary parts have variance sigma2/2 each; for beta 1 the real
    off-diagonal entries have variance sigma2. Either way E|A_ij|^2 = sigma2,
    so <tr A^2> = N^2 sigma2 and the semicircle edge is 2 sigma sqrt(N).
    """

    def __init__(self, dim, sigma2, beta_class=2):
        if dim < 1:
            raise ValueError(f'Invalid ensemble: dim must be >= 1, got {dim}')
        if not sigma2 > 0:
            raise ValueError(f'Invalid ensemble: sigma2 must be > 0, got {sigma2}')
        if beta_class not in (1, 2):
            raise ValueError(f'Invalid ensemble: beta must be 1 or 2, got {beta_class}')
        self._dim = int(dim)
        self._sigma2 = float(sigma2)
        self._beta_class = beta_class

    @classmethod
    def shifted_model(cls, dims, beta_class=2):
        """Parameters of A in B = A + I/N, with sigma2 = 1/(N^2 N3) so that <tr A^2> = 1/N3."""
        return cls(dims.n, 1.0 / (dims.n**2 * dims.n3), beta_class)

    @property
    def dim(self):
        return self._dim

    @property
    def sigma2(self):
        return self._sigma2

    @property
    def beta_class(self):
        return self._beta_class

    @property
    def edge(self):
        return 2.0 * sqrt(self._sigma2 * self._dim)


def sample_haar_state(dims, field, seed):
    """Uniform state on the unit sphere of C^M (or R^M), from normalized iid normals."""
    rng = trial_generator(seed)
    if field == 'complex':
        amplitudes = rng.standard_normal(dims.m) + 1j * rng.standard_normal(dims.m)
    elif field == 'real':
        amplitudes = rng.standard_normal(dims.m)
    else:
        raise ValueError(f'Invalid field: must be "complex" or "real", got "{field}"')
    amplitudes /= np.linalg.norm(amplitudes)
    return PureState(dims, amplitudes, field)


def _gauss_entries(params, rng):
    n = params.dim
    sigma = sqrt(params.sigma2)
    diagonal = rng.normal(scale=sigma, size=n)
    if params.beta_class == 2:
        half = sqrt(params.sigma2 / 2)
        upper = rng.normal(scale=half, size=(n, n)) + 1j * rng.normal(scale=half, size=(n, n))
    else:
        upper = rng.normal(scale=sigma, size=(n, n))
    upper = np.triu(upper, k=1)
    entries = upper + upper.conj().T
    entries[np.diag_indices(n)] = diagonal
    return entries


def sample_gauss(params, seed):
    """A GUE (beta 2) or GOE (beta 1) sample with the variances of `params`."""
    return HermitianOperator(_gauss_entries(params, trial_generator(seed)))


def sample_shifted_model(dims, beta_class, seed):
    """B = A + I/N with <tr A^2> = 1/N3, so that <tr B> = 1."""
    params = GaussEnsembleParams.shifted_model(dims, beta_class)
    entries = _gauss_entries(params, trial_generator(seed))
    entries[np.diag_indices(params.dim)] += 1.0 / params.dim
    return HermitianOperator(entries)


def sample_gue_max(dim, beta_class, seed):
    """Largest eigenvalue of a unit-variance Gaussian sample, scaled as (lambda_max - 2 sqrt(N)) N^(1/6)."""
    params = GaussEnsembleParams(dim, 1.0, beta_class)
    entries = _gauss_entries(params, trial_generator(seed))
    largest = np.linalg.eigvalsh(entries)[-1]
    return float((largest - params.edge) * dim**(1 / 6))
