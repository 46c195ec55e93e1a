# -*- coding: utf-8 -*-

"""
ptlab.measures
~~~~~~~~~~~~~~

This module computes entanglement and spectral statistics of single samples:
negativity, log-negativity (natural log), purity, von Neumann entropy, moments
of the partial-transposed spectrum, the Kempe invariant and the sample
skewness. MeasureReport bundles them into the row written for every trial.
"""

from math import log, nan, sqrt

import numpy as np

from mathhelper import fmt
from qstate import (NPT_THRESHOLD, HermitianOperator, SpectrumSample,
                    hermitian_spectrum, partial_trace, partial_transpose,
                    reduced_pair, schmidt_coefficients, schmidt_pt_spectrum)

TRACE_TOLERANCE = 1e-8
ENTROPY_TOLERANCE = 1e-8


def _check_trace(spec, tolerance=TRACE_TOLERANCE):
    if abs(spec.trace - 1.0) > tolerance:
        raise ValueError(f'Invalid spectrum: trace is {spec.trace!r}, expected 1')


def _total_modulus(spec, tolerance):
    _check_trace(spec, tolerance)
    return float(np.abs(spec.values).sum())


def negativity(spec, tolerance=TRACE_TOLERANCE):
    """(sum |mu_i| - 1)/2, which is zero when no eigenvalue is negative."""
    return max((_total_modulus(spec, tolerance) - 1.0) / 2.0, 0.0)


def log_negativity(spec, tolerance=TRACE_TOLERANCE):
    """ln sum |mu_i|, zero for PPT spectra."""
    total = _total_modulus(spec, tolerance)
    return log(total) if total > 1.0 else 0.0


def moment(rho_or_spec, m):
    """tr(rho^m), from the eigenvalues when a spectrum is given and by matrix powers otherwise."""
    if int(m) != m or m < 1:
        raise ValueError(f'Invalid moment order: {m}')
    if isinstance(rho_or_spec, SpectrumSample):
        return float(np.sum(rho_or_spec.values**m))
    entries = rho_or_spec.entries if isinstance(rho_or_spec, HermitianOperator) else np.asarray(rho_or_spec)
    return float(np.trace(np.linalg.matrix_power(entries, int(m))).real)


def negative_count(spec, threshold=NPT_THRESHOLD):
    return int(np.count_nonzero(spec.values < -threshold))


def is_npt(spec, threshold=NPT_THRESHOLD):
    return spec.min_value < -threshold


def sample_skewness(spec):
    """Normalized third central moment with the population standard deviation; nan for a flat spectrum."""
    values = spec.values
    if values.size < 3:
        raise ValueError(f'Invalid spectrum: skewness needs >= 3 eigenvalues, got {values.size}')
    centered = values - values.mean()
    sigma = sqrt(float(np.mean(centered**2)))
    if sigma == 0.0:
        return nan
    return float(np.mean((centered / sigma)**3))


def purity(spec):
    return float(np.sum(spec.values**2))


def von_neumann_entropy(spec, tolerance=ENTROPY_TOLERANCE):
    """-sum lambda ln lambda with 0 ln 0 = 0; eigenvalues in (-tolerance, 0) count as 0."""
    if spec.min_value < -tolerance:
        raise ValueError(f'Invalid spectrum: entropy needs a nonnegative spectrum, min is {spec.min_value!r}')
    values = spec.values[spec.values > 0]
    return float(-np.sum(values * np.log(values)))


def pt_spectrum_of_pair(state, keep):
    """Spectrum of the reduced pair `keep`, partially transposed on its second factor."""
    rho, dims = reduced_pair(state, keep)
    return hermitian_spectrum(partial_transpose(rho, dims))


def pt_moment_pairings(state, m):
    """tr(rho_12^T2)^m, tr(rho_23^T3)^m and tr(rho_31^T1)^m for one tripartite state."""
    return tuple(moment(pt_spectrum_of_pair(state, keep), m) for keep in ((1, 2), (2, 3), (3, 1)))


def kempe_pairings(state):
    return pt_moment_pairings(state, 3)


def kempe_invariant(state):
    """tr(rho_12^T2)^3, which is the same for all three pairings of a pure tripartite state."""
    return moment(pt_spectrum_of_pair(state, (1, 2)), 3)


def state_spectra(state):
    """Spectra of rho_12 and rho_12^T2.

    Without an environment (N3 = 1) the PT spectrum comes from the Schmidt
    coefficients and rho_12 is the pure projector.
    """
    dims = state.dims
    if dims.n3 == 1:
        lambdas = schmidt_coefficients(state)
        pure = np.zeros(dims.n)
        pure[-1] = 1.0
        return SpectrumSample(pure), schmidt_pt_spectrum(lambdas / lambdas.sum(), dims.n1, dims.n2)
    rho = partial_trace(state)
    return hermitian_spectrum(rho), hermitian_spectrum(partial_transpose(rho, dims))


class MeasureReport(object):
    """All per-sample statistics of one state, in the fixed output column order."""

    COLUMNS = ('trial', 'N1', 'N2', 'N3', 'field', 'purity', 'entropy', 'negativity',
               'log_negativity', 'mu_min', 'is_npt', 'skewness', 'm3_pt')

    def __init__(self, trial, dims, field, rho_spec, pt_spec, npt_threshold=NPT_THRESHOLD,
                 trace_tolerance=TRACE_TOLERANCE, entropy_tolerance=ENTROPY_TOLERANCE):
        self._trial = trial
        self._dims = dims
        self._field = field
        self._purity = purity(rho_spec)
        self._entropy = von_neumann_entropy(rho_spec, entropy_tolerance)
        self._negativity = negativity(pt_spec, trace_tolerance)
        self._log_negativity = log_negativity(pt_spec, trace_tolerance)
        self._moments = {m: moment(pt_spec, m) for m in (1, 2, 3, 4)}
        self._mu_min = pt_spec.min_value
        self._is_npt = is_npt(pt_spec, npt_threshold)
        self._negative_count = negative_count(pt_spec, npt_threshold)
        self._skewness = sample_skewness(pt_spec) if len(pt_spec) >= 3 else nan

    @property
    def trial(self):
        return self._trial

    @property
    def dims(self):
        return self._dims

    @property
    def field(self):
        return self._field

    @property
    def purity(self):
        return self._purity

    @property
    def entropy(self):
        return self._entropy

    @property
    def negativity(self):
        return self._negativity

    @property
    def log_negativity(self):
        return self._log_negativity

    @property
    def moments(self):
        return dict(self._moments)

    @property
    def mu_min(self):
        return self._mu_min

    @property
    def is_npt(self):
        return self._is_npt

    @property
    def negative_count(self):
        return self._negative_count

    @property
    def skewness(self):
        return self._skewness

    @property
    def m3_pt(self):
        return self._moments[3]

    def to_row(self):
        n1, n2, n3 = self._dims.as_tuple()
        return [self._trial, n1, n2, n3, self._field, self._purity, self._entropy, self._negativity,
                self._log_negativity, self._mu_min, self._is_npt, self._skewness, self.m3_pt]

    def to_dict(self):
        return dict(zip(self.COLUMNS, self.to_row()))

    def to_csv_line(self):
        return ','.join(fmt(value) for value in self.to_row())


def measure_report(state, trial=0, **thresholds):
    """Runs partial trace, partial transpose, both spectra and every measure on one state."""
    rho_spec, pt_spec = state_spectra(state)
    return MeasureReport(trial, state.dims, state.field, rho_spec, pt_spec, **thresholds)
