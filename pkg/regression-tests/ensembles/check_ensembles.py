import sys
import traceback

import numpy as np
from numpy.testing import assert_array_equal
from scipy.stats import beta, kstest

from ensembles import (GaussEnsembleParams, SeedSpec, sample_gauss, sample_gue_max, sample_haar_state,
                       sample_shifted_model, trial_generator)
from harness import make_histogram
from laws import model_third_moment, semicircle_scaled
from mathhelper import mean_and_error
from measures import moment
from qstate import PartitionDims, hermitian_spectrum


def within(values, expected, sigmas=3.0):
    mean, error = mean_and_error(values)
    assert abs(mean - expected) <= sigmas * error, f'{mean} +- {error} vs {expected}'


def test_seeds():
    dims = PartitionDims(2, 3, 4)
    first = sample_haar_state(dims, 'complex', SeedSpec(42, 7))
    again = sample_haar_state(dims, 'complex', SeedSpec(42).trial(7))
    other = sample_haar_state(dims, 'complex', SeedSpec(42, 8))
    assert_array_equal(first.amplitudes, again.amplitudes)
    assert np.max(np.abs(first.amplitudes - other.amplitudes)) > 1e-3
    assert_array_equal(trial_generator(SeedSpec(3, 5)).random(4), trial_generator(SeedSpec(3).trial(5)).random(4))
    assert trial_generator(SeedSpec(3, 5)).random() != trial_generator(SeedSpec(4, 5)).random()
    real = sample_haar_state(dims, 'real', SeedSpec(42, 7))
    assert real.amplitudes.dtype == np.float64
    assert abs(np.linalg.norm(real.amplitudes) - 1.0) < 1e-12
    for bad in (-1, 2**64):
        try:
            SeedSpec(bad)
        except ValueError:
            continue
        raise AssertionError(f'seed {bad} accepted')


def test_streams_uncorrelated():
    streams = np.array([trial_generator(SeedSpec(20, trial)).standard_normal(10000) for trial in range(10)])
    correlations = np.corrcoef(streams)[np.triu_indices(10, k=1)]
    assert np.max(np.abs(correlations)) < 0.05, np.max(np.abs(correlations))
    lagged = np.corrcoef(streams[0, :-1], streams[0, 1:])[0, 1]
    assert abs(lagged) < 0.05, lagged


def test_haar_overlaps():
    dims = PartitionDims(2, 3, 4)
    m = dims.m
    for field, law in (('complex', beta(1, m - 1)), ('real', beta(0.5, (m - 1) / 2))):
        fixed = sample_haar_state(dims, field, SeedSpec(30))
        overlaps = [abs(sample_haar_state(dims, field, SeedSpec(31, t)).overlap(fixed))**2 for t in range(10000)]
        distance = kstest(overlaps, law.cdf).statistic
        assert distance < 0.02, (field, distance)


def test_semicircle_of_gue():
    params = GaussEnsembleParams(512, 1 / 512, 2)
    pooled = []
    for trial in range(10):
        values = hermitian_spectrum(sample_gauss(params, SeedSpec(8, trial))).values
        assert -2.2 < values[0] and values[-1] < 2.2
        pooled.append(values + 1.0)
    histogram = make_histogram(np.concatenate(pooled), 40, (-1.0, 3.0))
    # R~ = 2 puts the scaled semicircle on (-1, 3), the unit semicircle shifted by one
    misfit = histogram.misfit(lambda x: semicircle_scaled(PartitionDims(2, 2, 4), x))
    assert misfit < 0.05, misfit


def test_goe_variances():
    params = GaussEnsembleParams(200, 1.0, 1)
    entries = sample_gauss(params, SeedSpec(10)).entries
    assert entries.dtype == np.float64
    off = entries[np.triu_indices(200, k=1)]
    assert abs(off.var() - 1.0) < 0.05
    assert abs(np.diag(entries).var() - 1.0) < 0.3


def test_shifted_model_moments():
    dims = PartitionDims(4, 4, 64)
    second = []
    third = []
    for trial in range(20000):
        spec = hermitian_spectrum(sample_shifted_model(dims, 2, SeedSpec(12, trial)))
        second.append(moment(spec, 2))
        third.append(moment(spec, 3))
    within(second, 1 / 16 + 1 / 64)
    within(third, float(model_third_moment(dims)))


def test_shifted_model_semicircle():
    dims = PartitionDims(8, 8, 128)
    r = dims.r_tilde
    # 1563 samples of 64 eigenvalues, about 10^5 in all
    pooled = [hermitian_spectrum(sample_shifted_model(dims, 2, SeedSpec(16, trial))).scaled for trial in range(1563)]
    histogram = make_histogram(np.concatenate(pooled), 40, (1 - 1.5 * r, 1 + 1.5 * r))
    misfit = histogram.misfit(lambda x: semicircle_scaled(dims, x))
    assert misfit < 0.05, misfit


def test_gue_max_is_scaled():
    values = [sample_gue_max(100, 2, SeedSpec(13, t)) for t in range(200)]
    mean, _ = mean_and_error(values)
    assert -3.0 < mean < -0.5, mean


TESTS = [
    test_seeds,
    test_streams_uncorrelated,
    test_haar_overlaps,
    test_semicircle_of_gue,
    test_goe_variances,
    test_shifted_model_moments,
    test_shifted_model_semicircle,
    test_gue_max_is_scaled,
]


def main():
    failed = 0
    for test in TESTS:
        try:
            test()
        except Exception:
            failed += 1
            print(f'FAIL {test.__name__}', file=sys.stderr)
            traceback.print_exc()
        else:
            print(f'ok   {test.__name__}')
    sys.exit(1 if failed else 0)


if __name__ == '__main__':
    main()
