import sys
import traceback
from math import isnan, log, sqrt

import numpy as np
from numpy.testing import assert_allclose

from ensembles import SeedSpec, sample_haar_state
from mathhelper import mean_and_error
from measures import (MeasureReport, is_npt, kempe_invariant, kempe_pairings, log_negativity, measure_report,
                      moment, negative_count, negativity, purity, sample_skewness, state_spectra,
                      von_neumann_entropy)
from qstate import (PartitionDims, SpectrumSample, bell_state, hermitian_spectrum, partial_trace,
                    partial_transpose, w_state)

BELL_PT = SpectrumSample([0.5, 0.5, 0.5, -0.5])


def within(values, expected, sigmas=3.0):
    mean, error = mean_and_error(values)
    assert abs(mean - expected) <= sigmas * error, f'{mean} +- {error} vs {expected}'


def test_negativity():
    ppt = SpectrumSample([0.1, 0.2, 0.3, 0.4])
    assert negativity(ppt) == 0.0
    assert log_negativity(ppt) == 0.0
    assert abs(negativity(BELL_PT) - 0.5) < 1e-15
    assert abs(log_negativity(BELL_PT) - log(2)) < 1e-15
    assert is_npt(BELL_PT) and negative_count(BELL_PT) == 1
    try:
        negativity(SpectrumSample([0.5, 0.6]))
    except ValueError:
        pass
    else:
        raise AssertionError('trace 1.1 accepted')


def test_moments():
    dims = PartitionDims(2, 3, 4)
    for trial in range(10):
        rho = partial_trace(sample_haar_state(dims, 'complex', SeedSpec(1, trial)))
        pt = partial_transpose(rho, dims)
        spec = hermitian_spectrum(pt)
        assert abs(moment(spec, 1) - 1.0) < 1e-12
        assert abs(moment(spec, 2) - moment(rho, 2)) < 1e-10
        for m in (3, 4):
            assert abs(moment(spec, m) - moment(pt, m)) < 1e-10
    try:
        moment(BELL_PT, 0)
    except ValueError:
        pass
    else:
        raise AssertionError('moment order 0 accepted')


def test_kempe_symmetry():
    dims = PartitionDims(2, 3, 4)
    worst = 0.0
    for trial in range(1000):
        values = kempe_pairings(sample_haar_state(dims, 'complex', SeedSpec(2, trial)))
        worst = max(worst, max(values) - min(values))
    assert worst < 1e-12, worst


def test_wstate_invariant():
    assert abs(kempe_invariant(w_state(*[1 / sqrt(3)] * 3)) - 2 / 9) < 1e-14
    state = w_state(sqrt(3 / 7), sqrt(2 / 7), sqrt(2 / 7))
    eigenvalues = np.array([2, 2, 4, -1]) / 7
    assert abs(kempe_invariant(state) - np.sum(eigenvalues**3)) < 1e-14


def test_skewness():
    assert abs(sample_skewness(SpectrumSample([-0.5, 0.0, 0.5]))) < 1e-15
    assert isnan(sample_skewness(SpectrumSample([0.25] * 4)))
    try:
        sample_skewness(SpectrumSample([0.5, 0.5]))
    except ValueError:
        pass
    else:
        raise AssertionError('two eigenvalues accepted')


def test_purity_and_entropy():
    mixed = SpectrumSample(np.full(8, 1 / 8))
    assert abs(purity(mixed) - 1 / 8) < 1e-15
    assert abs(von_neumann_entropy(mixed) - log(8)) < 1e-14
    assert von_neumann_entropy(SpectrumSample([0.0, 0.0, 1.0])) == 0.0
    try:
        von_neumann_entropy(BELL_PT)
    except ValueError:
        pass
    else:
        raise AssertionError('entropy of a PT spectrum accepted')


def test_report():
    report = measure_report(bell_state(), trial=3)
    assert report.trial == 3
    assert report.is_npt and report.negative_count == 1
    assert abs(report.negativity - 0.5) < 1e-14
    assert abs(report.purity - 1.0) < 1e-14
    assert abs(report.entropy) < 1e-12
    row = report.to_dict()
    assert list(row) == list(MeasureReport.COLUMNS)
    assert row['N3'] == 1 and row['field'] == 'real'
    assert report.to_csv_line().split(',')[10] == '1'


def test_state_spectra_routes():
    dims = PartitionDims(3, 4, 1)
    state = sample_haar_state(dims, 'real', SeedSpec(9))
    rho_spec, pt_spec = state_spectra(state)
    assert_allclose(rho_spec.values, [0.0] * 11 + [1.0])
    matrix = hermitian_spectrum(partial_transpose(partial_trace(state), dims)).values
    assert_allclose(pt_spec.values, matrix, atol=1e-10)


def test_purity_average():
    dims = PartitionDims(2, 2, 4)
    values = [purity(hermitian_spectrum(partial_trace(sample_haar_state(dims, 'complex', SeedSpec(4, t)))))
              for t in range(20000)]
    within(values, 8 / 17)


def test_entropy_averages():
    for dims, expected in ((PartitionDims(2, 1, 2), 1 / 3), (PartitionDims(2, 1, 4), 1 / 5 + 1 / 6 + 1 / 7)):
        values = [von_neumann_entropy(hermitian_spectrum(partial_trace(sample_haar_state(dims, 'complex',
                                                                                         SeedSpec(5, t)))))
                  for t in range(20000)]
        within(values, expected)


def test_third_moment_averages():
    for dims, expected in ((PartitionDims(2, 2, 2), 2 / 5), (PartitionDims(3, 3, 3), 27 / 203)):
        values = [kempe_invariant(sample_haar_state(dims, 'complex', SeedSpec(6, t))) for t in range(20000)]
        within(values, expected)


TESTS = [
    test_negativity,
    test_moments,
    test_kempe_symmetry,
    test_wstate_invariant,
    test_skewness,
    test_purity_and_entropy,
    test_report,
    test_state_spectra_routes,
    test_purity_average,
    test_entropy_averages,
    test_third_moment_averages,
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
