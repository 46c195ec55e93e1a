import multiprocessing
import sys
import traceback
from math import log, pi, sqrt

from scipy.stats import kstest

import harness
import jsonc
from ensembles import SeedSpec, sample_gue_max, sample_haar_state
from harness import ExperimentConfig
from laws import avg_log_negativity_model, avg_third_moment_pt
from mathhelper import binomial_error, mean_and_error
from measures import kempe_invariant
from qstate import PartitionDims
from rotor import RotorParams
from tracywidom import TWTable

with open('config.json') as fp:
    CONFIG = jsonc.load(fp)

CLIENT = None


def ensemble(dims, field='complex', trials=10000, seed=0, tag='ensemble'):
    config = ExperimentConfig.from_config(CONFIG, dims, trials=trials, field=field, seed=seed, tag=tag)
    summary, _ = harness.run_ensemble(config, CLIENT)
    return summary


def within(mean, error, expected, sigmas=3.0):
    assert abs(mean - expected) <= sigmas * error, f'{mean} +- {error} vs {expected}'


def test_third_moments():
    for dims, field in ((PartitionDims(2, 2, 2), 'complex'), (PartitionDims(3, 3, 3), 'complex'),
                        (PartitionDims(2, 2, 2), 'real')):
        values = [kempe_invariant(sample_haar_state(dims, field, SeedSpec(1, t))) for t in range(100000)]
        within(*mean_and_error(values), float(avg_third_moment_pt(dims, field)))


def test_npt_fractions():
    trials = 100000
    for qubits, field, expected in (((2, 2, 10), 'real', 0.0782), ((2, 2, 10), 'complex', 0.0140),
                                    ((1, 1, 5), 'real', 0.2539)):
        summary = ensemble(PartitionDims.from_qubits(*qubits), field, trials=trials, seed=2)
        # the reference fraction carries a binomial error of its own
        error = sqrt(summary.npt_error**2 + binomial_error(expected, trials)**2)
        assert abs(summary.npt_fraction - expected) <= 3 * error, (qubits, field, summary.npt_fraction, error)
    assert ensemble(PartitionDims.from_qubits(1, 1, 7), 'real', trials=trials, seed=2).npt_fraction <= 0.001


def test_semicircle():
    summary = ensemble(PartitionDims.from_qubits(3, 3, 14), trials=250, seed=3)
    assert summary.pt_misfit < 0.05, summary.pt_misfit


def test_log_negativity():
    # 4096 x 4096 spectra at L1 + L2 = 12, so only a few trials
    for l1, trials in ((5, 20), (6, 3)):
        dims = PartitionDims.from_qubits(l1, l1, 16)
        summary = ensemble(dims, trials=trials, seed=4)
        expected, _ = avg_log_negativity_model(dims)
        assert abs(summary.mean('log_negativity') / expected - 1) < 0.05, (l1, summary.mean('log_negativity'))

    kappa2 = (8 / (3 * pi))**2
    summary = ensemble(PartitionDims(64, 64, 1), trials=50, seed=4)
    assert abs(summary.mean('log_negativity') / log(kappa2 * 64) - 1) < 0.05
    summary = ensemble(PartitionDims(32, 32, 1), trials=200, seed=4)
    assert abs(summary.mean('negativity') / ((kappa2 * 32 - 1) / 2) - 1) < 0.02


def test_tracy_widom():
    tw = TWTable.from_config(CONFIG)
    assert 0.025 <= 1 - tw.cdf(0.0) <= 0.035
    assert 0.16 <= 1 - tw.with_beta(1).cdf(0.0) <= 0.18
    maxima = [sample_gue_max(200, 2, SeedSpec(5, t)) for t in range(5000)]
    distance = kstest(maxima, tw.cdf).statistic
    assert distance < 0.02, distance


def test_critical():
    tw = TWTable.from_config(CONFIG)
    dims = PartitionDims.from_qubits(3, 3, 14)
    for field, low, high in (('complex', 5e-6, 1.1e-5), ('real', 6e-5, 9.5e-5)):
        config = ExperimentConfig.from_config(CONFIG, dims, field=field, seed=6, tag='critical')
        report, _ = harness.run_critical(config, tw, CLIENT, CONFIG['shift.max'], CONFIG['shift.step'],
                                         CONFIG['shift.min_samples'])
        assert low <= report['avg_logneg_observed'] <= high, (field, report['avg_logneg_observed'])
        assert report['multi_negative_fraction'] < 0.01
        if field == 'real':
            assert 0.105 <= report['f_npt_predicted'] <= 0.125, report['f_npt_predicted']


def test_skewness():
    for l1, expected in ((4, 0.0078), (3, 0.0165), (2, 0.0628), (1, 0.2509)):
        summary = ensemble(PartitionDims.from_qubits(l1, 8 - l1, 16), trials=1000, seed=7)
        within(summary.mean('skewness'), summary.error('skewness'), expected)


def rotor(parameter_set, dims, max_dim=4096):
    config = ExperimentConfig.from_config(CONFIG, dims, tag='rotor')
    summary, _ = harness.run_rotor(RotorParams.from_set(parameter_set, dims.as_tuple()), config, CLIENT, max_dim)
    return summary


def test_rotor():
    dims = PartitionDims(8, 8, 32)
    random = ensemble(dims, 'real', seed=8).mean('log_negativity')
    for parameter_set, expected in ((1, 0.3567), (2, 0.3558)):
        value = rotor(parameter_set, dims).mean('log_negativity')
        assert abs(value - expected) < 0.02, (parameter_set, value)
        assert value > random, (parameter_set, value, random)

    value = rotor(2, PartitionDims(10, 10, 10)).mean('log_negativity')
    assert abs(value - 1.0035) < 0.02, value

    dims = PartitionDims(4, 4, 64)
    summary = rotor(1, dims)
    random = ensemble(dims, 'real', seed=8)
    assert 0.25 <= summary.npt_fraction <= 0.33, summary.npt_fraction
    assert summary.npt_fraction > random.npt_fraction


def test_rotor_semicircle():
    # 5120 x 5120 Floquet operator at N3 = 80
    misfits = [rotor(1, PartitionDims(8, 8, n3), max_dim=5120).pt_misfit for n3 in (16, 32, 80)]
    assert misfits[0] > misfits[1] > misfits[2], misfits


TESTS = [
    test_third_moments,
    test_npt_fractions,
    test_semicircle,
    test_log_negativity,
    test_tracy_widom,
    test_critical,
    test_skewness,
    test_rotor,
    test_rotor_semicircle,
]


def main():
    global CLIENT
    CLIENT = harness.make_client(multiprocessing.cpu_count())
    failed = 0
    try:
        for test in TESTS:
            try:
                test()
            except Exception:
                failed += 1
                print(f'FAIL {test.__name__}', file=sys.stderr)
                traceback.print_exc()
            else:
                print(f'ok   {test.__name__}')
    finally:
        if CLIENT is not None:
            CLIENT.close()
    sys.exit(1 if failed else 0)


if __name__ == '__main__':
    main()
