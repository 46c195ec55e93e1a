import sys
import traceback

import numpy as np
from numpy.testing import assert_allclose
from scipy.integrate import trapezoid

import jsonc
from qstate import PartitionDims
from tracywidom import (TWTable, avg_logneg_critical, fit_shift, ks_distance, npt_fraction, scale_min_eigenvalue,
                        solve_painleve2)


def table(beta=2):
    with open('config.json') as fp:
        return TWTable.from_config(jsonc.load(fp), beta)


def test_table_shape():
    tw = table()
    for values in (tw.F2, tw.F1):
        assert np.all(values >= 0.0) and np.all(values <= 1.0)
        # descending grid, so a CDF never increases along the table
        assert np.all(np.diff(values) <= 1e-12)
        assert values[0] > 1 - 1e-9 and values[-1] < 1e-9
    assert np.all(tw.f2 >= -1e-12) and np.all(tw.f1 >= -1e-12)
    assert tw.s_grid[0] == 8.0 and abs(tw.s_grid[-1] + 10.0) < 1e-12


def test_tail_masses():
    tw2 = table(2)
    tw1 = table(1)
    assert 0.025 <= 1 - tw2.cdf(0.0) <= 0.035
    assert 0.16 <= 1 - tw1.cdf(0.0) <= 0.18
    assert abs(npt_fraction(tw2, 0.0) - (1 - tw2.cdf(0.0))) < 1e-15
    assert npt_fraction(tw2, 7.9) < 1e-6
    assert npt_fraction(tw2, 0.5) < npt_fraction(tw2, 0.0)
    try:
        npt_fraction(tw2, -0.1)
    except ValueError:
        pass
    else:
        raise AssertionError('negative shift accepted')


def test_densities():
    for beta, mean_expected, var_expected in ((2, -1.7711, 0.8132), (1, -1.2065, 1.6078)):
        tw = table(beta)
        grid = tw.s_grid[::-1]
        assert abs(trapezoid(tw.pdf(grid), grid) - 1.0) < 1e-4
        mean, variance = tw.moments()
        assert abs(mean - mean_expected) < 2e-3, (beta, mean)
        assert abs(variance - var_expected) < 2e-3, (beta, variance)
        # the density is the derivative of the CDF
        derivative = np.gradient(tw.cdf(grid), grid)
        assert np.max(np.abs(derivative - tw.pdf(grid))) < 1e-3


def test_cached_solution():
    assert solve_painleve2() is solve_painleve2()
    tw = table()
    assert tw.with_beta(1).beta_class == 1 and tw.beta_class == 2
    try:
        solve_painleve2(8.0, -10.0, 0.01, 1e-10, 9.0)
    except ValueError:
        pass
    else:
        raise AssertionError('inverted grid accepted')


def test_tail_matching():
    tw = table()
    s = tw.s_grid
    expected = np.sqrt(-s / 2) * (1 + 1 / (8 * s**3) - 73 / (128 * s**6))
    # q meets the asymptote where the integration hands over
    switch = int(np.argmin(np.abs(s + 6.0)))
    assert abs(tw.q[switch] - expected[switch]) < 1e-5, tw.q[switch] - expected[switch]
    step = tw.q[switch + 1] - tw.q[switch]
    assert abs(step - (expected[switch + 1] - expected[switch])) < 2e-5, step
    beyond = s < -6.0
    assert_allclose(tw.q[beyond], expected[beyond], rtol=1e-15)
    assert np.all(np.diff(tw.q[beyond]) > 0)


def test_scaling():
    dims = PartitionDims(4, 4, 64)
    assert abs(scale_min_eigenvalue(0.0, dims)) < 1e-12
    assert abs(scale_min_eigenvalue(-0.001, dims) - 2 * 16**(5 / 3) * -0.001) < 1e-12
    signs = np.sign(scale_min_eigenvalue(np.array([-1e-3, 2e-3]), dims))
    assert list(signs) == [-1.0, 1.0]


def test_logneg_critical():
    tw = table()
    small = avg_logneg_critical(PartitionDims(4, 4, 64), tw, 0.3)
    large = avg_logneg_critical(PartitionDims(8, 4, 128), tw, 0.3)
    assert abs(large / small - 2**(-5 / 3)) < 1e-12
    assert avg_logneg_critical(PartitionDims(4, 4, 64), tw, 1.0) < small
    try:
        avg_logneg_critical(PartitionDims(4, 4, 32), tw, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError('non-critical dims accepted')


def test_fit_shift():
    tw = table()
    rng = np.random.default_rng(17)
    minimum = -tw.sample(rng, 5000)
    assert ks_distance(minimum, tw, 0.0) < 0.03
    fit = fit_shift(minimum, tw)
    assert fit.shift < 0.1, fit.shift
    assert fit.ks < 0.03
    fit = fit_shift(minimum + 0.5, tw)
    assert abs(fit.shift - 0.5) < 0.1, fit.shift
    # a minimum beyond the search range is reported unshifted
    fit = fit_shift(minimum + 5.0, tw, shift_max=3.0)
    assert fit.shift == 0.0
    try:
        fit_shift(minimum[:100], tw)
    except ValueError:
        pass
    else:
        raise AssertionError('too few samples accepted')


TESTS = [
    test_table_shape,
    test_tail_masses,
    test_densities,
    test_cached_solution,
    test_tail_matching,
    test_scaling,
    test_logneg_critical,
    test_fit_shift,
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
