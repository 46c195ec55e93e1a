import sys
import traceback
from fractions import Fraction
from math import asin, log, pi, sqrt

import numpy as np
from numpy.testing import assert_allclose
from scipy.integrate import quad

from ensembles import SeedSpec, sample_haar_state
from laws import (CRITICAL, NPT, PPT, ModelGeometry, avg_entropy_page, avg_log_negativity_asymptote,
                  avg_log_negativity_model, avg_measures_pure, avg_purity, avg_third_moment_pt,
                  avg_third_moment_rho, closed_form_constants, density_curve, exchange_count, exchange_count_dims,
                  kappa, kappa_hypergeometric, model_gap, mp_density, mp_support, semicircle_scaled,
                  skewness_analytic, third_moment_difference, tn_sequences, wstate_analytics)
from measures import pt_spectrum_of_pair
from qstate import PartitionDims, w_state


def test_density_curves():
    for law, dims in (('mp', PartitionDims(2, 2, 8)), ('mp', PartitionDims(8, 8, 256)),
                      ('semicircle', PartitionDims(2, 2, 64)), ('scaled-semicircle', PartitionDims(4, 4, 64)),
                      ('scaled-semicircle', PartitionDims(8, 8, 16))):
        curve = density_curve(law, dims)
        assert abs(curve.integral() - 1.0) < 1e-6, (law, dims, curve.integral())
        assert np.all(curve.values >= 0)
    try:
        density_curve('wigner', PartitionDims(2, 2, 4))
    except ValueError:
        pass
    else:
        raise AssertionError('unknown law accepted')


def test_mp():
    dims = PartitionDims(8, 8, 256)
    lo, hi = mp_support(dims)
    mean, _ = quad(lambda lam: lam * float(mp_density(dims, lam)), lo, hi, limit=200)
    assert abs(mean - 1 / dims.n) < 1e-6
    assert mp_density(dims, hi * 1.01) == 0.0
    assert mp_support(PartitionDims(2, 2, 4))[0] == 0.0
    try:
        mp_support(PartitionDims(4, 4, 4))
    except ValueError:
        pass
    else:
        raise AssertionError('Q < 1 accepted')


def test_semicircle():
    for dims, support in ((PartitionDims(4, 4, 16), (-1.0, 3.0)), (PartitionDims(4, 4, 64), (0.0, 2.0))):
        r = dims.r_tilde
        assert (1 - r, 1 + r) == support
        mass, _ = quad(lambda x: float(semicircle_scaled(dims, x)), *support)
        mean, _ = quad(lambda x: x * float(semicircle_scaled(dims, x)), *support)
        assert abs(mass - 1.0) < 1e-8 and abs(mean - 1.0) < 1e-8
    assert semicircle_scaled(PartitionDims(4, 4, 64), 0.0) == 0.0


def test_geometry():
    assert ModelGeometry(PartitionDims(4, 4, 64)).regime == CRITICAL
    assert ModelGeometry(PartitionDims(2, 4, 64)).regime == PPT
    assert ModelGeometry(PartitionDims(8, 8, 16)).regime == NPT
    geometry = ModelGeometry(PartitionDims(4, 4, 64))
    assert abs(geometry.r_tilde - 1.0) < 1e-15
    assert abs(geometry.lambda_minus - 0.25 / 16) < 1e-15
    assert abs(geometry.lambda_plus - 2.25 / 16) < 1e-15


def test_exchange_count():
    assert exchange_count(8, 0) == 0
    assert exchange_count(8, 4) == 61440
    assert max(range(5), key=lambda k: exchange_count(8, k)) == 4
    assert exchange_count_dims(2**4, 2**4) == exchange_count(8, 4)
    try:
        exchange_count(8, 5)
    except ValueError:
        pass
    else:
        raise AssertionError('k > M/2 accepted')


def test_exact_averages():
    assert avg_third_moment_pt(PartitionDims(2, 2, 2)) == Fraction(2, 5)
    assert avg_third_moment_pt(PartitionDims(3, 3, 3)) == Fraction(27, 203)
    assert avg_third_moment_rho(PartitionDims(2, 2, 2)) == Fraction(1, 2)
    for dims in (PartitionDims(2, 3, 5), PartitionDims(4, 2, 7)):
        for field in ('complex', 'real'):
            values = {avg_third_moment_pt(dims.permuted(order), field)
                      for order in ((1, 2, 3), (2, 3, 1), (3, 1, 2), (2, 1, 3))}
            assert len(values) == 1
        assert avg_third_moment_rho(dims) - avg_third_moment_pt(dims) == third_moment_difference(dims)
        assert third_moment_difference(dims) >= 0
    assert avg_purity(2, 4) == Fraction(2, 3)
    assert avg_purity(4, 4) == Fraction(8, 17)
    assert avg_purity(2, 2, 'real') == Fraction(5, 6)
    assert abs(avg_entropy_page(2, 2) - 1 / 3) < 1e-15
    assert abs(avg_entropy_page(2, 4) - 0.50952) < 1e-5


def test_model_gap():
    dims = PartitionDims(16, 16, 16)
    approx = (1 / 16**2) * (2 / 16**2)
    assert abs(float(model_gap(dims)) / approx - 1.0) < 0.05
    assert model_gap(PartitionDims(1, 1, 8)) < model_gap(PartitionDims(2, 2, 8))


def test_skewness():
    assert abs(skewness_analytic(PartitionDims.from_qubits(4, 4, 16)) - 2**-7) < 1e-15
    assert abs(skewness_analytic(PartitionDims.from_qubits(2, 6, 16)) - 2**-8 * (2**4 + 2**-4)) < 1e-15
    assert abs(skewness_analytic(PartitionDims.from_qubits(3, 5, 16)) - 0.0165) < 1e-3
    assert abs(skewness_analytic(PartitionDims.from_qubits(1, 7, 16)) - 0.2509) < 1e-3
    values = [skewness_analytic(PartitionDims.from_qubits(k, 8 - k, 16)) for k in range(1, 8)]
    assert int(np.argmin(values)) == 3
    assert skewness_analytic(PartitionDims(4, 4, 4), 'real') > skewness_analytic(PartitionDims(4, 4, 4))


def test_log_negativity_model():
    assert avg_log_negativity_model(PartitionDims(4, 4, 64)) == (0.0, CRITICAL)
    assert avg_log_negativity_model(PartitionDims(2, 2, 64)) == (0.0, PPT)
    value, regime = avg_log_negativity_model(PartitionDims(8, 8, 64))
    assert regime == NPT
    assert abs(value - log(1 / 3 + 3 * sqrt(3) / (2 * pi))) < 1e-14
    assert abs(value - 0.1487) < 1e-4
    # approaches the asymptote deep in the NPT regime
    deep = PartitionDims(64, 64, 1)
    assert abs(avg_log_negativity_model(deep)[0] - avg_log_negativity_asymptote(deep)) < 1e-3
    r = 1.0 + 1e-9
    bracket = 2 / pi * asin(1 / r) + 2 / (3 * pi * r) * sqrt(1 - 1 / r**2) * (1 + 2 * r**2)
    assert abs(bracket - 1.0) < 1e-3


def test_kappa():
    assert abs(kappa(1.0) - 8 / (3 * pi)) < 1e-10
    assert abs(kappa(1.0)**2 - 0.7205) < 1e-4
    for q in (2.0, 4.0):
        assert abs(kappa(q) - kappa_hypergeometric(q)) < 1e-8, q
    logneg, neg = avg_measures_pure(32, 32)
    assert abs(neg - ((8 / (3 * pi))**2 * 32 - 1) / 2) < 1e-7
    assert abs(logneg - log((8 / (3 * pi))**2 * 32)) < 1e-8
    for bad in (0.5,):
        try:
            kappa(bad)
        except ValueError:
            continue
        raise AssertionError('Q < 1 accepted')


def test_wstate():
    analytics = wstate_analytics(*[1 / sqrt(3)] * 3)
    assert abs(analytics['invariant'] - 2 / 9) < 1e-15
    beta, gamma = sqrt(0.3), sqrt(0.7)
    assert_allclose(wstate_analytics(0.0, beta, gamma)['12'],
                    np.sort([beta**2, gamma**2, beta * gamma, -beta * gamma]), atol=1e-15)
    alpha, beta, gamma = sqrt(3 / 7), sqrt(2 / 7), sqrt(2 / 7)
    analytics = wstate_analytics(alpha, beta, gamma)
    assert_allclose(analytics['13'], np.sort([3 / 7, 2 / 7, (1 + sqrt(7)) / 7, (1 - sqrt(7)) / 7]), atol=1e-15)
    assert_allclose(analytics['12'], np.sort([2 / 7, 2 / 7, 4 / 7, -1 / 7]), atol=1e-15)
    state = w_state(alpha, beta, gamma)
    for key, keep in (('12', (1, 2)), ('13', (1, 3)), ('23', (2, 3))):
        assert_allclose(pt_spectrum_of_pair(state, keep).values, analytics[key], atol=1e-12)


def test_sequences():
    t, tp = tn_sequences(20)
    assert t[1:7] == [5, 25, 71, 265, 875, 3097]
    assert tp[1:7] == [5, 21, 71, 273, 1055, 4161]
    assert t[1] == tp[1] and t[3] == tp[3]
    assert all(t[n] < tp[n] for n in range(4, 21))
    for n in range(21):
        assert t[n] == round(3**n + (1 - sqrt(7))**n + (1 + sqrt(7))**n)
        assert tp[n] == 2**n + 4**n + (-1)**n


def test_constants():
    constants = closed_form_constants(PartitionDims(8, 8, 64))
    assert constants['regime'] == NPT
    assert abs(constants['R_tilde'] - 2.0) < 1e-15
    assert 'avg_log_negativity_asymptote' in constants and 'avg_entropy' in constants
    assert 'avg_entropy' not in closed_form_constants(PartitionDims(2, 2, 4), 'real')


def test_purity_matches_formula():
    dims = PartitionDims(2, 2, 2)
    values = []
    for trial in range(10000):
        amplitudes = sample_haar_state(dims, 'real', SeedSpec(14, trial)).matrix
        rho = amplitudes @ amplitudes.T
        values.append(float(np.sum(rho * rho)))
    mean = np.mean(values)
    error = np.std(values, ddof=1) / sqrt(len(values))
    assert abs(mean - float(avg_purity(4, 2, 'real'))) < 3 * error


TESTS = [
    test_density_curves,
    test_mp,
    test_semicircle,
    test_geometry,
    test_exchange_count,
    test_exact_averages,
    test_model_gap,
    test_skewness,
    test_log_negativity_model,
    test_kappa,
    test_wstate,
    test_sequences,
    test_constants,
    test_purity_matches_formula,
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
