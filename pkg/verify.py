# -*- coding: utf-8 -*-

"""
ptlab.verify
~~~~~~~~~~~~

Runs the invariants of every module at small dimensions and prints one line
per check with its margin. A check is a function returning (passed, detail);
verify_suite runs them all and reports whether every one passed.
"""

import sys
import time
from math import log, sqrt

import numpy as np

import laws
from ensembles import SeedSpec, sample_haar_state
from mathhelper import airy_asymptotic, mean_and_error
from measures import (log_negativity, moment, negativity, pt_moment_pairings,
                      pt_spectrum_of_pair, state_spectra)
from qstate import (PartitionDims, PureState, hermitian_spectrum, partial_trace,
                    partial_transpose, pt_index_map, reduced_pair, schmidt_coefficients,
                    schmidt_pt_spectrum, w_state)
from rotor import RotorParams, coupled_unitary, eigen_decompose, single_map_unitary

CHECKS = []


def check(function):
    CHECKS.append(function)
    return function


def _states(dims, field, seed, count, first=0):
    for trial in range(first, first + count):
        yield sample_haar_state(dims, field, seed.trial(trial))


def _within_se(values, exact, sigmas=3.0):
    mean, error = mean_and_error(values)
    deviation = abs(mean - exact)
    return deviation <= sigmas * error, f'mean {mean:.6g} vs {float(exact):.6g}, {deviation / error if error else 0:.2f} SE'


@check
def index_map(seed, scale):
    worst = 0
    for n1, n2 in ((2, 2), (3, 4), (4, 4), (2, 8)):
        n = n1 * n2
        i, j = np.indices((n, n))
        gi, gj = pt_index_map(i, j, n2)
        back = pt_index_map(gi, gj, n2)
        worst += int(np.count_nonzero(back[0] != i) + np.count_nonzero(back[1] != j))
        worst += int(np.count_nonzero(pt_index_map(np.arange(n), np.arange(n), n2)[0] != np.arange(n)))
        # entries of one row differing in column land on distinct images
        for row in range(n):
            images = set(zip(gi[row].tolist(), gj[row].tolist()))
            worst += n - len(images)
    return worst == 0, f'{worst} violations'


@check
def pt_preserves_trace_and_purity(seed, scale):
    worst = 0.0
    for dims in (PartitionDims(2, 3, 4), PartitionDims(4, 4, 4), PartitionDims(3, 3, 2)):
        for state in _states(dims, 'complex', seed, 50):
            rho = partial_trace(state)
            pt = partial_transpose(rho, dims)
            worst = max(worst, abs(pt.trace - 1), abs(rho.trace - 1),
                        abs(moment(rho, 2) - moment(pt, 2)))
    return worst < 1e-10, f'max deviation {worst:.2e}'


@check
def reduced_density(seed, scale):
    rejected = 0
    worst = 0.0
    for dims in (PartitionDims(2, 3, 4), PartitionDims(3, 3, 1)):
        for state in _states(dims, 'complex', seed, 20):
            worst = max(worst, abs(state.overlap(state) - 1))
            for keep in ((1, 2), (2, 3), (3, 1)):
                try:
                    reduced_pair(state, keep)[0].check_density(1e-10)
                except ValueError:
                    rejected += 1
    return rejected == 0 and worst < 1e-12, f'{rejected} reduced matrices rejected, norm error {worst:.2e}'


@check
def complementary_transpose(seed, scale):
    worst = 0.0
    for dims in (PartitionDims(2, 4, 3), PartitionDims(4, 2, 8)):
        for state in _states(dims, 'complex', seed, 20):
            rho = partial_trace(state)
            second = hermitian_spectrum(partial_transpose(rho, dims, 2)).values
            first = hermitian_spectrum(partial_transpose(rho, dims, 1)).values
            worst = max(worst, float(np.max(np.abs(first - second))))
    return worst < 1e-10, f'max eigenvalue difference {worst:.2e}'


@check
def schmidt_route(seed, scale):
    worst = 0.0
    for n1, n2 in ((2, 2), (2, 4), (3, 5), (4, 4), (8, 8)):
        dims = PartitionDims(n1, n2, 1)
        for state in _states(dims, 'complex', seed, 10):
            rho = partial_trace(state)
            matrix = hermitian_spectrum(partial_transpose(rho, dims)).values
            direct = schmidt_pt_spectrum(schmidt_coefficients(state), n1, n2).values
            worst = max(worst, float(np.max(np.abs(matrix - direct))))
    return worst < 1e-10, f'max eigenvalue difference {worst:.2e}'


@check
def kempe_symmetry(seed, scale):
    worst = 0.0
    for dims in (PartitionDims(2, 2, 2), PartitionDims(2, 3, 4), PartitionDims(4, 4, 4)):
        for field in ('complex', 'real'):
            for state in _states(dims, field, seed, 50):
                values = pt_moment_pairings(state, 3)
                worst = max(worst, max(values) - min(values))
    return worst < 1e-12, f'max pairwise difference {worst:.2e}'


@check
def fourth_moment_asymmetry(seed, scale):
    dims = PartitionDims(2, 2, 2)
    differing = 0
    count = 200
    for state in _states(dims, 'complex', seed, count):
        m12 = moment(pt_spectrum_of_pair(state, (1, 2)), 4)
        m13 = moment(pt_spectrum_of_pair(state, (1, 3)), 4)
        differing += abs(m12 - m13) > 1e-6
    return differing > count / 2, f'{differing} of {count} samples differ'


@check
def odd_moments_of_product_states(seed, scale):
    worst = 0.0
    rng = np.random.default_rng(seed.master_seed)
    for n1, n2, n3 in ((2, 2, 2), (2, 3, 4), (3, 3, 3)):
        pair = rng.standard_normal(n1 * n2) + 1j * rng.standard_normal(n1 * n2)
        third = rng.standard_normal(n3) + 1j * rng.standard_normal(n3)
        amplitudes = np.kron(pair / np.linalg.norm(pair), third / np.linalg.norm(third))
        state = PureState(PartitionDims(n1, n2, n3), amplitudes)
        for m in (1, 3, 5, 7):
            values = pt_moment_pairings(state, m)
            worst = max(worst, max(values) - min(values))
    return worst < 1e-12, f'max pairwise difference {worst:.2e}'


@check
def logneg_identity(seed, scale):
    worst = 0.0
    for state in _states(PartitionDims(4, 4, 2), 'complex', seed, 50):
        _, pt = state_spectra(state)
        worst = max(worst, abs(log_negativity(pt) - log(1 + 2 * negativity(pt))))
    return worst < 1e-10, f'max deviation {worst:.2e}'


@check
def third_moments(seed, scale):
    dims = PartitionDims(2, 2, 2)
    trials = max(1000, int(20000 * scale))
    passed = True
    details = []
    for field in ('complex', 'real'):
        pt_values = []
        rho_values = []
        for state in _states(dims, field, seed, trials):
            rho, pt = state_spectra(state)
            pt_values.append(moment(pt, 3))
            rho_values.append(moment(rho, 3))
        for name, values, exact in (('pt', pt_values, laws.avg_third_moment_pt(dims, field)),
                                    ('rho', rho_values, laws.avg_third_moment_rho(dims, field))):
            ok, detail = _within_se(values, exact)
            passed &= ok
            details.append(f'{field} {name}: {detail}')
    return passed, '; '.join(details)


@check
def real_sixth_moment(seed, scale):
    dims = PartitionDims(2, 2, 2)
    trials = max(1000, int(20000 * scale))
    values = [float(np.mean(state.amplitudes**6)) * 8 * 10 * 12 for state in _states(dims, 'real', seed, trials)]
    return _within_se(values, 15.0)


@check
def density_curves(seed, scale):
    worst = 0.0
    for dims in (PartitionDims(4, 4, 64), PartitionDims(8, 8, 128), PartitionDims(2, 2, 8)):
        for law in ('semicircle', 'scaled-semicircle', 'mp'):
            curve = laws.density_curve(law, dims)
            worst = max(worst, abs(curve.integral() - 1))
    return worst < 1e-6, f'max normalization error {worst:.2e}'


@check
def model_geometry(seed, scale):
    worst = 0.0
    regimes_ok = True
    for n1, n2, n3 in ((2, 2, 16), (4, 4, 64), (8, 8, 32), (4, 8, 64), (2, 4, 64)):
        dims = PartitionDims(n1, n2, n3)
        geometry = laws.ModelGeometry(dims)
        worst = max(worst, abs(dims.n * (geometry.lambda_plus - geometry.lambda_minus) - 2 * geometry.r_tilde))
        expected = 'critical' if n3 == 4 * n1 * n2 else ('PPT' if n3 > 4 * n1 * n2 else 'NPT')
        regimes_ok &= geometry.regime == expected
    return worst < 1e-12 and regimes_ok, f'edge identity error {worst:.2e}, regimes {"ok" if regimes_ok else "wrong"}'


@check
def model_gap(seed, scale):
    dims = PartitionDims(16, 16, 16)
    gap = float(laws.model_gap(dims))
    approx = (1 / dims.n3**2) * (1 / dims.n1**2 + 1 / dims.n2**2)
    return abs(gap / approx - 1) < 0.05, f'gap {gap:.4e} vs {approx:.4e}'


@check
def wstate_spectra(seed, scale):
    worst = 0.0
    for alpha2, beta2 in ((3 / 7, 2 / 7), (1 / 3, 1 / 3), (0.5, 0.3)):
        alpha, beta, gamma = sqrt(alpha2), sqrt(beta2), sqrt(1 - alpha2 - beta2)
        state = w_state(alpha, beta, gamma)
        closed = laws.wstate_analytics(alpha, beta, gamma)
        for key, keep in (('12', (1, 2)), ('13', (1, 3)), ('23', (2, 3))):
            worst = max(worst, float(np.max(np.abs(pt_spectrum_of_pair(state, keep).values - closed[key]))))
    return worst < 1e-12, f'max eigenvalue difference {worst:.2e}'


@check
def sequences(seed, scale):
    t, tp = laws.tn_sequences(20)
    ok = t[1] == tp[1] and t[3] == tp[3] and all(t[n] < tp[n] for n in range(4, 21))
    closed = all(t[n] == round(3**n + (1 - sqrt(7))**n + (1 + sqrt(7))**n) and tp[n] == 2**n + 4**n + (-1)**n
                 for n in range(21))
    return ok and closed, f't_1..6 = {t[1:7]}, t\'_1..6 = {tp[1:7]}'


@check
def tracy_widom_table(seed, scale):
    from tracywidom import solve_painleve2
    from scipy.integrate import trapezoid
    table = solve_painleve2()
    grid = table.s_grid[::-1]
    problems = []
    for name, cdf, pdf in (('F2', table.F2, table.f2), ('F1', table.F1, table.f1)):
        ascending = cdf[::-1]
        if np.any(np.diff(ascending) < -1e-12) or ascending.min() < 0 or ascending.max() > 1:
            problems.append(f'{name} not a CDF')
        if not (cdf[0] > 1 - 1e-9 and cdf[-1] < 1e-9):
            problems.append(f'{name} tails {cdf[-1]:.2e}, {cdf[0]:.10f}')
        mass = trapezoid(pdf[::-1], grid)
        if abs(mass - 1) > 1e-5:
            problems.append(f'{name} density mass {mass:.8f}')
    if abs(table.q[0] / airy_asymptotic(table.s_grid[0])[0] - 1) > 1e-10:
        problems.append('q does not start on Ai')
    return not problems, '; '.join(problems) or f'1 - F2(0) = {1 - table.with_beta(2).cdf(0.0):.5f}'


@check
def rotor_unitarity(seed, scale):
    params = RotorParams((8, 7, 6), (1.60, 1.51, 1.42), (3, 4, 5))
    operator = coupled_unitary(params)
    eigenvalues, vectors = eigen_decompose(operator)
    rebuilt = (vectors * eigenvalues) @ vectors.conj().T
    reconstruction = float(np.max(np.abs(rebuilt - operator.entries)))
    free = RotorParams((8, 7, 6), (0, 0, 0), (2, 2, 2))
    kron = np.kron(np.kron(single_map_unitary(8, 2), single_map_unitary(7, 2)), single_map_unitary(6, 2))
    decoupling = float(np.max(np.abs(coupled_unitary(free).entries - kron)))
    residual = operator.unitarity_residual()
    return residual < 1e-10 and reconstruction < 1e-8 and decoupling < 1e-12, \
        f'unitarity {residual:.2e}, reconstruction {reconstruction:.2e}, decoupling {decoupling:.2e}'


def verify_suite(seed=0, scale=1.0, checks=None):
    """Runs the checks, prints PASS/FAIL with margins and returns True when all passed."""
    seed = seed if isinstance(seed, SeedSpec) else SeedSpec(seed)
    failed = 0
    for function in checks or CHECKS:
        start = time.time()
        try:
            passed, detail = function(seed, scale)
        except (ValueError, RuntimeError) as error:
            passed, detail = False, f'raised {error}'
        failed += not passed
        print(f'{"PASS" if passed else "FAIL"} {function.__name__}: {detail} ({time.time() - start:.1f} s)', flush=True)
    print(f'CHECKPOINT, {time.time()}, verify, {failed}', file=sys.stderr, flush=True)
    return failed == 0
