import sys
import traceback
from math import sqrt

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from ensembles import SeedSpec, sample_haar_state
from qstate import (HermitianOperator, PartitionDims, PureState, SpectrumSample, bell_state, hermitian_spectrum,
                    partial_trace, partial_transpose, product_state, pt_index_map, reduced_pair,
                    schmidt_coefficients, schmidt_pt_spectrum)


def test_dims():
    dims = PartitionDims.from_qubits(2, 2, 10)
    assert dims.as_tuple() == (4, 4, 64)
    assert dims.is_critical
    assert dims.r_tilde == 1.0
    assert (dims.l1, dims.l2, dims.l3) == (2, 2, 6)
    assert PartitionDims(3, 3, 3).l1 is None
    assert PartitionDims(2, 3, 4).permuted((3, 1, 2)) == PartitionDims(4, 2, 3)
    for bad in ((0, 2, 2), (2, 2.5, 2)):
        try:
            PartitionDims(*bad)
        except ValueError:
            continue
        raise AssertionError(f'{bad} accepted')
    try:
        PartitionDims.from_qubits(3, 3, 5)
    except ValueError:
        pass
    else:
        raise AssertionError('negative environment accepted')


def test_index_map():
    n2 = 4
    for i in range(16):
        assert pt_index_map(i, i, n2) == (i, i)
    assert pt_index_map(0, 1, 2) == (1, 0)
    rows, cols = np.indices((16, 16))
    once = pt_index_map(rows, cols, n2)
    twice = pt_index_map(*once, n2)
    assert_array_equal(twice[0], rows)
    assert_array_equal(twice[1], cols)
    images = set(zip(once[0].ravel().tolist(), once[1].ravel().tolist()))
    assert len(images) == 256


def test_partial_trace():
    dims = PartitionDims(2, 2, 3)
    rho = partial_trace(product_state(dims))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1.0
    assert_allclose(rho.entries, expected, atol=1e-15)

    state = sample_haar_state(PartitionDims(2, 3, 1), 'complex', SeedSpec(11))
    rho = partial_trace(state)
    assert_allclose(rho.entries, np.outer(state.amplitudes, state.amplitudes.conj()), atol=1e-15)
    assert abs(rho.trace - 1.0) < 1e-12

    try:
        PureState(PartitionDims(2, 2, 2), np.ones(6) / sqrt(6))
    except ValueError:
        pass
    else:
        raise AssertionError('wrong amplitude count accepted')


def test_bell_state():
    rho = partial_trace(bell_state())
    spectrum = hermitian_spectrum(partial_transpose(rho, bell_state().dims))
    assert_allclose(spectrum.values, [-0.5, 0.5, 0.5, 0.5], atol=1e-14)
    lambdas = schmidt_coefficients(bell_state())
    assert_allclose(schmidt_pt_spectrum(lambdas, 2, 2).values, [-0.5, 0.5, 0.5, 0.5], atol=1e-14)


def test_density_checks():
    rho = partial_trace(bell_state())
    rho.check_density()
    for bad in (partial_transpose(rho, bell_state().dims), HermitianOperator(np.eye(4) / 2)):
        try:
            bad.check_density()
        except ValueError:
            continue
        raise AssertionError('non-density operator accepted')
    state = sample_haar_state(PartitionDims(2, 2, 3), 'complex', SeedSpec(21))
    rho = partial_trace(state)
    rows = rho.to_json()
    assert len(rows) == 4 and all(len(row) == 4 and len(entry) == 2 for row in rows for entry in row)
    assert_allclose(np.array(rows)[..., 0] + 1j * np.array(rows)[..., 1], rho.entries, rtol=0, atol=0)


def test_double_transpose_is_exact():
    dims = PartitionDims(3, 4, 5)
    rho = partial_trace(sample_haar_state(dims, 'complex', SeedSpec(3)))
    twice = partial_transpose(partial_transpose(rho, dims), dims)
    assert_array_equal(twice.entries, rho.entries)


def test_separable_spectrum_unchanged():
    rng = np.random.default_rng(5)
    blocks = []
    for n in (2, 3):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        block = a @ a.conj().T
        blocks.append(block / np.trace(block).real)
    rho = HermitianOperator(np.kron(*blocks), tolerance=1e-12)
    dims = PartitionDims(2, 3, 1)
    before = hermitian_spectrum(rho).values
    after = hermitian_spectrum(partial_transpose(rho, dims)).values
    assert_allclose(after, before, atol=1e-12)
    assert after[0] > -1e-12


def test_trace_purity_and_complement():
    dims = PartitionDims(2, 3, 4)
    for trial in range(20):
        for field in ('complex', 'real'):
            rho = partial_trace(sample_haar_state(dims, field, SeedSpec(7, trial)))
            pt2 = partial_transpose(rho, dims, 2)
            pt1 = partial_transpose(rho, dims, 1)
            assert abs(pt2.trace - 1.0) < 1e-10
            assert abs(np.sum(np.abs(pt2.entries)**2) - np.sum(np.abs(rho.entries)**2)) < 1e-10
            assert_allclose(hermitian_spectrum(pt1).values, hermitian_spectrum(pt2).values, atol=1e-10)
    try:
        partial_transpose(np.eye(5) / 5, dims)
    except ValueError:
        pass
    else:
        raise AssertionError('incompatible shape accepted')


def test_hermitian_spectrum():
    assert_allclose(hermitian_spectrum(np.eye(6) / 6).values, np.full(6, 1 / 6), atol=1e-15)
    assert_allclose(hermitian_spectrum(np.diag([0.4, 0.1, 0.3, 0.2])).values, [0.1, 0.2, 0.3, 0.4], atol=1e-15)
    try:
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))
    except ValueError:
        pass
    else:
        raise AssertionError('non-Hermitian operator accepted')


def test_schmidt_route():
    assert_allclose(schmidt_pt_spectrum([1.0], 3, 3).values, [0.0] * 8 + [1.0])
    for trial in range(10):
        for shape in ((4, 4), (2, 8), (8, 8), (3, 5)):
            dims = PartitionDims(*shape, 1)
            state = sample_haar_state(dims, 'complex', SeedSpec(19, trial))
            matrix = hermitian_spectrum(partial_transpose(partial_trace(state), dims)).values
            direct = schmidt_pt_spectrum(schmidt_coefficients(state), *shape).values
            assert_allclose(direct, matrix, atol=1e-10)
    for bad in ([0.6, 0.6], [1.1, -0.1], [0.25] * 4):
        try:
            schmidt_pt_spectrum(bad, 2, 2)
        except ValueError:
            continue
        raise AssertionError(f'{bad} accepted')


def test_reduced_pair():
    dims = PartitionDims(2, 3, 4)
    state = sample_haar_state(dims, 'complex', SeedSpec(23))
    rho12, pair_dims = reduced_pair(state, (1, 2))
    assert pair_dims == dims
    assert_allclose(rho12.entries, partial_trace(state).entries, atol=1e-14)
    rho31, pair_dims = reduced_pair(state, (3, 1))
    assert pair_dims.as_tuple() == (4, 2, 3)
    assert abs(rho31.trace - 1.0) < 1e-12


def test_spectrum_sample():
    spec = SpectrumSample([0.5, -0.25, 0.75])
    assert_array_equal(spec.values, [-0.25, 0.5, 0.75])
    assert_allclose(spec.scaled, [-0.75, 1.5, 2.25])
    assert spec.min_value == -0.25
    assert len(spec) == 3
    try:
        SpectrumSample([0.5, 0.6], trace=1.0)
    except ValueError:
        pass
    else:
        raise AssertionError('trace mismatch accepted')


TESTS = [
    test_dims,
    test_index_map,
    test_partial_trace,
    test_bell_state,
    test_density_checks,
    test_double_transpose_is_exact,
    test_separable_spectrum_unchanged,
    test_trace_purity_and_complement,
    test_hermitian_spectrum,
    test_schmidt_route,
    test_reduced_pair,
    test_spectrum_sample,
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
