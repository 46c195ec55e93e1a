import sys
import traceback
from math import pi, sin

import numpy as np
from numpy.testing import assert_allclose

from harness import make_client
from rotor import (FloquetOperator, RotorParams, classical_orbit, classical_step, coupled_unitary, eigen_decompose,
                   eigenstate_pipeline, single_map_unitary)


def test_free_rotor():
    params = RotorParams((0, 0, 0), (0, 0, 0))
    state = np.array([0.7, 0.6, 0.1, 0.2, 0.0, 0.95])
    expected = np.array([0.3, 0.6, 0.3, 0.2, 0.95, 0.95])
    assert_allclose(classical_step(state, params), expected, atol=1e-15)


def test_single_kick():
    params = RotorParams((0.5, 0, 0), (0, 0, 0))
    result = classical_step([0.25, 0, 0, 0, 0, 0], params)
    kick = 0.5 / (2 * pi) * sin(pi / 2)
    assert abs(result[1] - kick) < 1e-15
    assert abs(result[0] - (0.25 + kick)) < 1e-15
    assert abs(result[1] - 0.0795775) < 1e-7
    assert np.all(result[2:] == 0.0)


def test_symplectic():
    params = RotorParams((0.3, 0.2, 0.1), (0.1, 0.1, 0.1))
    state = np.array([0.1, 0.2, 0.3, 0.1, 0.15, 0.05])
    h = 1e-6
    jacobian = np.empty((6, 6))
    for k in range(6):
        step = np.zeros(6)
        step[k] = h
        jacobian[:, k] = (classical_step(state + step, params) - classical_step(state - step, params)) / (2 * h)
    assert abs(np.linalg.det(jacobian) - 1.0) < 1e-6
    orbit = classical_orbit(state, RotorParams.from_set(1, (2, 2, 2)), 100)
    assert orbit.shape == (101, 6)
    assert np.all((orbit >= 0.0) & (orbit < 1.0))


def test_single_map():
    unitary = single_map_unitary(8.0, 64, 0.35)
    assert np.max(np.abs(unitary.conj().T @ unitary - np.eye(64))) < 1e-10
    assert_allclose(np.linalg.norm(unitary, axis=0), np.ones(64), atol=1e-10)
    phases = np.sort(np.angle(np.linalg.eigvals(single_map_unitary(10.0, 256, 0.35))))
    spacings = np.diff(np.concatenate((phases, [phases[0] + 2 * pi])))
    assert spacings.min() > 1e-6, spacings.min()
    try:
        single_map_unitary(1.0, 1)
    except ValueError:
        pass
    else:
        raise AssertionError('N = 1 accepted')


def test_decoupled():
    params = RotorParams((8.0, 7.0, 6.0), (0, 0, 0), (2, 2, 2))
    expected = np.kron(np.kron(single_map_unitary(8.0, 2), single_map_unitary(7.0, 2)), single_map_unitary(6.0, 2))
    assert np.max(np.abs(coupled_unitary(params).entries - expected)) < 1e-12


def test_coupling_is_a_phase():
    params = RotorParams.from_set(1, (4, 4, 8))
    operator = FloquetOperator(params)
    assert operator.dim == 128
    assert operator.unitarity_residual() < 1e-10
    free = np.kron(np.kron(single_map_unitary(8.0, 4), single_map_unitary(7.0, 4)), single_map_unitary(6.0, 8))
    assert_allclose(np.abs(operator.entries), np.abs(free), atol=1e-12)
    assert params.coupling(2, 0) == params.coupling(0, 2) == 1.51


def test_limits():
    try:
        FloquetOperator(RotorParams.from_set(1, (16, 16, 32)), max_dim=4096)
    except ValueError as error:
        assert 'GiB' in str(error)
    else:
        raise AssertionError('oversized operator accepted')
    for bad in (dict(k=(1, 2), b=(0, 0, 0)), dict(k=(1, 2, 3), b=(0, 0, 0), dims=(1, 2, 2)),
                dict(k=(1, 2, 3), b=(0, 0, 0), alpha=1.0)):
        try:
            RotorParams(**bad)
        except ValueError:
            continue
        raise AssertionError(f'{bad} accepted')
    try:
        RotorParams.from_set(3, (2, 2, 2))
    except ValueError:
        pass
    else:
        raise AssertionError('unknown parameter set accepted')


def test_eigen_decompose():
    operator = coupled_unitary(RotorParams.from_set(2, (3, 4, 5)))
    eigenvalues, vectors = eigen_decompose(operator)
    assert np.max(np.abs(np.abs(eigenvalues) - 1.0)) < 1e-10
    assert np.max(np.abs(vectors.conj().T @ vectors - np.eye(60))) < 1e-10
    assert np.max(np.abs(operator.entries @ vectors - vectors * eigenvalues)) < 1e-10
    try:
        eigen_decompose(np.array([[1.0, 1.0], [0.0, 1.0]]))
    except RuntimeError:
        pass
    else:
        raise AssertionError('non-normal matrix accepted')


def test_pipeline():
    params = RotorParams.from_set(1, (4, 4, 4))
    reports, eigenvalues, pooled = eigenstate_pipeline(params)
    assert len(reports) == 64 and eigenvalues.size == 64 and pooled.size == 64 * 16
    assert [report.trial for report in reports] == list(range(64))
    assert all(abs(report.moments[1] - 1.0) < 1e-10 for report in reports)
    assert all(report.log_negativity >= 0.0 for report in reports)

    client = make_client(2)
    try:
        parallel, _, parallel_pooled = eigenstate_pipeline(params, client, chunk=16)
    finally:
        client.close()
    assert [report.to_row() for report in parallel] == [report.to_row() for report in reports]
    assert np.array_equal(parallel_pooled, pooled)


TESTS = [
    test_free_rotor,
    test_single_kick,
    test_symplectic,
    test_single_map,
    test_decoupled,
    test_coupling_is_a_phase,
    test_limits,
    test_eigen_decompose,
    test_pipeline,
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
