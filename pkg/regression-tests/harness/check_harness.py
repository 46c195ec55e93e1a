import json
import sys
import tempfile
import traceback
from pathlib import Path

import numpy as np
from numpy.testing import assert_allclose

import harness
import jsonc
from harness import ExperimentConfig, make_histogram
from qstate import PartitionDims

with open('config.json') as fp:
    CONFIG = jsonc.load(fp)


def ensemble(dims, trials, seed, **kwargs):
    config = ExperimentConfig.from_config(CONFIG, dims, trials=trials, seed=seed, **kwargs)
    summary, _ = harness.run_ensemble(config)
    return summary


def test_non_finite_json():
    row = harness._jsonable({'nan': float('nan'), 'up': float('inf'), 'down': np.float64('-inf'),
                             'values': [1.5, np.inf], 'count': np.int64(3)})
    assert row == {'nan': None, 'up': None, 'down': None, 'values': [1.5, None], 'count': 3}, row
    json.dumps(row, allow_nan=False)


def test_constant_histogram():
    for value_range in ((0.0, 1.0), None):
        histogram = make_histogram(np.full(50, 0.35), 10, value_range)
        occupied = np.flatnonzero(histogram.counts)
        assert occupied.size == 1 and histogram.total == 50
        width = np.diff(histogram.edges)[occupied[0]]
        assert abs(histogram.density[occupied[0]] - 1 / width) < 1e-12
    try:
        make_histogram([], 10)
    except ValueError:
        pass
    else:
        raise AssertionError('empty histogram accepted')


def test_pure_case_is_not_semicircle():
    # L = 6, L1 = L2 = 3: no environment, the PT spectrum has a cusp at zero
    summary = ensemble(PartitionDims.from_qubits(3, 3, 6), 250, 3)
    assert summary.pt_misfit > 0.2, summary.pt_misfit
    assert np.isnan(summary.rho_misfit)


def test_marcenko_pastur_fit():
    summary = ensemble(PartitionDims(8, 8, 256), 10000, 11)
    assert summary.rho_misfit < 0.05, summary.rho_misfit


def test_debug_dump():
    with tempfile.TemporaryDirectory() as directory:
        for dims in (PartitionDims(2, 2, 3), PartitionDims(2, 3, 1)):
            debug = Path(directory) / f'{dims.n1}{dims.n2}{dims.n3}'
            ensemble(dims, 3, 7, debug=debug)
            assert sorted(path.name for path in debug.iterdir()) == [
                f'trial{trial:06d}.{suffix}' for trial in range(3) for suffix in ('csv', 'json')]
            for trial in range(3):
                with open(debug / f'trial{trial:06d}.json') as fp:
                    dumped = json.load(fp)
                assert dumped['trial'] == trial
                pt = np.array(dumped['pt'])
                assert pt.shape == (dims.n, dims.n, 2)
                matrix = pt[..., 0] + 1j * pt[..., 1]
                rows = harness.read_rows_csv(debug / f'trial{trial:06d}.csv')
                mu = [float(row['mu']) for row in rows]
                assert_allclose(np.linalg.eigvalsh(matrix), mu, atol=1e-12)


TESTS = [
    test_non_finite_json,
    test_constant_histogram,
    test_pure_case_is_not_semicircle,
    test_marcenko_pastur_fit,
    test_debug_dump,
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
