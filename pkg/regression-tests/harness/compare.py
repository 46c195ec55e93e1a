import json
import sys
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from harness import read_rows_csv
from measures import MeasureReport


def check_curve(path):
    rows = read_rows_csv(path)
    grid = np.array([float(row['grid']) for row in rows])
    values = np.array([float(row['value']) for row in rows])
    if len(rows) != 101 or grid[0] != 0.0 or abs(grid[-1] - 2.0) > 1e-15:
        print(f'Wrong critical semicircle grid in {path}!', file=sys.stderr)
        return False
    if abs(trapezoid(values, grid) - 1.0) > 1e-3:
        print(f'Semicircle in {path} is not normalized!', file=sys.stderr)
        return False
    return True


def check_tw(path):
    rows = read_rows_csv(path)
    at_zero = min(rows, key=lambda row: abs(float(row['s'])))
    tail = 1.0 - float(at_zero['F'])
    if not 0.16 <= tail <= 0.18:
        print(f'GOE tail mass {tail} out of range!', file=sys.stderr)
        return False
    return True


def check_constants(path):
    with open(path) as file:
        constants = json.load(file)
    if constants['regime'] != 'NPT' or abs(constants['avg_log_negativity_model'] - 0.1487) > 1e-4:
        print('Wrong closed-form constants at L1 = L2 = 3, L = 12!', file=sys.stderr)
        return False
    return True


def check_ensemble(path):
    rows = read_rows_csv(path)
    if list(rows[0]) != list(MeasureReport.COLUMNS):
        print(f'Wrong columns in {path}!', file=sys.stderr)
        return False
    if [int(row['trial']) for row in rows] != list(range(300)):
        print(f'Trials missing or out of order in {path}!', file=sys.stderr)
        return False
    with open(str(path) + '.summary.json') as file:
        summary = json.load(file)
    if summary['trials'] != 300 or summary['failures'] != 0 or (summary['N1'], summary['N3']) != (2, 16):
        print('Wrong summary header!', file=sys.stderr)
        return False
    fraction = np.mean([row['is_npt'] == '1' for row in rows])
    if abs(summary['npt_fraction'] - fraction) > 1e-12 or abs(summary['npt_error'] - np.sqrt(fraction * (1 - fraction) / 300)) > 1e-12:
        print('NPT fraction does not match the rows!', file=sys.stderr)
        return False
    purity = np.mean([float(row['purity']) for row in rows])
    expected = summary['closed_form']['avg_purity']
    if abs(purity - expected) > 5 * summary['purity']['error']:
        print(f'Mean purity {purity} far from {expected}!', file=sys.stderr)
        return False
    return True


def main():
    try:
        out = Path(sys.argv[1])
    except IndexError:
        print("Not enough arguments!", file=sys.stderr)
        sys.exit(1)

    try:
        passed = (check_curve(out / 'curve.csv') and check_tw(out / 'tw1.csv')
                  and check_constants(out / 'constants.json') and check_ensemble(out / 'serial.csv'))
    except IOError:
        print("Failed to open files!", file=sys.stderr)
        sys.exit(1)

    sys.exit(0 if passed else 1)


if __name__ == '__main__':
    main()
