# -*- coding: utf-8 -*-

"""
ptlab.tracywidom
~~~~~~~~~~~~~~~~

This module contains the Tracy-Widom distributions for beta = 1 and 2, built
from the Hastings-McLeod solution of Painleve II, and their use at critical
dimensions: scaling of the smallest PT eigenvalue, predicted NPT fractions,
predicted critical log-negativity and the fit of the empirical shift.

The scaled minimum x is minus a Tracy-Widom variable, so its law is
G(x) = 1 - F(-x). A fitted shift s >= 0 means the observed x - s follows G.
"""

import sys
from functools import lru_cache
from math import sqrt

import numpy as np
from scipy.integrate import solve_ivp, trapezoid
from scipy.optimize import minimize_scalar
from scipy.stats import kstest

from mathhelper import airy_asymptotic, airy_tail_integrals

# |q| beyond this means the integration left the Hastings-McLeod branch
_BLOWUP = 10.0


class TWTable(object):
    """Tabulated Painleve-II solution with both Tracy-Widom CDFs and densities.

    The grid is stored descending, as integrated; lookups interpolate on an
    ascending copy.
    """

    _REQUIRED_CONFIG = [
        'tw.s_start',
        'tw.s_end',
        'tw.step',
        'tw.rtol',
        'tw.asymptotic_below',
    ]

    def __init__(self, s_grid, q, cdf2, cdf1, pdf2, pdf1, beta_class=2):
        if beta_class not in (1, 2):
            raise ValueError(f'Invalid beta: must be 1 or 2, got {beta_class}')
        self._s_grid = np.asarray(s_grid, dtype=float)
        self._q = np.asarray(q, dtype=float)
        self._cdf = {2: np.asarray(cdf2, dtype=float), 1: np.asarray(cdf1, dtype=float)}
        self._pdf = {2: np.asarray(pdf2, dtype=float), 1: np.asarray(pdf1, dtype=float)}
        self._beta_class = beta_class
        for array in (self._s_grid, self._q, *self._cdf.values(), *self._pdf.values()):
            array.setflags(write=False)

    @classmethod
    def checkconfig(cls, config):
        for required in cls._REQUIRED_CONFIG:
            if required not in config:
                raise ValueError(f'Invalid config: missing "{required}"')

    @classmethod
    def from_config(cls, config, beta_class=2):
        cls.checkconfig(config)
        table = solve_painleve2(config['tw.s_start'], config['tw.s_end'], config['tw.step'],
                                config['tw.rtol'], config['tw.asymptotic_below'])
        return table.with_beta(beta_class)

    def with_beta(self, beta_class):
        return TWTable(self._s_grid, self._q, self._cdf[2], self._cdf[1], self._pdf[2], self._pdf[1], beta_class)

    @property
    def beta_class(self):
        return self._beta_class

    @property
    def s_grid(self):
        return self._s_grid

    @property
    def q(self):
        return self._q

    @property
    def F2(self):
        return self._cdf[2]

    @property
    def F1(self):
        return self._cdf[1]

    @property
    def f2(self):
        return self._pdf[2]

    @property
    def f1(self):
        return self._pdf[1]

    def _ascending(self, values):
        return self._s_grid[::-1], values[::-1]

    def cdf(self, s):
        grid, values = self._ascending(self._cdf[self._beta_class])
        return np.interp(s, grid, values, left=0.0, right=1.0)

    def pdf(self, s):
        grid, values = self._ascending(self._pdf[self._beta_class])
        return np.interp(s, grid, values, left=0.0, right=0.0)

    def min_cdf(self, x):
        """CDF of the scaled minimum eigenvalue, G(x) = 1 - F(-x)."""
        return 1.0 - self.cdf(-np.asarray(x, dtype=float))

    def sample(self, rng, size):
        """Tracy-Widom variates by inverting the tabulated CDF."""
        grid, values = self._ascending(self._cdf[self._beta_class])
        keep = np.concatenate(([True], np.diff(values) > 0))
        return np.interp(rng.uniform(size=size), values[keep], grid[keep])

    def moments(self):
        """Mean and variance of the density by quadrature on the grid."""
        grid, density = self._ascending(self._pdf[self._beta_class])
        mean = trapezoid(grid * density, grid)
        return float(mean), float(trapezoid((grid - mean)**2 * density, grid))

    def to_rows(self):
        return list(zip(self._s_grid.tolist(), self._cdf[self._beta_class].tolist(),
                        self._pdf[self._beta_class].tolist()))


def _hastings_mcleod_tail(s):
    """Large negative s expansion of q(s)."""
    return np.sqrt(-s / 2) * (1 + 1 / (8 * s**3) - 73 / (128 * s**6))


@lru_cache(maxsize=4)
def solve_painleve2(s_start=8.0, s_end=-10.0, step=0.01, rtol=1e-10, asymptotic_below=-6.0):
    """Integrates q'' = s q + 2 q^3 downward from Airy data at s_start.

    The state carries u = int_s q^2, I = int_s (x - s) q^2 and J = int_s q so
    that F2 = exp(-I) and F1 = exp(-J/2) sqrt(F2) come out of one pass. Below
    `asymptotic_below` q follows its tail expansion and only the integrals
    are carried on.
    """
    if not s_start > asymptotic_below >= s_end:
        raise ValueError(f'Invalid Painleve grid: need s_start > asymptotic_below >= s_end, '
                         f'got {s_start}, {asymptotic_below}, {s_end}')
    count = int(round((s_start - s_end) / step)) + 1
    grid = np.linspace(s_start, s_end, count)
    upper = grid[grid >= asymptotic_below]
    lower = grid[grid < asymptotic_below]

    ai, aip = airy_asymptotic(s_start)
    j0, u0, i0 = airy_tail_integrals(s_start)

    def painleve(s, y):
        q, p, u, _, _ = y
        return [p, s * q + 2 * q**3, -q * q, -u, -q]

    def blowup(s, y):
        return _BLOWUP - abs(y[0])
    blowup.terminal = True

    solution = solve_ivp(painleve, (s_start, asymptotic_below), [ai, aip, u0, i0, j0], method='DOP853',
                         t_eval=upper, rtol=rtol, atol=1e-30, events=blowup)
    if solution.status != 0 or solution.t.size != upper.size:
        last = solution.t[-1] if solution.t.size else s_start
        raise RuntimeError(f'Painleve II integration failed near s={last:.4f} '
                           f'(status {solution.status}): {solution.message}')
    q, _, u, integral, jintegral = solution.y

    if lower.size:
        def tail(s, y):
            qs = _hastings_mcleod_tail(s)
            return [-qs * qs, -y[0], -qs]

        continued = solve_ivp(tail, (asymptotic_below, s_end), [u[-1], integral[-1], jintegral[-1]],
                              method='DOP853', t_eval=lower, rtol=rtol, atol=1e-30)
        if continued.status != 0:
            raise RuntimeError(f'Painleve II tail integration failed: {continued.message}')
        q = np.concatenate((q, _hastings_mcleod_tail(lower)))
        u = np.concatenate((u, continued.y[0]))
        integral = np.concatenate((integral, continued.y[1]))
        jintegral = np.concatenate((jintegral, continued.y[2]))

    cdf2 = np.exp(-integral)
    cdf1 = np.exp(-jintegral / 2) * np.sqrt(cdf2)
    return TWTable(grid, q, cdf2, cdf1, u * cdf2, cdf1 * (q + u) / 2)


class CriticalFit(object):
    """Scaled minimum eigenvalues at critical dims and the shift that best matches Tracy-Widom."""

    def __init__(self, shift, samples, ks, beta_class):
        self._shift = float(shift)
        self._samples = np.asarray(samples, dtype=float)
        self._ks = float(ks)
        self._beta_class = beta_class

    @property
    def shift(self):
        return self._shift

    @property
    def samples(self):
        return self._samples

    @property
    def ks(self):
        return self._ks

    @property
    def beta_class(self):
        return self._beta_class


def scale_min_eigenvalue(mu_min, dims):
    """x = (sqrt(N3)(N mu_min - 1) + 2 sqrt(N)) N^(1/6), which is 2 N^(5/3) mu_min at criticality."""
    n = dims.n
    mu_min = np.asarray(mu_min, dtype=float)
    return (sqrt(dims.n3) * (n * mu_min - 1) + 2 * sqrt(n)) * n**(1 / 6)


def npt_fraction(tw, shift):
    """Mass of the minimum-eigenvalue law below -shift, i.e. 1 - F(shift)."""
    if shift < 0:
        raise ValueError(f'Invalid shift: must be >= 0, got {shift}')
    return float(1.0 - tw.cdf(shift))


def avg_logneg_critical(dims, tw, shift):
    """Predicted <E_LN> at critical dims, (2/(sqrt(N3) N^(7/6))) times the mean negative part of x."""
    if not dims.is_critical:
        raise ValueError(f'Invalid dims: {dims} is not critical (N3 != 4 N1 N2)')
    grid, density = tw.s_grid[::-1], tw.pdf(tw.s_grid[::-1])
    tail = grid >= shift
    excess = trapezoid((grid[tail] - shift) * density[tail], grid[tail])
    return 2.0 / (sqrt(dims.n3) * dims.n**(7 / 6)) * float(excess)


def ks_distance(samples, tw, shift):
    return float(kstest(np.asarray(samples) - shift, tw.min_cdf).statistic)


def fit_shift(scaled_mins, tw, shift_max=3.0, step=0.005, min_samples=500):
    """Shift s in [0, shift_max] minimizing the KS distance between x - s and the minimum law.

    A grid search brackets the minimum and a bounded scalar search refines it;
    a minimum at the upper bound is not bracketed and falls back to s = 0.
    """
    samples = np.asarray(scaled_mins, dtype=float)
    if samples.size < min_samples:
        raise ValueError(f'Invalid fit: need at least {min_samples} samples, got {samples.size}')
    shifts = np.linspace(0.0, shift_max, int(round(shift_max / step)) + 1)
    distances = np.array([ks_distance(samples, tw, s) for s in shifts])
    best = int(np.argmin(distances))
    if best == shifts.size - 1:
        print(f'WARNING: shift fit not bracketed below {shift_max}; reporting the unshifted fit',
              file=sys.stderr, flush=True)
        return CriticalFit(0.0, samples, distances[0], tw.beta_class)

    lo = shifts[max(best - 1, 0)]
    hi = shifts[min(best + 1, shifts.size - 1)]
    refined = minimize_scalar(lambda s: ks_distance(samples, tw, s), bounds=(lo, hi), method='bounded',
                              options={'xatol': step / 10})
    if refined.success and refined.fun < distances[best]:
        return CriticalFit(refined.x, samples, refined.fun, tw.beta_class)
    return CriticalFit(shifts[best], samples, distances[best], tw.beta_class)
