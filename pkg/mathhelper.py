# -*- coding: utf-8 -*-

"""
ptlab.mathhelper
~~~~~~~~~~~~~~~~

Contains small numerical helpers that keep the physics modules readable:
Airy asymptotics, cosine-spaced grids, Monte Carlo error bars and the
fixed float formatting used by every output file.
"""

from math import exp, pi, sqrt

import numpy as np
from scipy.integrate import quad

# smallest asymptotic-series term kept for the Airy functions
_AIRY_SERIES_EPS = 1e-17


def _airy_coefficients(zeta):
    """Yield (u_k, v_k) / zeta**k with alternating sign until the terms stop shrinking."""
    u = 1.0
    term = 1.0
    k = 0
    while True:
        v = u if k == 0 else -(6*k + 1) / (6*k - 1) * u
        yield (-1)**k * u / zeta**k, (-1)**k * v / zeta**k
        k += 1
        u *= (6*k - 5) * (6*k - 3) * (6*k - 1) / ((2*k - 1) * 216.0 * k)
        next_term = u / zeta**k
        if next_term < _AIRY_SERIES_EPS or next_term > term:
            return
        term = next_term


def airy_asymptotic(z):
    """Ai(z) and Ai'(z) for large positive z from the asymptotic series.

    At z = 8 the smallest term is below 1e-13 relative, so both values carry
    at least 12 correct digits.
    """
    if z < 4:
        raise ValueError(f'Airy asymptotic series needs z >= 4, got {z}')
    zeta = 2.0 / 3.0 * z**1.5
    prefactor = exp(-zeta) / (2.0 * sqrt(pi))
    ai_sum = 0.0
    aip_sum = 0.0
    for u_term, v_term in _airy_coefficients(zeta):
        ai_sum += u_term
        aip_sum += v_term
    return prefactor * ai_sum / z**0.25, -prefactor * z**0.25 * aip_sum


def airy_tail_integrals(s):
    """Returns (int_s^inf Ai, int_s^inf Ai^2, int_s^inf (x - s) Ai^2) for large s."""
    ai, aip = airy_asymptotic(s)
    tail, _ = quad(lambda x: airy_asymptotic(x)[0], s, s + 40.0, epsabs=0.0, epsrel=1e-13, limit=200)
    square = aip**2 - s * ai**2
    moment = (2.0 * s**2 * ai**2 - 2.0 * s * aip**2 - ai * aip) / 3.0
    return tail, square, moment


def cosine_grid(lo, hi, points):
    """Grid on [lo, hi] clustered at both ends (Chebyshev-Lobatto nodes)."""
    if points < 2:
        raise ValueError(f'grid needs at least 2 points, got {points}')
    theta = np.linspace(pi, 0.0, points)
    return lo + (hi - lo) * (1.0 + np.cos(theta)) / 2.0


def mean_and_error(values):
    """Sample mean and its standard error (sample std / sqrt(n))."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError('mean of an empty sample')
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / sqrt(values.size))


def binomial_error(fraction, trials):
    return sqrt(fraction * (1.0 - fraction) / trials)


def sup_misfit(empirical, reference):
    """Sup-norm distance between two densities on the same bins, relative to the reference peak."""
    empirical = np.asarray(empirical, dtype=float)
    reference = np.asarray(reference, dtype=float)
    peak = reference.max()
    if peak <= 0:
        raise ValueError('reference density has no positive peak')
    return float(np.max(np.abs(empirical - reference)) / peak)


def fmt(value):
    """Fixed float formatting for output files (17 significant digits)."""
    if isinstance(value, (bool, np.bool_)):
        return '1' if value else '0'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), '.17g')


def bin_averages(density, edges):
    """Average of a density over each histogram bin, by adaptive quadrature."""
    edges = np.asarray(edges, dtype=float)
    averages = np.empty(edges.size - 1)
    for k, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        mass, _ = quad(lambda x: float(density(x)), lo, hi, limit=200)
        averages[k] = mass / (hi - lo)
    return averages
