# -*- coding: utf-8 -*-

"""
ptlab.laws
~~~~~~~~~~

This module contains the closed-form reference results the Monte Carlo runs are
checked against: Marcenko-Pastur and semicircle densities, the geometry of the
shifted Gaussian model, exact ensemble averages of purity, entropy and third
moments, analytic skewness and log-negativity, the W-state spectra and the
integer sequences that separate their higher moments.
"""

from fractions import Fraction
from math import asin, fsum, log, pi, sin, sqrt

import numpy as np
from scipy.integrate import quad, trapezoid
from scipy.special import hyp2f1

from mathhelper import cosine_grid
from qstate import PartitionDims

LAWS = ('mp', 'semicircle', 'scaled-semicircle')

PPT = 'PPT'
CRITICAL = 'critical'
NPT = 'NPT'


class ModelGeometry(object):
    """Edges and radius of the PT spectrum in the shifted Gaussian model."""

    def __init__(self, dims):
        self._dims = dims
        n = dims.n
        q = dims.q
        self._radius = 2.0 / sqrt(dims.n3 * n)
        self._lambda_minus = (1 + 1 / q - 2 / sqrt(q)) / n
        self._lambda_plus = (1 + 1 / q + 2 / sqrt(q)) / n
        if dims.n3 == 4 * n:
            self._regime = CRITICAL
        elif dims.n3 > 4 * n:
            self._regime = PPT
        else:
            self._regime = NPT

    @property
    def dims(self):
        return self._dims

    @property
    def r(self):
        return self._radius

    @property
    def r_tilde(self):
        return self._dims.n * self._radius

    @property
    def lambda_minus(self):
        return float(self._lambda_minus)

    @property
    def lambda_plus(self):
        return float(self._lambda_plus)

    @property
    def regime(self):
        return self._regime


class DensityCurve(object):
    """A tabulated probability density on its support."""

    def __init__(self, law, grid, values, support):
        if law not in LAWS:
            raise ValueError(f'Invalid law: {law}')
        values = np.asarray(values, dtype=float)
        if np.any(values < 0):
            raise ValueError(f'Invalid density: {law} has negative values')
        self._law = law
        self._grid = np.asarray(grid, dtype=float)
        self._values = values
        self._support = tuple(support)

    @property
    def law(self):
        return self._law

    @property
    def grid(self):
        return self._grid

    @property
    def values(self):
        return self._values

    @property
    def support(self):
        return self._support

    def integral(self):
        return float(trapezoid(self._values, self._grid))

    def to_rows(self):
        return list(zip(self._grid.tolist(), self._values.tolist()))


def _check_mp(dims):
    if dims.q < 1:
        raise ValueError(f'Invalid dims: Marcenko-Pastur law needs Q = N3/N >= 1, got {dims.q} for {dims}')


def mp_support(dims):
    _check_mp(dims)
    geometry = ModelGeometry(dims)
    return geometry.lambda_minus, geometry.lambda_plus


def mp_density(dims, lam):
    """Marcenko-Pastur density of the eigenvalues of rho_12, zero outside the open support."""
    lo, hi = mp_support(dims)
    lam = np.asarray(lam, dtype=float)
    inside = (lam > lo) & (lam < hi)
    safe = np.where(inside, lam, 1.0)
    values = dims.n * float(dims.q) / (2 * pi) * np.sqrt(np.abs((hi - safe) * (safe - lo))) / safe
    return np.where(inside, values, 0.0)


def semicircle_scaled(dims, x):
    """Density of x = N mu: (2/(pi R~^2)) sqrt(R~^2 - (x - 1)^2) on (1 - R~, 1 + R~)."""
    r = dims.r_tilde
    x = np.asarray(x, dtype=float)
    inside = np.abs(x - 1.0) < r
    return np.where(inside, 2 / (pi * r**2) * np.sqrt(np.clip(r**2 - (x - 1.0)**2, 0.0, None)), 0.0)


def semicircle(dims, mu):
    """Density of the unscaled eigenvalues of B = A + I/N."""
    return dims.n * semicircle_scaled(dims, dims.n * np.asarray(mu, dtype=float))


def density_curve(law, dims, points=8001):
    if law == 'mp':
        lo, hi = mp_support(dims)
        grid = cosine_grid(lo, hi, points)
        return DensityCurve(law, grid, mp_density(dims, grid), (lo, hi))
    elif law == 'semicircle':
        center, half = 1 / dims.n, dims.r_tilde / dims.n
        grid = cosine_grid(center - half, center + half, points)
        return DensityCurve(law, grid, semicircle(dims, grid), (center - half, center + half))
    elif law == 'scaled-semicircle':
        r = dims.r_tilde
        grid = cosine_grid(1 - r, 1 + r, points)
        return DensityCurve(law, grid, semicircle_scaled(dims, grid), (1 - r, 1 + r))
    raise ValueError(f'Invalid law: must be one of {", ".join(LAWS)}, got "{law}"')


def exchange_count(m_qubits, k):
    """Matrix entries of a 2^M x 2^M operator moved by transposing k of its qubits."""
    if not 0 <= 2 * k <= m_qubits:
        raise ValueError(f'Invalid exchange: need 0 <= k <= M/2, got k={k}, M={m_qubits}')
    return 2**(2 * m_qubits) - 2**(2 * m_qubits - k)


def exchange_count_dims(n1, n2):
    """Entries moved by transposing the N2 factor of an N1*N2 operator: N^2 - N1^2 N2."""
    return (n1 * n2)**2 - n1**2 * n2


def avg_purity(n, m, field='complex'):
    """<tr rho_N^2> for an N-dimensional subsystem of a random state on N*M."""
    if field == 'complex':
        return Fraction(n + m, n * m + 1)
    return Fraction(n + m + 1, n * m + 2)


def avg_entropy_page(n, m):
    """Average entanglement entropy of an N x M random complex state (natural log)."""
    if n > m:
        n, m = m, n
    return fsum(1.0 / k for k in range(m + 1, n * m + 1)) - (n - 1) / (2.0 * m)


def avg_third_moment_pt(dims, field='complex'):
    """Exact <tr(rho_12^T2)^3>, symmetric under any permutation of (N1, N2, N3)."""
    n1, n2, n3 = dims.as_tuple()
    m = dims.m
    squares = n1**2 + n2**2 + n3**2
    if field == 'complex':
        return Fraction(squares + 3 * m, (m + 1) * (m + 2))
    return Fraction(squares + 3 * (n1 + n2 + n3 + m), (m + 2) * (m + 4))


def avg_third_moment_rho(dims, field='complex'):
    """Exact <tr rho_12^3>, the PT formula with N1 -> N1 N2 and N2 -> 1."""
    return avg_third_moment_pt(PartitionDims(dims.n, 1, dims.n3), field)


def third_moment_difference(dims):
    """<tr rho^3 - tr(rho^T2)^3> for complex states: (N1^2 - 1)(N2^2 - 1)/((M + 1)(M + 2))."""
    m = dims.m
    return Fraction((dims.n1**2 - 1) * (dims.n2**2 - 1), (m + 1) * (m + 2))


def model_third_moment(dims):
    """<tr B^3> = 3/M + 1/N^2 for the shifted Gaussian model."""
    return Fraction(3, dims.m) + Fraction(1, dims.n**2)


def model_gap(dims):
    """Exact complex third moment minus the model's; about (1/N3^2)(1/N1^2 + 1/N2^2) for large dims."""
    return avg_third_moment_pt(dims, 'complex') - model_third_moment(dims)


def skewness_analytic(dims, field='complex'):
    n1, n2 = dims.n1, dims.n2
    bracket = n2 / n1 + n1 / n2
    if field == 'real':
        bracket += 3 / n1 + 3 / n2
    return bracket / sqrt(dims.m)


def avg_log_negativity_model(dims):
    """Model <E_LN> and the regime; zero outside the NPT regime, where Tracy-Widom takes over."""
    geometry = ModelGeometry(dims)
    r = geometry.r_tilde
    if geometry.regime != NPT:
        return 0.0, geometry.regime
    bracket = 2 / pi * asin(1 / r) + 2 / (3 * pi * r) * sqrt(1 - 1 / r**2) * (1 + 2 * r**2)
    return log(bracket), geometry.regime


def avg_log_negativity_asymptote(dims):
    return log(8 / (3 * pi) * sqrt(dims.n / dims.n3))


def _check_ratio(q):
    if q < 1:
        raise ValueError(f'Invalid ratio: Q = N2/N1 must be >= 1 (swap the subsystems), got {q}')


def kappa(q):
    """(Q/2 pi) int sqrt((x+ - x)(x - x-)/x) dx over the Marcenko-Pastur support."""
    _check_ratio(q)
    lo = (1 - 1 / sqrt(q))**2
    hi = (1 + 1 / sqrt(q))**2
    width = hi - lo

    # x = lo + width sin^2(t) removes both square-root edges
    def integrand(t):
        s2 = sin(t)**2
        return 2 * width**2 * s2 * (1 - s2) / sqrt(lo + width * s2)

    value, _ = quad(integrand, 0.0, pi / 2, epsabs=0.0, epsrel=1e-12, limit=200)
    return q / (2 * pi) * value


def kappa_hypergeometric(q):
    """Closed form of kappa for Q > 1, used to cross-check the quadrature."""
    if q <= 1:
        raise ValueError(f'Invalid ratio: hypergeometric form needs Q > 1, got {q}')
    root = sqrt(q)
    return root / (root - 1) * hyp2f1(0.5, 1.5, 3.0, -4 * root / (root - 1)**2)


def avg_measures_pure(n1, n2):
    """Approximate (<E_LN>, <negativity>) of a random pure N1 x N2 state, N1 <= N2."""
    _check_ratio(n2 / n1)
    scale = kappa(n2 / n1)**2 * n1
    return log(scale), (scale - 1) / 2


def wstate_analytics(alpha, beta, gamma):
    """Closed-form PT spectra of alpha|001> + beta|010> + gamma|100> and its Kempe invariant."""
    a2, b2, c2 = alpha**2, beta**2, gamma**2
    if abs(a2 + b2 + c2 - 1) > 1e-12:
        raise ValueError(f'Invalid W-state: squared weights sum to {a2 + b2 + c2!r}')

    def pair(d1, d2, coupled, x, y):
        root = sqrt(coupled**2 + 4 * x * y)
        return np.sort([d1, d2, (coupled + root) / 2, (coupled - root) / 2])

    return {
        '12': pair(b2, c2, a2, b2, c2),
        '13': pair(a2, c2, b2, a2, c2),
        '23': pair(a2, b2, c2, a2, b2),
        'invariant': a2**3 + b2**3 + c2**3 + 3 * a2 * b2 * c2,
    }


def tn_sequences(n_max):
    """t_n = 3^n + (1-sqrt7)^n + (1+sqrt7)^n and t'_n = 2^n + 4^n + (-1)^n for n = 0..n_max, exact."""
    if n_max < 3:
        raise ValueError(f'Invalid length: n_max must be >= 3, got {n_max}')
    t = [3, 5, 25]
    tp = [3, 5, 21]
    while len(t) <= n_max:
        t.append(5 * t[-1] - 18 * t[-3])
        tp.append(5 * tp[-1] - 2 * tp[-2] - 8 * tp[-3])
    return t[:n_max + 1], tp[:n_max + 1]


def closed_form_constants(dims, field='complex'):
    """Every closed-form quantity of this module for one set of dims, as a flat dictionary."""
    geometry = ModelGeometry(dims)
    logneg, regime = avg_log_negativity_model(dims)
    constants = {
        'N1': dims.n1, 'N2': dims.n2, 'N3': dims.n3, 'field': field,
        'R': geometry.r,
        'R_tilde': geometry.r_tilde,
        'lambda_minus': geometry.lambda_minus,
        'lambda_plus': geometry.lambda_plus,
        'regime': regime,
        'avg_purity': float(avg_purity(dims.n, dims.n3, field)),
        'avg_third_moment_pt': float(avg_third_moment_pt(dims, field)),
        'avg_third_moment_rho': float(avg_third_moment_rho(dims, field)),
        'model_third_moment': float(model_third_moment(dims)),
        'skewness': skewness_analytic(dims, field),
        'avg_log_negativity_model': logneg,
        'exchange_count': exchange_count_dims(dims.n1, dims.n2),
    }
    if field == 'complex':
        constants['avg_entropy'] = avg_entropy_page(dims.n, dims.n3)
    if regime == NPT:
        constants['avg_log_negativity_asymptote'] = avg_log_negativity_asymptote(dims)
    return constants
