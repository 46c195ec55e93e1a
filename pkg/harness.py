# -*- coding: utf-8 -*-

"""
ptlab.harness
~~~~~~~~~~~~~

This module drives the Monte Carlo experiments. Trials are cut into chunks of
consecutive indices and submitted to a dask cluster (or run in-process); every
trial draws from its own (seed, trial) stream and chunk results are reduced in
trial order, so outputs do not depend on the number of workers. It also holds
the histogramming, the summaries and the CSV/JSON writers.
"""

import csv
import json
import sys
import time
from math import isfinite
from pathlib import Path

import numpy as np

from ensembles import SeedSpec, sample_haar_state
from laws import ModelGeometry, closed_form_constants, mp_density, semicircle_scaled
from mathhelper import bin_averages, binomial_error, fmt, mean_and_error, sup_misfit
from measures import MeasureReport, state_spectra
from qstate import partial_trace, partial_transpose
from tracywidom import avg_logneg_critical, fit_shift, npt_fraction, scale_min_eigenvalue

SUMMARY_MEASURES = ('purity', 'entropy', 'negativity', 'log_negativity', 'mu_min', 'skewness', 'm3_pt')


class TrialError(RuntimeError):
    """A failure inside one trial, tagged with its index."""

    def __init__(self, trial, message):
        super().__init__(f'trial {trial}: {message}')
        self.trial = trial


class ExperimentConfig(object):
    """One experiment: dims, field, trial budget, seed, binning and where the output goes."""

    _REQUIRED_CONFIG = [
        'tolerance.npt',
        'tolerance.trace',
        'tolerance.entropy',
        'trials.fraction',
        'trials.spectra',
        'histogram.bins',
        'histogram.range_factor',
        'ensemble.chunk',
        'ensemble.max_failure_rate',
    ]

    TAGS = ('ensemble', 'critical', 'laws', 'tw', 'rotor', 'verify')

    def __init__(self, dims, field='complex', trials=1000, seed=0, bins=40, out=None, tag='ensemble',
                 range_factor=1.5, chunk=250, max_failure_rate=0.001, thresholds=None, debug=None):
        if field not in ('complex', 'real'):
            raise ValueError(f'Invalid field: must be "complex" or "real", got "{field}"')
        if trials < 1:
            raise ValueError(f'Invalid trials: must be >= 1, got {trials}')
        if bins < 10:
            raise ValueError(f'Invalid bins: must be >= 10, got {bins}')
        if chunk < 1:
            raise ValueError(f'Invalid config: ensemble.chunk must be >= 1, got {chunk}')
        if tag not in self.TAGS:
            raise ValueError(f'Invalid experiment: {tag}')
        self.dims = dims
        self.field = field
        self.trials = int(trials)
        self.seed = SeedSpec(seed)
        self.bins = int(bins)
        self.out = Path(out) if out else None
        self.tag = tag
        self.range_factor = float(range_factor)
        self.chunk = int(chunk)
        self.max_failure_rate = float(max_failure_rate)
        self.thresholds = dict(thresholds or {})
        self.debug = Path(debug) if debug else None

    @classmethod
    def checkconfig(cls, config):
        for required in cls._REQUIRED_CONFIG:
            if required not in config:
                raise ValueError(f'Invalid config: missing "{required}"')

    @classmethod
    def from_config(cls, config, dims, trials=None, budget='trials.fraction', **kwargs):
        """Fills every knob not given explicitly from the config dictionary."""
        cls.checkconfig(config)
        kwargs.setdefault('bins', config['histogram.bins'])
        thresholds = {
            'npt_threshold': config['tolerance.npt'],
            'trace_tolerance': config['tolerance.trace'],
            'entropy_tolerance': config['tolerance.entropy'],
        }
        return cls(dims, trials=trials or config[budget], range_factor=config['histogram.range_factor'],
                   chunk=config['ensemble.chunk'], max_failure_rate=config['ensemble.max_failure_rate'],
                   thresholds=thresholds, **kwargs)

    @property
    def hist_range(self):
        """[1 - f R~, 1 + f R~] on the scaled axis x = N mu."""
        r = self.dims.r_tilde
        return 1.0 - self.range_factor * r, 1.0 + self.range_factor * r


class Histogram(object):
    """Density-normalized histogram on fixed edges, built from integer counts so chunks add exactly."""

    def __init__(self, edges, counts):
        self._edges = np.asarray(edges, dtype=float)
        self._counts = np.asarray(counts, dtype=np.int64)

    @property
    def edges(self):
        return self._edges

    @property
    def counts(self):
        return self._counts

    @property
    def total(self):
        return int(self._counts.sum())

    @property
    def density(self):
        if self.total == 0:
            return np.zeros(self._counts.size)
        return self._counts / (self.total * np.diff(self._edges))

    def __add__(self, other):
        return Histogram(self._edges, self._counts + other.counts)

    def misfit(self, density):
        """Sup-norm distance to a reference density averaged over the same bins, relative to its peak."""
        return sup_misfit(self.density, bin_averages(density, self._edges))

    def to_rows(self):
        return list(zip(self._edges[:-1].tolist(), self._edges[1:].tolist(), self.density.tolist()))


def make_histogram(samples, bins, value_range=None):
    """Histogram of `samples` with unit area; out-of-range samples are not counted."""
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError('Invalid histogram: no samples')
    counts, edges = np.histogram(samples, bins=bins, range=value_range)
    return Histogram(edges, counts)


def _empty_histogram(bins, value_range):
    return Histogram(np.linspace(value_range[0], value_range[1], bins + 1), np.zeros(bins, dtype=np.int64))


def _run_chunk(dims, field, seed, first, count, thresholds, bins, pt_range, rho_range, keep_spectra):
    """Runs trials first..first+count-1; failures are returned as TrialError, not raised."""
    reports = []
    pt_hist = _empty_histogram(bins, pt_range)
    rho_hist = _empty_histogram(bins, rho_range) if rho_range else None
    spectra = {}
    for trial in range(first, first + count):
        try:
            state = sample_haar_state(dims, field, seed.trial(trial))
            rho_spec, pt_spec = state_spectra(state)
            reports.append(MeasureReport(trial, dims, field, rho_spec, pt_spec, **thresholds))
        except (ValueError, RuntimeError, np.linalg.LinAlgError) as error:
            reports.append(TrialError(trial, str(error)))
            continue
        pt_hist = pt_hist + make_histogram(pt_spec.scaled, bins, pt_range)
        if rho_hist is not None:
            rho_hist = rho_hist + make_histogram(rho_spec.scaled, bins, rho_range)
        if keep_spectra:
            spectra[trial] = (pt_spec.values, partial_transpose(partial_trace(state), dims).to_json())
    return reports, pt_hist, rho_hist, spectra


def make_client(workers=1, cluster=''):
    """A dask client for `workers` local processes or an external scheduler; None means in-process."""
    if not cluster and workers <= 1:
        return None
    from dask.distributed import Client, LocalCluster
    if not cluster:
        cluster = LocalCluster(n_workers=workers, threads_per_worker=1, processes=True)
    return Client(cluster)


def _rho_range(dims):
    if dims.q < 1:
        return None
    geometry = ModelGeometry(dims)
    return 0.0, 1.1 * dims.n * geometry.lambda_plus


def run_trials(config, client=None):
    """All trials of an ensemble experiment, in trial order, with pooled histograms."""
    dims = config.dims
    rho_range = _rho_range(dims)
    keep = config.debug is not None
    chunks = [(first, min(config.chunk, config.trials - first)) for first in range(0, config.trials, config.chunk)]
    args = (config.thresholds, config.bins, config.hist_range, rho_range, keep)

    print(f'CHECKPOINT, {time.time()}, {config.tag}-start, {config.trials}', file=sys.stderr, flush=True)
    if client is None:
        results = []
        for first, count in chunks:
            results.append(_run_chunk(dims, config.field, config.seed, first, count, *args))
            print(f'CHECKPOINT, {time.time()}, chunk, {first + count}', file=sys.stderr, flush=True)
    else:
        import dask.distributed
        futures = [client.submit(_run_chunk, dims, config.field, config.seed, first, count, *args, pure=False)
                   for first, count in chunks]
        dask.distributed.wait(futures)
        results = [future.result() for future in futures]

    reports = []
    failures = []
    pt_hist = _empty_histogram(config.bins, config.hist_range)
    rho_hist = _empty_histogram(config.bins, rho_range) if rho_range else None
    for chunk_reports, chunk_pt, chunk_rho, spectra in results:
        for report in chunk_reports:
            (failures if isinstance(report, TrialError) else reports).append(report)
        pt_hist = pt_hist + chunk_pt
        if rho_hist is not None:
            rho_hist = rho_hist + chunk_rho
        if keep:
            _dump_spectra(config.debug, spectra)

    for failure in failures:
        print(f'WARNING: {failure}', file=sys.stderr, flush=True)
    if len(failures) > config.max_failure_rate * config.trials:
        raise RuntimeError(f'{len(failures)} of {config.trials} trials failed '
                           f'(limit {config.max_failure_rate:.2%}); first: {failures[0]}')
    print(f'CHECKPOINT, {time.time()}, {config.tag}-end, {len(reports)}', file=sys.stderr, flush=True)
    return reports, failures, pt_hist, rho_hist


def _dump_spectra(directory, spectra):
    """One CSV of PT eigenvalues and one JSON of the PT matrix per trial."""
    directory.mkdir(parents=True, exist_ok=True)
    for trial, (values, matrix) in spectra.items():
        write_rows_csv(directory / f'trial{trial:06d}.csv', ['mu'], [[v] for v in values])
        write_json(directory / f'trial{trial:06d}.json', {'trial': trial, 'pt': matrix})


class EnsembleSummary(object):
    """Means and standard errors of every measure, the NPT fraction and the pooled spectra."""

    def __init__(self, dims, field, reports, pt_hist, rho_hist=None, failures=0, seed=None, tag='ensemble'):
        if not reports:
            raise ValueError('Invalid summary: no successful trials')
        self._dims = dims
        self._field = field
        self._trials = len(reports)
        self._failures = failures
        self._seed = seed
        self._tag = tag
        self._stats = {}
        for name in SUMMARY_MEASURES:
            values = np.array([getattr(report, name) for report in reports], dtype=float)
            values = values[~np.isnan(values)]
            self._stats[name] = mean_and_error(values) if values.size else (float('nan'), float('nan'))
        npt = sum(report.is_npt for report in reports)
        self._npt_fraction = npt / self._trials
        multi = sum(report.negative_count >= 2 for report in reports)
        self._multi_negative_fraction = multi / npt if npt else 0.0
        self._pt_hist = pt_hist
        self._rho_hist = rho_hist
        self._pt_misfit = pt_hist.misfit(lambda x: semicircle_scaled(dims, x)) if pt_hist.total else float('nan')
        if rho_hist is not None and rho_hist.total:
            self._rho_misfit = rho_hist.misfit(lambda x: mp_density(dims, x / dims.n) / dims.n)
        else:
            self._rho_misfit = float('nan')

    @property
    def trials(self):
        return self._trials

    @property
    def npt_fraction(self):
        return self._npt_fraction

    @property
    def npt_error(self):
        return binomial_error(self._npt_fraction, self._trials)

    @property
    def multi_negative_fraction(self):
        """Among NPT samples, the share with two or more negative eigenvalues."""
        return self._multi_negative_fraction

    @property
    def pt_histogram(self):
        return self._pt_hist

    @property
    def rho_histogram(self):
        return self._rho_hist

    @property
    def pt_misfit(self):
        return self._pt_misfit

    @property
    def rho_misfit(self):
        return self._rho_misfit

    def mean(self, name):
        return self._stats[name][0]

    def error(self, name):
        return self._stats[name][1]

    def to_dict(self):
        summary = {
            'tag': self._tag,
            'N1': self._dims.n1, 'N2': self._dims.n2, 'N3': self._dims.n3,
            'field': self._field,
            'trials': self._trials,
            'failures': self._failures,
            'seed': self._seed,
        }
        for name in SUMMARY_MEASURES:
            summary[name] = {'mean': self.mean(name), 'error': self.error(name)}
        summary['npt_fraction'] = self._npt_fraction
        summary['npt_error'] = self.npt_error
        summary['multi_negative_fraction'] = self._multi_negative_fraction
        summary['pt_histogram_misfit'] = self._pt_misfit
        summary['rho_histogram_misfit'] = self._rho_misfit
        summary['closed_form'] = closed_form_constants(self._dims, self._field)
        return summary


def run_ensemble(config, client=None):
    """Samples, measures and summarizes `config.trials` random states; writes outputs when `config.out` is set."""
    reports, failures, pt_hist, rho_hist = run_trials(config, client)
    summary = EnsembleSummary(config.dims, config.field, reports, pt_hist, rho_hist, len(failures),
                              config.seed.master_seed, config.tag)
    if config.out:
        write_reports(config.out, reports)
        write_json(config.out.with_name(config.out.name + '.summary.json'), summary.to_dict())
        write_rows_csv(config.out.with_name(config.out.name + '.hist.csv'), ['bin_left', 'bin_right', 'density'],
                       pt_hist.to_rows())
    return summary, reports


def run_critical(config, tw, client=None, shift_max=3.0, step=0.005, min_samples=500):
    """Fits the Tracy-Widom shift to the scaled minimum eigenvalues and compares predictions with the run."""
    if config.trials < min_samples:
        raise ValueError(f'Invalid trials: the shift fit needs at least {min_samples}, got {config.trials}')
    beta = 2 if config.field == 'complex' else 1
    tw = tw.with_beta(beta)
    reports, failures, pt_hist, rho_hist = run_trials(config, client)
    summary = EnsembleSummary(config.dims, config.field, reports, pt_hist, rho_hist, len(failures),
                              config.seed.master_seed, config.tag)
    scaled = scale_min_eigenvalue([report.mu_min for report in reports], config.dims)
    fit = fit_shift(scaled, tw, shift_max, step, min_samples)
    if config.dims.is_critical:
        predicted_logneg = avg_logneg_critical(config.dims, tw, fit.shift)
    else:
        print(f'WARNING: {config.dims} is not critical; no log-negativity prediction', file=sys.stderr, flush=True)
        predicted_logneg = None
    report = {
        'N1': config.dims.n1, 'N2': config.dims.n2, 'N3': config.dims.n3,
        'field': config.field,
        'beta': beta,
        'trials': summary.trials,
        'shift': fit.shift,
        'ks': fit.ks,
        'f_npt_predicted': npt_fraction(tw, fit.shift),
        'f_npt_unshifted': npt_fraction(tw, 0.0),
        'f_npt_observed': summary.npt_fraction,
        'f_npt_error': summary.npt_error,
        'avg_logneg_predicted': predicted_logneg,
        'avg_logneg_observed': summary.mean('log_negativity'),
        'avg_logneg_error': summary.error('log_negativity'),
        'multi_negative_fraction': summary.multi_negative_fraction,
    }
    if config.out:
        write_reports(config.out, reports)
        write_json(config.out.with_name(config.out.name + '.fit.json'), report)
    return report, fit


def run_rotor(params, config, client=None, max_dim=4096):
    """Eigenstate statistics of the coupled rotors, summarized like a random ensemble."""
    from rotor import eigenstate_pipeline
    print(f'CHECKPOINT, {time.time()}, rotor-start, {params.dims.m}', file=sys.stderr, flush=True)
    reports, _, pooled = eigenstate_pipeline(params, client, config.chunk, max_dim, **config.thresholds)
    pt_hist = make_histogram(pooled, config.bins, config.hist_range)
    summary = EnsembleSummary(params.dims, 'complex', reports, pt_hist, None, 0, None, 'rotor')
    print(f'CHECKPOINT, {time.time()}, rotor-end, {len(reports)}', file=sys.stderr, flush=True)
    if config.out:
        write_reports(config.out, reports)
        write_json(config.out.with_name(config.out.name + '.summary.json'), summary.to_dict())
    return summary, reports


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(fmt(value)) if isfinite(value) else None
    return value


def write_json(path, obj):
    with open(path, 'w') as fp:
        json.dump(_jsonable(obj), fp, indent=2)
        fp.write('\n')


def write_rows_csv(path, columns, rows):
    """CSV with a header row and every float written with 17 significant digits."""
    with open(path, 'w', newline='') as fp:
        print(','.join(columns), file=fp)
        for row in rows:
            print(','.join(fmt(value) for value in row), file=fp)


def write_reports(path, reports):
    write_rows_csv(path, MeasureReport.COLUMNS, [report.to_row() for report in reports])


def read_rows_csv(path):
    with open(path, newline='') as fp:
        return list(csv.DictReader(fp, skipinitialspace=True))
