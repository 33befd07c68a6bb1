"""Replicated training runs, node-count sweeps and paired comparisons."""
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from deeprff import model as model_io
from deeprff.conf import settings
from deeprff.experiments.config import ConfigError, ExperimentConfig
from deeprff.git import build_id
from deeprff.gradopt import train_global, train_pretrained, xavier_init
from deeprff.layerwise import train_layerwise
from deeprff.model import predict
from deeprff.targets import gen_dataset
from deeprff.utils import write_csv

__all__ = [
    'RESULT_FIELDS', 'SUMMARY_FIELDS', 'ExperimentResult', 'SweepResult',
    'Comparison', 'replica_seeds', 'error_bars', 'fit_slope', 'train_net',
    'run_replica', 'run_experiment', 'sweep_kl', 'compare_methods',
    'write_outputs',
]

logger = logging.getLogger(__name__)

RESULT_FIELDS = ('method', 'd', 'K', 'L', 'KL', 'replica', 'seed', 'error')
SUMMARY_FIELDS = ('method', 'd', 'K', 'L', 'KL', 'replicas', 'mean', 'std',
                  'bar_low', 'bar_high')


def replica_seeds(master, index):
    """(data seed, training seed) of replica index, split from master."""
    sequence = np.random.SeedSequence(master, spawn_key=(index,))
    data_seed, train_seed = sequence.generate_state(2)
    return int(data_seed), int(train_seed)


def error_bars(errors):
    """Mean, sample standard deviation and the two sigma bar.

    >>> [round(value, 6) for value in error_bars([1.0, 3.0])]
    [2.0, 1.414214, -0.828427, 4.828427]
    >>> error_bars([0.5])
    (0.5, 0.0, 0.5, 0.5)
    """
    errors = np.asarray(errors, dtype=float)
    if not errors.shape[0]:
        raise ValueError('no errors to summarize')
    mean = float(errors.mean())
    std = float(errors.std(ddof=1)) if errors.shape[0] > 1 else 0.0
    return mean, std, mean - 2 * std, mean + 2 * std


def fit_slope(kl, errors):
    """Least squares slope of log(error) against log(KL)."""
    kl = np.asarray(kl, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if kl.shape[0] < 3 or kl.shape != errors.shape:
        raise ValueError('need at least 3 (KL, error) pairs')
    if np.any(kl <= 0) or np.any(errors <= 0):
        raise ValueError('KL values and errors must be positive')
    slope, _ = np.polyfit(np.log(kl), np.log(errors), 1)
    return float(slope)


@dataclass
class ExperimentResult:
    method: int
    d: int
    K: int
    L: int
    errors: list
    seeds: list
    models: list = field(default_factory=list, repr=False)

    @property
    def KL(self):
        return self.K * self.L

    @property
    def bars(self):
        return error_bars(self.errors)

    @property
    def mean(self):
        return self.bars[0]

    @property
    def std(self):
        return self.bars[1]

    def rows(self):
        for replica, (seed, error) in enumerate(zip(self.seeds, self.errors)):
            yield {
                'method': self.method, 'd': self.d, 'K': self.K, 'L': self.L,
                'KL': self.KL, 'replica': replica, 'seed': seed,
                'error': repr(error),
            }

    def summary(self):
        mean, std, low, high = self.bars
        return {
            'method': self.method, 'd': self.d, 'K': self.K, 'L': self.L,
            'KL': self.KL, 'replicas': len(self.errors), 'mean': mean,
            'std': std, 'bar_low': low, 'bar_high': high,
        }


def train_net(cfg, train, test, K, L, seed, log_path=None):
    """Train one network with the method cfg selects."""
    if cfg.method == 1:
        return train_layerwise(train, L, K, cfg.metropolis(K, seed),
                               cfg.augmented)
    if cfg.method == 2:
        net = xavier_init(L, K, cfg.d, seed)
        return train_global(net, train, cfg.epochs, cfg.batch_size,
                            cfg.learning_rate, cfg.penalty, seed, test,
                            log_path)
    return train_pretrained(
        train, cfg.N1, L, K, cfg.metropolis(K, seed), cfg.epochs,
        cfg.batch_size, cfg.learning_rate, cfg.penalty, seed, test, log_path,
        cfg.augmented)


def run_replica(values, K, L, index, log_dir=None):
    """Train replica index; values is the plain dict of an ExperimentConfig.

    Returns the training seed, the test mse and the serialized model.
    """
    cfg = ExperimentConfig(values)
    data_seed, train_seed = replica_seeds(cfg.seed, index)
    train, test = gen_dataset(cfg.N, cfg.d, cfg.target, cfg.a, data_seed,
                              cfg.test_size, cfg.normalize_targets, cfg.noise)
    log_path = None
    if log_dir and cfg.method in (2, 3):
        name = 'epochs-method{}-K{}-L{}-{}.csv'.format(cfg.method, K, L, index)
        log_path = os.path.join(log_dir, name)
    logger.info('replica %d: method %d, K=%d, L=%d, seed %d', index,
                cfg.method, K, L, train_seed)
    net = train_net(cfg, train, test, K, L, train_seed, log_path)
    error = predict(net, test.inputs) - test.targets
    mse = float(error @ error / len(test))
    logger.info('replica %d: test mse %.6g', index, mse)
    return train_seed, mse, model_io.dumps(net)


def run_experiment(cfg, K=None, L=None, log_dir=None):
    """Run cfg.replicas independent replicas and collect their test errors.

    Replicas run in worker processes when cfg.threads > 1; results are
    always gathered in replica order.
    """
    cfg.validate()
    if K is None:
        if cfg.kl is not None:
            raise ConfigError('kl: several node counts need sweep_kl')
        K = cfg.K
    L = cfg.L if L is None else L
    values = dict(cfg.as_dict())
    indices = range(cfg.replicas)
    workers = min(cfg.threads, cfg.replicas)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(
                run_replica, [values] * cfg.replicas, [K] * cfg.replicas,
                [L] * cfg.replicas, indices, [log_dir] * cfg.replicas))
    else:
        outcomes = [run_replica(values, K, L, index, log_dir)
                    for index in indices]
    seeds, errors, models = (list(column) for column in zip(*outcomes))
    return ExperimentResult(cfg.method, cfg.d, K, L, errors, seeds, models)


def _manifest(cfg, extra=None):
    manifest = {
        'config': cfg.as_dict(),
        'build': build_id(),
    }
    try:
        manifest['settings'] = settings.as_dict()
    except KeyError:
        pass
    manifest.update(extra or {})
    return manifest


def write_outputs(cfg, results, output=None, extra=None, save_models=True):
    """Write results.csv, summary.csv, manifest.json and the model files."""
    output = output or cfg.output
    os.makedirs(output, exist_ok=True)
    write_csv(os.path.join(output, 'results.csv'), RESULT_FIELDS,
              [row for result in results for row in result.rows()])
    write_csv(os.path.join(output, 'summary.csv'), SUMMARY_FIELDS,
              [result.summary() for result in results])
    with open(os.path.join(output, 'manifest.json'), 'w') as f:
        json.dump(_manifest(cfg, extra), f, indent=1)
    if save_models:
        models = os.path.join(output, 'models')
        os.makedirs(models, exist_ok=True)
        for result in results:
            for replica, text in enumerate(result.models):
                name = 'method{}-K{}-L{}-{}.json'.format(
                    result.method, result.K, result.L, replica)
                with open(os.path.join(models, name), 'w') as f:
                    f.write(text)
    return output


@dataclass
class SweepResult:
    results: list
    slope: float

    @property
    def kl(self):
        return [result.KL for result in self.results]

    @property
    def means(self):
        return [result.mean for result in self.results]


def sweep_kl(cfg, log_dir=None):
    """One experiment per entry of cfg.kl, plus the log-log slope."""
    cfg.validate()
    if cfg.kl is None or len(cfg.kl) < 3:
        raise ConfigError('kl: a sweep needs at least 3 values')
    results = [run_experiment(cfg, K, L, log_dir)
               for K, L in cfg.node_counts()]
    slope = fit_slope([r.KL for r in results], [r.mean for r in results])
    logger.info('sweep over KL=%s: slope %.4f', cfg.kl, slope)
    return SweepResult(results, slope)


@dataclass
class Comparison:
    first: ExperimentResult
    second: ExperimentResult

    @property
    def wins(self):
        """Replicas where the first method has the smaller test error."""
        return sum(a < b for a, b in zip(self.first.errors,
                                         self.second.errors))

    @property
    def win_rate(self):
        """Fraction of paired replicas won by the method with lower mean."""
        n = len(self.first.errors)
        if self.first.mean <= self.second.mean:
            return self.wins / n
        return sum(b < a for a, b in zip(self.first.errors,
                                         self.second.errors)) / n

    @property
    def better(self):
        if self.first.mean <= self.second.mean:
            return self.first.method
        return self.second.method


def compare_methods(first, second, log_dir=None):
    """Matched-seed runs of two configs that differ only in the method."""
    a, b = first.as_dict(), second.as_dict()
    a.pop('method')
    b.pop('method')
    mismatched = [key for key in a if a[key] != b[key]]
    if mismatched:
        raise ConfigError('configs differ beyond the method: {}'.format(
            ', '.join(mismatched)))
    if first.kl is not None:
        raise ConfigError('kl: compare runs a single node count')
    return Comparison(run_experiment(first, log_dir=log_dir),
                      run_experiment(second, log_dir=log_dir))
