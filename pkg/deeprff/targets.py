"""Target functions built on the sine integral, and their datasets."""
import json
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import sici

__all__ = [
    'TARGETS', 'si', 'f1', 'f2', 'NormStats', 'Dataset', 'gen_dataset',
    'save_dataset', 'load_dataset',
]

logger = logging.getLogger(__name__)

DEFAULT_A = 1e-2

# maximum of the sine integral, attained at pi
SI_MAX = 1.851937051982466


def si(v):
    """Sine integral, the integral of sin(t)/t from 0 to v.

    >>> float(si(0.0))
    0.0
    >>> round(float(si(1.0)), 12)
    0.946083070367
    """
    value = sici(v)[0]
    if np.ndim(value) == 0:
        return float(value)
    return value


def _check_a(a):
    if not a > 0:
        raise ValueError('a must be positive, got {}'.format(a))


def f1(x, a=DEFAULT_A):
    _check_a(a)
    x = np.asarray(x, dtype=float)
    return si(x[..., 0] / a) * np.exp(-np.sum(x ** 2, axis=-1) / 2)


def f2(x, a=DEFAULT_A):
    _check_a(a)
    x = np.asarray(x, dtype=float)
    return si(x[..., 0] / a) * np.exp(-x[..., 0] ** 2 / 2)


TARGETS = {'f1': f1, 'f2': f2}


@dataclass(frozen=True, eq=False)
class NormStats:
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float = 0.0
    y_std: float = 1.0

    @classmethod
    def fit(cls, inputs, targets, normalize_targets=True):
        x_mean, x_std = inputs.mean(axis=0), inputs.std(axis=0)
        if np.any(x_std == 0):
            raise ValueError('an input component has zero spread')
        if normalize_targets:
            y_std = float(targets.std())
            return cls(x_mean, x_std, float(targets.mean()),
                       y_std if y_std > 0 else 1.0)
        return cls(x_mean, x_std)

    def normalize(self, inputs):
        return (np.asarray(inputs) - self.x_mean) / self.x_std

    def denormalize(self, inputs):
        return np.asarray(inputs) * self.x_std + self.x_mean

    def normalize_targets(self, targets):
        return (np.asarray(targets) - self.y_mean) / self.y_std

    def denormalize_targets(self, targets):
        return np.asarray(targets) * self.y_std + self.y_mean

    def to_dict(self):
        return {
            'x_mean': self.x_mean.tolist(), 'x_std': self.x_std.tolist(),
            'y_mean': self.y_mean, 'y_std': self.y_std,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(np.array(data['x_mean'], dtype=float),
                   np.array(data['x_std'], dtype=float),
                   float(data['y_mean']), float(data['y_std']))


@dataclass(frozen=True, eq=False)
class Dataset:
    inputs: np.ndarray
    targets: np.ndarray
    norm_stats: NormStats
    seed: int = None

    def __post_init__(self):
        if self.inputs.ndim != 2:
            raise ValueError('inputs must be an N x d matrix')
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError('got {} inputs and {} targets'.format(
                self.inputs.shape[0], self.targets.shape[0]))

    def __len__(self):
        return self.inputs.shape[0]

    @property
    def dim(self):
        return self.inputs.shape[1]

    def subset(self, n):
        if not 1 <= n <= len(self):
            raise ValueError('cannot take {} of {} points'.format(n, len(self)))
        return Dataset(self.inputs[:n], self.targets[:n], self.norm_stats,
                       self.seed)

    def batches(self, size, rng):
        order = rng.permutation(len(self))
        for start in range(0, len(self), size):
            index = order[start:start + size]
            yield self.inputs[index], self.targets[index]


def gen_dataset(n, d, target='f1', a=DEFAULT_A, seed=0, n_test=None,
                normalize_targets=True, noise=0.0):
    """Draw standard normal inputs, evaluate the target and normalize.

    Both sets are normalized with the statistics of the training set.
    """
    if n < 2:
        raise ValueError('need at least 2 training points, got {}'.format(n))
    if d < 1:
        raise ValueError('dimension must be positive, got {}'.format(d))
    try:
        fn = TARGETS[target]
    except KeyError:
        raise ValueError('unknown target "{}"'.format(target))
    n_test = n if n_test is None else n_test
    rng = np.random.default_rng(seed)
    x_train = rng.standard_normal((n, d))
    x_test = rng.standard_normal((n_test, d))
    y_train, y_test = fn(x_train, a), fn(x_test, a)
    if noise:
        y_train = y_train + noise * rng.standard_normal(n)
        y_test = y_test + noise * rng.standard_normal(n_test)
    stats = NormStats.fit(x_train, y_train, normalize_targets)
    logger.debug('generated %s dataset: n=%d, n_test=%d, d=%d, seed=%s',
                 target, n, n_test, d, seed)
    train = Dataset(stats.normalize(x_train), stats.normalize_targets(y_train),
                    stats, seed)
    test = Dataset(stats.normalize(x_test), stats.normalize_targets(y_test),
                   stats, seed)
    return train, test


def save_dataset(dataset, path):
    header = ','.join(
        ['x_{}'.format(i) for i in range(1, dataset.dim + 1)] + ['y'])
    table = np.column_stack([dataset.inputs, dataset.targets])
    np.savetxt(path, table, fmt='%.17g', delimiter=',', header=header,
               comments='')
    with open(path + '.json', 'w') as f:
        json.dump({'seed': dataset.seed,
                   'norm_stats': dataset.norm_stats.to_dict()}, f, indent=1)


def load_dataset(path):
    with open(path) as f:
        header = f.readline().strip().split(',')
    if not header or header[-1] != 'y':
        raise ValueError('{}: last column must be "y"'.format(path))
    table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    if table.shape[1] != len(header):
        raise ValueError('{}: expected {} columns'.format(path, len(header)))
    with open(path + '.json') as f:
        meta = json.load(f)
    return Dataset(table[:, :-1], table[:, -1],
                   NormStats.from_dict(meta['norm_stats']), meta.get('seed'))
