"""Experiment configuration: typed fields, JSON files and command-line flags.

Values are resolved as command line > config file > session settings >
defaults. The environment variable DEEPRFF_SEED replaces the master seed
unless the command line gives one, and DEEPRFF_THREADS caps the replica
parallelism.
"""
import argparse
import json
import os
from collections import OrderedDict

from deeprff.metropolis import MetropolisConfig, default_gamma, default_step
from deeprff.plugins.settings import (
    BoolSetting, FloatSetting, IntListSetting, IntSetting, Settings,
    StrSetting)
from deeprff.targets import DEFAULT_A, TARGETS

__all__ = ['ConfigError', 'ExperimentConfig', 'FIELDS']


class ConfigError(ValueError): pass


FIELDS = OrderedDict([
    ('method', IntSetting(default=1, choices=(1, 2, 3),
                          help='1 layer by layer, 2 Xavier + Adam, '
                               '3 layer by layer + Adam')),
    ('target', StrSetting(default='f1', choices=tuple(sorted(TARGETS)))),
    ('d', IntSetting(default=3, minimum=1, help='input dimension')),
    ('K', IntSetting(minimum=1, help='nodes per layer')),
    ('L', IntSetting(default=1, minimum=1, help='number of layers')),
    ('kl', IntListSetting(help='total node counts K*L for a sweep')),
    ('N', IntSetting(default=2000, minimum=2, help='training points')),
    ('N_test', IntSetting(minimum=1, help='test points (default: N)')),
    ('N1', IntSetting(minimum=1, help='pre-training points of method 3')),
    ('replicas', IntSetting(default=1, minimum=1)),
    ('a', FloatSetting(default=DEFAULT_A, help='target sharpness')),
    ('iterations', IntSetting(minimum=0, help='Metropolis iterations M')),
    ('step', FloatSetting(minimum=0.0,
                          help='proposal step (default: 0.5*2.4^2/d)')),
    ('gamma', FloatSetting(help='acceptance exponent (default: 3d-2)')),
    ('tikhonov', FloatSetting(default=1.1, minimum=0.0)),
    ('refresh', IntSetting(default=1, minimum=1,
                           help='amplitude refresh interval m')),
    ('epochs', IntSetting(minimum=1)),
    ('batch_size', IntSetting(default=100, minimum=1)),
    ('learning_rate', FloatSetting(default=1e-3, minimum=0.0)),
    ('penalty', FloatSetting(default=0.0, minimum=0.0)),
    ('normalize_targets', BoolSetting(default=True)),
    ('noise', FloatSetting(default=0.0, minimum=0.0)),
    ('augmented', BoolSetting(default=False,
                              help='blocks see (x, z) as one input')),
    ('seed', IntSetting(default=0, minimum=0)),
    ('threads', IntSetting(default=1, minimum=1)),
    ('output', StrSetting(default='results')),
])

ENV_SEED = 'DEEPRFF_SEED'
ENV_THREADS = 'DEEPRFF_THREADS'


def _parse(text):
    try:
        values = json.loads(text)
    except ValueError as e:
        raise ConfigError('not a JSON document: {}'.format(e))
    if not isinstance(values, dict):
        raise ConfigError('config must be a JSON object')
    return values


class ExperimentConfig(Settings):
    def __init__(self, values=None, **kwargs):
        super().__init__()
        self.variables = OrderedDict(FIELDS)
        self.update(values or {})
        self.update(kwargs)

    def __setitem__(self, key, value):
        try:
            super().__setitem__(key, value)
        except KeyError:
            raise ConfigError('unknown field "{}"'.format(key))
        except (TypeError, ValueError) as e:
            raise ConfigError('{}: {}'.format(key, e))

    def __eq__(self, other):
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __repr__(self):
        return 'ExperimentConfig({!r})'.format(self.as_dict())

    def update(self, values):
        for key, value in values.items():
            self[key] = value
        return self

    def as_dict(self):
        return OrderedDict((key, self[key]) for key in self.keys())

    def replace(self, **kwargs):
        return ExperimentConfig(self.as_dict(), **kwargs)

    def dumps(self):
        return json.dumps(self.as_dict(), indent=1)

    @classmethod
    def loads(cls, text):
        return cls(_parse(text))

    @classmethod
    def from_file(cls, path):
        with open(path) as f:
            return cls.loads(f.read())

    @classmethod
    def add_arguments(cls, parser):
        """Add a --<field> flag for every field, plus --config."""
        parser.add_argument('--config', help='JSON config file')
        for name, setting in FIELDS.items():
            flag = '--' + name.replace('_', '-')
            parser.add_argument(
                flag, dest=name, default=argparse.SUPPRESS, metavar='VALUE',
                help=setting.help)

    @classmethod
    def from_args(cls, args, environ=None, defaults=None):
        """Resolve a config from parsed flags.

        defaults (the session settings of the shell) sit between the field
        defaults and the config file.
        """
        environ = os.environ if environ is None else environ
        cfg = cls(defaults or {})
        if getattr(args, 'config', None):
            with open(args.config) as f:
                cfg.update(_parse(f.read()))
        if environ.get(ENV_SEED):
            cfg['seed'] = environ[ENV_SEED]
        cfg.update({name: getattr(args, name) for name in FIELDS
                    if hasattr(args, name)})
        if environ.get(ENV_THREADS):
            cap = IntSetting(minimum=1).clean(environ[ENV_THREADS])
            cfg['threads'] = min(cfg.threads, cap)
        return cfg

    @property
    def proposal_step(self):
        return default_step(self.d) if self.step is None else self.step

    @property
    def acceptance_exponent(self):
        return default_gamma(self.d) if self.gamma is None else self.gamma

    @property
    def test_size(self):
        return self.N if self.N_test is None else self.N_test

    def node_counts(self):
        """(K, L) pairs of the run: one per kl entry, or the single K."""
        if self.kl is None:
            return [(self.K, self.L)]
        pairs = []
        for total in self.kl:
            if total % self.L:
                raise ConfigError(
                    'kl: {} is not a multiple of L={}'.format(total, self.L))
            pairs.append((total // self.L, self.L))
        return pairs

    def validate(self):
        if self.K is None and self.kl is None:
            raise ConfigError('K: required unless kl is given')
        self.node_counts()
        if self.method in (1, 3):
            if self.iterations is None:
                raise ConfigError('iterations: required for method {}'.format(
                    self.method))
            if self.acceptance_exponent <= 0:
                raise ConfigError('gamma: must be positive')
        if self.method in (2, 3) and self.epochs is None:
            raise ConfigError('epochs: required for method {}'.format(
                self.method))
        if self.method == 3:
            if self.N1 is None:
                raise ConfigError('N1: required for method 3')
            if self.N1 > self.N:
                raise ConfigError('N1: {} exceeds N={}'.format(self.N1, self.N))
        if self.augmented and self.method == 2:
            raise ConfigError('augmented: only layer by layer training '
                              'builds augmented blocks')
        if not self.a > 0:
            raise ConfigError('a: must be positive')
        return self

    def metropolis(self, nodes, seed):
        return MetropolisConfig(
            nodes=nodes, step=self.proposal_step,
            gamma=self.acceptance_exponent, tikhonov=self.tikhonov,
            refresh=self.refresh, seed=seed, iterations=self.iterations)
