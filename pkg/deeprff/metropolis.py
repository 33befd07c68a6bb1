"""Adaptive random Fourier features with Metropolis sampling.

A random walk over the K frequencies: every proposal moves all of them by
step * N(0, I), re-solves the ridge problem, and each node k keeps its
proposed frequency when |b'_k|^gamma / |b_k|^gamma exceeds a uniform draw.
Random numbers come from one generator per chain, drawn per iteration as
the K x d proposal increment followed by K uniforms.
"""
import logging
from dataclasses import dataclass

import numpy as np

from deeprff.linalg import (
    RidgeProblem, assemble_design_x, assemble_design_resid, solve_ridge,
    to_complex)
from deeprff.model import FourierLayer

__all__ = [
    'MetropolisConfig', 'ChainStats', 'acceptance_ratio', 'run_chain',
    'arfm_train', 'arfm_residual_train', 'arfm_augmented_train',
    'default_step', 'default_gamma',
]

logger = logging.getLogger(__name__)


def default_step(d):
    return 0.5 * 2.4 ** 2 / d


def default_gamma(d):
    return 3 * d - 2


@dataclass(frozen=True)
class MetropolisConfig:
    nodes: int
    sampling_time: float = None
    step: float = 1.0
    gamma: float = 1.0
    tikhonov: float = 1.1
    refresh: int = 1
    seed: int = 0
    iterations: int = None

    def __post_init__(self):
        if self.nodes < 1:
            raise ValueError('nodes must be positive')
        if self.gamma <= 0:
            raise ValueError('gamma must be positive')
        if self.tikhonov < 0:
            raise ValueError('tikhonov must be non-negative')
        if self.refresh < 1:
            raise ValueError('refresh must be at least 1')
        if self.iterations is None:
            if self.sampling_time is None:
                raise ValueError('either sampling_time or iterations is needed')
            if not self.step > 0:
                raise ValueError('step must be positive')
            if self.steps < 1:
                raise ValueError(
                    'sampling_time / step^2 must be at least 1')
        elif self.iterations < 0 or self.step < 0:
            raise ValueError('iterations and step must be non-negative')

    @classmethod
    def for_dimension(cls, d, nodes, iterations, **kwargs):
        kwargs.setdefault('step', default_step(d))
        kwargs.setdefault('gamma', default_gamma(d))
        return cls(nodes=nodes, iterations=iterations, **kwargs)

    @property
    def steps(self):
        """Chain length M, the integer part of T / step^2."""
        if self.iterations is not None:
            return self.iterations
        # tolerate rounding in T = M * step^2
        return int(self.sampling_time / self.step ** 2 * (1 + 1e-12))

    def replace(self, **kwargs):
        values = dict(self.__dict__)
        values.update(kwargs)
        return type(self)(**values)


@dataclass
class ChainStats:
    proposals: int
    accepted: np.ndarray

    @property
    def acceptance_rate(self):
        if not self.proposals:
            return 0.0
        return float(self.accepted.sum()) / (self.proposals * len(self.accepted))


def acceptance_ratio(proposed, current, gamma):
    """Per-node ratio |proposed|^gamma / |current|^gamma.

    A vanishing current amplitude gives +inf when the proposed one is
    non-zero and 0 when both vanish.
    """
    proposed, current = np.abs(proposed), np.abs(current)
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = (proposed / current) ** gamma
    return np.where(current > 0, ratio,
                    np.where(proposed > 0, np.inf, 0.0))


def run_chain(design, targets, dim, cfg, rng, label='chain'):
    """Sample K frequencies in R^dim; design(omega) builds the matrix.

    The first 2K design columns must belong to the sampled frequencies.
    Returns the final frequencies, the final ridge coefficients and the
    chain statistics.
    """
    k = cfg.nodes

    def solve(omega):
        return solve_ridge(RidgeProblem(design(omega), targets, cfg.tikhonov))

    omega = np.zeros((k, dim))
    amplitudes = to_complex(solve(omega)[:2 * k])
    stats = ChainStats(cfg.steps, np.zeros(k, dtype=int))
    report_every = max(1, cfg.steps // 10)
    for i in range(1, cfg.steps + 1):
        proposal = omega + cfg.step * rng.standard_normal((k, dim))
        proposed = to_complex(solve(proposal)[:2 * k])
        uniforms = rng.random(k)
        accept = acceptance_ratio(proposed, amplitudes, cfg.gamma) > uniforms
        omega[accept] = proposal[accept]
        amplitudes[accept] = proposed[accept]
        stats.accepted += accept
        if i % cfg.refresh == 0:
            amplitudes = to_complex(solve(omega)[:2 * k])
        if i % report_every == 0:
            logger.debug('%s: iteration %d/%d, acceptance rate %.3f',
                         label, i, cfg.steps,
                         stats.accepted.sum() / (i * k))
    logger.info('%s: %d iterations, acceptance rate %.3f',
                label, cfg.steps, stats.acceptance_rate)
    return omega, solve(omega), stats


def _check_size(n, columns):
    if columns > n:
        logger.warning('%d real unknowns for %d data points; the least '
                       'squares problem is underdetermined', columns, n)


def arfm_train(data, cfg, with_stats=False):
    """Train a one-layer network (x-branch only) on data.inputs/targets.

    With with_stats the chain statistics are returned next to the layer.
    """
    if not len(data):
        raise ValueError('empty dataset')
    _check_size(len(data), 2 * cfg.nodes)
    rng = np.random.default_rng(cfg.seed)
    omega, coef, stats = run_chain(
        lambda omega: assemble_design_x(data.inputs, omega),
        data.targets, data.dim, cfg, rng, label='layer 0')
    layer = FourierLayer(omega, to_complex(coef))
    return (layer, stats) if with_stats else layer


def _check_lengths(data, residuals, states):
    residuals = np.asarray(residuals, dtype=float)
    states = np.asarray(states, dtype=float)
    if not len(data):
        raise ValueError('empty dataset')
    if residuals.shape != (len(data),) or states.shape != (len(data),):
        raise ValueError('residuals and states need one value per point')
    return residuals, states


def arfm_residual_train(data, residuals, states, cfg, freq_z_seed,
                        label='residual layer'):
    """Fit a residual block to residuals; only x-frequencies are sampled.

    The K state frequencies are drawn once from N(0, 1) with freq_z_seed.
    """
    residuals, states = _check_lengths(data, residuals, states)
    k = cfg.nodes
    _check_size(len(data), 4 * k)
    freq_z = np.random.default_rng(freq_z_seed).standard_normal(k)
    rng = np.random.default_rng(cfg.seed)
    omega, coef, _ = run_chain(
        lambda omega: assemble_design_resid(
            data.inputs, states, omega, freq_z),
        residuals, data.dim, cfg, rng, label=label)
    amplitudes = to_complex(coef)
    return FourierLayer(omega, amplitudes[:k], freq_z, amplitudes[k:])


def arfm_augmented_train(data, residuals, states, cfg,
                         label='augmented layer'):
    """Fit a one-layer network on the augmented inputs (x, z_l)."""
    residuals, states = _check_lengths(data, residuals, states)
    _check_size(len(data), 2 * cfg.nodes)
    inputs = np.column_stack([data.inputs, states])
    rng = np.random.default_rng(cfg.seed)
    omega, coef, _ = run_chain(
        lambda omega: assemble_design_x(inputs, omega),
        residuals, inputs.shape[1], cfg, rng, label=label)
    return FourierLayer(omega, to_complex(coef), augmented=True)
