"""Layer by layer training of residual networks on residuals."""
import logging

import numpy as np

from deeprff.metropolis import (
    arfm_augmented_train, arfm_residual_train, arfm_train)
from deeprff.model import ResidualNet, block_increment, staged_outputs

__all__ = ['layer_seed', 'train_layerwise', 'layer_mse_trace']

logger = logging.getLogger(__name__)

CHAIN_STREAM = 0
FREQ_Z_STREAM = 1


def layer_seed(master, layer, stream=CHAIN_STREAM):
    """Derive an independent seed for one layer from the master seed.

    >>> layer_seed(7, 2) == layer_seed(7, 2)
    True
    >>> layer_seed(7, 2) == layer_seed(7, 3)
    False
    """
    sequence = np.random.SeedSequence([master, layer, stream])
    return int(sequence.generate_state(1)[0])


def _mse(values):
    return float(np.mean(values ** 2))


def train_layerwise(data, L, K, cfg, augmented=False):
    """Fit layer 0 to the targets, then each block to the current residual.

    Block l sees the states z_l of the blocks before it, beta excluded, so
    the trained network evaluates exactly like the training loop. This is
    the state recursion of `forward_batch`, which starts from z_1 = 0.
    """
    if L < 1 or K < 1:
        raise ValueError('L and K must be positive, got L={} K={}'.format(L, K))
    inputs, targets = data.inputs, data.targets
    layers = [arfm_train(
        data, cfg.replace(nodes=K, seed=layer_seed(cfg.seed, 0)))]
    fitted = layers[0].x_term(inputs)
    states = np.zeros(len(data))
    residuals = targets - fitted
    logger.info('layer 0: training mse %.6g', _mse(residuals))
    for index in range(1, L):
        layer_cfg = cfg.replace(nodes=K, seed=layer_seed(cfg.seed, index))
        label = 'layer {}'.format(index)
        if augmented:
            layer = arfm_augmented_train(
                data, residuals, states, layer_cfg, label=label)
        else:
            layer = arfm_residual_train(
                data, residuals, states, layer_cfg,
                layer_seed(cfg.seed, index, FREQ_Z_STREAM), label=label)
        states = states + block_increment(layer, inputs, states)
        residuals = targets - fitted - states
        layers.append(layer)
        logger.info('%s: training mse %.6g', label, _mse(residuals))
    return ResidualNet(data.dim, layers)


def layer_mse_trace(net, data):
    """Training mse of the output after each block."""
    staged = staged_outputs(net, data.inputs)
    return np.mean((staged - data.targets) ** 2, axis=1)
