"""Global training: exact gradients, Adam and Xavier initialization.

The forward pass keeps every state z_l and every block increment; the
backward pass walks the blocks in reverse, accumulating the adjoint of the
state through the identity path and the z-branch of each block.
"""
import csv
import logging
from collections import namedtuple
from dataclasses import dataclass, replace

import numpy as np

from deeprff.layerwise import train_layerwise
from deeprff.model import FourierLayer, ResidualNet, predict

__all__ = [
    'LayerGrad', 'GradStore', 'AdamState', 'loss_and_grad', 'adam_update',
    'adam_step', 'xavier_init', 'train_global', 'train_pretrained',
]

logger = logging.getLogger(__name__)

EPOCH_LOG_FIELDS = ('epoch', 'train_mse', 'val_mse', 'lr')

LayerGrad = namedtuple('LayerGrad', (
    'freq_x', 'amp_x_re', 'amp_x_im', 'freq_z', 'amp_z_re', 'amp_z_im'))


class GradStore(tuple):
    """Per-layer partials, one LayerGrad per layer of the network."""

    def flatten(self):
        """Concatenate in the order of ResidualNet.to_vector()."""
        return np.concatenate([
            np.concatenate([grad.freq_x.ravel(), grad.amp_x_re, grad.amp_x_im,
                            grad.freq_z, grad.amp_z_re, grad.amp_z_im])
            for grad in self])


def _term_backward(inputs, freq, amp, seed):
    """Backward pass of Re sum_k amp_k e^{i freq_k . input}.

    Returns the partials for freq, amp.real, amp.imag and the inputs, given
    the adjoint seed of the term's output.
    """
    phase = inputs @ freq.T
    cos, sin = np.cos(phase), np.sin(phase)
    d_phase = seed[:, None] * (-sin * amp.real - cos * amp.imag)
    return (d_phase.T @ inputs, cos.T @ seed, -(sin.T @ seed),
            d_phase @ freq)


def _block_inputs(layer, inputs, states):
    if layer.augmented:
        return np.column_stack([inputs, states])
    return inputs


def loss_and_grad(net, inputs, targets, penalty=0.0):
    """Batch loss and its gradient with respect to every parameter.

    loss = mean |output - y|^2 + penalty * L * mean sum_l |z_{l+1} - z_l|^2
    """
    inputs = np.asarray(inputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    n = inputs.shape[0]
    if not n:
        raise ValueError('empty batch')
    if inputs.shape != (n, net.input_dim) or targets.shape != (n,):
        raise ValueError('batch does not match a net on R^{}'.format(
            net.input_dim))
    weight = penalty * net.depth

    states = [np.zeros(n)]
    increments = []
    for layer in net.layers[1:]:
        z = states[-1]
        step = layer.x_term(_block_inputs(layer, inputs, z))
        if layer.freq_z.shape[0]:
            step = step + layer.z_term(z)
        increments.append(step)
        states.append(z + step)
    beta = net.layers[0].x_term(inputs)
    error = states[-1] + beta - targets
    loss = error @ error / n + weight * sum(u @ u for u in increments) / n

    seed = 2 * error / n
    grads = [None] * net.depth
    d_freq, d_re, d_im, _ = _term_backward(
        inputs, net.layers[0].freq_x, net.layers[0].amp_x, seed)
    grads[0] = LayerGrad(d_freq, d_re, d_im, np.zeros(0), np.zeros(0),
                         np.zeros(0))
    adjoint = seed
    for index in range(net.depth - 1, 0, -1):
        layer, z = net.layers[index], states[index - 1]
        d_step = adjoint + 2 * weight * increments[index - 1] / n
        d_freq, d_re, d_im, d_in = _term_backward(
            _block_inputs(layer, inputs, z), layer.freq_x, layer.amp_x, d_step)
        if layer.augmented:
            adjoint = adjoint + d_in[:, -1]
            z_grads = (np.zeros(0),) * 3
        else:
            dz_freq, dz_re, dz_im, dz_in = _term_backward(
                z.reshape(-1, 1), layer.freq_z.reshape(-1, 1), layer.amp_z,
                d_step)
            adjoint = adjoint + dz_in[:, 0]
            z_grads = (dz_freq[:, 0], dz_re, dz_im)
        grads[index] = LayerGrad(d_freq, d_re, d_im, *z_grads)
    return float(loss), GradStore(grads)


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    rate: float = 1e-3
    step: int = 0
    epoch: int = 1
    b1: float = 0.9
    b2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, size, rate=1e-3, **kwargs):
        return cls(np.zeros(size), np.zeros(size), rate, **kwargs)

    @property
    def learning_rate(self):
        """Base rate divided by the epoch number."""
        return self.rate / self.epoch


def adam_update(state, params, grad):
    """One bias-corrected Adam update of a flat parameter vector."""
    if params.shape != state.m.shape or grad.shape != state.m.shape:
        raise ValueError('parameter and moment shapes differ')
    t = state.step + 1
    m = state.b1 * state.m + (1 - state.b1) * grad
    v = state.b2 * state.v + (1 - state.b2) * grad ** 2
    m_hat = m / (1 - state.b1 ** t)
    v_hat = v / (1 - state.b2 ** t)
    params = params - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
    return params, replace(state, m=m, v=v, step=t)


def adam_step(state, net, grads):
    params, state = adam_update(state, net.to_vector(), grads.flatten())
    return net.with_vector(params), state


def xavier_init(L, K, d, seed):
    """Xavier normal initialization with fan_out = 1.

    x-branch entries have variance 2 / (d + 1), z-branch entries 1.
    """
    if L < 1 or K < 1 or d < 1:
        raise ValueError('L, K and d must be positive')
    rng = np.random.default_rng(seed)
    scale_x, scale_z = np.sqrt(2 / (d + 1)), 1.0

    def branch(shape, scale):
        freq = scale * rng.standard_normal(shape)
        amp = scale * rng.standard_normal(K) + 1j * scale * rng.standard_normal(K)
        return freq, amp

    layers = [FourierLayer(*branch((K, d), scale_x))]
    for _ in range(1, L):
        freq_x, amp_x = branch((K, d), scale_x)
        freq_z, amp_z = branch(K, scale_z)
        layers.append(FourierLayer(freq_x, amp_x, freq_z, amp_z))
    return ResidualNet(d, layers)


def _mse(net, data):
    if data is None:
        return float('nan')
    error = predict(net, data.inputs) - data.targets
    return float(error @ error / len(data))


def train_global(net, data, epochs, batch_size, lr, penalty=0.0, seed=0,
                 validation=None, log_path=None):
    """Shuffled minibatch Adam over all parameters of net."""
    if epochs < 1:
        raise ValueError('epochs must be at least 1, got {}'.format(epochs))
    if batch_size < 1:
        raise ValueError('batch_size must be positive')
    if lr < 0:
        raise ValueError('learning rate must be non-negative')
    rng = np.random.default_rng(seed)
    state = AdamState.zeros(net.to_vector().shape[0], lr)
    log = open(log_path, 'w', newline='') if log_path else None
    try:
        writer = log and csv.writer(log)
        if writer:
            writer.writerow(EPOCH_LOG_FIELDS)
        for epoch in range(1, epochs + 1):
            state = replace(state, epoch=epoch)
            for batch_inputs, batch_targets in data.batches(batch_size, rng):
                _, grads = loss_and_grad(
                    net, batch_inputs, batch_targets, penalty)
                net, state = adam_step(state, net, grads)
            train_mse, val_mse = _mse(net, data), _mse(net, validation)
            logger.info('epoch %d: train mse %.6g, validation mse %.6g, '
                        'lr %.3g', epoch, train_mse, val_mse,
                        state.learning_rate)
            if writer:
                writer.writerow((epoch, repr(train_mse), repr(val_mse),
                                 repr(state.learning_rate)))
    finally:
        if log:
            log.close()
    return net


def train_pretrained(data, n1, L, K, metropolis_cfg, epochs, batch_size, lr,
                     penalty=0.0, seed=0, validation=None, log_path=None,
                     augmented=False):
    """Layer by layer pre-training on the first n1 points, then Adam on all."""
    if not 1 <= n1 <= len(data):
        raise ValueError('N1 = {} must lie in [1, {}]'.format(n1, len(data)))
    net = train_layerwise(data.subset(n1), L, K, metropolis_cfg, augmented)
    logger.info('pre-trained on %d points, training mse on all %d: %.6g',
                n1, len(data), _mse(net, data))
    return train_global(net, data, epochs, batch_size, lr, penalty, seed,
                        validation, log_path)
