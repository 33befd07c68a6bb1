"""Residual random Fourier feature networks.

Layer 0 is the shallow network beta(x). Residual layers l = 1..L-1 update
the scalar state

    z_{l+1} = z_l + Re sum_k b_lk e^{i w_lk z_l} + Re sum_k c_lk e^{i w'_lk . x}

starting from z_1 = 0, and the network output is z_L + beta(x).
"""
import json
from collections import namedtuple
from dataclasses import dataclass
from importlib import resources

import numpy as np

__all__ = [
    'FourierLayer', 'ResidualNet', 'ForwardTrace', 'ModelFormatError',
    'eval_beta', 'forward', 'forward_batch', 'predict', 'staged_outputs',
    'flatten_shallow', 'dumps', 'loads', 'save', 'load',
]


class ModelFormatError(Exception): pass


ForwardTrace = namedtuple('ForwardTrace', ('states', 'output'))


def _frozen(values, dtype):
    values = np.array(values, dtype=dtype)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class FourierLayer:
    freq_x: np.ndarray
    amp_x: np.ndarray
    freq_z: np.ndarray = ()
    amp_z: np.ndarray = ()
    augmented: bool = False

    def __post_init__(self):
        freq_x = np.asarray(self.freq_x, dtype=float)
        if freq_x.ndim == 1:
            freq_x = freq_x.reshape(-1, 1)
        object.__setattr__(self, 'freq_x', _frozen(freq_x, float))
        object.__setattr__(self, 'amp_x', _frozen(
            np.ravel(self.amp_x), complex))
        object.__setattr__(self, 'freq_z', _frozen(
            np.ravel(self.freq_z), float))
        object.__setattr__(self, 'amp_z', _frozen(
            np.ravel(self.amp_z), complex))
        if self.freq_x.ndim != 2:
            raise ValueError('freq_x must be a K x d matrix')
        if self.freq_x.shape[0] != self.amp_x.shape[0]:
            raise ValueError('freq_x and amp_x lengths differ')
        if self.freq_z.shape[0] != self.amp_z.shape[0]:
            raise ValueError('freq_z and amp_z lengths differ')
        if self.augmented and self.freq_z.shape[0]:
            raise ValueError('augmented layers have no z-branch')
        for name in ('freq_x', 'amp_x', 'freq_z', 'amp_z'):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError('{} has non-finite entries'.format(name))

    @property
    def nodes(self):
        return self.amp_x.shape[0]

    @property
    def dim(self):
        return self.freq_x.shape[1]

    def x_term(self, inputs):
        return _fourier_sum(inputs @ self.freq_x.T, self.amp_x)

    def z_term(self, states):
        return _fourier_sum(np.outer(states, self.freq_z), self.amp_z)

    def __eq__(self, other):
        if not isinstance(other, FourierLayer):
            return NotImplemented
        return (self.augmented == other.augmented and all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ('freq_x', 'amp_x', 'freq_z', 'amp_z')))


def _fourier_sum(phase, amplitudes):
    return np.cos(phase) @ amplitudes.real - np.sin(phase) @ amplitudes.imag


@dataclass(frozen=True)
class ResidualNet:
    input_dim: int
    layers: tuple

    def __post_init__(self):
        object.__setattr__(self, 'layers', tuple(self.layers))
        if not self.layers:
            raise ValueError('a network needs at least one layer')
        beta = self.layers[0]
        if beta.freq_z.shape[0] or beta.augmented:
            raise ValueError('layer 0 has an x-branch only')
        for index, layer in enumerate(self.layers):
            expected = self.input_dim + (1 if layer.augmented else 0)
            if layer.nodes and layer.dim != expected:
                raise ValueError(
                    'layer {}: freq_x in R^{}, expected R^{}'.format(
                        index, layer.dim, expected))

    @property
    def depth(self):
        return len(self.layers)

    def to_vector(self):
        parts = []
        for layer in self.layers:
            parts += [
                layer.freq_x.ravel(), layer.amp_x.real, layer.amp_x.imag,
                layer.freq_z, layer.amp_z.real, layer.amp_z.imag,
            ]
        return np.concatenate(parts)

    def with_vector(self, vector):
        vector = np.asarray(vector, dtype=float)
        layers = []
        pos = 0

        def take(count):
            nonlocal pos
            chunk = vector[pos:pos + count]
            pos += count
            return chunk

        for layer in self.layers:
            k, kz = layer.nodes, layer.freq_z.shape[0]
            freq_x = take(layer.freq_x.size).reshape(layer.freq_x.shape)
            amp_x = take(k) + 1j * take(k)
            freq_z = take(kz)
            amp_z = take(kz) + 1j * take(kz)
            layers.append(
                FourierLayer(freq_x, amp_x, freq_z, amp_z, layer.augmented))
        if pos != vector.shape[0]:
            raise ValueError('parameter vector has {} entries, expected {}'
                             .format(vector.shape[0], pos))
        return ResidualNet(self.input_dim, layers)


def _as_batch(net, inputs):
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim == 1:
        inputs = inputs.reshape(-1, net.input_dim)
    if inputs.ndim != 2 or inputs.shape[1] != net.input_dim:
        raise ValueError('inputs must lie in R^{}'.format(net.input_dim))
    return inputs


def block_increment(layer, inputs, states):
    if layer.augmented:
        return layer.x_term(np.column_stack([inputs, states]))
    return layer.z_term(states) + layer.x_term(inputs)


def forward_batch(net, inputs):
    """Return the states z_1..z_L as an L x N array and beta(x)."""
    inputs = _as_batch(net, inputs)
    states = np.zeros((net.depth, inputs.shape[0]))
    for index, layer in enumerate(net.layers[1:], 1):
        states[index] = states[index - 1] + block_increment(
            layer, inputs, states[index - 1])
    return states, net.layers[0].x_term(inputs)


def eval_beta(net, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (net.input_dim,):
        raise ValueError('x must lie in R^{}'.format(net.input_dim))
    return float(net.layers[0].x_term(x.reshape(1, -1))[0])


def forward(net, x):
    """States z_1..z_L at x and the output z_L + beta(x).

    There is one state per layer of net, z_1 = 0 included, so a net of depth
    L has L states and L - 1 residual blocks.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (net.input_dim,):
        raise ValueError('x must lie in R^{}'.format(net.input_dim))
    states, beta = forward_batch(net, x.reshape(1, -1))
    return ForwardTrace(states[:, 0], float(states[-1, 0] + beta[0]))


def predict(net, inputs):
    states, beta = forward_batch(net, inputs)
    return states[-1] + beta


def staged_outputs(net, inputs):
    """Network output after each block: row l is beta + z_{l+1}."""
    states, beta = forward_batch(net, inputs)
    return states + beta


def flatten_shallow(net):
    """Collapse a net without z-branch amplitudes into one hidden layer."""
    for index, layer in enumerate(net.layers):
        if layer.augmented or np.any(layer.amp_z != 0):
            raise ValueError(
                'layer {} depends on the state; cannot flatten'.format(index))
    freq_x = np.vstack([layer.freq_x for layer in net.layers])
    amp_x = np.concatenate([layer.amp_x for layer in net.layers])
    return ResidualNet(net.input_dim, [FourierLayer(freq_x, amp_x)])


def _schema():
    text = resources.files('deeprff').joinpath(
        'data/model-schema.json').read_text()
    return json.loads(text)


def dumps(net):
    schema = _schema()
    layers = []
    for layer in net.layers:
        layers.append({
            'augmented': layer.augmented,
            'freq_x': layer.freq_x.tolist(),
            'amp_x_re': layer.amp_x.real.tolist(),
            'amp_x_im': layer.amp_x.imag.tolist(),
            'freq_z': layer.freq_z.tolist(),
            'amp_z_re': layer.amp_z.real.tolist(),
            'amp_z_im': layer.amp_z.imag.tolist(),
        })
    document = {
        'format': schema['format'],
        'version': schema['version'],
        'input_dim': net.input_dim,
        'layers': layers,
    }
    return json.dumps(document, indent=1)


def _field(document, key, where):
    try:
        return document[key]
    except (KeyError, TypeError):
        raise ModelFormatError('{}{}: missing'.format(where, key))


def _floats(document, key, where, shape=None):
    value = _field(document, key, where)
    try:
        array = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ModelFormatError('{}{}: not an array of numbers'.format(
            where, key))
    if shape is not None and array.size == 0:
        array = array.reshape(shape)
    return array


def loads(text):
    schema = _schema()
    try:
        document = json.loads(text)
    except ValueError as e:
        raise ModelFormatError('not a model document: {}'.format(e))
    if not isinstance(document, dict):
        raise ModelFormatError('not a model document')
    if _field(document, 'format', '') != schema['format']:
        raise ModelFormatError('format: expected "{}"'.format(
            schema['format']))
    version = _field(document, 'version', '')
    if version != schema['version']:
        raise ModelFormatError(
            'version: file has {}, this build reads {}'.format(
                version, schema['version']))
    input_dim = _field(document, 'input_dim', '')
    if not isinstance(input_dim, int) or input_dim < 1:
        raise ModelFormatError('input_dim: must be a positive integer')
    entries = _field(document, 'layers', '')
    if not isinstance(entries, list) or not entries:
        raise ModelFormatError('layers: must be a non-empty list')
    layers = []
    for index, entry in enumerate(entries):
        where = 'layers[{}].'.format(index)
        for key in schema['layer_fields']:
            _field(entry, key, where)
        augmented = bool(entry['augmented'])
        freq_x = _floats(entry, 'freq_x', where,
                         shape=(0, input_dim + augmented))
        arrays = {key: _floats(entry, key, where) for key in (
            'amp_x_re', 'amp_x_im', 'freq_z', 'amp_z_re', 'amp_z_im')}
        for key in ('amp_x_re', 'amp_x_im'):
            if arrays[key].shape != (freq_x.shape[0],):
                raise ModelFormatError('{}{}: expected {} values'.format(
                    where, key, freq_x.shape[0]))
        for key in ('amp_z_re', 'amp_z_im'):
            if arrays[key].shape != arrays['freq_z'].shape:
                raise ModelFormatError('{}{}: expected {} values'.format(
                    where, key, arrays['freq_z'].shape[0]))
        try:
            layers.append(FourierLayer(
                freq_x,
                arrays['amp_x_re'] + 1j * arrays['amp_x_im'],
                arrays['freq_z'],
                arrays['amp_z_re'] + 1j * arrays['amp_z_im'],
                augmented))
        except ValueError as e:
            raise ModelFormatError('{}: {}'.format(where.rstrip('.'), e))
    try:
        return ResidualNet(input_dim, layers)
    except ValueError as e:
        raise ModelFormatError(e)


def save(net, path):
    with open(path, 'w') as f:
        f.write(dumps(net))


def load(path):
    with open(path) as f:
        return loads(f.read())
