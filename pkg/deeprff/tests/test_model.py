import json
import os

import numpy as np
import pytest

from deeprff.model import (
    FourierLayer, ModelFormatError, ResidualNet, block_increment, dumps,
    eval_beta, flatten_shallow, forward, forward_batch, load, loads, predict,
    save, staged_outputs)
from deeprff.testcases import NumericTestCase, random_net as make_net


def test_hand_computed_forward():
    beta = FourierLayer([[1.0]], [2 + 1j])
    block = FourierLayer([[0.0]], [0.5], [1.0], [1.0])
    net = ResidualNet(1, [beta, block])
    trace = forward(net, np.array([0.5]))
    expected_beta = 2 * np.cos(0.5) - np.sin(0.5)
    assert eval_beta(net, np.array([0.5])) == pytest.approx(expected_beta)
    np.testing.assert_allclose(trace.states, [0.0, 1.5])
    assert trace.output == pytest.approx(1.5 + expected_beta)


def test_single_layer_is_beta():
    rng = np.random.default_rng(0)
    net = make_net(rng, L=1)
    x = rng.standard_normal((5, 2))
    np.testing.assert_allclose(predict(net, x), net.layers[0].x_term(x))
    states, _ = forward_batch(net, x)
    assert states.shape == (1, 5)
    assert not np.any(states)


def test_forward_matches_batch():
    rng = np.random.default_rng(1)
    net = make_net(rng)
    x = rng.standard_normal((6, 2))
    outputs = predict(net, x)
    for row, value in zip(x, outputs):
        trace = forward(net, row)
        assert len(trace.states) == net.depth
        assert trace.states[0] == 0.0
        assert trace.output == pytest.approx(value, rel=1e-12)


def test_staged_outputs_end_with_prediction():
    rng = np.random.default_rng(2)
    net = make_net(rng)
    x = rng.standard_normal((4, 2))
    staged = staged_outputs(net, x)
    assert staged.shape == (3, 4)
    np.testing.assert_allclose(staged[0], net.layers[0].x_term(x))
    np.testing.assert_allclose(staged[-1], predict(net, x))


def test_augmented_block_reads_state_as_input():
    rng = np.random.default_rng(3)
    net = make_net(rng, L=2, augmented=True)
    x = rng.standard_normal((5, 2))
    states = rng.standard_normal(5)
    layer = net.layers[1]
    np.testing.assert_allclose(
        block_increment(layer, x, states),
        layer.x_term(np.column_stack([x, states])))


def test_flatten_shallow():
    rng = np.random.default_rng(4)
    layers = [FourierLayer(rng.standard_normal((3, 2)), rng.standard_normal(3))]
    layers.append(FourierLayer(rng.standard_normal((2, 2)),
                               rng.standard_normal(2) + 1j,
                               rng.standard_normal(2), np.zeros(2)))
    net = ResidualNet(2, layers)
    flat = flatten_shallow(net)
    assert flat.depth == 1
    assert flat.layers[0].nodes == 5
    x = rng.standard_normal((7, 2))
    np.testing.assert_allclose(predict(flat, x), predict(net, x), rtol=1e-12)
    with pytest.raises(ValueError):
        flatten_shallow(make_net(rng))


def test_parameter_vector():
    rng = np.random.default_rng(5)
    net = make_net(rng)
    vector = net.to_vector()
    assert vector.shape == (3 * (4 * 2 + 2 * 4) + 2 * (3 * 4),)
    assert net.with_vector(vector) == net
    shifted = net.with_vector(vector + 1.0)
    np.testing.assert_allclose(shifted.layers[1].freq_z,
                               net.layers[1].freq_z + 1.0)
    with pytest.raises(ValueError):
        net.with_vector(vector[:-1])


def test_layer_validation():
    with pytest.raises(ValueError):
        FourierLayer([[1.0], [2.0]], [1.0])
    with pytest.raises(ValueError):
        FourierLayer([[1.0]], [1.0], [1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        FourierLayer([[np.nan]], [1.0])
    with pytest.raises(ValueError):
        FourierLayer([[1.0, 0.0]], [1.0], [1.0], [1.0], augmented=True)


def test_net_validation():
    beta = FourierLayer([[1.0, 2.0]], [1.0])
    with pytest.raises(ValueError):
        ResidualNet(2, [])
    with pytest.raises(ValueError):
        ResidualNet(2, [FourierLayer([[1.0, 2.0]], [1.0], [1.0], [1.0])])
    with pytest.raises(ValueError):
        ResidualNet(3, [beta])
    with pytest.raises(ValueError):
        ResidualNet(2, [beta, FourierLayer([[1.0, 2.0]], [1.0],
                                           augmented=True)])
    with pytest.raises(ValueError):
        forward(ResidualNet(2, [beta]), np.zeros(3))


def test_layers_are_read_only():
    layer = FourierLayer([[1.0]], [1.0])
    with pytest.raises(ValueError):
        layer.freq_x[0, 0] = 2.0


class TestModelFiles(NumericTestCase):
    def test_round_trip(self):
        net = make_net(self.rng, augmented=True)
        assert loads(dumps(net)) == net
        path = os.path.join(self.tmpdir, 'net.json')
        save(net, path)
        assert load(path) == net

    def test_round_trip_keeps_empty_layers(self):
        net = ResidualNet(2, [FourierLayer(np.zeros((0, 2)), [])])
        assert loads(dumps(net)) == net

    def document(self):
        return json.loads(dumps(make_net(self.rng)))

    def assert_format_error(self, document, fragment):
        with pytest.raises(ModelFormatError) as info:
            loads(json.dumps(document))
        assert fragment in str(info.value)

    def test_wrong_format(self):
        document = self.document()
        document['format'] = 'other'
        self.assert_format_error(document, 'format')

    def test_wrong_version(self):
        document = self.document()
        document['version'] = 99
        self.assert_format_error(document, 'version')

    def test_missing_field(self):
        document = self.document()
        del document['layers'][2]['freq_z']
        self.assert_format_error(document, 'layers[2].freq_z')

    def test_amplitude_length(self):
        document = self.document()
        document['layers'][1]['amp_x_re'].pop()
        self.assert_format_error(document, 'layers[1].amp_x_re')

    def test_truncated_file(self):
        with pytest.raises(ModelFormatError):
            loads(dumps(make_net(self.rng))[:-20])

    def test_input_dim(self):
        document = self.document()
        document['input_dim'] = 0
        self.assert_format_error(document, 'input_dim')
