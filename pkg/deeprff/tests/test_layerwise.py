import numpy as np
import pytest

from deeprff.layerwise import (
    FREQ_Z_STREAM, layer_mse_trace, layer_seed, train_layerwise)
from deeprff.metropolis import (
    MetropolisConfig, arfm_residual_train, arfm_train)
from deeprff.model import predict
from deeprff.testcases import NumericTestCase


def test_layer_seed_streams_differ():
    assert layer_seed(3, 1, 0) != layer_seed(3, 1, 1)
    assert layer_seed(3, 1) != layer_seed(4, 1)


class TestLayerwise(NumericTestCase):
    cfg = MetropolisConfig(1, iterations=6, step=0.6, gamma=3.0, seed=21)

    def test_one_layer_is_plain_sampler(self):
        train, _ = self.make_data(n=40, d=2)
        net = train_layerwise(train, 1, 4, self.cfg)
        assert net.depth == 1
        expected = arfm_train(
            train, self.cfg.replace(nodes=4, seed=layer_seed(21, 0)))
        assert net.layers[0] == expected

    def test_first_block_starts_from_zero_state(self):
        train, _ = self.make_data(n=40, d=2)
        net = train_layerwise(train, 2, 3, self.cfg)
        residuals = train.targets - net.layers[0].x_term(train.inputs)
        expected = arfm_residual_train(
            train, residuals, np.zeros(40),
            self.cfg.replace(nodes=3, seed=layer_seed(21, 1)),
            layer_seed(21, 1, FREQ_Z_STREAM))
        assert net.layers[1] == expected

    def test_argument_checks(self):
        train, _ = self.make_data()
        with pytest.raises(ValueError):
            train_layerwise(train, 0, 4, self.cfg)
        with pytest.raises(ValueError):
            train_layerwise(train, 2, 0, self.cfg)

    def test_zero_targets_give_zero_network(self):
        train, _ = self.make_data(n=20, d=2)
        zero = train.__class__(train.inputs, np.zeros(20), train.norm_stats)
        net = train_layerwise(zero, 3, 2, self.cfg)
        self.assert_allclose(predict(net, zero.inputs), 0.0, atol=1e-14)

    def test_mse_never_increases_without_regularization(self):
        train, _ = self.make_data(n=60, d=2)
        cfg = self.cfg.replace(tikhonov=0.0)
        net = train_layerwise(train, 4, 3, cfg)
        trace = layer_mse_trace(net, train)
        assert trace.shape == (4,)
        assert np.all(np.diff(trace) <= 1e-10 * trace[:-1])

    def test_prefix_of_deeper_network(self):
        train, _ = self.make_data(n=40, d=2)
        shallow = train_layerwise(train, 2, 3, self.cfg)
        deep = train_layerwise(train, 3, 3, self.cfg)
        assert deep.layers[:2] == shallow.layers

    def test_trace_ends_at_training_error(self):
        train, _ = self.make_data(n=40, d=2)
        net = train_layerwise(train, 3, 3, self.cfg)
        error = predict(net, train.inputs) - train.targets
        self.assert_allclose(layer_mse_trace(net, train)[-1],
                             np.mean(error ** 2))

    def test_augmented_blocks(self):
        train, _ = self.make_data(n=40, d=2)
        net = train_layerwise(train, 3, 3, self.cfg, augmented=True)
        assert [layer.augmented for layer in net.layers] == \
            [False, True, True]
        assert net.layers[1].freq_x.shape == (3, 3)
        trace = layer_mse_trace(net, train)
        assert np.all(np.isfinite(trace))
