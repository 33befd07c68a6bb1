import shutil
import tempfile
import unittest

import numpy as np

from deeprff.model import FourierLayer, ResidualNet
from deeprff.targets import gen_dataset


class NumericTestCase(unittest.TestCase):
    """Temporary directory, seeded generator and small datasets."""

    seed = 1234

    def setUp(self):
        super().setUp()
        self.tmpdir = tempfile.mkdtemp(prefix='deeprff')
        self.addCleanup(shutil.rmtree, self.tmpdir, ignore_errors=True)
        self.rng = np.random.default_rng(self.seed)

    def make_data(self, n=40, d=2, target='f1', a=0.5, n_test=None, **kwargs):
        return gen_dataset(n, d, target, a, self.seed, n_test, **kwargs)

    def assert_allclose(self, actual, desired, rtol=1e-10, atol=0.0):
        np.testing.assert_allclose(actual, desired, rtol=rtol, atol=atol)


def random_net(rng, L=3, K=4, d=2, augmented=False):
    """A network with standard normal frequencies and amplitudes."""
    def amplitudes():
        return rng.standard_normal(K) + 1j * rng.standard_normal(K)

    layers = [FourierLayer(rng.standard_normal((K, d)), amplitudes())]
    for _ in range(1, L):
        if augmented:
            layers.append(FourierLayer(
                rng.standard_normal((K, d + 1)), amplitudes(), augmented=True))
        else:
            layers.append(FourierLayer(
                rng.standard_normal((K, d)), amplitudes(),
                rng.standard_normal(K), amplitudes()))
    return ResidualNet(d, layers)
